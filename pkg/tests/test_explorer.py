import pytest

from memforge.compilers import compile_rm
from memforge.engine import step_successors
from memforge.errors import IncompatibleMode, ModelError
from memforge.explorer import Limits, OutputBound, default_options, explore, random_run
from memforge.machines import parse_rm
from memforge.model import PSystem, Rewrite, SendIn, Create, build, canonical_key, ms, rule_labels, rule_objects
from memforge.outputs import EXT, LAB, OBJ, TRACES, render

from corpus import corpus


def texts(sample):
    return sorted(render(w) for w in sample.strings.strings)


def system(init, rules, output=(), **kw):
    objects = {x for m in init.membranes() for x in m.contents}
    labels = {m.label for m in init.membranes()}
    for r in rules:
        objects |= rule_objects(r)
        labels |= rule_labels(r)
    labels.discard("0")
    return PSystem(frozenset(objects), frozenset(labels), frozenset({"a", "b", "c", "c'", "d", "d*"}),
                   init, tuple(rules), frozenset(output), **kw)


TRAP = system(build(("0", ("#", "#"))), [Rewrite("#", "#", ms("#"))], output={"#"})


@pytest.fixture
def m_ab(fixtures):
    return parse_rm((fixtures / "M_ab.rm").read_text())


@pytest.mark.parametrize("mode", [LAB, OBJ, EXT, TRACES])
def test_compiled_m_ab(m_ab, mode):
    sample = explore(compile_rm(m_ab, mode), mode, Limits(max_steps=200))
    assert texts(sample) == ["ab"]
    assert not sample.truncated and sample.complete_up_to == 8


def test_trap_contributes_nothing():
    sample = explore(TRAP, LAB)
    assert texts(sample) == []
    assert sample.stats.cycles >= 1 and not sample.truncated


def test_empty_system():
    sample = explore(system(build(("0",)), []), LAB)
    assert texts(sample) == [""]
    assert sample.stats.halting == 1


def test_traces_needs_traveller():
    with pytest.raises(IncompatibleMode):
        explore(TRAP, TRACES)
    with pytest.raises(IncompatibleMode):
        explore(TRAP, "bogus")


def test_limits_validation():
    with pytest.raises(ModelError):
        Limits(max_steps=0)


def test_limit_breach_marks_truncation():
    grow = system(build(("0", "a")), [Rewrite("0", "a", ms("a", "b"))], output={"b"})
    sample = explore(grow, OBJ, Limits(max_steps=5))
    assert sample.truncated and sample.complete_up_to == 0
    assert sample.stats.pruned > 0


def test_length_pruning_is_not_truncation():
    # every step adds a witness membrane and the computation never halts
    grow = system(build(("0", "a")), [Rewrite("0", "a", ms("a", "b")), Create("0", "b", "x", ms())], output={"x"})
    grow = PSystem(**{**vars(grow), "witness": frozenset({"x"})})
    sample = explore(grow, LAB, Limits(max_string_len=3))
    assert not sample.truncated and texts(sample) == []
    assert sample.stats.length_pruned >= 1


def test_output_bound_stable_objects():
    s = system(build(("0", "a", "b")), [Rewrite("0", "a", ms("a"))], output={"a", "b"})
    bound = OutputBound(s, OBJ)
    assert bound.objects == {"b"}
    assert bound.lower(s.init, 0) == 1


def test_record_paths_replay():
    s = system(build(("0", "a")), [Rewrite("0", "a", ms("b")), Rewrite("0", "a", ms("c"))], output={"b", "c"})
    sample = explore(s, OBJ, record_paths=True)
    assert texts(sample) == ["b", "c"]
    for path in sample.paths.values():
        for here, nxt in zip(path, path[1:]):
            assert canonical_key(nxt) in {canonical_key(c) for c, _ in step_successors(here, s.rules)}


def test_dedup_does_not_change_language():
    for config, rules, guards in corpus(3, 40):
        if guards:
            continue
        s = system(config, rules, output={"a", "b", "1"})
        small = Limits(max_steps=4, max_configs=3000, max_membranes=12, max_objects=30)
        for mode in (LAB, OBJ):
            with_dedup = explore(s, mode, small)
            without = explore(s, mode, small, dedup=False)
            assert with_dedup.strings.strings <= without.strings.strings or with_dedup.truncated
            if not with_dedup.truncated and not without.truncated:
                assert with_dedup.strings == without.strings


def test_monotone_in_limits():
    s = system(build(("0", "a")), [Rewrite("0", "a", ms("a", "b")), Rewrite("0", "a", ms("b"))], output={"b"})
    small = explore(s, OBJ, Limits(max_steps=3, max_string_len=8))
    big = explore(s, OBJ, Limits(max_steps=6, max_string_len=8))
    assert small.strings.strings <= big.strings.strings


def test_random_run(m_ab):
    s = compile_rm(m_ab, EXT)
    for seed in range(3):
        rep = random_run(s, EXT, seed)
        assert rep.halted and sorted(map(render, rep.outputs.strings)) == ["ab"]
    a, b = random_run(s, EXT, 7), random_run(s, EXT, 7)
    assert a.events == b.events and a.final == b.final


def test_random_run_trap():
    rep = random_run(TRAP, LAB, 0, Limits(max_steps=25))
    assert not rep.halted and rep.steps == 25 and len(rep.outputs) == 0


def test_default_options_installs_guards():
    s = PSystem(frozenset(), frozenset(), frozenset({"g'", "a"}), build(("0",)), (), frozenset())
    assert default_options(s).elementary_only == {"g"}


def test_send_in_and_rewrite_race():
    s = system(build(("0", "a", ("1",))), [SendIn("a", "1", "b", "1"), Rewrite("0", "a", ms("c"))], output={"b", "c"})
    assert texts(explore(s, OBJ)) == ["b", "c"]
