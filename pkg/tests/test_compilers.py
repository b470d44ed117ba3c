import dataclasses
import warnings

import pytest

from memforge.compilers import MG_OPS, RM_OPS, CompileWarning, GadgetTag, Namer, compile_mg, compile_rm
from memforge.engine import step_successors
from memforge.errors import CompileError, NeedsTwoRegisters, TracesUnsupported
from memforge.explorer import Limits, default_options, explore
from memforge.grammars import parse_mg
from memforge.machines import parse_rm
from memforge.model import build, canonical_key
from memforge.oracles import mg_enumerate, rm_enumerate
from memforge.psys import validate_psystem

RM_MODES = ("lab", "obj", "ext", "traces")
MG_MODES = ("lab", "obj", "ext")


def rm(fixtures, name):
    return parse_rm((fixtures / name).read_text())


def mg(fixtures, name):
    return parse_mg((fixtures / name).read_text())


def only_successor(system, config):
    succ = step_successors(config, system.rules, default_options(system))
    assert len(succ) == 1
    return succ[0][0]


def drop(system, tag):
    keep = [(r, t) for r, t in zip(system.rules, system.tags) if t != tag]
    return dataclasses.replace(system, rules=tuple(r for r, _ in keep), tags=tuple(t for _, t in keep))


def test_bootstrap(fixtures):
    s = compile_rm(rm(fixtures, "M_ab.rm"), "lab")
    assert canonical_key(s.init) == canonical_key(build(("0", "l0'")))
    c = only_successor(s, only_successor(s, s.init))
    assert canonical_key(c) == canonical_key(build(("0", "l0", ("1",), ("2",), ("$",))))


def test_traces_init_carries_traveller(fixtures):
    s = compile_rm(rm(fixtures, "M_ab.rm"), "traces")
    assert s.traveller == "t"
    assert canonical_key(s.init) == canonical_key(build(("0", "l0'", ("4", "t"))))


def test_mg_init(fixtures):
    s = compile_mg(mg(fixtures, "G_ab.mg"), "lab")
    c = s.init
    for _ in range(4):
        c = only_successor(s, c)
    assert canonical_key(c) == canonical_key(build(("0", "X", ("A", ("$",)))))


@pytest.mark.parametrize("mode", RM_MODES)
def test_rm_signature(fixtures, mode):
    s = compile_rm(rm(fixtures, "M_anbn.rm"), mode)
    report = validate_psystem(s, RM_OPS)
    assert report.ok
    assert report.op_codes_used <= RM_OPS
    assert report.lop[0] == (2 if mode == "traces" else 1)


@pytest.mark.parametrize("mode", MG_MODES)
def test_mg_signature(fixtures, mode):
    s = compile_mg(mg(fixtures, "G_ac.mg"), mode)
    report = validate_psystem(s, MG_OPS)
    assert report.ok and report.op_codes_used <= MG_OPS and report.lop[0] == 1


def test_every_rule_is_tagged(fixtures):
    names = {t.value for t in GadgetTag}
    for s in (compile_rm(rm(fixtures, "M_anbn.rm"), "ext"), compile_mg(mg(fixtures, "G_ac.mg"), "ext")):
        assert len(s.tags) == len(s.rules)
        assert set(s.tags) <= names


def test_rm_needs_two_registers():
    m = parse_rm("registers: 3\noutput: a\nstart: l0\nhalt: lh\nl0: WRITE a lh\nlh: HALT\n")
    with pytest.raises(NeedsTwoRegisters):
        compile_rm(m, "lab")


def test_mg_has_no_traces(fixtures):
    with pytest.raises(TracesUnsupported):
        compile_mg(mg(fixtures, "G_ab.mg"), "traces")


def test_unknown_mode(fixtures):
    with pytest.raises(CompileError):
        compile_rm(rm(fixtures, "M_ab.rm"), "xyz")


def test_reserved_label_renamed():
    m = parse_rm("registers: 2\noutput: 1 $\nstart: l0\nhalt: lh\nl0: WRITE 1 l1\nl1: WRITE $ lh\nlh: HALT\n")
    with pytest.warns(CompileWarning, match="renamed"):
        s = compile_rm(m, "obj")
    assert "1" in s.labels and "1~1" in s.labels and "$~1" in s.labels
    assert validate_psystem(s, RM_OPS).ok
    got = explore(s, "obj", Limits(max_string_len=4))
    assert sorted(map("".join, got.strings.strings)) == ["1$"]


def test_no_warning_without_collision(fixtures):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compile_rm(rm(fixtures, "M_ab.rm"), "ext")
        compile_mg(mg(fixtures, "G_ab.mg"), "ext")


def test_namer():
    n = Namer({"f"})
    assert n("f") == "f~1" and n("f") == "f~2"
    assert n("g", key=1) == "g" and n("g", key=1) == "g" and n("g", key=2) == "g~1"


@pytest.mark.parametrize("name", ["M_ab.rm", "M_anbn.rm", "M_branch.rm"])
@pytest.mark.parametrize("mode", RM_MODES)
def test_rm_matches_oracle(fixtures, name, mode):
    m = rm(fixtures, name)
    got = explore(compile_rm(m, mode), mode, Limits(max_string_len=6))
    assert not got.truncated
    assert got.strings.strings == rm_enumerate(m, 6).strings


@pytest.mark.parametrize("name", ["G_ab.mg", "G_ac.mg"])
@pytest.mark.parametrize("mode", MG_MODES)
def test_mg_matches_oracle(fixtures, name, mode):
    g = mg(fixtures, name)
    got = explore(compile_mg(g, mode), mode, Limits(max_string_len=6))
    assert not got.truncated
    assert got.strings.strings == mg_enumerate(g, 6).strings


def test_stuck_control_symbol_diverges():
    g = parse_mg("N1: X W\nN2: A\nT: a\ninit: S -> X A\nm1: X -> W , A -> a\nm2: X -> Z , A -> a\nterminal: Z -> lambda\n")
    got = explore(compile_mg(g, "lab"), "lab", Limits(max_string_len=4))
    assert sorted(map("".join, got.strings.strings)) == ["a"]
    assert got.stats.cycles > 0


@pytest.mark.parametrize("mode", ["ext"])
def test_ext_emissions_are_singletons(fixtures, mode):
    for s in (compile_rm(rm(fixtures, "M_anbn.rm"), mode), compile_mg(mg(fixtures, "G_ab.mg"), mode)):
        frontier, seen, steps = [s.init], set(), 0
        opts = default_options(s)
        while frontier and steps < 200:
            nxt = []
            for c in frontier:
                for succ, ev in step_successors(c, s.rules, opts):
                    assert sum(n for _, n in ev.emissions.items()) <= 1
                    key = canonical_key(succ)
                    if key not in seen and len(succ.environment_log) <= 6:
                        seen.add(key)
                        nxt.append(succ)
            frontier, steps = nxt, steps + 1


# Gadgets whose removal must destroy the language; the remaining tags are not
# needed on successful computations in that mode (labels already spell the
# output in lab mode; the trap only fires on failing branches).
REQUIRED = {
    ("M_anbn.rm", "lab"): {"Bootstrap", "Add", "Sub", "Write"},
    ("M_anbn.rm", "obj"): {"Bootstrap", "Add", "Sub", "Write", "Cleanup", "Deposit"},
    ("M_anbn.rm", "ext"): {"Bootstrap", "Add", "Sub", "Write", "Cleanup", "Deposit", "ExtShuttle"},
    ("M_anbn.rm", "traces"): {"Bootstrap", "Add", "Sub", "Write", "Cleanup", "TravellerWalk"},
    ("G_ab.mg", "lab"): {"MgInit", "MgDescent", "MgInsert2"},
    ("G_ab.mg", "obj"): {"MgInit", "MgDescent", "MgInsert2", "MgSweep"},
    ("G_ab.mg", "ext"): {"MgInit", "MgDescent", "MgInsert2", "MgSweep"},
}


@pytest.mark.parametrize("name, mode", sorted(REQUIRED))
def test_gadget_isolation(fixtures, name, mode):
    if name.endswith(".rm"):
        s = compile_rm(rm(fixtures, name), mode)
    else:
        s = compile_mg(mg(fixtures, name), mode)
    full = explore(s, mode, Limits(max_string_len=6)).strings.strings
    assert full
    for tag in sorted(set(s.tags)):
        cut = explore(drop(s, tag), mode, Limits(max_string_len=6))
        assert not cut.truncated
        if tag in REQUIRED[name, mode]:
            assert not (cut.strings.strings & full), tag
        else:
            assert cut.strings.strings == full, tag
