import random

import pytest

from memforge.errors import ModelError
from memforge.model import (
    MAX_COUNT,
    Configuration,
    Create,
    Dissolve,
    Divide,
    Membrane,
    Multiset,
    PSystem,
    Rewrite,
    SendIn,
    SendOut,
    build,
    canonical_key,
    classify_rule,
    elementary_guards,
    lop_signature,
    ms,
    op_allowed,
)


def test_multiset_basics():
    m = ms("b", "a", "b")
    assert m.count("b") == 2 and m.count("z") == 0
    assert len(m) == 3
    assert m.items() == (("a", 1), ("b", 2))
    assert list(m) == ["a", "b", "b"]
    assert Multiset({"a": 1, "b": 2}) == m
    assert Multiset({"a": 0}) == Multiset()


def test_multiset_removal_of_absent_is_error():
    with pytest.raises(ModelError):
        ms("a") - ms("b")
    with pytest.raises(ModelError):
        ms("a") - ms("a", "a")


def test_multiset_overflow():
    big = Multiset({"a": MAX_COUNT})
    with pytest.raises(OverflowError):
        big + ms("a")


def test_multiset_algebra_random():
    rng = random.Random(1)
    for _ in range(200):
        x, y, z = (Multiset(rng.choice("abc") for _ in range(rng.randint(0, 5))) for _ in range(3))
        assert x + y == y + x
        assert (x + y) + z == x + (y + z)
        assert (x + y) - y == x
        assert x <= x + y


def test_configuration_invariants():
    with pytest.raises(ModelError):
        Configuration(Membrane(0, "1"))
    with pytest.raises(ModelError):
        Configuration(Membrane(0, "0", children=(Membrane(0, "1"),)))
    with pytest.raises(ModelError):
        Configuration(Membrane(0, "0", children=(Membrane(1, "0"),)))
    with pytest.raises(ModelError):
        Configuration(Membrane(0, "0"), environment_log=((2, ms("a")), (2, ms("b"))))


def test_rule_skin_restrictions():
    for bad in (
        lambda: Dissolve("0", "a"),
        lambda: Divide("0", "a", "1", "b", "2", "c"),
        lambda: Create("1", "a", "0"),
        lambda: SendIn("a", "0", "a", "0"),
        lambda: SendOut("0", "a", "a", "1"),
    ):
        with pytest.raises(ModelError):
            bad()


def test_classify_rule():
    assert classify_rule(SendOut("i", "a", "b", "i")) == "b"
    assert classify_rule(SendOut("i", "a", "b", "j")) == "b'"
    assert classify_rule(SendIn("Y_1", "A", "Y'_1", "a")) == "c'"
    assert classify_rule(SendIn("a", "1", "a", "1")) == "c"
    assert classify_rule(Dissolve("3", "a_1")) == "g*"
    assert classify_rule(Dissolve("i", "a", ms("a"))) == "g"
    assert classify_rule(Dissolve("i", "a", ms("a")), elementary_only=True) == "g'"
    assert classify_rule(Create("0", "1'", "1")) == "d*"
    assert classify_rule(Create("0", "x", "1", ms("y"))) == "d"
    assert classify_rule(Rewrite("0", "a")) == "a"
    assert classify_rule(Divide("1", "a", "2", "b", "3", "c"), elementary_only=True) == "e'"


def test_op_licensing():
    assert op_allowed("g", ["g'"])
    assert op_allowed("d", ["d*"])
    assert not op_allowed("d*", ["d"])
    assert not op_allowed("c'", ["c"])
    assert op_allowed("c", ["c'"])
    assert elementary_guards(["g'", "g*", "a"]) == {"g"}
    assert elementary_guards(["g", "g'"]) == set()


def test_canonical_key_ignores_sibling_order_and_ids():
    a = build(("0", ("1", "a", "b"), ("2",)))
    b = Configuration(Membrane(7, "0", children=(Membrane(3, "2"), Membrane(9, "1", ms("b", "a")))))
    assert canonical_key(a) == canonical_key(b)
    assert canonical_key(build(("0", "a"))) != canonical_key(build(("0", "b")))
    assert canonical_key(build(("0",))) == canonical_key(build(("0",)))


def _system(init, rules=(), **kw):
    objects = {x for m in init.membranes() for x in m.contents}
    labels = {m.label for m in init.membranes()} - {"0"}
    return PSystem(frozenset(objects | kw.pop("objects", set())), frozenset(labels | kw.pop("labels", set())),
                   frozenset(kw.pop("ops", {"a"})), init, tuple(rules), frozenset(kw.pop("output", set())), **kw)


def test_lop_signature():
    assert lop_signature(_system(build(("0", "x")))) == (1, 1)
    s = _system(build(("0", ("4", "t"), "l")), traveller="t")
    assert lop_signature(s) == (2, 2)


def test_psystem_validation():
    with pytest.raises(ModelError):
        _system(build(("0", "x")), [Rewrite("0", "x", ms("y"))])
    with pytest.raises(ModelError):
        _system(build(("0", "t", "t")), traveller="t")
    with pytest.raises(ModelError):
        _system(build(("0",)), labels={"0"})
