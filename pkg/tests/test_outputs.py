import pytest

from memforge.engine import Crossing, StepEvents
from memforge.errors import IncompatibleMode, MultipleTravellerCrossings
from memforge.model import build, ms
from memforge.outputs import (
    external_strings,
    permutation_count,
    render,
    trace_string,
    traversal_strings,
    word,
)


def texts(s):
    return sorted(render(w) for w in s.strings)


def test_chain_lab_and_obj():
    c = build(("0", ("a", "a", ("b", "b", ("$",)))))
    assert texts(traversal_strings(c, "lab", {"a", "b"})) == ["ab"]
    assert texts(traversal_strings(c, "obj", {"a", "b"})) == ["ab"]


def test_bare_skin_is_empty_word():
    assert texts(traversal_strings(build(("0",)), "lab", {"a", "0"})) == [""]
    assert texts(traversal_strings(build(("0",)), "obj", set())) == [""]


def test_obj_permutations_and_projection():
    assert texts(traversal_strings(build(("0", "a", "b")), "obj", {"a", "b"})) == ["ab", "ba"]
    c = build(("0", ("a", "a", ("b", "b", "f", ("$",)))))
    assert texts(traversal_strings(c, "obj", {"a", "b"})) == ["ab"]


def test_sibling_orders():
    c = build(("0", ("a",), ("b",)))
    assert texts(traversal_strings(c, "lab", {"a", "b"})) == ["ab", "ba"]


def test_traversal_cap():
    c = build(("0", "a", "b", "c", "d"))
    got = traversal_strings(c, "obj", "abcd", cap=5)
    assert got.cap_hit and len(got) == 5


def test_traversal_needs_tree_mode():
    with pytest.raises(IncompatibleMode):
        traversal_strings(build(("0",)), "ext", set())


def _cross(label, obj="t"):
    return StepEvents(crossings=(Crossing(obj, 1, label, "in"),))


def test_trace_string():
    assert trace_string([_cross("x1"), _cross("x2")], "t", {"x1", "x2"}) == ("x1", "x2")
    assert trace_string([StepEvents()], "t", {"a"}) == ()
    assert trace_string([_cross("4"), _cross("a"), _cross("b", obj="u")], "t", {"a"}) == ("a",)


def test_trace_string_rejects_double_crossing():
    both = StepEvents(crossings=(Crossing("t", 1, "a", "in"), Crossing("t", 2, "b", "out")))
    with pytest.raises(MultipleTravellerCrossings):
        trace_string([both], "t", {"a", "b"})


def test_external_strings():
    log = [ms("a"), ms(), ms("b", "c")]
    assert texts(external_strings(log, "abc")) == ["abc", "acb"]
    assert texts(external_strings([], "abc")) == [""]
    assert texts(external_strings([(1, ms("a")), (3, ms("b"))], "ab")) == ["ab"]


def test_external_count_is_product_of_permutations():
    log = [ms("a", "b"), ms("a", "a", "c")]
    assert len(external_strings(log, "abc")) == permutation_count(log[0]) * permutation_count(log[1]) == 6


def test_render_and_word():
    assert render(("a", "b")) == "ab"
    assert render(("x1", "x2")) == "x1 x2"
    assert word("ab") == ("a", "b") and word("x1 x2") == ("x1", "x2")
    assert render(()) == ""
