"""Value types for P systems with active membranes.

Everything here is immutable once built. Membrane trees carry integer ids so
that engine events can point at concrete membranes, but equality of
configurations goes through :func:`canonical_key`, which forgets ids and
sibling order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

from .errors import ModelError

SKIN = "0"
MAX_COUNT = 2**63 - 1


class Multiset:
    """Finite multiset of object names, stored as sorted ``(name, count)`` pairs."""

    __slots__ = ("_items", "_hash")

    def __init__(self, items: Iterable[str] | Mapping[str, int] = ()):
        counts: dict[str, int] = {}
        if isinstance(items, Mapping):
            for name, n in items.items():
                if n < 0:
                    raise ModelError(f"negative count for {name!r}")
                if n:
                    counts[name] = n
        else:
            for name in items:
                counts[name] = counts.get(name, 0) + 1
        for name, n in counts.items():
            if not name:
                raise ModelError("object names must be non-empty")
            if n > MAX_COUNT:
                raise OverflowError(f"count of {name!r} exceeds {MAX_COUNT}")
        self._items: tuple[tuple[str, int], ...] = tuple(sorted(counts.items()))
        self._hash = hash(self._items)

    @classmethod
    def _from_sorted(cls, items: tuple[tuple[str, int], ...]) -> "Multiset":
        ms = cls.__new__(cls)
        ms._items = items
        ms._hash = hash(items)
        return ms

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def distinct(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self._items)

    def count(self, name: str) -> int:
        for key, n in self._items:
            if key == name:
                return n
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self._items)

    def __contains__(self, name: object) -> bool:
        return any(key == name for key, _ in self._items)

    def __iter__(self) -> Iterator[str]:
        for name, n in self._items:
            for _ in range(n):
                yield name

    def __len__(self) -> int:
        return sum(n for _, n in self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __add__(self, other: "Multiset") -> "Multiset":
        if not other._items:
            return self
        if not self._items:
            return other
        counts = dict(self._items)
        for name, n in other._items:
            total = counts.get(name, 0) + n
            if total > MAX_COUNT:
                raise OverflowError(f"count of {name!r} exceeds {MAX_COUNT}")
            counts[name] = total
        return Multiset._from_sorted(tuple(sorted(counts.items())))

    def __sub__(self, other: "Multiset") -> "Multiset":
        if not other._items:
            return self
        counts = dict(self._items)
        for name, n in other._items:
            have = counts.get(name, 0)
            if have < n:
                raise ModelError(f"cannot remove {n} x {name!r}: only {have} present")
            if have == n:
                del counts[name]
            else:
                counts[name] = have - n
        return Multiset._from_sorted(tuple(sorted(counts.items())))

    def __le__(self, other: "Multiset") -> bool:
        return all(other.count(name) >= n for name, n in self._items)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._items == other._items
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "{" + " ".join(self) + "}"


EMPTY = Multiset()


def ms(*names: str) -> Multiset:
    """Shorthand: ``ms("a", "a", "b")``."""
    return Multiset(names)


@dataclass(frozen=True, eq=False)
class Membrane:
    id: int
    label: str
    contents: Multiset = EMPTY
    children: tuple["Membrane", ...] = ()

    @property
    def is_elementary(self) -> bool:
        return not self.children

    @cached_property
    def key(self) -> tuple:
        return (self.label, self.contents.items(), tuple(sorted(c.key for c in self.children)))

    def walk(self) -> Iterator["Membrane"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Membrane):
            return NotImplemented
        return (
            self.id == other.id
            and self.label == other.label
            and self.contents == other.contents
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return hash((self.id, self.label, self.contents, self.children))

    def __str__(self) -> str:
        parts = [self.label, *self.contents, *(str(c) for c in self.children)]
        return "[" + " ".join(parts) + "]"


@dataclass(frozen=True)
class Configuration:
    root: Membrane
    step_index: int = 0
    environment_log: tuple[tuple[int, Multiset], ...] = ()

    def __post_init__(self):
        if self.root.label != SKIN:
            raise ModelError(f"root membrane must be labelled {SKIN}, got {self.root.label!r}")
        ids = [m.id for m in self.root.walk()]
        if len(ids) != len(set(ids)):
            raise ModelError("membrane ids must be unique")
        for m in self.root.walk():
            if m is not self.root and m.label == SKIN:
                raise ModelError("only the root may carry the skin label")
        steps = [s for s, _ in self.environment_log]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ModelError("environment log step indices must be strictly increasing")

    def membranes(self) -> Iterator[Membrane]:
        return self.root.walk()

    def membrane_count(self) -> int:
        return sum(1 for _ in self.root.walk())

    def object_count(self) -> int:
        return sum(len(m.contents) for m in self.root.walk())

    def max_id(self) -> int:
        return max(m.id for m in self.root.walk())

    def __str__(self) -> str:
        return str(self.root)


def canonical_key(config: Configuration | Membrane) -> tuple:
    """Key equal for two trees iff they agree up to sibling order and ids."""
    root = config.root if isinstance(config, Configuration) else config
    return root.key


def build(spec: tuple, step_index: int = 0) -> Configuration:
    """Build a configuration from a nested tuple ``(label, item, ...)``.

    Items are object names (str) or nested tuples for child membranes.
    Ids are assigned in preorder starting at 0.
    """
    counter = iter(range(1 << 62))

    def go(node: tuple) -> Membrane:
        label, *items = node
        mid = next(counter)
        objs = [x for x in items if isinstance(x, str)]
        kids = tuple(go(x) for x in items if not isinstance(x, str))
        return Membrane(mid, label, Multiset(objs), kids)

    return Configuration(go(spec), step_index)


# -- rules -----------------------------------------------------------------


def _check_nonskin(*labels: str) -> None:
    for lab in labels:
        if lab == SKIN:
            raise ModelError("this rule form may not involve the skin label")


@dataclass(frozen=True)
class Rewrite:
    """``[i a -> v]``: type (a)."""

    i: str
    a: str
    v: Multiset = EMPTY


@dataclass(frozen=True)
class SendOut:
    """``[i a] -> b [j]``: type (b), (b') when j differs from i."""

    i: str
    a: str
    b: str
    j: str

    def __post_init__(self):
        if (self.i == SKIN) != (self.j == SKIN):
            raise ModelError("the skin keeps its label")


@dataclass(frozen=True)
class SendIn:
    """``a [i] -> [j b]``: type (c), (c') when j differs from i."""

    a: str
    i: str
    b: str
    j: str

    def __post_init__(self):
        _check_nonskin(self.i, self.j)


@dataclass(frozen=True)
class Create:
    """``[i a -> [j v]]``: type (d), (d*) when v is not a single object."""

    i: str
    a: str
    j: str
    v: Multiset = EMPTY

    def __post_init__(self):
        _check_nonskin(self.j)


@dataclass(frozen=True)
class Divide:
    """``[i a] -> [k b] [j c]``: type (e)."""

    i: str
    a: str
    k: str
    b: str
    j: str
    c: str

    def __post_init__(self):
        _check_nonskin(self.i, self.k, self.j)


@dataclass(frozen=True)
class Duplicate:
    """``[i a] -> [k b [j c]]``: type (f)."""

    i: str
    a: str
    k: str
    b: str
    j: str
    c: str

    def __post_init__(self):
        _check_nonskin(self.i, self.k, self.j)


@dataclass(frozen=True)
class Dissolve:
    """``[i a] -> v``: type (g), (g*) when v differs from {a}."""

    i: str
    a: str
    v: Multiset = EMPTY

    def __post_init__(self):
        _check_nonskin(self.i)


Rule = Union[Rewrite, SendOut, SendIn, Create, Divide, Duplicate, Dissolve]
OBJECT_RULES = (Rewrite, SendOut, SendIn, Create)
STRUCTURAL_RULES = (Divide, Duplicate, Dissolve)


def rule_objects(rule: Rule) -> set[str]:
    """Every object name a rule mentions."""
    names = {rule.a}
    if isinstance(rule, (SendOut, SendIn)):
        names.add(rule.b)
    elif isinstance(rule, (Divide, Duplicate)):
        names.update((rule.b, rule.c))
    elif isinstance(rule, (Rewrite, Create, Dissolve)):
        names.update(rule.v.distinct())
    return names


def rule_labels(rule: Rule) -> set[str]:
    if isinstance(rule, (Rewrite, Dissolve)):
        return {rule.i}
    if isinstance(rule, (SendOut, SendIn, Create)):
        return {rule.i, rule.j}
    return {rule.i, rule.k, rule.j}


class OpCode(str, enum.Enum):
    a = "a"
    b = "b"
    b_ = "b'"
    c = "c"
    c_ = "c'"
    d = "d"
    d_star = "d*"
    e = "e"
    e_ = "e'"
    f = "f"
    f_ = "f'"
    g = "g"
    g_ = "g'"
    g_star = "g*"

    def __str__(self) -> str:
        return self.value


OP_ORDER = [op.value for op in OpCode]


def parse_ops(tokens: Iterable[str]) -> frozenset[str]:
    ops = frozenset(tokens)
    unknown = ops - set(OP_ORDER)
    if unknown:
        raise ModelError(f"unknown op codes: {sorted(unknown)}")
    return ops


def format_ops(ops: Iterable[str]) -> str:
    return " ".join(sorted(set(ops), key=OP_ORDER.index))


def classify_rule(rule: Rule, elementary_only: bool = False) -> str:
    """Most specific op code for ``rule``.

    ``elementary_only`` marks structural rules restricted to elementary
    membranes, which yields the primed codes.
    """
    if isinstance(rule, Rewrite):
        return "a"
    if isinstance(rule, SendOut):
        return "b" if rule.i == rule.j else "b'"
    if isinstance(rule, SendIn):
        return "c" if rule.i == rule.j else "c'"
    if isinstance(rule, Create):
        return "d" if len(rule.v) == 1 else "d*"
    if isinstance(rule, Dissolve):
        if rule.v != Multiset([rule.a]):
            return "g*"
        return "g'" if elementary_only else "g"
    if isinstance(rule, Divide):
        return "e'" if elementary_only else "e"
    if isinstance(rule, Duplicate):
        return "f'" if elementary_only else "f"
    raise TypeError(f"not a rule: {rule!r}")


# op -> the ops whose declaration also licenses it
_LICENSED_BY = {
    "a": {"a"},
    "b": {"b", "b'"},
    "b'": {"b'"},
    "c": {"c", "c'"},
    "c'": {"c'"},
    "d": {"d", "d*"},
    "d*": {"d*"},
    "e": {"e", "e'"},
    "e'": {"e", "e'"},
    "f": {"f", "f'"},
    "f'": {"f", "f'"},
    "g": {"g", "g'"},
    "g'": {"g", "g'"},
    "g*": {"g*"},
}


def op_allowed(code: str, declared: Iterable[str]) -> bool:
    """Whether a rule of ``code`` is admissible under ``declared``.

    An unprimed structural code is admitted by its primed declaration; the
    restriction is then enforced at run time by the engine's elementary guard.
    """
    return bool(_LICENSED_BY[code] & set(declared))


def elementary_guards(ops: Iterable[str]) -> frozenset[str]:
    """Structural rule families ('e', 'f', 'g') restricted to elementary membranes."""
    ops = set(ops)
    return frozenset(x for x in "efg" if f"{x}'" in ops and x not in ops)


_GUARD_OF = {Divide: "e", Duplicate: "f", Dissolve: "g"}


def guard_family(rule: Rule) -> str | None:
    return _GUARD_OF.get(type(rule))


@dataclass(frozen=True)
class PSystem:
    objects: frozenset[str]
    labels: frozenset[str]
    ops: frozenset[str]
    init: Configuration
    rules: tuple[Rule, ...]
    output: frozenset[str]
    traveller: str | None = None
    # Labels whose membranes each contribute at least one output symbol to
    # every halting continuation; lets the explorer bound output length.
    witness: frozenset[str] = frozenset()
    tags: tuple[str | None, ...] = ()
    positions: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if SKIN in self.labels:
            raise ModelError("the skin label 0 is not a member of K")
        allowed_labels = self.labels | {SKIN}
        for m in self.init.membranes():
            if m.label not in allowed_labels:
                raise ModelError(f"undeclared label {m.label!r} in init")
            for name in m.contents.distinct():
                if name not in self.objects:
                    raise ModelError(f"undeclared object {name!r} in init")
        for rule in self.rules:
            for lab in rule_labels(rule):
                if lab not in allowed_labels:
                    raise ModelError(f"undeclared label {lab!r} in rule {rule}")
            for name in rule_objects(rule):
                if name not in self.objects:
                    raise ModelError(f"undeclared object {name!r} in rule {rule}")
        if self.traveller is not None:
            if self.traveller not in self.objects:
                raise ModelError(f"traveller {self.traveller!r} is not an object")
            seen = sum(m.contents.count(self.traveller) for m in self.init.membranes())
            if seen != 1:
                raise ModelError(f"traveller must occur exactly once in init, found {seen}")
        if self.tags and len(self.tags) != len(self.rules):
            raise ModelError("tags must align with rules")
        unknown = set(self.ops) - set(OP_ORDER)
        if unknown:
            raise ModelError(f"unknown op codes: {sorted(unknown)}")

    def guards(self) -> frozenset[str]:
        return elementary_guards(self.ops)

    def codes_used(self) -> frozenset[str]:
        guards = self.guards()
        return frozenset(
            classify_rule(r, elementary_only=guard_family(r) in guards) for r in self.rules
        )


def lop_signature(system: PSystem) -> tuple[int, int]:
    """``(m, n)``: initial membrane count and ``|K u {0}|`` over labels in use."""
    used = {m.label for m in system.init.membranes()}
    for rule in system.rules:
        used |= rule_labels(rule)
    used.discard(SKIN)
    return system.init.membrane_count(), len(used) + 1
