"""Shared plumbing for the compilers: gadget tags, fresh names, rule collection."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Iterable

from ..model import Configuration, PSystem, Rule, rule_labels, rule_objects, SKIN


class GadgetTag(str, enum.Enum):
    Bootstrap = "Bootstrap"
    Add = "Add"
    Sub = "Sub"
    Write = "Write"
    Cleanup = "Cleanup"
    TravellerWalk = "TravellerWalk"
    ExtShuttle = "ExtShuttle"
    Deposit = "Deposit"
    MgInit = "MgInit"
    MgDescent = "MgDescent"
    MgRewrite1 = "MgRewrite1"
    MgInsert2 = "MgInsert2"
    MgAppearanceCheck = "MgAppearanceCheck"
    MgTrap = "MgTrap"
    MgSweep = "MgSweep"

    def __str__(self) -> str:
        return self.value


class CompileWarning(UserWarning):
    pass


class Namer:
    """Hands out names that avoid everything already taken.

    A wanted name is used verbatim when free; otherwise a ``~n`` suffix is
    appended. Asking twice with the same ``key`` returns the same name; without
    a key every call yields a new name.
    """

    def __init__(self, taken: Iterable[str] = ()):
        self.taken = set(taken)
        self.memo: dict[object, str] = {}

    def __call__(self, want: str, key: object = None) -> str:
        if key is not None and key in self.memo:
            return self.memo[key]
        name, n = want, 0
        while name in self.taken:
            n += 1
            name = f"{want}~{n}"
        self.taken.add(name)
        if key is not None:
            self.memo[key] = name
        return name


def reserve_labels(wanted: Iterable[str], user: Iterable[str]) -> dict[str, str]:
    """Map each reserved label to itself, or to a fresh name if the user's alphabet has it."""
    user = set(user)
    namer = Namer(user | {SKIN})
    out = {}
    for lab in wanted:
        out[lab] = namer(lab)
        if out[lab] != lab:
            warnings.warn(
                f"reserved label {lab!r} collides with the alphabet; renamed to {out[lab]!r}",
                CompileWarning,
                stacklevel=3,
            )
    return out


@dataclass
class RuleBook:
    rules: list[Rule] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    _seen: set = field(default_factory=set)

    def add(self, tag: GadgetTag, *rules: Rule) -> None:
        for rule in rules:
            if rule in self._seen:
                continue
            self._seen.add(rule)
            self.rules.append(rule)
            self.tags.append(tag.value)

    def system(
        self,
        init: Configuration,
        ops: Iterable[str],
        output: Iterable[str],
        labels: Iterable[str],
        traveller: str | None = None,
        witness: Iterable[str] = (),
    ) -> PSystem:
        objects = set()
        for m in init.membranes():
            objects.update(m.contents.distinct())
        for rule in self.rules:
            objects |= rule_objects(rule)
        used_labels = set(labels)
        for rule in self.rules:
            used_labels |= rule_labels(rule)
        used_labels.discard(SKIN)
        return PSystem(
            objects=frozenset(objects),
            labels=frozenset(used_labels),
            ops=frozenset(ops),
            init=init,
            rules=tuple(self.rules),
            output=frozenset(output),
            traveller=traveller,
            witness=frozenset(witness),
            tags=tuple(self.tags),
        )
