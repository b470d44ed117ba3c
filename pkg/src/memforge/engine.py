"""Two-phase maximally parallel step semantics.

A step first lets objects evolve (rewrite, send out, send in, create), with
every object instance used by at most one rule and, under the ``single``
crossing policy, every membrane crossed at most once. Then each membrane with
an applicable divide, duplicate or dissolve rule undergoes exactly one of
them, children before parents.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence, Union

from .errors import Halted, ModelError
from .model import (
    EMPTY,
    Configuration,
    Create,
    Dissolve,
    Divide,
    Duplicate,
    Membrane,
    Multiset,
    Rewrite,
    Rule,
    SendIn,
    SendOut,
    canonical_key,
    guard_family,
)

SINGLE = "single"
MULTI = "multi"


@dataclass(frozen=True)
class EngineOptions:
    crossing_policy: str = SINGLE
    record_events: bool = True
    # structural families ('e', 'f', 'g') only allowed on elementary membranes
    elementary_only: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.crossing_policy not in (SINGLE, MULTI):
            raise ModelError(f"unknown crossing policy {self.crossing_policy!r}")
        if not set(self.elementary_only) <= set("efg"):
            raise ModelError("elementary_only takes a subset of 'e', 'f', 'g'")


DEFAULT_OPTIONS = EngineOptions()


@dataclass(frozen=True)
class Crossing:
    obj: str
    membrane: int
    label: str  # label at match time, before any relabelling
    direction: str  # "in" or "out"


@dataclass(frozen=True)
class StepEvents:
    crossings: tuple[Crossing, ...] = ()
    emissions: Multiset = EMPTY
    dissolved: tuple[int, ...] = ()
    created: tuple[int, ...] = ()
    divided: tuple[int, ...] = ()
    duplicated: tuple[int, ...] = ()

    def merge(self, other: "StepEvents") -> "StepEvents":
        return StepEvents(
            self.crossings + other.crossings,
            self.emissions + other.emissions,
            self.dissolved + other.dissolved,
            self.created + other.created,
            self.divided + other.divided,
            self.duplicated + other.duplicated,
        )

    def key(self) -> tuple:
        """Id-free summary used to tell successors apart."""
        return (
            tuple(sorted((c.obj, c.label, c.direction) for c in self.crossings)),
            self.emissions.items(),
        )


NO_EVENTS = StepEvents()


class RuleSet:
    """Rules indexed for matching."""

    def __init__(self, rules: Iterable[Rule]):
        self.rules: tuple[Rule, ...] = tuple(rules)
        self.local: dict[tuple[str, str], list[Rule]] = defaultdict(list)
        self.send_in: dict[tuple[str, str], list[SendIn]] = defaultdict(list)
        self.structural: dict[tuple[str, str], list[Rule]] = defaultdict(list)
        for rule in self.rules:
            if isinstance(rule, (Rewrite, SendOut, Create)):
                self.local[rule.i, rule.a].append(rule)
            elif isinstance(rule, SendIn):
                self.send_in[rule.a, rule.i].append(rule)
            elif isinstance(rule, (Divide, Duplicate, Dissolve)):
                self.structural[rule.i, rule.a].append(rule)
            else:
                raise TypeError(f"not a rule: {rule!r}")
        self.local = dict(self.local)
        self.send_in = dict(self.send_in)
        self.structural = dict(self.structural)

    def __len__(self) -> int:
        return len(self.rules)


RulesLike = Union[RuleSet, Sequence[Rule]]


def as_ruleset(rules: RulesLike) -> RuleSet:
    return rules if isinstance(rules, RuleSet) else RuleSet(rules)


@dataclass(frozen=True)
class RuleInstance:
    rule: Rule
    host: int
    target: int | None = None  # child membrane for SendIn

    @property
    def obj(self) -> str:
        return self.rule.a

    @property
    def crossed(self) -> int | None:
        if isinstance(self.rule, SendOut):
            return self.host
        if isinstance(self.rule, SendIn):
            return self.target
        return None


def _parents(root: Membrane) -> dict[int, Membrane | None]:
    parent: dict[int, Membrane | None] = {root.id: None}
    for m in root.walk():
        for c in m.children:
            parent[c.id] = m
    return parent


def object_instances(config: Configuration, rules: RulesLike) -> list[RuleInstance]:
    """Every applicable (a)-(d) rule instance at phase start, grouped by resource."""
    rs = as_ruleset(rules)
    out: list[RuleInstance] = []
    for m in config.membranes():
        for obj in m.contents.distinct():
            for rule in rs.local.get((m.label, obj), ()):
                out.append(RuleInstance(rule, m.id))
            for child in m.children:
                for rule in rs.send_in.get((obj, child.label), ()):
                    out.append(RuleInstance(rule, m.id, child.id))
    return out


def _result_label(inst: RuleInstance) -> str:
    return inst.rule.j


def _maximal_assignments(
    instances: list[RuleInstance], avail: dict[tuple[int, str], int], policy: str
) -> Iterator[tuple[int, ...]]:
    n = len(instances)
    res = [(inst.host, inst.obj) for inst in instances]
    cross = [inst.crossed for inst in instances]
    labels = [_result_label(inst) if cross[k] is not None else None for k, inst in enumerate(instances)]
    last_for_resource = [k == n - 1 or res[k + 1] != res[k] for k in range(n)]
    counts = [0] * n
    # crossed membrane id -> (uses, resulting label)
    used: dict[int, tuple[int, str]] = {}

    def crossing_ok(k: int) -> bool:
        cid = cross[k]
        if cid is None or cid not in used:
            return True
        return policy == MULTI and used[cid][1] == labels[k]

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == n:
            for j in range(n):
                if avail[res[j]] > 0 and crossing_ok(j):
                    return
            yield tuple(counts)
            return
        r = res[k]
        cid = cross[k]
        hi = avail[r]
        if cid is not None:
            if not crossing_ok(k):
                hi = 0
            elif policy == SINGLE:
                hi = min(hi, 1)
        # the last consumer of a resource must take whatever is left
        lo = hi if (last_for_resource[k] and cid is None) else 0
        for c in range(hi, lo - 1, -1):
            counts[k] = c
            avail[r] -= c
            prev = used.get(cid) if cid is not None else None
            if c and cid is not None:
                used[cid] = ((prev[0] if prev else 0) + c, labels[k])
            yield from rec(k + 1)
            if c and cid is not None:
                if prev is None:
                    del used[cid]
                else:
                    used[cid] = prev
            avail[r] += c
        counts[k] = 0

    yield from rec(0)


def _apply_object_phase(
    config: Configuration, instances: list[RuleInstance], counts: tuple[int, ...], record: bool
) -> tuple[Configuration, StepEvents]:
    parent = _parents(config.root)
    by_id = {m.id: m for m in config.membranes()}
    consumed: dict[int, Counter] = defaultdict(Counter)
    added: dict[int, Counter] = defaultdict(Counter)
    new_children: dict[int, list[Membrane]] = defaultdict(list)
    relabel: dict[int, str] = {}
    emissions: Counter = Counter()
    crossings: list[Crossing] = []
    created: list[int] = []
    next_id = config.max_id() + 1

    for inst, c in zip(instances, counts):
        if not c:
            continue
        rule = inst.rule
        consumed[inst.host][rule.a] += c
        if isinstance(rule, Rewrite):
            for name, n in rule.v.items():
                added[inst.host][name] += n * c
        elif isinstance(rule, Create):
            for _ in range(c):
                new_children[inst.host].append(Membrane(next_id, rule.j, rule.v))
                created.append(next_id)
                next_id += 1
        elif isinstance(rule, SendOut):
            up = parent[inst.host]
            if up is None:
                emissions[rule.b] += c
            else:
                added[up.id][rule.b] += c
            if rule.j != rule.i:
                relabel[inst.host] = rule.j
            if record:
                label = by_id[inst.host].label
                crossings.extend([Crossing(rule.a, inst.host, label, "out")] * c)
        elif isinstance(rule, SendIn):
            added[inst.target][rule.b] += c
            if rule.j != rule.i:
                relabel[inst.target] = rule.j
            if record:
                label = by_id[inst.target].label
                crossings.extend([Crossing(rule.a, inst.target, label, "in")] * c)

    def rebuild(m: Membrane) -> Membrane:
        contents = m.contents
        if m.id in consumed:
            contents = contents - Multiset(consumed[m.id])
        if m.id in added:
            contents = contents + Multiset(added[m.id])
        kids = tuple(rebuild(c) for c in m.children) + tuple(new_children.get(m.id, ()))
        return Membrane(m.id, relabel.get(m.id, m.label), contents, kids)

    new = Configuration(rebuild(config.root), config.step_index, config.environment_log)
    events = StepEvents(tuple(crossings), Multiset(emissions), created=tuple(created))
    return new, events


def object_assignments(
    config: Configuration, rules: RulesLike, options: EngineOptions = DEFAULT_OPTIONS
) -> tuple[list[RuleInstance], list[tuple[int, ...]]]:
    """The rule instances at phase start and every maximal use count vector over them."""
    instances = object_instances(config, rules)
    avail = {(m.id, name): n for m in config.membranes() for name, n in m.contents.items()}
    return instances, list(_maximal_assignments(instances, avail, options.crossing_policy))


def object_phase_successors(
    config: Configuration, rules: RulesLike, options: EngineOptions = DEFAULT_OPTIONS
) -> list[tuple[Configuration, StepEvents]]:
    instances = object_instances(config, rules)
    if not instances:
        return [(config, NO_EVENTS)]
    avail = {(m.id, name): n for m in config.membranes() for name, n in m.contents.items()}
    seen: dict[tuple, tuple[Configuration, StepEvents]] = {}
    for counts in _maximal_assignments(instances, avail, options.crossing_policy):
        new, events = _apply_object_phase(config, instances, counts, options.record_events)
        seen.setdefault((canonical_key(new), events.key()), (new, events))
    return [seen[k] for k in sorted(seen)]


def structural_options(
    config: Configuration, rules: RulesLike, options: EngineOptions = DEFAULT_OPTIONS
) -> list[tuple[int, list[Rule]]]:
    """Per non-skin membrane, the (e)/(f)/(g) rules it could undergo now."""
    rs = as_ruleset(rules)
    out = []
    for m in config.membranes():
        if m is config.root:
            continue
        opts = []
        for obj in m.contents.distinct():
            for rule in rs.structural.get((m.label, obj), ()):
                if guard_family(rule) in options.elementary_only and not m.is_elementary:
                    continue
                opts.append(rule)
        if opts:
            out.append((m.id, opts))
    return out


def _apply_membrane_phase(
    config: Configuration, action: dict[int, Rule]
) -> tuple[Configuration, StepEvents]:
    next_id = config.max_id() + 1
    dissolved: list[int] = []
    divided: list[int] = []
    duplicated: list[int] = []

    def fresh() -> int:
        nonlocal next_id
        next_id += 1
        return next_id - 1

    def copy(m: Membrane) -> Membrane:
        return Membrane(fresh(), m.label, m.contents, tuple(copy(c) for c in m.children))

    def rebuild(m: Membrane) -> tuple[list[Membrane], Multiset]:
        kids: list[Membrane] = []
        extra = EMPTY
        for c in m.children:
            nodes, released = rebuild(c)
            kids.extend(nodes)
            extra = extra + released
        contents = m.contents + extra
        rule = action.get(m.id)
        if rule is None:
            return [Membrane(m.id, m.label, contents, tuple(kids))], EMPTY
        contents = contents - Multiset([rule.a])
        if isinstance(rule, Dissolve):
            dissolved.append(m.id)
            return kids, contents + rule.v
        if isinstance(rule, Divide):
            divided.append(m.id)
            first = Membrane(m.id, rule.k, contents + Multiset([rule.b]), tuple(kids))
            second = Membrane(
                fresh(), rule.j, contents + Multiset([rule.c]), tuple(copy(k) for k in kids)
            )
            return [first, second], EMPTY
        duplicated.append(m.id)
        inner = Membrane(m.id, rule.j, contents + Multiset([rule.c]), tuple(kids))
        return [Membrane(fresh(), rule.k, Multiset([rule.b]), (inner,))], EMPTY

    (root,), _ = rebuild(config.root)
    new = Configuration(root, config.step_index, config.environment_log)
    return new, StepEvents(
        dissolved=tuple(dissolved), divided=tuple(divided), duplicated=tuple(duplicated)
    )


def membrane_phase_successors(
    config: Configuration, rules: RulesLike, options: EngineOptions = DEFAULT_OPTIONS
) -> list[tuple[Configuration, StepEvents]]:
    choices = structural_options(config, rules, options)
    if not choices:
        return [(config, NO_EVENTS)]
    ids = [mid for mid, _ in choices]
    seen: dict[tuple, tuple[Configuration, StepEvents]] = {}
    for combo in product(*(opts for _, opts in choices)):
        new, events = _apply_membrane_phase(config, dict(zip(ids, combo)))
        seen.setdefault((canonical_key(new), events.key()), (new, events))
    return [seen[k] for k in sorted(seen)]


def is_halting(
    config: Configuration, rules: RulesLike, options: EngineOptions = DEFAULT_OPTIONS
) -> bool:
    rs = as_ruleset(rules)
    return not object_instances(config, rs) and not structural_options(config, rs, options)


def step_successors(
    config: Configuration, rules: RulesLike, options: EngineOptions = DEFAULT_OPTIONS
) -> list[tuple[Configuration, StepEvents]]:
    """All configurations reachable in one step, with their events.

    Empty when the configuration is halting. The order is deterministic.
    """
    rs = as_ruleset(rules)
    if is_halting(config, rs, options):
        return []
    step = config.step_index + 1
    seen: dict[tuple, tuple[Configuration, StepEvents]] = {}
    for mid, e1 in object_phase_successors(config, rs, options):
        for end, e2 in membrane_phase_successors(mid, rs, options):
            events = e1.merge(e2)
            log = config.environment_log
            if events.emissions:
                log = log + ((step, events.emissions),)
            new = Configuration(end.root, step, log)
            seen.setdefault((canonical_key(new), events.key()), (new, events))
    return [seen[k] for k in sorted(seen)]


def seeded_step(
    config: Configuration,
    rules: RulesLike,
    options: EngineOptions = DEFAULT_OPTIONS,
    seed: int | random.Random = 0,
) -> tuple[Configuration, StepEvents]:
    """One successor drawn uniformly; pass a ``Random`` to continue a stream."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    succ = step_successors(config, rules, options)
    if not succ:
        raise Halted(f"no successor at step {config.step_index}")
    return succ[rng.randrange(len(succ))]
