"""Bounded exhaustive exploration and seeded simulation.

The search is breadth-first over states made of a configuration's canonical
key plus whatever output has already been committed (the traveller trace or
the emitted prefixes). A branch is cut without marking the sample truncated
only when a sound lower bound shows every halting continuation would produce
a string longer than ``max_string_len``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable

from .engine import EngineOptions, RuleSet, StepEvents, step_successors
from .errors import IncompatibleMode, ModelError
from .model import (
    Configuration,
    Dissolve,
    Divide,
    Duplicate,
    PSystem,
    SendIn,
    SendOut,
    canonical_key,
)
from .outputs import (
    EXT,
    LAB,
    MODES,
    OBJ,
    TRACES,
    StringSet,
    Word,
    external_strings,
    extend_external,
    trace_string,
    traversal_strings,
)


@dataclass(frozen=True)
class Limits:
    max_steps: int = 500
    max_configs: int = 100_000
    max_membranes: int = 500
    max_objects: int = 5_000
    max_string_len: int = 8
    max_strings: int = 10_000

    def __post_init__(self):
        for name, value in vars(self).items():
            if value <= 0:
                raise ModelError(f"limit {name} must be positive, got {value}")


@dataclass
class ExploreStats:
    states: int = 0
    halting: int = 0
    cycles: int = 0  # successors already seen (self-loops, cycles and merges)
    pruned: int = 0  # cut by a resource limit; implies truncation
    length_pruned: int = 0  # cut because every halting continuation is too long

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


@dataclass
class LanguageSample:
    mode: str
    strings: StringSet
    complete_up_to: int
    truncated: bool
    stats: ExploreStats
    paths: dict[Word, tuple[Configuration, ...]] = field(default_factory=dict)


@dataclass
class RunReport:
    seed: int
    events: list[StepEvents]
    final: Configuration
    halted: bool
    outputs: StringSet

    @property
    def steps(self) -> int:
        return len(self.events)


def default_options(system: PSystem) -> EngineOptions:
    return EngineOptions(elementary_only=system.guards())


class OutputBound:
    """Sound lower bounds on the output length of any halting continuation.

    Three independent witnesses are combined by ``max``:

    * output committed so far (traces, ext);
    * membranes whose label the system declares as ``witness``;
    * labels or objects no rule can remove from the output alphabet
      (lab: the label can only be relabelled inside the alphabet and never
      dissolved; obj: no rule consumes the object).
    """

    def __init__(self, system: PSystem, mode: str):
        self.mode = mode
        out = system.output
        if mode == LAB:
            self.labels = frozenset(system.witness) | self._stable_labels(system, out)
        else:
            self.labels = frozenset(system.witness)
        self.objects: frozenset[str] = frozenset()
        if mode == OBJ:
            consumed = {r.a for r in system.rules}
            self.objects = frozenset(o for o in out if o not in consumed)

    @staticmethod
    def _stable_labels(system: PSystem, out: frozenset[str]) -> frozenset[str]:
        succ: dict[str, set[str]] = {}
        dissolvable = set()
        for r in system.rules:
            if isinstance(r, (SendOut, SendIn)):
                succ.setdefault(r.i, set()).add(r.j)
            elif isinstance(r, Divide):
                succ.setdefault(r.i, set()).update((r.k, r.j))
            elif isinstance(r, Duplicate):
                succ.setdefault(r.i, set()).add(r.j)
            elif isinstance(r, Dissolve):
                dissolvable.add(r.i)
        stable = set()
        for lab in out:
            seen, todo = {lab}, [lab]
            while todo:
                for nxt in succ.get(todo.pop(), ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        todo.append(nxt)
            if seen <= out and not seen & dissolvable:
                stable.add(lab)
        return frozenset(stable)

    def lower(self, config: Configuration, committed: int) -> int:
        best = committed
        if self.labels:
            best = max(best, sum(1 for m in config.membranes() if m.label in self.labels))
        if self.objects:
            best = max(
                best,
                sum(n for m in config.membranes() for o, n in m.contents.items() if o in self.objects),
            )
        return best


def _initial_acc(mode: str):
    if mode == TRACES:
        return ()
    if mode == EXT:
        return frozenset({()})
    return None


def _committed(mode: str, acc) -> int:
    if mode == TRACES:
        return len(acc)
    if mode == EXT:
        return min(len(w) for w in acc) if acc else 0
    return 0


def explore(
    system: PSystem,
    mode: str,
    limits: Limits = Limits(),
    options: EngineOptions | None = None,
    *,
    dedup: bool = True,
    record_paths: bool = False,
) -> LanguageSample:
    """Enumerate the strings generated by halting computations, within limits."""
    if mode not in MODES:
        raise IncompatibleMode(f"unknown mode {mode!r}")
    if mode == TRACES and system.traveller is None:
        raise IncompatibleMode("traces mode needs a traveller")
    options = options or default_options(system)
    rules = RuleSet(system.rules)
    alphabet = frozenset(system.output)
    bound = OutputBound(system, mode)
    max_len = limits.max_string_len
    stats = ExploreStats()
    truncated = False
    strings: set[Word] = set()
    paths: dict[Word, tuple[Configuration, ...]] = {}
    parents: dict[Hashable, tuple[Hashable | None, Configuration]] = {}

    def key_of(config: Configuration, acc) -> Hashable:
        return (canonical_key(config), acc)

    def too_big(config: Configuration) -> bool:
        return (
            config.membrane_count() > limits.max_membranes
            or config.object_count() > limits.max_objects
        )

    def path_to(key: Hashable) -> tuple[Configuration, ...]:
        out = []
        while key is not None:
            key, config = parents[key]
            out.append(config)
        return tuple(reversed(out))

    acc0 = _initial_acc(mode)
    init = system.init
    start_key = key_of(init, acc0)
    visited = {start_key}
    if record_paths:
        parents[start_key] = (None, init)
    queue: deque = deque()
    if too_big(init):
        stats.pruned += 1
        truncated = True
    elif bound.lower(init, 0) > max_len:
        stats.length_pruned += 1
    else:
        queue.append((init, acc0, 0, start_key))

    while queue:
        config, acc, depth, key = queue.popleft()
        stats.states += 1
        succ = step_successors(config, rules, options)
        if not succ:
            stats.halting += 1
            if mode in (LAB, OBJ):
                found = traversal_strings(config, mode, alphabet, limits.max_strings)
                truncated = truncated or found.cap_hit
                words = found.strings
            elif mode == TRACES:
                words = {acc}
            else:
                words = acc
            for w in words:
                if len(w) <= max_len:
                    if w not in strings and len(strings) >= limits.max_strings:
                        truncated = True
                        continue
                    strings.add(w)
                    if record_paths and w not in paths:
                        paths[w] = path_to(key)
            continue
        if depth >= limits.max_steps:
            stats.pruned += 1
            truncated = True
            continue
        for new, events in succ:
            if mode == TRACES:
                nacc = acc + trace_string([events], system.traveller, alphabet)
            elif mode == EXT:
                nacc, hit = extend_external(acc, events.emissions, alphabet, limits.max_strings)
                truncated = truncated or hit
            else:
                nacc = acc
            if too_big(new):
                stats.pruned += 1
                truncated = True
                continue
            if bound.lower(new, _committed(mode, nacc)) > max_len:
                stats.length_pruned += 1
                continue
            nkey = key_of(new, nacc) if dedup else object()
            if nkey in visited:
                stats.cycles += 1
                continue
            if len(visited) >= limits.max_configs:
                stats.pruned += 1
                truncated = True
                continue
            visited.add(nkey)
            if record_paths:
                parents[nkey] = (key, new)
            queue.append((new, nacc, depth + 1, nkey))

    return LanguageSample(
        mode=mode,
        strings=StringSet(frozenset(strings), truncated),
        complete_up_to=0 if truncated else max_len,
        truncated=truncated,
        stats=stats,
        paths=paths,
    )


def outputs_of(
    system: PSystem, mode: str, final: Configuration, events: list[StepEvents], cap: int = 10_000
) -> StringSet:
    """Output of one finished computation."""
    if mode in (LAB, OBJ):
        return traversal_strings(final, mode, system.output, cap)
    if mode == TRACES:
        return StringSet(frozenset({trace_string(events, system.traveller, system.output)}))
    if mode == EXT:
        return external_strings(final.environment_log, system.output, cap)
    raise IncompatibleMode(f"unknown mode {mode!r}")


def random_run(
    system: PSystem,
    mode: str,
    seed: int = 0,
    limits: Limits = Limits(),
    options: EngineOptions | None = None,
) -> RunReport:
    """Follow one computation, choosing uniformly among successors."""
    if mode == TRACES and system.traveller is None:
        raise IncompatibleMode("traces mode needs a traveller")
    options = options or default_options(system)
    rules = RuleSet(system.rules)
    rng = random.Random(seed)
    config = system.init
    events: list[StepEvents] = []
    halted = False
    for _ in range(limits.max_steps + 1):
        succ = step_successors(config, rules, options)
        if not succ:
            halted = True
            break
        if len(events) >= limits.max_steps:
            break
        config, ev = succ[rng.randrange(len(succ))]
        events.append(ev)
    outputs = outputs_of(system, mode, config, events, limits.max_strings) if halted else StringSet()
    return RunReport(seed, events, config, halted, outputs)
