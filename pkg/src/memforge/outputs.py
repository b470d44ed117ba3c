"""Output strings under the four modes: lab, obj, traces and ext.

Strings are tuples of symbols, since labels and objects may be multi-character
tokens. Every mode projects onto a declared output alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import factorial
from typing import Iterable, Iterator, Sequence

from .errors import IncompatibleMode, MultipleTravellerCrossings
from .model import SKIN, Configuration, Membrane, Multiset

Word = tuple[str, ...]

LAB, OBJ, TRACES, EXT = "lab", "obj", "traces", "ext"
MODES = (LAB, OBJ, TRACES, EXT)


@dataclass(frozen=True)
class StringSet:
    strings: frozenset[Word] = frozenset()
    cap_hit: bool = False

    def __iter__(self) -> Iterator[Word]:
        return iter(sorted(self.strings))

    def __len__(self) -> int:
        return len(self.strings)

    def __contains__(self, word: object) -> bool:
        return word in self.strings

    def texts(self) -> list[str]:
        return [render(w) for w in sorted(self.strings, key=lambda w: (len(w), w))]


def render(word: Word) -> str:
    """Join symbols; multi-character symbols are space-separated."""
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return " ".join(word)


def word(text: str) -> Word:
    """Inverse of :func:`render` for single-character alphabets or spaced text."""
    return tuple(text.split()) if " " in text else tuple(text)


def multiset_permutations(items: Sequence[str]) -> Iterator[Word]:
    """Distinct orderings of a multiset, in lexicographic order."""
    counts: dict[str, int] = {}
    for x in items:
        counts[x] = counts.get(x, 0) + 1
    keys = sorted(counts)
    n = len(items)
    prefix: list[str] = []

    def rec() -> Iterator[Word]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                prefix.append(k)
                yield from rec()
                prefix.pop()
                counts[k] += 1

    yield from rec()


def permutation_count(ms: Multiset) -> int:
    total = factorial(len(ms))
    for _, n in ms.items():
        total //= factorial(n)
    return total


class _Capped:
    """Accumulates words up to a cap, remembering whether anything was dropped."""

    def __init__(self, cap: int):
        self.cap = cap
        self.hit = False

    def concat(self, left: Iterable[Word], right: Iterable[Word]) -> set[Word]:
        right = list(right)
        out: set[Word] = set()
        for a in left:
            for b in right:
                w = a + b
                if len(out) >= self.cap and w not in out:
                    self.hit = True
                    return out
                out.add(w)
        return out

    def limit(self, words: Iterable[Word]) -> set[Word]:
        out: set[Word] = set()
        for w in words:
            if len(out) >= self.cap and w not in out:
                self.hit = True
                break
            out.add(w)
        return out


def traversal_strings(
    config: Configuration | Membrane, mode: str, alphabet: Iterable[str], cap: int = 10_000
) -> StringSet:
    """Preorder visit of the final tree; siblings are taken in every order."""
    if mode not in (LAB, OBJ):
        raise IncompatibleMode(f"traversal output needs lab or obj, not {mode!r}")
    alphabet = frozenset(alphabet)
    root = config.root if isinstance(config, Configuration) else config
    acc = _Capped(cap)

    def own(m: Membrane) -> set[Word]:
        if mode == LAB:
            keep = m.label != SKIN and m.label in alphabet
            return {(m.label,) if keep else ()}
        projected = [x for x in m.contents if x in alphabet]
        return acc.limit(multiset_permutations(projected))

    def visit(m: Membrane) -> set[Word]:
        kids = [visit(c) for c in m.children]
        tails: set[Word] = set()
        seen_orders = set()
        for order in permutations(range(len(kids))):
            sig = tuple(m.children[i].key for i in order)
            if sig in seen_orders:
                continue
            seen_orders.add(sig)
            words: set[Word] = {()}
            for i in order:
                words = acc.concat(words, kids[i])
            tails |= words
            if len(tails) > cap:
                acc.hit = True
                tails = acc.limit(tails)
                break
        return acc.concat(own(m), tails)

    return StringSet(frozenset(visit(root)), acc.hit)


def trace_string(events: Iterable, traveller: str | None, alphabet: Iterable[str]) -> Word:
    """Labels crossed by the traveller, in order, projected onto ``alphabet``.

    ``events`` is a sequence of per-step :class:`~memforge.engine.StepEvents`.
    """
    if traveller is None:
        raise IncompatibleMode("traces mode needs a traveller")
    alphabet = frozenset(alphabet)
    out: list[str] = []
    for step, ev in enumerate(events):
        hits = [c for c in ev.crossings if c.obj == traveller]
        if len(hits) > 1:
            raise MultipleTravellerCrossings(f"{len(hits)} traveller crossings in step {step}")
        out.extend(c.label for c in hits if c.label in alphabet)
    return tuple(out)


def extend_external(
    prefixes: Iterable[Word], emitted: Multiset, alphabet: frozenset[str], cap: int
) -> tuple[frozenset[Word], bool]:
    """Append every ordering of one step's emissions to each prefix."""
    projected = [x for x in emitted if x in alphabet]
    if not projected:
        return frozenset(prefixes), False
    acc = _Capped(cap)
    words = acc.concat(prefixes, multiset_permutations(projected))
    return frozenset(words), acc.hit


def external_strings(
    env_log: Iterable[tuple[int, Multiset] | Multiset], alphabet: Iterable[str], cap: int = 10_000
) -> StringSet:
    """Strings formed by emissions past the skin, step by step.

    Log entries may be ``(step, multiset)`` pairs or bare multisets.
    """
    alphabet = frozenset(alphabet)
    words: frozenset[Word] = frozenset({()})
    hit = False
    for entry in env_log:
        emitted = entry[1] if isinstance(entry, tuple) else entry
        words, h = extend_external(words, emitted, alphabet, cap)
        hit = hit or h
    return StringSet(words, hit)
