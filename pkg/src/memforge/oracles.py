"""Reference interpreters for register machines and matrix grammars.

These are deliberately direct: they share no code with the membrane engine
so that language equality against a compiled system is a meaningful check.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .errors import NotApplicable
from .grammars import START, TRAP, CfRule, MatrixGrammar
from .machines import Add, Halt, RegisterMachine, Sub, Write
from .outputs import StringSet, Word

REGISTER_CAP = 64


def rm_enumerate(
    machine: RegisterMachine,
    max_len: int = 8,
    max_steps: int = 10_000,
    register_cap: int = REGISTER_CAP,
) -> StringSet:
    """Tapes of all halting runs with at most ``max_len`` symbols.

    States are ``(label, registers, tape)``; revisited states are skipped, so
    the search ends once the bounded state space is exhausted. Hitting the
    step bound or the register cap marks the result truncated.
    """
    start = (machine.start, (0,) * machine.n, ())
    seen = {start}
    frontier = deque([(start, 0)])
    found: set[Word] = set()
    truncated = False
    while frontier:
        (label, regs, tape), depth = frontier.popleft()
        ins = machine.program[label]
        if isinstance(ins, Halt):
            found.add(tape)
            continue
        if depth >= max_steps:
            truncated = True
            continue
        nxt = []
        if isinstance(ins, Add):
            r = ins.register - 1
            if regs[r] >= register_cap:
                truncated = True
                continue
            bumped = regs[:r] + (regs[r] + 1,) + regs[r + 1 :]
            nxt = [(ins.then, bumped, tape), (ins.orelse, bumped, tape)]
        elif isinstance(ins, Sub):
            r = ins.register - 1
            if regs[r]:
                nxt = [(ins.then, regs[:r] + (regs[r] - 1,) + regs[r + 1 :], tape)]
            else:
                nxt = [(ins.orelse, regs, tape)]
        elif isinstance(ins, Write):
            if len(tape) >= max_len:
                continue  # the tape only grows
            nxt = [(ins.next, regs, tape + (ins.symbol,))]
        for state in nxt:
            if state not in seen:
                seen.add(state)
                frontier.append((state, depth + 1))
    return StringSet(frozenset(found), truncated)


def _occurrences(form: Sequence[str], sym: str) -> list[int]:
    return [i for i, s in enumerate(form) if s == sym]


def mg_apply_matrix(form: Sequence[str], rules: Sequence[CfRule]) -> set[tuple[str, ...]]:
    """All forms obtained by applying ``rules`` in order to ``form``.

    Each rule is ``(left, right, checking)``. A checking rule whose left
    symbol is absent is skipped; any other rule without an occurrence makes
    the whole matrix inapplicable.
    """
    forms = {tuple(form)}
    for left, right, checking in rules:
        out = set()
        for f in forms:
            where = _occurrences(f, left)
            if not where:
                if checking:
                    out.add(f)
                continue
            for i in where:
                out.add(f[:i] + tuple(right) + f[i + 1 :])
        if not out:
            raise NotApplicable(f"no occurrence of {left!r}")
        forms = out
    return forms


def mg_enumerate(
    grammar: MatrixGrammar, max_len: int = 8, max_derivation: int = 10_000
) -> StringSet:
    """Terminal words of length at most ``max_len`` derivable from ``S``.

    Forms with ``#`` are dropped at once. Every other symbol of
    ``N2 u T`` survives into any terminal word or is rewritten to a non-empty
    string, so forms with more than ``max_len`` such symbols are cut as well.
    """
    body = set(grammar.n2) | set(grammar.terminals)
    terminals = set(grammar.terminals)
    matrices = grammar.all_matrices()
    start = (START,)
    seen = {start}
    frontier = deque([(start, 0)])
    found: set[Word] = set()
    truncated = False
    while frontier:
        form, depth = frontier.popleft()
        if all(s in terminals for s in form):
            found.add(form)
            continue
        if depth >= max_derivation:
            truncated = True
            continue
        for rules in matrices:
            try:
                results = mg_apply_matrix(form, rules)
            except NotApplicable:
                continue
            for new in results:
                if TRAP in new or sum(s in body for s in new) > max_len:
                    continue
                if new not in seen:
                    seen.add(new)
                    frontier.append((new, depth + 1))
    return StringSet(frozenset(w for w in found if len(w) <= max_len), truncated)

