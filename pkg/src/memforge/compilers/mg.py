"""Matrix grammar (Z-binary normal form) to P system with membrane creation only.

A sentential form ``X x1 ... xh`` is the object ``X`` in the skin above a
chain of membranes labelled ``x1 ... xh`` and closed by ``$``. A matrix is
simulated by an object that walks down the chain to the first membrane
labelled with its rewritten symbol, relabels it, and climbs back up.
"""

from __future__ import annotations

from ..errors import CompileError, TracesUnsupported
from ..grammars import FINAL, START, TRAP, MatrixGrammar
from ..model import SKIN, Create, Rewrite, SendIn, SendOut, build, ms
from ..outputs import EXT, LAB, MODES, TRACES
from .common import GadgetTag as G
from .common import Namer, RuleBook, reserve_labels

MG_OPS = frozenset({"a", "b", "c", "c'", "d", "d*"})


def compile_mg(grammar: MatrixGrammar, mode: str):
    if mode == TRACES:
        raise TracesUnsupported("the matrix grammar construction has no traces variant")
    if mode not in MODES:
        raise CompileError(f"unknown mode {mode!r}")
    T, N2 = list(grammar.terminals), list(grammar.n2)
    if SKIN in T or SKIN in N2:
        raise CompileError("the alphabets may not contain the skin label 0")
    lab = reserve_labels(["$", TRAP], T + N2)
    end, trap = lab["$"], lab[TRAP]
    body = N2 + T

    name = Namer(set(T) | set(grammar.n1) | {START, FINAL, TRAP})
    S, Z, hash_ = START, FINAL, TRAP
    X, A = grammar.init_x, grammar.init_a
    x_a, x_a_p = name(f"{X}_{A}"), name(f"{X}'_{A}")
    D, Dp = name("D"), name("D'")

    book = RuleBook()
    book.add(
        G.MgInit,
        Create(SKIN, S, A, ms(x_a)),
        Create(A, x_a, end, ms(x_a_p)),
        SendOut(end, x_a_p, x_a_p, end),
        SendOut(A, x_a_p, X, A),
    )

    def up(i: int, y: str) -> str:
        return name(f"{y}'_{i}", ("up", i))

    has_matrix = set()
    for m in grammar.matrices:
        i, a = m.index, m.symbol
        yi = name(f"{m.right}_{i}", ("down", i))
        has_matrix.add(m.left)
        book.add(G.MgDescent, Rewrite(SKIN, m.left, ms(yi)))
        book.add(G.MgDescent, *(SendIn(yi, y, yi, y) for y in body if y != a))
        yp = up(i, m.right)
        if m.checking:
            book.add(
                G.MgAppearanceCheck,
                SendIn(yi, a, hash_, trap),
                SendIn(yi, end, yp, end),
            )
        elif len(m.rhs) == 1:
            book.add(G.MgRewrite1, SendIn(yi, a, yp, m.rhs[0]))
        else:
            a1, a2 = m.rhs

            def carry(b: str, i=i, y=m.right) -> str:
                return name(f"{y}_{i},{b}", ("carry", i, b))

            book.add(G.MgInsert2, SendIn(yi, a, carry(a2), a1))
            book.add(
                G.MgInsert2,
                *(SendIn(carry(b), c, carry(c), b) for b in body for c in (*body, end)),
            )
            book.add(G.MgInsert2, *(Create(b, carry(end), end, ms(yp)) for b in body))
        if not m.checking:
            book.add(G.MgTrap, SendIn(yi, end, hash_, trap))
        book.add(G.MgDescent, *(SendOut(y, yp, yp, y) for y in (*body, end)))
        book.add(G.MgDescent, Rewrite(SKIN, yp, ms(m.right)))
    # a control symbol with no matrix can never finish the derivation
    for x in grammar.n1:
        if x not in has_matrix:
            book.add(G.MgTrap, Create(SKIN, x, trap, ms(hash_)))
    book.add(G.MgTrap, Rewrite(trap, hash_, ms(hash_)))

    book.add(G.MgSweep, Rewrite(SKIN, Z, ms(D)))
    book.add(G.MgSweep, *(SendIn(D, a, Dp, a) for a in T))
    if mode == LAB:
        book.add(G.MgSweep, *(Rewrite(a, Dp, ms(D)) for a in T))
    else:
        book.add(G.MgSweep, *(Rewrite(a, Dp, ms(a, D)) for a in T))
    book.add(G.MgSweep, *(SendIn(D, b, hash_, trap) for b in N2))
    book.add(G.MgSweep, SendIn(D, end, Dp, end))
    if mode == EXT:
        book.add(G.MgSweep, *(SendOut(b, a, a, b) for b in T for a in T))
        book.add(G.MgSweep, *(SendOut(SKIN, a, a, SKIN) for a in T))

    init = build((SKIN, S))
    return book.system(init, MG_OPS, T, [*body, end, trap], witness=body)
