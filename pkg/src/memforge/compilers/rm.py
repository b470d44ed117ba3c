"""Register machine (two registers, output tape) to P system with creation and dissolution.

Register ``i`` is membrane ``i`` holding one ``a_i`` per unit. Written symbols
become a chain of nested membranes labelled by the symbols, closed by an
innermost ``$`` membrane; the instruction object descends to ``$`` to extend
the chain and its continuation climbs back to the skin.
"""

from __future__ import annotations

from ..errors import CompileError, NeedsTwoRegisters
from ..machines import Add, RegisterMachine, Sub, Write, check_rm
from ..model import (
    SKIN,
    Create,
    Dissolve,
    Rewrite,
    SendIn,
    SendOut,
    build,
    ms,
)
from ..outputs import EXT, MODES, TRACES
from .common import GadgetTag as G
from .common import Namer, RuleBook, reserve_labels

RM_OPS = frozenset({"a", "b", "c", "d", "d*", "g'", "g*"})


def compile_rm(machine: RegisterMachine, mode: str):
    if mode not in MODES:
        raise CompileError(f"unknown mode {mode!r}")
    if machine.n != 2:
        raise NeedsTwoRegisters(f"the construction needs exactly 2 registers, got {machine.n}")
    errors = [d for d in check_rm(machine) if d.severity == "error"]
    if errors:
        raise CompileError(str(errors[0]))
    T = list(machine.alphabet)
    if SKIN in T:
        raise CompileError("the output alphabet may not contain the skin label 0")
    wanted = ["1", "2", "3", "$"] + (["4"] if mode == TRACES else [])
    lab = reserve_labels(wanted, T)
    r1, r2, zero, end = lab["1"], lab["2"], lab["3"], lab["$"]
    reg = {1: r1, 2: r2}

    name = Namer(T)
    obj = {l: name(l, ("label", l)) for l in machine.program}
    a_ = {i: name(f"a_{i}") for i in (1, 2)}
    b_ = {i: name(f"b_{i}") for i in (1, 2)}
    l0 = obj[machine.start]
    l0p, l0pp = name(f"{l0}'"), name(f"{l0}''")
    one, two, dollar_p = name("1'"), name("2'"), name("$'")
    dollar = name("$")
    lh = obj[machine.halt]
    lhp, lhpp = name(f"{lh}'"), name(f"{lh}''")
    f, fp = name("f"), name("f'")
    t = name("t") if mode == TRACES else None

    book = RuleBook()
    book.add(
        G.Bootstrap,
        Rewrite(SKIN, l0p, ms(one, two, dollar_p, l0pp)),
        Rewrite(SKIN, l0pp, ms(l0)),
        Create(SKIN, one, r1),
        Create(SKIN, two, r2),
        Create(SKIN, dollar_p, end),
    )
    for i in (1, 2):
        book.add(G.Add, SendIn(b_[i], reg[i], a_[i], reg[i]))

    for label, ins in machine.program.items():
        l = obj[label]
        if isinstance(ins, Add):
            i = ins.register
            book.add(
                G.Add,
                Rewrite(SKIN, l, ms(b_[i], obj[ins.then])),
                Rewrite(SKIN, l, ms(b_[i], obj[ins.orelse])),
            )
        elif isinstance(ins, Sub):
            i, ri = ins.register, reg[ins.register]
            li = name(f"{l}_{i}")
            lip, lipp, lippp, liv = (name(f"{li}{s}") for s in ("'", "''", "'''", "^iv"))
            book.add(
                G.Sub,
                Rewrite(SKIN, l, ms(li)),
                SendIn(li, ri, li, ri),
                Create(ri, li, zero, ms(lip)),
                Rewrite(zero, lip, ms(lipp)),
                SendIn(a_[i], zero, a_[i], zero),
                Dissolve(zero, a_[i]),
                Rewrite(ri, lipp, ms(lippp)),
                Rewrite(zero, lipp, ms(lippp)),
                Dissolve(zero, lippp, ms(liv)),
                SendOut(ri, lippp, obj[ins.then], ri),
                SendOut(ri, liv, obj[ins.orelse], ri),
            )
        elif isinstance(ins, Write):
            a, nxt = ins.symbol, obj[ins.next]
            carry = name(f"({a},{nxt})", ("carry", a, nxt))
            bar = name(f"({a},{nxt})^bar", ("bar", a, nxt))
            book.add(G.Write, Rewrite(SKIN, l, ms(carry)))
            book.add(G.Write, *(SendIn(carry, b, carry, b) for b in [*T, end]))
            book.add(G.Write, Dissolve(end, carry, ms(bar)))
            book.add(G.Write, *(Create(b, bar, a, ms(nxt, dollar)) for b in [*T, SKIN]))
    book.add(G.Write, *(Create(a, dollar, end) for a in T))
    # continuations climb back to the skin
    book.add(G.Write, *(SendOut(b, obj[l], obj[l], b) for l in machine.program for b in T))

    book.add(
        G.Cleanup,
        SendIn(lh, r1, lh, r1),
        Dissolve(r1, lh, ms(lhp)),
        SendIn(lhp, r2, lhp, r2),
        *(Rewrite(SKIN, a_[i]) for i in (1, 2)),
    )
    if mode == TRACES:
        r4 = lab["4"]
        book.add(
            G.Cleanup,
            Dissolve(r2, lhp, ms(lhpp)),
            SendIn(lhpp, r4, lhpp, r4),
            Dissolve(r4, lhpp),
        )
        book.add(G.TravellerWalk, *(SendIn(t, a, t, a) for a in T))
        init = build((SKIN, (r4, t), l0p))
    else:
        book.add(G.Cleanup, Dissolve(r2, lhp, ms(f)))
        book.add(G.Deposit, *(SendIn(f, a, fp, a) for a in T))
        book.add(G.Deposit, *(Rewrite(a, fp, ms(a, f)) for a in T))
        if mode == EXT:
            book.add(G.ExtShuttle, *(SendOut(b, a, a, b) for b in T for a in T))
            book.add(G.ExtShuttle, *(SendOut(SKIN, a, a, SKIN) for a in T))
        init = build((SKIN, l0p))
    return book.system(init, RM_OPS, T, lab.values(), traveller=t, witness=T)

