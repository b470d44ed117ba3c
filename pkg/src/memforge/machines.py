"""Register machines with an output tape, and the ``.rm`` format.

::

    registers: 2
    output: a b
    start: l0
    halt: lh
    l0: WRITE a l1
    l1: ADD 1 l0 l2
    l2: SUB 1 l3 lh
    l3: WRITE b l2
    lh: HALT
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import Diagnostic, ParseError


@dataclass(frozen=True)
class Add:
    register: int
    then: str
    orelse: str


@dataclass(frozen=True)
class Sub:
    register: int
    then: str  # taken when the register was non-zero
    orelse: str


@dataclass(frozen=True)
class Write:
    symbol: str
    next: str


@dataclass(frozen=True)
class Halt:
    pass


Instruction = Union[Add, Sub, Write, Halt]


@dataclass(frozen=True)
class RegisterMachine:
    n: int
    alphabet: tuple[str, ...]
    start: str
    halt: str
    program: dict[str, Instruction] = field(hash=False)
    # line of each instruction in the source text, when parsed
    lines: dict[str, int] = field(default_factory=dict, compare=False, hash=False)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.program)


def check_rm(machine: RegisterMachine) -> list[Diagnostic]:
    """Well-formedness problems; the two-register requirement is only a warning."""
    out: list[Diagnostic] = []

    def at(label: str | None) -> int:
        return machine.lines.get(label, 1) if label else 1

    if machine.n < 1:
        out.append(Diagnostic("error", 1, 1, "a machine needs at least one register"))
    elif machine.n != 2:
        out.append(Diagnostic("warning", 1, 1, f"{machine.n} registers: the compiler needs exactly 2"))
    if machine.start not in machine.program:
        out.append(Diagnostic("error", 1, 1, f"start label {machine.start!r} has no instruction"))
    if machine.halt not in machine.program:
        out.append(Diagnostic("error", 1, 1, f"halt label {machine.halt!r} has no instruction"))
    elif not isinstance(machine.program[machine.halt], Halt):
        out.append(Diagnostic("error", at(machine.halt), 1, f"{machine.halt!r} must be HALT"))
    for label, ins in machine.program.items():
        line = at(label)
        if isinstance(ins, Halt) and label != machine.halt:
            out.append(Diagnostic("error", line, 1, f"HALT may only sit at {machine.halt!r}"))
        if isinstance(ins, (Add, Sub)):
            if not 1 <= ins.register <= machine.n:
                out.append(Diagnostic("error", line, 1, f"register {ins.register} out of range 1..{machine.n}"))
            targets = (ins.then, ins.orelse)
        elif isinstance(ins, Write):
            if ins.symbol not in machine.alphabet:
                out.append(Diagnostic("error", line, 1, f"symbol {ins.symbol!r} is not in the output alphabet"))
            targets = (ins.next,)
        else:
            targets = ()
        for t in targets:
            if t not in machine.program:
                out.append(Diagnostic("error", line, 1, f"jump to undefined label {t!r}"))
    return out


def _int(text: str, line: int, col: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, found {text!r}", line, col) from None


def parse_rm(text: str) -> RegisterMachine:
    headers: dict[str, list[str]] = {}
    program: dict[str, Instruction] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        col = raw.index(body) + 1
        head, sep, rest = body.partition(":")
        head = head.strip()
        if not sep or not head:
            raise ParseError(f"expected 'name: ...', found {body!r}", lineno, col)
        words = rest.split()
        if head in ("registers", "output", "start", "halt"):
            if head in headers:
                raise ParseError(f"duplicate header {head!r}", lineno, col)
            headers[head] = words
            if head in ("registers", "start", "halt") and len(words) != 1:
                raise ParseError(f"{head} takes exactly one value", lineno, col)
            continue
        if head in program:
            raise ParseError(f"duplicate label {head!r}", lineno, col)
        if not words:
            raise ParseError(f"missing instruction for {head!r}", lineno, col)
        op, args = words[0].upper(), words[1:]
        arity = {"ADD": 3, "SUB": 3, "WRITE": 2, "HALT": 0}.get(op)
        if arity is None:
            raise ParseError(f"unknown instruction {words[0]!r}", lineno, col)
        if len(args) != arity:
            raise ParseError(f"{op} takes {arity} operands, got {len(args)}", lineno, col)
        if op == "ADD":
            program[head] = Add(_int(args[0], lineno, col), args[1], args[2])
        elif op == "SUB":
            program[head] = Sub(_int(args[0], lineno, col), args[1], args[2])
        elif op == "WRITE":
            program[head] = Write(args[0], args[1])
        else:
            program[head] = Halt()
        lines[head] = lineno
    for key in ("registers", "start", "halt"):
        if key not in headers:
            raise ParseError(f"missing header {key!r}", 1, 1)
    machine = RegisterMachine(
        n=_int(headers["registers"][0], 1, 1),
        alphabet=tuple(headers.get("output", [])),
        start=headers["start"][0],
        halt=headers["halt"][0],
        program=program,
        lines=lines,
    )
    for diag in check_rm(machine):
        if diag.severity == "error":
            raise ParseError(diag.message, diag.line, diag.column)
    return machine


def serialize_rm(machine: RegisterMachine) -> str:
    out = [
        f"registers: {machine.n}",
        "output: " + " ".join(machine.alphabet),
        f"start: {machine.start}",
        f"halt: {machine.halt}",
    ]
    for label, ins in machine.program.items():
        if isinstance(ins, Add):
            body = f"ADD {ins.register} {ins.then} {ins.orelse}"
        elif isinstance(ins, Sub):
            body = f"SUB {ins.register} {ins.then} {ins.orelse}"
        elif isinstance(ins, Write):
            body = f"WRITE {ins.symbol} {ins.next}"
        else:
            body = "HALT"
        out.append(f"{label}: {body}")
    return "\n".join(line.rstrip() for line in out) + "\n"
