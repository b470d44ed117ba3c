"""Matrix grammars with appearance checking in Z-binary normal form (``.mg``).

::

    N1: X Y
    N2: A B
    T: a b
    init: S -> X A
    m1: X -> Y , A -> a B
    m2: Y -> X , B -> A b
    m3: X -> Z , A -> # (ac)
    terminal: Z -> lambda

``S``, ``Z`` and ``#`` are the distinguished symbols. Type-2 matrices are
indexed 1..k and type-3 matrices k+1..n, each group in file order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

START, FINAL, TRAP = "S", "Z", "#"

# (left symbol, right-hand side, appearance-checked)
CfRule = tuple[str, tuple[str, ...], bool]


@dataclass(frozen=True)
class Matrix:
    name: str
    index: int
    left: str  # X
    right: str  # Y
    symbol: str  # A
    rhs: tuple[str, ...]  # x, or ("#",) for a checking matrix
    checking: bool = False

    @property
    def rules(self) -> tuple[CfRule, ...]:
        return ((self.left, (self.right,), False), (self.symbol, self.rhs, self.checking))


@dataclass(frozen=True)
class MatrixGrammar:
    n1: tuple[str, ...]
    n2: tuple[str, ...]
    terminals: tuple[str, ...]
    init_x: str
    init_a: str
    matrices: tuple[Matrix, ...]

    @property
    def k(self) -> int:
        return sum(1 for m in self.matrices if not m.checking)

    @property
    def initial_rules(self) -> tuple[CfRule, ...]:
        return ((START, (self.init_x, self.init_a), False),)

    @property
    def terminal_rules(self) -> tuple[CfRule, ...]:
        return ((FINAL, (), False),)

    def all_matrices(self) -> list[tuple[CfRule, ...]]:
        return [self.initial_rules, *(m.rules for m in self.matrices), self.terminal_rules]


def _split_rule(text: str, line: int, col: int) -> tuple[str, list[str]]:
    lhs, arrow, rhs = text.partition("->")
    if not arrow:
        raise ParseError(f"expected 'A -> x', found {text.strip()!r}", line, col)
    left = lhs.split()
    if len(left) != 1:
        raise ParseError(f"left side must be one symbol, found {lhs.strip()!r}", line, col)
    return left[0], rhs.split()


def parse_mg(text: str) -> MatrixGrammar:
    alph: dict[str, list[str]] = {}
    init: tuple[str, str] | None = None
    terminal_seen = False
    raw_matrices: list[tuple[str, str, str, str, tuple[str, ...], bool, int, int]] = []
    names: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.strip()
        if not body or body.startswith("//") or (body.startswith("#") and body[1:2].isspace()):
            continue
        col = raw.index(body) + 1
        head, sep, rest = body.partition(":")
        head = head.strip()
        if not sep:
            raise ParseError(f"expected 'name: ...', found {body!r}", lineno, col)
        if head in ("N1", "N2", "T"):
            if head in alph:
                raise ParseError(f"duplicate alphabet {head}", lineno, col)
            alph[head] = rest.split()
        elif head == "init":
            left, right = _split_rule(rest, lineno, col)
            if left != START or len(right) != 2:
                raise ParseError(f"initial matrix must be '{START} -> X A'", lineno, col)
            init = (right[0], right[1])
        elif head == "terminal":
            left, right = _split_rule(rest, lineno, col)
            if left != FINAL or right not in ([], ["lambda"], ["λ"]):
                raise ParseError(f"terminal matrix must be '{FINAL} -> lambda'", lineno, col)
            terminal_seen = True
        else:
            if head in names:
                raise ParseError(f"duplicate matrix name {head!r}", lineno, col)
            names.add(head)
            checking = False
            if rest.rstrip().endswith("(ac)"):
                checking = True
                rest = rest.rstrip()[: -len("(ac)")]
            parts = rest.split(",")
            if len(parts) != 2:
                raise ParseError("a matrix has exactly two rules 'X -> Y , A -> x'", lineno, col)
            x, ys = _split_rule(parts[0], lineno, col)
            a, rhs = _split_rule(parts[1], lineno, col)
            if len(ys) != 1:
                raise ParseError("the first rule of a matrix is X -> Y with one symbol", lineno, col)
            raw_matrices.append((head, x, ys[0], a, tuple(rhs), checking, lineno, col))

    for key in ("N1", "N2", "T"):
        if key not in alph:
            raise ParseError(f"missing alphabet {key}", 1, 1)
    if init is None:
        raise ParseError("missing initial matrix 'init: S -> X A'", 1, 1)
    if not terminal_seen:
        raise ParseError("missing terminal matrix 'terminal: Z -> lambda'", 1, 1)
    n1, n2, t = (tuple(alph[k]) for k in ("N1", "N2", "T"))
    groups = {"N1": set(n1), "N2": set(n2), "T": set(t)}
    reserved = {START, FINAL, TRAP}
    for key, members in groups.items():
        clash = members & reserved
        if clash:
            raise ParseError(f"{key} may not contain the reserved symbol {sorted(clash)[0]!r}", 1, 1)
        for other, rest_members in groups.items():
            if other != key and members & rest_members:
                raise ParseError(f"alphabets {key} and {other} overlap on {sorted(members & rest_members)[0]!r}", 1, 1)
    if init[0] not in groups["N1"] or init[1] not in groups["N2"]:
        raise ParseError("initial matrix must be S -> X A with X in N1 and A in N2", 1, 1)

    type2: list[Matrix] = []
    type3: list[Matrix] = []
    for name, x, y, a, rhs, checking, line, col in raw_matrices:
        if x not in groups["N1"]:
            raise ParseError(f"{name}: {x!r} is not in N1", line, col)
        if y not in groups["N1"] and y != FINAL:
            raise ParseError(f"{name}: {y!r} is not in N1 or Z", line, col)
        if a not in groups["N2"]:
            raise ParseError(f"{name}: {a!r} is not in N2", line, col)
        if checking:
            if rhs != (TRAP,):
                raise ParseError(f"{name}: an (ac) rule must be '{a} -> {TRAP}'", line, col)
            type3.append(Matrix(name, 0, x, y, a, rhs, True))
            continue
        if rhs == (TRAP,):
            raise ParseError(f"{name}: '{a} -> {TRAP}' must be marked (ac)", line, col)
        if not 1 <= len(rhs) <= 2:
            raise ParseError(f"{name}: |x| = {len(rhs)}, must be 1 or 2", line, col)
        for sym in rhs:
            if sym not in groups["N2"] and sym not in groups["T"]:
                raise ParseError(f"{name}: {sym!r} is not in N2 or T", line, col)
        type2.append(Matrix(name, 0, x, y, a, rhs, False))
    indexed = tuple(
        Matrix(m.name, i, m.left, m.right, m.symbol, m.rhs, m.checking)
        for i, m in enumerate(type2 + type3, 1)
    )
    return MatrixGrammar(n1, n2, t, init[0], init[1], indexed)


def serialize_mg(grammar: MatrixGrammar) -> str:
    out = [
        "N1: " + " ".join(grammar.n1),
        "N2: " + " ".join(grammar.n2),
        "T: " + " ".join(grammar.terminals),
        f"init: {START} -> {grammar.init_x} {grammar.init_a}",
    ]
    for m in grammar.matrices:
        line = f"{m.name}: {m.left} -> {m.right} , {m.symbol} -> {' '.join(m.rhs)}"
        if m.checking:
            line += " (ac)"
        out.append(line)
    out.append(f"terminal: {FINAL} -> lambda")
    return "\n".join(out) + "\n"
