"""The ``.psys`` text format: parsing, serialization and validation.

Layout::

    objects: a b t
    labels: 1 2
    ops: a b c d
    output: a b
    traveller: t
    init: [0 a [1 t]]
    rules:
    # gadget: Demo
    [0 a -> b b]
    [1 t] -> t [1]

Headers take the rest of their line (``init`` may continue until its brackets
balance). After ``rules:`` each non-blank line is one rule. A line whose first
character is ``#`` followed by whitespace is a comment, unless the next thing
on the line is ``[`` (so ``# [1] -> [1 #]`` is a rule moving the object ``#``).
``# gadget: Tag`` comments tag the rules that follow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Diagnostic, ModelError, ParseError
from .model import (
    SKIN,
    Configuration,
    Create,
    Dissolve,
    Divide,
    Duplicate,
    Membrane,
    Multiset,
    PSystem,
    Rewrite,
    Rule,
    SendIn,
    SendOut,
    classify_rule,
    format_ops,
    guard_family,
    elementary_guards,
    lop_signature,
    op_allowed,
    OP_ORDER,
    rule_labels,
    rule_objects,
)

HEADERS = ("objects", "labels", "ops", "output", "traveller", "witness", "init")

Token = tuple[str, int, int]  # text, line, column


def is_comment(line: str) -> bool:
    s = line.lstrip()
    if not s.startswith("#"):
        return False
    rest = s[1:]
    if rest and not rest[0].isspace():
        return False
    return not rest.strip().startswith("[")


def tokenize(line: str, lineno: int, col0: int = 0) -> list[Token]:
    out: list[Token] = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
        elif ch in "[]":
            out.append((ch, lineno, col0 + i + 1))
            i += 1
        elif line.startswith("->", i):
            out.append(("->", lineno, col0 + i + 1))
            i += 2
        else:
            j = i
            while j < n and not line[j].isspace() and line[j] not in "[]" and not line.startswith("->", j):
                j += 1
            out.append((line[i:j], lineno, col0 + i + 1))
            i = j
    return out


def _plain(tok: Token) -> bool:
    return tok[0] not in ("[", "]", "->")


class _Cursor:
    def __init__(self, toks: list[Token], eol: tuple[int, int]):
        self.toks = toks
        self.pos = 0
        self.eol = eol

    def peek(self, k: int = 0) -> Token | None:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def take(self, text: str | None = None) -> Token:
        tok = self.peek()
        if tok is None:
            want = f"{text!r}" if text else "a token"
            raise ParseError(f"expected {want}, found end of input", *self.eol)
        if text is not None and tok[0] != text:
            raise ParseError(f"expected {text!r}, found {tok[0]!r}", tok[1], tok[2])
        if text is None and not _plain(tok):
            raise ParseError(f"expected a name, found {tok[0]!r}", tok[1], tok[2])
        self.pos += 1
        return tok

    def names_until(self, stop: str | None) -> list[Token]:
        out = []
        while (tok := self.peek()) is not None and tok[0] != stop:
            out.append(self.take())
        return out

    def done(self) -> bool:
        return self.pos >= len(self.toks)


def parse_tree(cur: _Cursor, counter: list[int]) -> tuple[Membrane, list[tuple[str, Token]]]:
    """Parse ``[label item*]``; also returns ``("label"|"obj", token)`` pairs for checking."""
    cur.take("[")
    label_tok = cur.take()
    mid = counter[0]
    counter[0] += 1
    objs: list[str] = []
    kids: list[Membrane] = []
    seen: list[tuple[str, Token]] = [("label", label_tok)]
    while True:
        tok = cur.peek()
        if tok is None:
            raise ParseError("unterminated membrane", *cur.eol)
        if tok[0] == "]":
            cur.take("]")
            break
        if tok[0] == "[":
            kid, names = parse_tree(cur, counter)
            kids.append(kid)
            seen.extend(names)
        else:
            name = cur.take()
            objs.append(name[0])
            seen.append(("obj", name))
    return Membrane(mid, label_tok[0], Multiset(objs), tuple(kids)), seen


def parse_rule(toks: list[Token], eol: tuple[int, int]) -> Rule:
    cur = _Cursor(toks, eol)
    first = cur.peek()
    if first is None:
        raise ParseError("empty rule", *eol)

    def end(rule: Rule) -> Rule:
        if not cur.done():
            tok = cur.peek()
            raise ParseError(f"unexpected {tok[0]!r} after rule", tok[1], tok[2])
        return rule

    try:
        if first[0] != "[":
            # a [i] -> [j b]
            a = cur.take()[0]
            cur.take("[")
            i = cur.take()[0]
            cur.take("]")
            cur.take("->")
            cur.take("[")
            j = cur.take()[0]
            b = cur.take()[0]
            cur.take("]")
            return end(SendIn(a, i, b, j))
        cur.take("[")
        i = cur.take()[0]
        a = cur.take()[0]
        nxt = cur.peek()
        if nxt is not None and nxt[0] == "->":
            cur.take("->")
            if (tok := cur.peek()) is not None and tok[0] == "[":
                cur.take("[")
                j = cur.take()[0]
                v = [t[0] for t in cur.names_until("]")]
                cur.take("]")
                cur.take("]")
                return end(Create(i, a, j, Multiset(v)))
            v = [t[0] for t in cur.names_until("]")]
            cur.take("]")
            return end(Rewrite(i, a, Multiset(v)))
        cur.take("]")
        cur.take("->")
        rest = cur.toks[cur.pos :]
        texts = [t[0] for t in rest]
        if all(_plain(t) for t in rest):
            cur.pos = len(cur.toks)
            return Dissolve(i, a, Multiset(texts))
        if len(texts) == 4 and _plain(rest[0]) and texts[1] == "[" and texts[3] == "]":
            cur.pos = len(cur.toks)
            return SendOut(i, a, texts[0], _name(rest[2]))
        cur.take("[")
        k = cur.take()[0]
        b = cur.take()[0]
        tok = cur.peek()
        if tok is not None and tok[0] == "]":
            cur.take("]")
            cur.take("[")
            j = cur.take()[0]
            c = cur.take()[0]
            cur.take("]")
            return end(Divide(i, a, k, b, j, c))
        cur.take("[")
        j = cur.take()[0]
        c = cur.take()[0]
        cur.take("]")
        cur.take("]")
        return end(Duplicate(i, a, k, b, j, c))
    except ModelError as exc:
        raise ParseError(str(exc), first[1], first[2]) from None


def _name(tok: Token) -> str:
    if not _plain(tok):
        raise ParseError(f"expected a name, found {tok[0]!r}", tok[1], tok[2])
    return tok[0]


def parse_psystem(text: str) -> PSystem:
    lines = text.splitlines()
    headers: dict[str, tuple[list[Token], int]] = {}
    rules: list[Rule] = []
    tags: list[str | None] = []
    positions: list[tuple[int, int]] = []
    tagged = False
    current_tag: str | None = None
    in_rules = False
    idx = 0
    while idx < len(lines):
        raw = lines[idx]
        lineno = idx + 1
        idx += 1
        if not raw.strip():
            continue
        if is_comment(raw):
            body = raw.strip()[1:].strip()
            if body.startswith("gadget:"):
                current_tag = body[len("gadget:") :].strip() or None
                tagged = True
            continue
        if in_rules:
            toks = tokenize(raw, lineno)
            rule = parse_rule(toks, (lineno, len(raw) + 1))
            rules.append(rule)
            tags.append(current_tag)
            positions.append((toks[0][1], toks[0][2]))
            continue
        stripped = raw.strip()
        key, sep, rest = stripped.partition(":")
        key = key.strip()
        col = raw.index(stripped) + 1
        if not sep:
            raise ParseError(f"expected 'header:' or 'rules:', found {stripped!r}", lineno, col)
        if key == "rules":
            if rest.strip():
                raise ParseError("rules go on the lines after 'rules:'", lineno, col)
            in_rules = True
            continue
        if key not in HEADERS:
            raise ParseError(f"unknown header {key!r}", lineno, col)
        if key in headers:
            raise ParseError(f"duplicate header {key!r}", lineno, col)
        offset = raw.index(":") + 1
        toks = tokenize(raw[offset:], lineno, offset)
        if key == "init":
            depth = sum(1 if t[0] == "[" else -1 if t[0] == "]" else 0 for t in toks)
            while depth > 0 and idx < len(lines):
                more = tokenize(lines[idx], idx + 1)
                idx += 1
                depth += sum(1 if t[0] == "[" else -1 if t[0] == "]" else 0 for t in more)
                toks.extend(more)
        headers[key] = (toks, lineno)

    if not in_rules:
        raise ParseError("missing 'rules:' section", len(lines) + 1, 1)
    if "init" not in headers:
        raise ParseError("missing 'init:' header", 1, 1)

    def names(key: str) -> list[Token]:
        toks, lineno = headers.get(key, ([], 0))
        for t in toks:
            if not _plain(t):
                raise ParseError(f"unexpected {t[0]!r} in {key}", t[1], t[2])
        return toks

    objects = frozenset(t[0] for t in names("objects"))
    labels = frozenset(t[0] for t in names("labels"))
    for t in names("labels"):
        if t[0] == SKIN:
            raise ParseError("the skin label 0 is implicit and may not be declared", t[1], t[2])
    ops_toks = names("ops")
    for t in ops_toks:
        if t[0] not in OP_ORDER:
            raise ParseError(f"unknown op code {t[0]!r}", t[1], t[2])
    output = frozenset(t[0] for t in names("output"))
    trav = names("traveller")
    if len(trav) > 1:
        raise ParseError("at most one traveller", trav[1][1], trav[1][2])
    witness = frozenset(t[0] for t in names("witness"))

    init_toks, init_line = headers["init"]
    cur = _Cursor(init_toks, (init_line, 1))
    root, seen = parse_tree(cur, [0])
    if not cur.done():
        t = cur.peek()
        raise ParseError(f"unexpected {t[0]!r} after init tree", t[1], t[2])
    if root.label != SKIN:
        t = init_toks[1]
        raise ParseError(f"the outermost membrane must be labelled {SKIN}", t[1], t[2])
    all_labels = labels | {SKIN}
    for kind, (name, line, col) in seen:
        if kind == "label" and name not in all_labels:
            raise ParseError(f"undeclared label {name!r}", line, col)
        if kind == "obj" and name not in objects:
            raise ParseError(f"undeclared object {name!r}", line, col)
    for rule, (line, col) in zip(rules, positions):
        bad = sorted(rule_labels(rule) - all_labels)
        if bad:
            raise ParseError(f"undeclared label {bad[0]!r}", line, col)
        bad = sorted(rule_objects(rule) - objects)
        if bad:
            raise ParseError(f"undeclared object {bad[0]!r}", line, col)
    for key in ("output", "witness"):
        for t in names(key):
            if t[0] not in objects and t[0] not in all_labels:
                raise ParseError(f"{key} symbol {t[0]!r} is neither an object nor a label", t[1], t[2])
    try:
        config = Configuration(root)
        return PSystem(
            objects=objects,
            labels=labels,
            ops=frozenset(t[0] for t in ops_toks),
            init=config,
            rules=tuple(rules),
            output=output,
            traveller=trav[0][0] if trav else None,
            witness=witness,
            tags=tuple(tags) if tagged else (),
            positions=tuple(positions),
        )
    except ModelError as exc:
        raise ParseError(str(exc), init_line, 1) from None


def format_multiset(v: Multiset) -> str:
    return " ".join(v)


def format_tree(m: Membrane) -> str:
    parts = [m.label, *m.contents, *(format_tree(c) for c in m.children)]
    return "[" + " ".join(parts) + "]"


def format_rule(rule: Rule) -> str:
    def ws(*parts: str) -> str:
        return " ".join(p for p in parts if p)

    if isinstance(rule, Rewrite):
        return "[" + ws(rule.i, rule.a, "->", format_multiset(rule.v)) + "]"
    if isinstance(rule, SendOut):
        return f"[{rule.i} {rule.a}] -> {rule.b} [{rule.j}]"
    if isinstance(rule, SendIn):
        return f"{rule.a} [{rule.i}] -> [{rule.j} {rule.b}]"
    if isinstance(rule, Create):
        return f"[{rule.i} {rule.a} -> [" + ws(rule.j, format_multiset(rule.v)) + "]]"
    if isinstance(rule, Divide):
        return f"[{rule.i} {rule.a}] -> [{rule.k} {rule.b}] [{rule.j} {rule.c}]"
    if isinstance(rule, Duplicate):
        return f"[{rule.i} {rule.a}] -> [{rule.k} {rule.b} [{rule.j} {rule.c}]]"
    if isinstance(rule, Dissolve):
        return ws(f"[{rule.i} {rule.a}] ->", format_multiset(rule.v))
    raise TypeError(f"not a rule: {rule!r}")


def _render(system: PSystem) -> tuple[list[str], list[int]]:
    lines = [
        "objects: " + " ".join(sorted(system.objects)),
        "labels: " + " ".join(sorted(system.labels)),
        "ops: " + format_ops(system.ops),
        "output: " + " ".join(sorted(system.output)),
    ]
    if system.traveller is not None:
        lines.append(f"traveller: {system.traveller}")
    if system.witness:
        lines.append("witness: " + " ".join(sorted(system.witness)))
    lines.append("init: " + format_tree(system.init.root))
    lines.append("rules:")
    rule_lines = []
    last_tag = None
    for n, rule in enumerate(system.rules):
        tag = system.tags[n] if system.tags else None
        if tag is not None and tag != last_tag:
            lines.append(f"# gadget: {tag}")
        last_tag = tag
        lines.append(format_rule(rule))
        rule_lines.append(len(lines))
    return [line.rstrip() for line in lines], rule_lines


def serialize_psystem(system: PSystem) -> str:
    return "\n".join(_render(system)[0]) + "\n"


# -- validation ------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    op_codes_used: frozenset[str]
    lop: tuple[int, int]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def summary(self) -> str:
        m, n = self.lop
        return f"ops: {format_ops(self.op_codes_used)}  m={m} n={n}"


def _traveller_delta(rule: Rule, t: str) -> tuple[int, int]:
    """(copies consumed, copies produced) of the traveller by one application."""
    consumed = int(rule.a == t)
    if isinstance(rule, (Rewrite, Dissolve)):
        produced = rule.v.count(t)
    elif isinstance(rule, Create):
        produced = rule.v.count(t)
    elif isinstance(rule, (SendOut, SendIn)):
        produced = int(rule.b == t)
    else:
        produced = int(rule.b == t) + int(rule.c == t)
    return consumed, produced


def validate_psystem(system: PSystem, declared_ops=None) -> ValidationReport:
    declared = frozenset(system.ops if declared_ops is None else declared_ops)
    guards = elementary_guards(declared)
    if system.positions:
        where = list(system.positions)
    else:
        where = [(line, 1) for line in _render(system)[1]]
    diags: list[Diagnostic] = []
    used = set()
    for rule, (line, col) in zip(system.rules, where):
        code = classify_rule(rule, elementary_only=guard_family(rule) in guards)
        used.add(code)
        if not op_allowed(code, declared):
            diags.append(
                Diagnostic("error", line, col, f"rule {format_rule(rule)} has op {code}, not in {{{format_ops(declared)}}}")
            )
        t = system.traveller
        if t is not None:
            consumed, produced = _traveller_delta(rule, t)
            if produced > consumed:
                what = "duplicates" if consumed else "creates"
                diags.append(Diagnostic("error", line, col, f"rule {format_rule(rule)} {what} the traveller {t}"))
            elif consumed > produced:
                diags.append(Diagnostic("error", line, col, f"rule {format_rule(rule)} rewrites the traveller {t}"))
            elif isinstance(rule, Divide) and rule.a == t:
                diags.append(Diagnostic("error", line, col, f"rule {format_rule(rule)} duplicates the traveller {t}"))
    mentioned_objs = {o for m in system.init.membranes() for o in m.contents.distinct()}
    mentioned_labels = {m.label for m in system.init.membranes()}
    for rule in system.rules:
        mentioned_objs |= rule_objects(rule)
        mentioned_labels |= rule_labels(rule)
    for name in sorted(system.objects - mentioned_objs):
        diags.append(Diagnostic("warning", 1, 1, f"object {name!r} is declared but never used"))
    for name in sorted(system.labels - mentioned_labels):
        diags.append(Diagnostic("warning", 2, 1, f"label {name!r} is declared but never used"))
    ok = not any(d.severity == "error" for d in diags)
    return ValidationReport(ok, frozenset(used), lop_signature(system), diags)
