"""Command-line entry point: ``memforge <subcommand> ...``.

Exit codes: 0 success (or languages equal), 1 validation or comparison
failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from .compilers import compile_mg, compile_rm
from .engine import EngineOptions, MULTI, SINGLE
from .errors import MemforgeError, ParseError
from .explorer import LanguageSample, Limits, explore, random_run
from .grammars import parse_mg
from .machines import parse_rm
from .model import format_ops, parse_ops
from .oracles import mg_enumerate, rm_enumerate
from .outputs import MODES, StringSet, render
from .psys import parse_psystem, serialize_psystem, validate_psystem

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from None


def _sorted_texts(strings: StringSet | frozenset) -> list[str]:
    words = strings.strings if isinstance(strings, StringSet) else strings
    return sorted((render(w) for w in words), key=lambda s: (len(s), s))


def threads() -> int:
    """Worker cap from ``MEMFORGE_THREADS``; exploration itself is single-threaded."""
    raw = os.environ.get("MEMFORGE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"MEMFORGE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"MEMFORGE_THREADS must be a positive integer, got {raw!r}")
    return n


def _limits(args) -> Limits:
    return Limits(
        max_steps=args.max_steps,
        max_configs=args.max_configs,
        max_membranes=args.max_membranes,
        max_objects=args.max_objects,
        max_string_len=args.max_string_len,
        max_strings=args.max_strings,
    )


def _options(args, system) -> EngineOptions:
    return EngineOptions(crossing_policy=args.crossing_policy, elementary_only=system.guards())


def sample_dict(sample: LanguageSample) -> dict:
    return {
        "mode": sample.mode,
        "strings": _sorted_texts(sample.strings),
        "complete_up_to": sample.complete_up_to,
        "truncated": sample.truncated,
        "stats": sample.stats.as_dict(),
    }


def _emit(args, data: dict, lines: list[str] | None = None) -> None:
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False))
        return
    if lines is None:
        lines = []
        for key, value in data.items():
            if isinstance(value, dict):
                value = " ".join(f"{k}={v}" for k, v in value.items())
            elif not isinstance(value, str):
                value = json.dumps(value, ensure_ascii=False)
            lines.append(f"{key}: {value}")
    print("\n".join(lines))


# -- subcommands -----------------------------------------------------------


def cmd_validate(args) -> int:
    system = parse_psystem(_read(args.file))
    declared = parse_ops(args.ops.split()) if args.ops else None
    report = validate_psystem(system, declared)
    m, n = report.lop
    data = {
        "ok": report.ok,
        "ops": format_ops(report.op_codes_used),
        "lop": {"m": m, "n": n},
        "diagnostics": [
            {"severity": d.severity, "line": d.line, "column": d.column, "message": d.message}
            for d in report.diagnostics
        ],
    }
    lines = [report.summary(), *(f"{args.file}:{d}" for d in report.diagnostics)]
    lines.append("ok" if report.ok else "invalid")
    _emit(args, data, lines)
    return OK if report.ok else FAIL


def cmd_run(args) -> int:
    system = parse_psystem(_read(args.file))
    limits = Limits(max_steps=args.max_steps, max_strings=args.max_strings)
    report = random_run(system, args.mode, args.seed, limits, _options(args, system))
    data = {
        "mode": args.mode,
        "seed": report.seed,
        "steps": report.steps,
        "halted": report.halted,
        "final": str(report.final),
        "outputs": _sorted_texts(report.outputs),
    }
    _emit(args, data)
    return OK


def cmd_explore(args) -> int:
    system = parse_psystem(_read(args.file))
    sample = explore(system, args.mode, _limits(args), _options(args, system))
    _emit(args, sample_dict(sample))
    return OK


def _write_system(args, system) -> int:
    text = serialize_psystem(system)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        if args.json:
            print(json.dumps({"output": args.output, "rules": len(system.rules)}))
    elif args.json:
        print(json.dumps({"output": None, "rules": len(system.rules), "psys": text}, ensure_ascii=False))
    else:
        sys.stdout.write(text)
    return OK


def _compile(args, compiler, parser) -> int:
    source = parser(_read(args.file))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        system = compiler(source, args.mode)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return _write_system(args, system)


def cmd_compile_rm(args) -> int:
    return _compile(args, compile_rm, parse_rm)


def cmd_compile_mg(args) -> int:
    return _compile(args, compile_mg, parse_mg)


def _oracle_out(args, result: StringSet) -> int:
    _emit(args, {"strings": _sorted_texts(result), "truncated": result.cap_hit})
    return OK


def cmd_oracle_rm(args) -> int:
    machine = parse_rm(_read(args.file))
    return _oracle_out(args, rm_enumerate(machine, args.max_len, args.max_steps))


def cmd_oracle_mg(args) -> int:
    grammar = parse_mg(_read(args.file))
    return _oracle_out(args, mg_enumerate(grammar, args.max_len, args.max_steps))


def _oracle_for(path: str, max_len: int) -> StringSet:
    text = _read(path)
    if path.endswith(".rm"):
        return rm_enumerate(parse_rm(text), max_len)
    if path.endswith(".mg"):
        return mg_enumerate(parse_mg(text), max_len)
    try:
        return rm_enumerate(parse_rm(text), max_len)
    except ParseError:
        return mg_enumerate(parse_mg(text), max_len)


def cmd_lang_eq(args) -> int:
    system = parse_psystem(_read(args.file))
    oracle = _oracle_for(args.against, args.max_len)
    limits = Limits(
        max_steps=args.max_steps,
        max_configs=args.max_configs,
        max_string_len=args.max_len,
        max_strings=args.max_strings,
    )
    sample = explore(system, args.mode, limits, _options(args, system))
    got, want = sample.strings.strings, oracle.strings
    equal = got == want and not sample.truncated and not oracle.cap_hit
    data = {
        "equal": equal,
        "mode": args.mode,
        "max_len": args.max_len,
        "explored": _sorted_texts(got),
        "oracle": _sorted_texts(want),
        "missing": _sorted_texts(want - got),
        "extra": _sorted_texts(got - want),
        "explore_truncated": sample.truncated,
        "oracle_truncated": oracle.cap_hit,
    }
    _emit(args, data)
    return OK if equal else FAIL


# -- argument parsing ------------------------------------------------------


def _add_mode(p, modes=MODES, required=True):
    p.add_argument("--mode", choices=modes, required=required)


def _add_engine(p):
    p.add_argument("--crossing-policy", choices=(SINGLE, MULTI), default=SINGLE)


def build_parser() -> argparse.ArgumentParser:
    d = Limits()
    parser = argparse.ArgumentParser(prog="memforge", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(func=func)
        return p

    p = command("validate", cmd_validate, "check a .psys file and report its LOP signature")
    p.add_argument("file")
    p.add_argument("--ops", help="declared op codes, e.g. \"a b c d g'\" (default: the file's ops)")

    p = command("run", cmd_run, "follow one seeded computation")
    p.add_argument("file")
    _add_mode(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=d.max_steps)
    p.add_argument("--max-strings", type=int, default=d.max_strings)
    _add_engine(p)

    p = command("explore", cmd_explore, "enumerate the generated language within limits")
    p.add_argument("file")
    _add_mode(p)
    for flag in ("max_steps", "max_configs", "max_membranes", "max_objects", "max_string_len", "max_strings"):
        p.add_argument("--" + flag.replace("_", "-"), type=int, default=getattr(d, flag))
    _add_engine(p)

    for name, func, what in (
        ("compile-rm", cmd_compile_rm, "register machine"),
        ("compile-mg", cmd_compile_mg, "matrix grammar"),
    ):
        p = command(name, func, f"compile a {what} to a .psys system")
        p.add_argument("file")
        _add_mode(p)
        p.add_argument("-o", "--output")

    for name, func in (("oracle-rm", cmd_oracle_rm), ("oracle-mg", cmd_oracle_mg)):
        p = command(name, func, "reference language up to a length bound")
        p.add_argument("file")
        p.add_argument("--max-len", type=int, default=d.max_string_len)
        p.add_argument("--max-steps", type=int, default=10_000)

    p = command("lang-eq", cmd_lang_eq, "compare an explored language with an oracle")
    p.add_argument("file")
    _add_mode(p)
    p.add_argument("--against", required=True, help=".rm or .mg source")
    p.add_argument("--max-len", type=int, default=d.max_string_len)
    p.add_argument("--max-steps", type=int, default=d.max_steps)
    p.add_argument("--max-configs", type=int, default=d.max_configs)
    p.add_argument("--max-strings", type=int, default=d.max_strings)
    _add_engine(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        threads()
        return args.func(args)
    except ParseError as exc:
        print(f"{getattr(args, 'file', '')}:{exc.line}:{exc.column}: error: {exc.message}", file=sys.stderr)
        return USAGE
    except (UsageError, MemforgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
