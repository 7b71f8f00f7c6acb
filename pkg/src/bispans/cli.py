"""Command-line interface: ``bispans <command> ...``.

Every value is read and written in the canonical JSON format of
:mod:`bispans.serialize`.  Exit status is 0 on success, 1 when a ``check``
suite finds a counterexample (printed as one JSON object on stdout) and 2 on
malformed input (one JSON error record on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import serialize
from .arrfib import ArMor, ArObj, ar_canon, ar_compose, classify_details, cocart_lift, ev0
from .bispancat import Bispan, bispan_canon, bispan_compose, bispan_hom_enum
from .errors import BispanError, SchemaViolation, SemiringOverflow
from .semiring import Semiring, Vector, builtin, eval_bispan, eval_span
from .spancat import Span, span_canon, span_compose, span_hom_enum
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

COMPOSERS = {"span": span_compose, "bispan": bispan_compose, "armor": ar_compose}


class InputError(Exception):
    def __init__(self, kind: str, message: str, **extra: Any):
        super().__init__(message)
        self.record = {"error": kind, "message": message, **extra}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError("UsageError", message)


def _emit(value: Any, out) -> None:
    text = value if isinstance(value, str) else json.dumps(value, sort_keys=True,
                                                           separators=(",", ":"))
    out.write(text + "\n")


def _read_text(source: str) -> tuple[str, str]:
    """Contents of ``source``: ``-`` is stdin, an existing path is read, else inline JSON."""
    if source == "-":
        return sys.stdin.read(), "<stdin>"
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read(), source
    if source.lstrip().startswith(("{", "[")):
        return source, "<inline>"
    raise InputError("FileNotFound", f"no such file: {source}", file=source)


def _load(source: str, expect: str | tuple[str, ...] | None = None) -> Any:
    text, name = _read_text(source)
    try:
        value = serialize.loads(text)
    except SchemaViolation as exc:
        raise InputError("SchemaViolation", exc.message, path=exc.path, file=name) from None
    if expect is not None:
        kinds = (expect,) if isinstance(expect, str) else expect
        got = serialize.to_json(value)["kind"]
        if got not in kinds:
            raise InputError("SchemaViolation", f"expected {' or '.join(kinds)}, got {got}",
                             path="/kind", file=name)
    return value


def _semiring(spec: str) -> Semiring:
    name, _, arg = spec.partition(":")
    if name in ("naturals", "boolean", "tropical", "polynomial"):
        try:
            return builtin(name, int(arg) if arg else None)
        except ValueError as exc:
            raise InputError("UsageError", str(exc)) from None
    return _load(spec, "semiring")


def _vector(source: str, R: Semiring | None) -> Vector:
    text, name = _read_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("SchemaViolation", f"invalid JSON: {exc.msg}", path="", file=name) from None
    if isinstance(doc, list):
        if R is None:
            raise InputError("UsageError", "a bare vector needs --semiring")
        doc = {"kind": "vector", "semiring": serialize.to_json(R), "entries": doc}
    try:
        vec = serialize.from_json(doc, "vector")
    except SchemaViolation as exc:
        raise InputError("SchemaViolation", exc.message, path=exc.path, file=name) from None
    if R is not None and vec.over != R:
        raise InputError("SemiringMismatch", "vector lives over a different semiring than --semiring")
    return vec


# -- commands -------------------------------------------------------------------

def cmd_compose(args, out) -> int:
    compose = COMPOSERS[args.kind]
    first, second = _load(args.first, args.kind), _load(args.second, args.kind)
    _emit(serialize.dumps(compose(second, first)), out)
    return EXIT_OK


def cmd_canon(args, out) -> int:
    value = _load(args.file, ("span", "bispan", "armor"))
    canon = {Span: span_canon, Bispan: bispan_canon, ArMor: ar_canon}[type(value)]
    _emit(serialize.dumps(canon(value)), out)
    return EXIT_OK


def cmd_normalize(args, out) -> int:
    _emit(serialize.dumps(_load(args.file)), out)
    return EXIT_OK


def cmd_eval(args, out) -> int:
    morphism = _load(args.file, ("span", "bispan"))
    R = _semiring(args.semiring) if args.semiring else None
    vec = _vector(args.vector, R)
    evaluate = eval_span if isinstance(morphism, Span) else eval_bispan
    result = evaluate(morphism, vec.over, vec)
    _emit(serialize.dumps(result), out)
    return EXIT_OK


def cmd_enum_hom(args, out) -> int:
    if args.max_apex is not None:
        if args.max_b is not None or args.max_fiber is not None:
            raise InputError("UsageError", "--max-apex cannot be combined with --max-b/--max-fiber")
        classes = span_hom_enum(args.src, args.tgt, args.max_apex, limit=args.limit)
        kind = "span"
    else:
        if args.max_b is None or args.max_fiber is None:
            raise InputError("UsageError", "give --max-apex, or both --max-b and --max-fiber")
        classes = bispan_hom_enum(args.src, args.tgt, args.max_b, args.max_fiber, limit=args.limit)
        kind = "bispan"
    _emit({"kind": f"{kind}-hom", "src": args.src, "tgt": args.tgt, "count": len(classes),
           "classes": [serialize.to_json(c) for c in classes]}, out)
    return EXIT_OK


def cmd_ev0(args, out) -> int:
    _emit(serialize.dumps(ev0(_load(args.file, "armor"))), out)
    return EXIT_OK


def cmd_classify(args, out) -> int:
    _emit(classify_details(_load(args.file, "armor")), out)
    return EXIT_OK


def cmd_lift(args, out) -> int:
    span = _load(args.span, "span")
    obj: ArObj = _load(args.object, "arobj")
    _emit(serialize.dumps(cocart_lift(span, obj)), out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    result = run_suite(args.suite, args.seed, args.trials, args.max_size, threads=args.threads)
    if result.ok:
        _emit(result.summary(), out)
        return EXIT_OK
    _emit({**result.summary(), "counterexample": result.counterexample}, out)
    return EXIT_FAIL


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bispans", description="Compose, normalize and check spans and bispans.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compose", help="compose FIRST then SECOND")
    c.add_argument("kind", choices=sorted(COMPOSERS))
    c.add_argument("first")
    c.add_argument("second")
    c.set_defaults(run=cmd_compose)

    c = sub.add_parser("canon", help="canonical class of a span, bispan or armor")
    c.add_argument("file")
    c.set_defaults(run=cmd_canon)

    c = sub.add_parser("normalize", help="re-emit any document in canonical form")
    c.add_argument("file")
    c.set_defaults(run=cmd_normalize)

    c = sub.add_parser("eval", help="evaluate a span or bispan on a vector")
    c.add_argument("file")
    c.add_argument("--semiring", help="naturals, boolean, tropical, polynomial:N or a semiring file")
    c.add_argument("--vector", required=True, help="vector file, or inline JSON")
    c.set_defaults(run=cmd_eval)

    c = sub.add_parser("enum-hom", help="enumerate hom classes within bounds")
    c.add_argument("--src", type=_natural, required=True)
    c.add_argument("--tgt", type=_natural, required=True)
    c.add_argument("--max-b", type=_natural)
    c.add_argument("--max-fiber", type=_natural)
    c.add_argument("--max-apex", type=_natural)
    c.add_argument("--limit", type=_natural, default=100_000)
    c.set_defaults(run=cmd_enum_hom)

    c = sub.add_parser("ev0", help="evaluate an armor at its source")
    c.add_argument("file")
    c.set_defaults(run=cmd_ev0)

    c = sub.add_parser("classify", help="W / S / cocartesian classification of an armor")
    c.add_argument("file")
    c.set_defaults(run=cmd_classify)

    c = sub.add_parser("lift", help="cocartesian lift of a backward span at an object")
    c.add_argument("span")
    c.add_argument("object")
    c.set_defaults(run=cmd_lift)

    c = sub.add_parser("check", help="run a seeded property suite")
    c.add_argument("suite", choices=SUITES)
    c.add_argument("--seed", type=_natural, default=0)
    c.add_argument("--trials", type=_natural, default=1000)
    c.add_argument("--max-size", type=_natural, default=3)
    c.add_argument("--threads", type=_natural, default=1)
    c.set_defaults(run=cmd_check)
    return p


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except InputError as exc:
        record = exc.record
    except SemiringOverflow as exc:
        record = {"error": "SemiringOverflow", "message": str(exc)}
    except (BispanError, ValueError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
    _emit(record, err)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
