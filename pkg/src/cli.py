# src/cli.py
from __future__ import annotations
import argparse, json, sys, time
from typing import Any, Callable, TextIO

from pydantic import ValidationError

from core.decorators import new_rid
from core.exact_linalg import ShapeError, format_rational
from core.nilcone import in_nilcone, in_self_commuting, sample_nilcone
from core.orbit_params import InvalidParamsError
from core.schemas import ElementModel, ParamsModel, element_payload
from core.superalgebra import Family, KindError, OddElement, invariants, odd_membership, parse_kind, verify_complement
from features.canonical.canonical_form import NotInConeError, StageError, canonicalize
from features.canonical.render import render_result
from features.census.orbit_census import (
    census_summary, enumerate_reps, orbit_signature, rep_matrix, signature_collisions,
)
from features.census.render import render_census, render_collisions
from features.census.store import write_jsonl
from features.verify.inclusion import verify_finiteness, verify_inclusion
from services.logger_setup import get_logger
from services.util import NILCONE_SEED, dump_json, fingerprint

logger = get_logger("cli")

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_STAGE = 0, 1, 2, 3


class InputError(ValueError):
    """Ошибка входных данных с кодом для stderr."""

    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code


# ====== ВХОД ======
def _read_element(stream: TextIO) -> OddElement:
    raw = stream.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError("malformed_json", f"element JSON: {e}") from e
    try:
        model = ElementModel.model_validate(data)
    except ValidationError as e:
        raise InputError("invalid_element", _first_error(e)) from e
    return model.to_element()


def _read_params(raw: str | None):
    if raw is None:
        return None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError("malformed_json", f"params JSON: {e}") from e
    try:
        return ParamsModel.model_validate(data).to_params()
    except ValidationError as e:
        raise InputError("invalid_params", _first_error(e)) from e


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    loc = ".".join(str(p) for p in err.get("loc", ()))
    return f"{loc}: {err.get('msg', 'invalid value')}" if loc else str(err.get("msg", "invalid value"))


def _positive(raw: str) -> int:
    v = int(raw)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {raw}")
    return v


def _non_negative(raw: str) -> int:
    v = int(raw)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {raw}")
    return v


def _emit(out: TextIO, obj: Any) -> None:
    out.write(dump_json(obj) + "\n")


# ====== КОМАНДЫ ======
def cmd_member(args: argparse.Namespace, inp: TextIO, out: TextIO) -> int:
    kind = parse_kind(args.kind)
    x = _read_element(inp)
    payload: dict[str, Any] = {
        "kind": str(kind),
        "in_g1": odd_membership(kind, x),
        "in_nilcone": in_nilcone(kind, x),
        "in_X": in_self_commuting(x),
        "invariants": [format_rational(v) for v in invariants(x)],
    }
    _emit(out, payload)
    ok = payload["in_nilcone"] and (payload["in_X"] or not args.self_commuting)
    return EXIT_OK if ok else EXIT_FALSE


def cmd_canon(args: argparse.Namespace, inp: TextIO, out: TextIO) -> int:
    x = _read_element(inp)
    res = canonicalize(x, trace=args.trace)
    _emit(out, render_result(res, with_trace=args.trace))
    return EXIT_OK


def cmd_census(args: argparse.Namespace, inp: TextIO, out: TextIO) -> int:
    m, n = args.m, args.n
    # сводка всегда по нормализованному перечню
    reps = enumerate_reps(m, n)
    summary = census_summary(m, n, reps)
    summary["fingerprint"] = fingerprint([p.to_payload() for p in reps])
    params = enumerate_reps(m, n, redundant=True) if args.raw else reps
    if args.ds_only:
        params = [p for p in params if p.is_self_commuting()]
    if args.raw:
        summary["raw_count"] = len(params)
        summary["signature_collisions"] = render_collisions(signature_collisions(m, n))
    signature_of = (lambda p: orbit_signature(rep_matrix(p, m, n))) if args.signatures else None
    records = render_census(params, summary, ds_only=args.ds_only, signature_of=signature_of)
    if not args.out:
        # потоково, строка за строкой
        for rec in records:
            _emit(out, rec)
        return EXIT_OK
    written = list(records)
    digest = write_jsonl(args.out, written)
    written[-1] = {**written[-1], "path": args.out, "sha256": digest}
    for rec in written:
        _emit(out, rec)
    return EXIT_OK


def cmd_verify_complement(args: argparse.Namespace, inp: TextIO, out: TextIO) -> int:
    report = verify_complement(parse_kind(args.kind), literal_table=args.literal_table)
    _emit(out, report.to_payload())
    return EXIT_OK if report.passed else EXIT_FALSE


def cmd_verify_inclusion(args: argparse.Namespace, inp: TextIO, out: TextIO) -> int:
    report = verify_inclusion(args.m, args.n, args.samples, args.seed)
    _emit(out, report.to_payload())
    return EXIT_OK if report.passed else EXIT_FALSE


def cmd_verify_finiteness(args: argparse.Namespace, inp: TextIO, out: TextIO) -> int:
    report = verify_finiteness(args.m, args.n, args.samples, args.seed)
    _emit(out, report.to_payload())
    return EXIT_OK if report.passed else EXIT_FALSE


def cmd_sample(args: argparse.Namespace, inp: TextIO, out: TextIO) -> int:
    kind = parse_kind(args.kind)
    params = _read_params(args.params)
    if params is not None and kind.family in (Family.GL, Family.SL):
        params.validate(*kind.ambient)
    x = sample_nilcone(kind, args.seed, params)
    _emit(out, element_payload(x))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilcone", description="Odd nilpotent cone of classical Lie superalgebras")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("member", help="cone / self-commuting membership of an element read from stdin")
    p.add_argument("--kind", required=True)
    p.add_argument("--self-commuting", action="store_true", help="also require [x, x] = 0 for exit 0")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("canon", help="canonical form of a gl(m|n) element read from stdin")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("census", help="orbit representatives as JSON lines")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--ds-only", action="store_true")
    p.add_argument("--raw", action="store_true", help="every admissible tuple, plus signature collisions")
    p.add_argument("--signatures", action="store_true", help="attach word-rank signatures to orbit lines")
    p.add_argument("--out", default=None, help="also write the lines to this file")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify-complement", help="check gl(M|N) = g + M and [g, M] in M")
    p.add_argument("--kind", required=True)
    p.add_argument("--literal-table", action="store_true", help="use the (I, -I) line for sl")
    p.set_defaults(func=cmd_verify_complement)

    for name, func in (("verify-inclusion", cmd_verify_inclusion), ("verify-finiteness", cmd_verify_finiteness)):
        p = sub.add_parser(name)
        p.add_argument("--m", type=_positive, required=True)
        p.add_argument("--n", type=_positive, required=True)
        p.add_argument("--samples", type=_non_negative, default=100)
        p.add_argument("--seed", type=_non_negative, default=NILCONE_SEED)
        p.set_defaults(func=func)

    p = sub.add_parser("sample", help="seeded random cone element")
    p.add_argument("--kind", required=True)
    p.add_argument("--params", default=None, help="orbit parameters as JSON (gl/sl only)")
    p.add_argument("--seed", type=_non_negative, default=NILCONE_SEED)
    p.set_defaults(func=cmd_sample)
    return ap


def _error_code(e: Exception) -> str:
    if isinstance(e, InputError):
        return e.code
    if isinstance(e, NotInConeError):
        return "not_in_cone"
    if isinstance(e, KindError):
        return "unknown_kind"
    if isinstance(e, ShapeError):
        return "shape_mismatch"
    if isinstance(e, InvalidParamsError):
        return "invalid_params"
    return "invalid_element"


def main(argv: list[str] | None = None, stdin: TextIO | None = None,
         stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    inp, out, err = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    args = build_parser().parse_args(argv)
    func: Callable[[argparse.Namespace, TextIO, TextIO], int] = args.func
    rid = new_rid()
    t0 = time.monotonic()
    logger.info({"event": "cmd_start", "rid": rid, "cmd": args.command})
    try:
        code = func(args, inp, out)
    except StageError as e:
        logger.info({"event": "cmd_error", "rid": rid, "cmd": args.command, "stage": e.stage, "err": str(e)})
        err.write(dump_json({"error": "internal_stage_failure", "detail": str(e), "stage": e.stage}) + "\n")
        return EXIT_STAGE
    except ValueError as e:
        code_name = _error_code(e)
        logger.info({"event": "cmd_error", "rid": rid, "cmd": args.command, "error": code_name, "err": str(e)})
        err.write(dump_json({"error": code_name, "detail": str(e)}) + "\n")
        return EXIT_INPUT
    ms = int((time.monotonic() - t0) * 1000)
    logger.info({"event": "cmd_ok", "rid": rid, "cmd": args.command, "exit": code, "ms": ms})
    return code


if __name__ == "__main__":
    sys.exit(main())
