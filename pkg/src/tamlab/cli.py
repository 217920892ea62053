"""Command line interface: ``tamlab <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import census as census_mod
from . import series as series_mod
from .curves import Curve, SingularCurveError
from .densities import delta, delta_rows, type_rows
from .heights import (
    HeightPreconditionError, canonical_height, check_fe_positivity, find_points,
    height_preconditions, is_convenient, oracle_report,
)
from .tate import classify, local_data, tamagawa_product

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    prime_cutoff: int = 10**5
    c_cutoff: int = 64
    precision_bits: int = series_mod.PRECISION_BITS
    shards: int = 1
    tam_ceiling: int = census_mod.DEFAULT_TAM_CEILING
    output_path: str | None = None
    output_format: str = "json"

    def __post_init__(self):
        if min(self.prime_cutoff, self.c_cutoff, self.shards, self.tam_ceiling) < 1:
            raise InputError("cutoffs, shards and ceiling must be positive")
        if self.precision_bits < 64:
            raise InputError("precision_bits must be at least 64")
        if self.output_format not in ("json", "csv"):
            raise InputError("format must be json or csv")


# ---------------------------------------------------------------- output


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        names = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def _emit(cfg: Config, rows: list[dict], document=None) -> None:
    """Write ``rows`` as CSV, or ``document`` (default: rows) as JSON."""
    if cfg.output_format == "csv":
        text = _csv(rows)
    else:
        text = json.dumps(rows if document is None else document, indent=2) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _num(x, digits: int = 20) -> str:
    return mpmath.nstr(x, digits)


def _curve(args) -> Curve:
    try:
        return Curve(args.a4, args.a6)
    except SingularCurveError as exc:
        raise InputError(str(exc)) from exc


# -------------------------------------------------------------- commands


def cmd_local(cfg: Config, a4: int, a6: int, p: int | None = None) -> int:
    curve = _curve(argparse.Namespace(a4=a4, a6=a6))
    if p is not None:
        from .arith import is_prime
        if not is_prime(p):
            raise InputError(f"{p} is not prime")
        reductions = [classify(curve, p)]
    else:
        reductions = local_data(curve)
    rows = [{"a4": a4, "a6": a6, **r.to_json()} for r in reductions]
    tam = tamagawa_product(curve)
    _emit(cfg, rows, {"curve": curve.to_json(), "local": [r.to_json() for r in reductions], "tamagawa": tam})
    return EXIT_OK


def cmd_density(cfg: Config, p=None, c=None, m=None, s=None, types=False) -> int:
    if s is not None:
        return cmd_series(cfg, s_values=[s])
    if m is not None:
        return cmd_series(cfg, m_values=[m])
    if p is None:
        raise InputError("give --p (with --c or --types), --m or --s")
    try:
        if types:
            rows = [{"p": q, "kodaira": k, "c": cc, "delta_prime": str(dp), "delta_hat": str(dh)}
                    for q, k, cc, dp, dh in type_rows(p)]
        elif c is not None:
            rows = [{"p": p, "c": c, "delta": str(delta(p, c))}]
        else:
            rows = [{"p": q, "c": cc, "delta": str(v)} for q, cc, v in delta_rows(p)]
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(cfg, rows)
    return EXIT_OK


def cmd_series(cfg: Config, m_values=None, s_values=None) -> int:
    rows = []
    series_mod.PRECISION_BITS = cfg.precision_bits
    for m in m_values or []:
        if m < 1:
            raise InputError("m must be positive")
        v = series_mod.p_tam(m, cfg.prime_cutoff)
        rows.append({"m": m, "P_Tam": _num(v.value), "error_bound": _num(v.error_bound, 5)})
    for s in s_values or []:
        s = Fraction(s)
        if s < -1:
            raise InputError("L_Tam(s) is only certified for s >= -1")
        v = series_mod.l_tam(mpmath.mpf(s.numerator) / s.denominator, cfg.prime_cutoff, cfg.c_cutoff)
        rows.append({"s": str(s), "L_Tam": _num(v.value), "error_bound": _num(v.error_bound, 5)})
    _emit(cfg, rows)
    return EXIT_OK


def cmd_census(cfg: Config, X: int, shards: int, workers: int, rate: float, allow_large: bool) -> int:
    try:
        result = census_mod.run_census(X, shards, workers, cfg.tam_ceiling, rate, allow_large)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rows = [dict(zip(("X", "m", "N_m", "N", "ratio"), r)) for r in result.csv_rows()]
    _emit(cfg, rows, {**result.to_json(), "summary": census_mod.census_summary(result)})
    return EXIT_FAIL if result.oracle_mismatches else EXIT_OK


def cmd_heights(cfg: Config, a4: int, a6: int, bound: int) -> int:
    curve = _curve(argparse.Namespace(a4=a4, a6=a6))
    if bound < 1:
        raise InputError("bound must be positive")
    points = find_points(curve, bound)
    problems = height_preconditions(curve)
    rows = []
    for P in points:
        row = {**P.to_json(), "naive_H": P.naive_height}
        report = oracle_report(curve, P) if problems else canonical_height(curve, P)
        row.update(report.to_json())
        rows.append(row)
    _emit(cfg, rows, {"curve": curve.to_json(), "height_formula_applies": not problems,
                      "reasons": problems, "points": rows})
    # the inequality is only claimed where the local-sum formula applies
    if not problems and not all(r["inequality_holds"] for r in rows):
        return EXIT_FAIL
    return EXIT_OK


def cmd_convenient(cfg: Config, a4: int, a6: int, positivity: bool) -> int:
    curve = _curve(argparse.Namespace(a4=a4, a6=a6))
    test = is_convenient(curve)
    doc = {"curve": curve.to_json(), **test.to_json()}
    if positivity:
        try:
            doc["fe_positivity"] = check_fe_positivity(curve).to_json()
        except HeightPreconditionError as exc:
            raise InputError(str(exc)) from exc
    row = {k: v for k, v in doc.items() if not isinstance(v, (list, dict))}
    _emit(cfg, [row], doc)
    return EXIT_OK


def cmd_verify(cfg: Config, suite: str, large: bool, workers: int) -> int:
    from .verify import SUITES, run_suite
    if suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    checks = run_suite(suite, large=large, workers=workers) if suite in ("census", "all") else run_suite(suite)
    for ch in checks:
        print(ch.line(), file=sys.stderr)
    rows = [{"criterion": ch.number, "name": ch.name, "passed": ch.passed} for ch in checks]
    _emit(cfg, rows, [ch.to_json() for ch in checks])
    return EXIT_OK if all(ch.passed for ch in checks) else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--prime-cutoff", type=int, default=10**5)
    common.add_argument("--c-cutoff", type=int, default=64)
    common.add_argument("--precision-bits", type=int, default=series_mod.PRECISION_BITS)

    parser = argparse.ArgumentParser(prog="tamlab", description="Tamagawa products of short Weierstrass curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    def curve_args(sp):
        sp.add_argument("--a4", type=int, required=True)
        sp.add_argument("--a6", type=int, required=True)

    sp = sub.add_parser("local", parents=[common], help="local reduction data at the bad primes")
    curve_args(sp)
    sp.add_argument("--p", type=int, default=None)

    sp = sub.add_parser("density", parents=[common], help="exact local densities, P_Tam(m) or L_Tam(s)")
    sp.add_argument("--p", type=int)
    sp.add_argument("--c", type=int)
    sp.add_argument("--types", action="store_true", help="per-type densities at p")
    sp.add_argument("--m", type=int)
    sp.add_argument("--series", action="store_true", help="evaluate L_Tam at --s")
    sp.add_argument("--s", type=Fraction)

    sp = sub.add_parser("series", parents=[common], help="P_Tam(m) and L_Tam(s) with error bounds")
    sp.add_argument("--m", type=int, nargs="*", default=[])
    sp.add_argument("--s", type=Fraction, nargs="*", default=[])

    sp = sub.add_parser("census", parents=[common], help="exhaustive census up to height X")
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--shards", type=int, default=None)
    sp.add_argument("--tam-ceiling", type=int, default=census_mod.DEFAULT_TAM_CEILING)
    sp.add_argument("--sample-oracle-rate", type=float, default=0.0)
    sp.add_argument("--allow-large", action="store_true", help=f"permit X above {census_mod.DESK_SCALE}")

    sp = sub.add_parser("heights", parents=[common], help="rational points and their heights")
    curve_args(sp)
    sp.add_argument("--bound", type=int, default=100)

    sp = sub.add_parser("convenient", parents=[common], help="convenience test for one curve")
    curve_args(sp)
    sp.add_argument("--fe-positivity", action="store_true")

    sp = sub.add_parser("verify", parents=[common], help="run acceptance checks")
    sp.add_argument("--suite", default="exact")
    sp.add_argument("--large", action="store_true", help="include the X = 10^8 census rows")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    workers = census_mod.default_workers()
    try:
        cfg = Config(
            prime_cutoff=args.prime_cutoff,
            c_cutoff=args.c_cutoff,
            precision_bits=args.precision_bits,
            shards=getattr(args, "shards", None) or workers,
            tam_ceiling=getattr(args, "tam_ceiling", census_mod.DEFAULT_TAM_CEILING),
            output_path=args.out,
            output_format=args.format,
        )
        cmd = args.command
        if cmd == "local":
            return cmd_local(cfg, args.a4, args.a6, args.p)
        if cmd == "density":
            s = args.s if args.series or args.s is not None else None
            return cmd_density(cfg, args.p, args.c, args.m, s, args.types)
        if cmd == "series":
            if not args.m and not args.s:
                raise InputError("give --m and/or --s")
            return cmd_series(cfg, args.m, args.s)
        if cmd == "census":
            return cmd_census(cfg, args.x, cfg.shards, workers, args.sample_oracle_rate, args.allow_large)
        if cmd == "heights":
            return cmd_heights(cfg, args.a4, args.a6, args.bound)
        if cmd == "convenient":
            return cmd_convenient(cfg, args.a4, args.a6, args.fe_positivity)
        if cmd == "verify":
            return cmd_verify(cfg, args.suite, args.large, workers)
    except InputError as exc:
        print(f"tamlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
