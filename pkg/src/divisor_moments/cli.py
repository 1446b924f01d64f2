"""Command-line front end: ``verify``, ``scan`` and ``tabulate``.

Exit status is 0 when everything checked passes, 1 when an identity check
is breached, and 2 for usage or configuration errors (including I/O).
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

from . import __version__
from .arith import DivisorPair, sieve_counts
from .error_terms import count_exact_many, main_term
from .errors import DivisorMomentsError, IdentityViolation
from .report import Table, render
from .scans import SEED, TARGETS, GridSpec, run_scan, run_verify
from .series import (
    THETA0,
    auto_truncation,
    c11_constant,
    c_ab_constant,
    g_series,
    g_series_error_bound,
    truncation,
    voronoi_c0,
)
from .zeta import default_context

EXIT_OK, EXIT_BREACH, EXIT_USAGE = 0, 1, 2
TABULATE_WHAT = ("delta", "dcount", "g_series", "constants")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    pair: DivisorPair
    x_max: float
    grid: GridSpec
    trunc_N: int | None
    tol: float
    output_format: str
    output_path: str | None
    x_min: float
    jobs: int = 1
    pair_given: bool = True

    def __post_init__(self) -> None:
        if not (self.tol > 0):
            raise UsageError("--tol must be positive")
        if self.trunc_N is not None and self.trunc_N < 1:
            raise UsageError("--trunc must be >= 1")
        if not (self.x_max >= 2) or not math.isfinite(self.x_max):
            raise UsageError("--xmax must be a finite number >= 2")
        if not (self.x_min >= 1) or self.x_min > self.x_max:
            raise UsageError("--xmin must satisfy 1 <= xmin <= xmax")
        if self.output_format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")


def _parse_pair(text: str) -> DivisorPair:
    try:
        return DivisorPair.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="divisor-moments", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pair", type=_parse_pair, default=None, help="exponent pair a,b with 1 <= a <= b, gcd 1")
    common.add_argument("--xmax", type=_positive_float, default=1e6, help="largest x (default 1e6)")
    common.add_argument("--xmin", type=_positive_float, default=None, help="smallest grid x")
    common.add_argument("--grid", default="decade", help="decade, linear:N, or a comma-separated list of x values")
    common.add_argument("--trunc", type=int, default=None, help="fixed term count for G (default: max(1e4, 4x))")
    common.add_argument("--tol", type=_positive_float, default=1e-8, help="identity tolerance (default 1e-8)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, metavar="PATH", help="output file (default stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for independent rows")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run every identity suite")
    scan = sub.add_parser("scan", parents=[common], help="residual scan on an x-grid")
    scan.add_argument("target", choices=sorted(TARGETS))
    tab = sub.add_parser("tabulate", parents=[common], help="tables of Delta, counts, G or constants")
    tab.add_argument("what", choices=TABULATE_WHAT)
    return parser


def _config(args, default_pair: DivisorPair, default_xmin: float) -> RunConfig:
    return RunConfig(
        pair=args.pair or default_pair,
        x_max=args.xmax,
        grid=GridSpec.parse(args.grid),
        trunc_N=args.trunc,
        tol=args.tol,
        output_format=args.format,
        output_path=args.out,
        x_min=args.xmin if args.xmin is not None else min(default_xmin, args.xmax),
        jobs=args.jobs,
        pair_given=args.pair is not None,
    )


def _emit(table: Table, cfg: RunConfig) -> None:
    text = render(table, cfg.output_format)
    if cfg.output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {cfg.output_path}: {exc.strerror or exc}") from None


def cmd_verify(cfg: RunConfig) -> int:
    ctx = default_context()
    pairs = [cfg.pair] if cfg.pair_given else None
    results = run_verify(ctx, pairs, tol=cfg.tol, xmax=cfg.x_max, jobs=cfg.jobs)
    table = Table(
        ["check", "instances", "max_residual", "tol", "status", "detail"],
        [[r.name, r.instances, r.max_residual, r.tol, "pass" if r.passed else "FAIL", r.detail] for r in results],
        {
            "command": "verify",
            "pairs": " ".join(str(p) for p in pairs) if pairs else "default",
            "tol": cfg.tol,
            "xmax": cfg.x_max,
            "seed": SEED,
        },
    )
    _emit(table, cfg)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"identity breach: {', '.join(failed)}", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


def cmd_scan(cfg: RunConfig, target: str) -> int:
    ctx = default_context()
    pair = cfg.pair
    if target == "theorem2" and not cfg.pair_given:
        pair = DivisorPair(1, 1)
    xs = cfg.grid.points(cfg.x_min, cfg.x_max)
    result = run_scan(ctx, target, pair, xs, trunc_N=cfg.trunc_N, tol=cfg.tol, jobs=cfg.jobs)
    meta = {"command": "scan", **result.meta, "grid": str(cfg.grid), "xmin": cfg.x_min, "xmax": cfg.x_max}
    rows = [[r.x, r.lhs, r.rhs, r.residual, r.normalized] for r in result.rows]
    _emit(Table(["x", "lhs", "rhs", "residual", "normalized"], rows, meta), cfg)
    return EXIT_OK


def _constants_rows(ctx, pair: DivisorPair):
    a, b = pair.a, pair.b
    rows = [["c0", voronoi_c0(pair)], ["theta0", THETA0]]
    if pair.diagonal:
        rows.append(["c_11", c11_constant(ctx)])
    else:
        rows += [
            ["c_ab", c_ab_constant(ctx, pair)],
            [f"zeta({b}/{a})", ctx.zeta(b / a)],
            [f"zeta({a}/{b})", ctx.zeta(a / b)],
        ]
    rows.append([f"zeta(-{a})*zeta(-{b})", ctx.zeta(-a) * ctx.zeta(-b)])
    return rows


def cmd_tabulate(cfg: RunConfig, what: str) -> int:
    ctx = default_context()
    pair = cfg.pair
    meta = {"command": "tabulate", "what": what, "pair": str(pair)}
    if what == "constants":
        table = Table(["name", "value"], _constants_rows(ctx, pair), meta)
    elif what == "dcount":
        N = math.floor(cfg.x_max)
        counts = sieve_counts(pair, N)
        running = counts.cumsum()
        meta["xmax"] = cfg.x_max
        table = Table(["n", "d", "D"], [[n, int(counts[n]), int(running[n])] for n in range(1, N + 1)], meta)
    else:
        xs = cfg.grid.points(cfg.x_min, cfg.x_max)
        meta.update({"grid": str(cfg.grid), "xmin": cfg.x_min, "xmax": cfg.x_max})
        if what == "delta":
            counts = count_exact_many(pair, xs) if xs else []
            rows = []
            for x, D in zip(xs, counts):
                M = main_term(ctx, pair, x)
                rows.append([x, int(D), M, int(D) - M])
            table = Table(["x", "D", "M", "delta"], rows, meta)
        else:
            meta["truncation"] = str(cfg.trunc_N) if cfg.trunc_N else "auto"
            rows = []
            for x in xs:
                tr = truncation(ctx, pair, cfg.trunc_N) if cfg.trunc_N else auto_truncation(ctx, pair, x)
                rows.append([x, tr.N, g_series(ctx, pair, x, tr), g_series_error_bound(pair, x, tr)])
            table = Table(["x", "N", "G", "error_bound"], rows, meta)
    _emit(table, cfg)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(_config(args, DivisorPair(1, 2), 1.0))
        if args.command == "scan":
            return cmd_scan(_config(args, DivisorPair(1, 2), 1e3), args.target)
        return cmd_tabulate(_config(args, DivisorPair(1, 2), 1.0), args.what)
    except IdentityViolation as exc:
        print(f"identity breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except (UsageError, ValueError, DivisorMomentsError, MemoryError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
