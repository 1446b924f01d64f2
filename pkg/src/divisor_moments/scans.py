"""Grids, residual scans and the identity suites behind ``verify``.

A scan evaluates one relation on an x-grid and reports each row's residual
and its size relative to the predicted error scale.  Every row is a pure
function of (config, x): tables and series caches are built before the rows
are farmed out, so the result does not depend on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .arith import DivisorPair, sieve_counts
from .error_terms import count_exact_many, remainder_asymptotic, remainder_exact
from .errors import IdentityViolation, InvalidPairError
from .integrals import i_integral_closed, psi_power_integral, quad_psi_product, w_alpha_exact
from .moments import (
    corollary1_exponent,
    corollary1_report,
    corollary2_report,
    divisor_arithmetic,
    first_moment_report,
    furuya_identity_check,
    main_term_smooth,
    mean_square_exponent,
    mean_value_constant,
    mean_value_exponent,
    mean_value_report,
    theorem1_exponent,
    theorem1_report,
    theorem2_report,
    voronoi_exponent,
    voronoi_report,
)
from .psi import psi
from .quadrature import QuadratureSpec, integer_breakpoints, integrate
from .series import (
    DEFAULT_TRUNC_FACTOR,
    DEFAULT_TRUNC_MIN,
    SeriesTruncation,
    auto_truncation,
    c11_constant,
    c_ab_constant,
    truncation,
)
from .tables import DeltaTable
from .zeta import ZetaContext

SEED = 20240229
DECADE_INTERIOR = 8


# ------------------------------------------------------------------ grids


def decade_grid(xmin: float, xmax: float, interior: int = DECADE_INTERIOR) -> list[float]:
    """Powers of ten from xmin to xmax with ``interior`` log-spaced points in each decade.

    Points are 10**(k + j/(interior+1)); the exact powers of ten are kept as
    exact floats.  Only points inside [xmin, xmax] are returned.
    """
    if xmin <= 0 or xmax < xmin:
        return []
    lo = math.floor(math.log10(xmin))
    hi = math.ceil(math.log10(xmax))
    out = []
    for k in range(lo, hi + 1):
        for j in range(interior + 1):
            x = float(10**k) if j == 0 else 10.0 ** (k + j / (interior + 1))
            if xmin <= x <= xmax:
                out.append(x)
    return out


def linear_grid(xmin: float, xmax: float, count: int) -> list[float]:
    if count < 1 or xmax < xmin:
        return []
    if count == 1:
        return [float(xmax)]
    return [float(v) for v in np.linspace(xmin, xmax, count)]


@dataclass(frozen=True)
class GridSpec:
    """How to place x values: ``decade``, ``linear:COUNT`` or an explicit list."""

    kind: str
    count: int = 0
    values: tuple[float, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        text = text.strip()
        if text == "decade":
            return cls("decade")
        if text.startswith("linear"):
            _, _, n = text.partition(":")
            count = int(n) if n else 10
            if count < 0:
                raise ValueError("linear grid needs a non-negative point count")
            return cls("linear", count=count)
        if text in ("", "explicit", "none"):
            return cls("explicit")
        try:
            vals = tuple(float(v) for v in text.split(",") if v.strip())
        except ValueError:
            raise ValueError(f"unrecognized grid {text!r}; use decade, linear:N or a comma list") from None
        if any(not math.isfinite(v) for v in vals):
            raise ValueError("grid values must be finite")
        return cls("explicit", values=vals)

    def points(self, xmin: float, xmax: float) -> list[float]:
        if self.kind == "decade":
            return decade_grid(xmin, xmax)
        if self.kind == "linear":
            return linear_grid(xmin, xmax, self.count)
        return list(self.values)

    def __str__(self) -> str:
        if self.kind == "linear":
            return f"linear:{self.count}"
        if self.kind == "explicit":
            return ",".join(repr(v) for v in self.values) or "explicit:empty"
        return self.kind


def ordered_map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """``[fn(i) for i in items]``, optionally on a thread pool; order is always preserved."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------------ scans


@dataclass(frozen=True)
class ScanRow:
    x: float
    lhs: float
    rhs: float
    residual: float
    normalized: float


@dataclass
class ScanResult:
    target: str
    pair: DivisorPair
    meta: dict
    rows: list[ScanRow] = field(default_factory=list)


@dataclass(frozen=True)
class _Target:
    formula: str
    normalization: Callable[[DivisorPair], str]
    min_x: float
    pairs: str  # "off" (a < b only), "diag" ((1, 1) only) or "any"


def _exp(e: float) -> str:
    return f"x^{e:.17g}"


TARGETS: dict[str, _Target] = {
    "theorem1": _Target(
        "sum_{n<=x} Delta^2(n) against (1/2-psi(x))Delta^2(x) + int_1^x Delta^2 + M(x)/4 + M'(x)G(x)"
        " + [a=1] zeta(b)(zeta(b)x + 2zeta(1/b)x^(1/b))/6",
        lambda p: _exp(theorem1_exponent(p)),
        2.0,
        "off",
    ),
    "theorem2": _Target(
        "sum_{n<=x} Delta^2(n) against (1/2-psi(x))Delta^2(x) + int_1^x Delta^2 + x log^2 x/6"
        " + (8gamma-1)x log x/12 + (8gamma^2-2gamma+1)x/12 + (log x + 2gamma)G(x)",
        lambda p: "x^0.5*log(x)",
        2.0,
        "diag",
    ),
    "corollary1": _Target(
        "sum_{n<=x} Delta^2(n) against int_1^x Delta^2 + [a=1] zeta(b)(3+2zeta(b))x/12"
        " + [a>=2] (zeta(b/a)x^(1/a) + zeta(a/b)x^(1/b))/4",
        lambda p: _exp(corollary1_exponent(p)),
        2.0,
        "off",
    ),
    "corollary2": _Target(
        "sum_{n<=x} Delta^2(n) against c*x^((1+a+b)/(a+b)); normalized = lhs/x^e - c",
        lambda p: _exp(mean_square_exponent(p)),
        2.0,
        "any",
    ),
    "first_moment": _Target(
        "sum_{n<=x} Delta(n) against (1/2-psi(x))Delta(x) + int_1^x Delta + M(x)/2",
        lambda p: "log(x)" if p.diagonal else "1",
        2.0,
        "any",
    ),
    "mean_value": _Target(
        "sum_{n<=x} Delta(n) against kappa*x, kappa = 1/4 + [a=1] zeta(b)/2",
        lambda p: _exp(mean_value_exponent(p)),
        2.0,
        "off",
    ),
    "voronoi": _Target(
        "int_0^x Delta against x/4 + zeta(-a)zeta(-b) + G(x)",
        lambda p: _exp(voronoi_exponent(p)),
        1.0,
        "any",
    ),
    "remainder": _Target(
        "R(x) by its exact formula against -((a+b)^2/(ab))psi1(y) - (a^2+b^2)/(12ab), y = x^(1/(a+b))",
        lambda p: _exp(-1.0 / p.s),
        2.0,
        "any",
    ),
}


def check_target(target: str, pair: DivisorPair) -> None:
    if target not in TARGETS:
        raise ValueError(f"unknown scan target {target!r}; choose from {', '.join(TARGETS)}")
    rule = TARGETS[target].pairs
    if rule == "off" and pair.diagonal:
        raise InvalidPairError(f"target {target} needs 1 <= a < b (got {pair})")
    if rule == "diag" and not pair.diagonal:
        raise InvalidPairError(f"target {target} is specific to the pair 1,1 (got {pair})")


def _truncation_for(ctx, pair, x, fixed: int | None) -> SeriesTruncation:
    return truncation(ctx, pair, fixed) if fixed else auto_truncation(ctx, pair, x)


def run_scan(
    ctx: ZetaContext,
    target: str,
    pair: DivisorPair,
    xs: Sequence[float],
    *,
    trunc_N: int | None = None,
    tol: float = 1e-8,
    jobs: int = 1,
    constant_trunc: int = 10**6,
) -> ScanResult:
    """Evaluate ``target`` on every x in ``xs`` (in order)."""
    check_target(target, pair)
    spec = TARGETS[target]
    xs = [float(x) for x in xs]
    bad = [x for x in xs if not x >= spec.min_x]
    if bad:
        raise ValueError(f"target {target} needs x >= {spec.min_x:g} (got {bad[0]!r})")
    xmax = max(xs) if xs else 0.0
    meta = {
        "target": target,
        "pair": str(pair),
        "formula": spec.formula,
        "normalization": spec.normalization(pair),
        "truncation": str(trunc_N) if trunc_N else f"auto:max({DEFAULT_TRUNC_MIN},ceil({DEFAULT_TRUNC_FACTOR}x))",
        "tol": tol,
        "points": len(xs),
    }
    result = ScanResult(target, pair, meta)
    if not xs:
        return result

    if target == "remainder":

        def row(x: float) -> ScanRow:
            ev = remainder_exact(ctx, pair, x, tol=tol)
            main = remainder_asymptotic(pair, x)
            res = ev.r_value - main
            return ScanRow(x, ev.r_value, main, res, res * x ** (1.0 / pair.s))

        result.rows = ordered_map(row, xs, jobs)
        return result

    table = DeltaTable(ctx, pair, max(1, math.floor(xmax)))
    k = 1 if target in ("first_moment", "mean_value", "voronoi") else 2
    table.discrete_prefix(k)
    table.integral_prefix(k)
    if target in ("theorem1", "theorem2", "voronoi"):
        # fill the coefficient cache once, at its largest size, before going parallel
        _truncation_for(ctx, pair, xmax, trunc_N)

    if target == "corollary2":
        c = c11_constant(ctx) if pair.diagonal else c_ab_constant(ctx, pair, constant_trunc)
        meta["constant"] = c

        def build(x):
            return corollary2_report(ctx, pair, x, c, table)

    elif target == "theorem1":

        def build(x):
            return theorem1_report(ctx, pair, x, _truncation_for(ctx, pair, x, trunc_N), table)

    elif target == "theorem2":

        def build(x):
            return theorem2_report(ctx, x, _truncation_for(ctx, pair, x, trunc_N), table)

    elif target == "corollary1":

        def build(x):
            return corollary1_report(ctx, pair, x, table)

    elif target == "first_moment":

        def build(x):
            return first_moment_report(ctx, pair, x, table)

    elif target == "mean_value":
        meta["constant"] = mean_value_constant(ctx, pair)

        def build(x):
            return mean_value_report(ctx, pair, x, table)

    else:  # voronoi

        def build(x):
            return voronoi_report(ctx, pair, x, _truncation_for(ctx, pair, x, trunc_N), table)

    def row(x: float) -> ScanRow:
        r = build(x)
        return ScanRow(r.x, r.discrete_sum, r.rhs_main, r.residual, r.normalized_residual)

    result.rows = ordered_map(row, xs, jobs)
    return result


def drift_ratio(rows: Sequence[ScanRow], first_decade: tuple[float, float]) -> tuple[float, float, float]:
    """(max |normalized| overall, max |normalized| in the first decade, their ratio)."""
    lo, hi = first_decade
    first = [abs(r.normalized) for r in rows if lo <= r.x < hi]
    overall = max(abs(r.normalized) for r in rows)
    ref = max(first)
    return overall, ref, overall / ref


# ------------------------------------------------------------------ verify


@dataclass(frozen=True)
class CheckResult:
    name: str
    instances: int
    max_residual: float
    tol: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def _rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


def check_psi_powers(tol: float, samples: int = 50) -> CheckResult:
    """Closed forms of int_1^x psi**m against quadrature, m = 1..6."""
    xs = np.sort(_rng().uniform(1.0, 100.0, samples))
    quad = QuadratureSpec(abs_tol=1e-13)
    worst = 0.0
    count = 0
    for x in xs:
        spec = quad.with_breakpoints(integer_breakpoints(1.0, x))
        for k in (1, 2, 3):
            for parity, m in (("odd", 2 * k - 1), ("even", 2 * k)):
                closed = psi_power_integral(k, parity, float(x))
                ref = integrate(lambda t, m=m: psi(t) ** m, 1.0, float(x), spec).value
                worst = max(worst, abs(closed - ref))
                count += 1
    return CheckResult("psi_power_integrals", count, worst, tol)


W_ALPHAS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5)


def check_w_alpha(tol: float, samples: int = 20) -> CheckResult:
    """W_alpha(x) = int_1^x t**alpha psi(t) dt against quadrature."""
    xs = np.sort(_rng().uniform(1.0, 200.0, samples))
    quad = QuadratureSpec(abs_tol=1e-12)
    worst = 0.0
    count = 0
    for x in xs:
        spec = quad.with_breakpoints(integer_breakpoints(1.0, x))
        for alpha in W_ALPHAS:
            ref = integrate(lambda t, a=alpha: t**a * psi(t), 1.0, float(x), spec).value
            worst = max(worst, abs(w_alpha_exact(alpha, float(x)).value - ref))
            count += 1
    return CheckResult("w_alpha", count, worst, tol)


def check_psi_products(
    pairs: Sequence[DivisorPair], tol: float, xmax: float = 500.0, per_n: int = 3
) -> CheckResult:
    """Closed form of int t**alpha psi(t) psi((t/n**b)**(1/a)) against quadrature.

    ``per_n`` random x values are drawn in [n**(a+b), xmax] for each n = 1, 2, 3,
    and both orientations of the pair are used.
    """
    rng = _rng()
    quad = QuadratureSpec(abs_tol=1e-12)
    worst = 0.0
    count = 0
    for pair in pairs:
        a, b = pair.a, pair.b
        alphas = sorted({0.0, 1.0 / a - 1.0, 1.0 / b - 1.0})
        for n in (1, 2, 3):
            lo = n**pair.s
            if lo >= xmax:
                continue
            xs = np.sort(rng.uniform(lo, xmax, per_n))
            for x in xs:
                for alpha in alphas:
                    for swapped in ((False, True) if not pair.diagonal else (False,)):
                        ref = quad_psi_product(pair, n, alpha, float(x), quad, swapped)
                        val = i_integral_closed(pair, n, alpha, float(x), swapped)
                        worst = max(worst, abs(val - ref))
                        count += 1
    return CheckResult("psi_product_integrals", count, worst, tol)


def check_remainder(ctx: ZetaContext, pairs: Sequence[DivisorPair], tol: float, xmax: float, samples: int = 20) -> CheckResult:
    """R(x) from its definition against the exact psi1 formula."""
    rng = _rng()
    worst = 0.0
    count = 0
    failures = []
    for pair in pairs:
        for x in np.sort(rng.uniform(2.0, xmax, samples)):
            try:
                ev = remainder_exact(ctx, pair, float(x), tol=tol)
                gap = abs(ev.r_value - ev.r_definition)
            except IdentityViolation as exc:
                gap = max(exc.discrepancy, tol * 2.0) if math.isfinite(exc.discrepancy) else math.inf
                failures.append(f"{pair}@{float(x):.17g}")
            worst = max(worst, gap)
            count += 1
    return CheckResult("remainder_dual_path", count, worst, tol, ";".join(failures[:3]))


def check_summation_identity(ctx: ZetaContext, pairs: Sequence[DivisorPair], tol: float) -> CheckResult:
    """The partial-summation identity for sum E(n)**k, k = 1, 2, 3."""
    worst = 0.0
    count = 0
    for pair in pairs:
        f, g = divisor_arithmetic(pair), main_term_smooth(ctx, pair)
        for k in (1, 2, 3):
            for x in (10.0, 50.0, 200.0):
                worst = max(worst, abs(furuya_identity_check(f, g, k, x)))
                count += 1
    return CheckResult("summation_identity", count, worst, tol)


def check_counts(pairs: Sequence[DivisorPair], N: int) -> CheckResult:
    """Hyperbola counts against sieve prefix sums at every integer up to N (exact)."""
    worst = 0
    for pair in pairs:
        sieve = np.cumsum(sieve_counts(pair, N), dtype=np.int64)
        hyper = count_exact_many(pair, np.arange(N + 1, dtype=np.float64))
        worst = max(worst, int(np.max(np.abs(sieve - hyper))))
    return CheckResult("hyperbola_vs_sieve", len(pairs) * (N + 1), float(worst), 0.0)


DEFAULT_VERIFY_PAIRS = (DivisorPair(1, 1), DivisorPair(1, 2), DivisorPair(1, 3), DivisorPair(2, 3))


def run_verify(
    ctx: ZetaContext,
    pairs: Sequence[DivisorPair] | None = None,
    tol: float = 1e-8,
    xmax: float = 1e6,
    count_limit: int = 10**5,
    jobs: int = 1,
) -> list[CheckResult]:
    """Every identity suite; a check passes when its worst residual is at most ``tol``."""
    pairs = tuple(pairs) if pairs else DEFAULT_VERIFY_PAIRS
    product_pairs = [p for p in pairs if not p.diagonal] or list(pairs)
    sum_pairs = [p for p in pairs if p.a == 1] or list(pairs)
    tasks = [
        lambda: check_psi_powers(tol),
        lambda: check_w_alpha(tol),
        lambda: check_psi_products(product_pairs, tol),
        lambda: check_remainder(ctx, pairs, tol, xmax),
        lambda: check_summation_identity(ctx, sum_pairs, tol),
        lambda: check_counts(pairs, int(min(count_limit, xmax))),
    ]
    return ordered_map(lambda t: t(), tasks, jobs)
