"""Discrete and continuous moments of Delta and the right-hand sides compared with them.

Every evaluator here returns explicit terms only; the O-remainders of the
asymptotic statements are what the scans measure.  Functions that need
Delta at many integers accept a prebuilt :class:`DeltaTable` so that a scan
over an x-grid sieves once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .arith import DivisorPair, sieve_counts
from .error_terms import main_term, main_term_derivative
from .errors import InvalidPairError
from .psi import psi
from .quadrature import QuadratureSpec, integer_breakpoints, integrate
from .series import SeriesTruncation, auto_truncation, g_series, voronoi_integral
from .tables import DeltaTable
from .zeta import ZetaContext


@dataclass(frozen=True)
class MomentReport:
    """One row of a moment scan: both sides, their difference and its scaled size."""

    x: float
    discrete_sum: float
    continuous_integral: float
    rhs_main: float
    residual: float
    normalized_residual: float


def _table(ctx: ZetaContext, pair: DivisorPair, x: float, table: DeltaTable | None) -> DeltaTable:
    if table is not None:
        if table.pair != pair:
            raise ValueError(f"table was built for {table.pair}, not {pair}")
        return table
    return DeltaTable(ctx, pair, max(1, math.floor(x)))


def _half_minus_psi(x: float) -> float:
    return 0.5 - float(psi(float(x)))


def discrete_moment(ctx: ZetaContext, pair: DivisorPair, x: float, k: int, table: DeltaTable | None = None) -> float:
    """sum_{n <= x} Delta(n)**k, with D(n) counted up to and including n."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if x < 1:
        raise ValueError("x must be >= 1")
    return _table(ctx, pair, x, table).discrete_sum(x, k)


def continuous_mean_square(ctx: ZetaContext, pair: DivisorPair, T: float, table: DeltaTable | None = None) -> float:
    """int_1^T Delta(t)**2 dt, exactly up to rounding (no asymptotics involved)."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if T == 1:
        return 0.0
    return _table(ctx, pair, T, table).integral(T, 2)


def integral_delta(ctx: ZetaContext, pair: DivisorPair, x: float, table: DeltaTable | None = None) -> float:
    """int_1^x Delta(t) dt."""
    if x == 1:
        return 0.0
    return _table(ctx, pair, x, table).integral(x, 1)


def integral_delta_0_1(ctx: ZetaContext, pair: DivisorPair) -> float:
    """int_0^1 Delta(t) dt = -int_0^1 M(t) dt, since no lattice point lies below 1."""
    if pair.diagonal:
        # int_0^1 t log t dt = -1/4
        return -(-0.25 + (2.0 * ctx.gamma - 1.0) / 2.0)
    a, b = pair.a, pair.b
    return -(ctx.zeta(b / a) / (1.0 + 1.0 / a) + ctx.zeta(a / b) / (1.0 + 1.0 / b))


def integral_delta_from_0(ctx: ZetaContext, pair: DivisorPair, x: float, table: DeltaTable | None = None) -> float:
    return math.fsum([integral_delta_0_1(ctx, pair), integral_delta(ctx, pair, x, table)])


# ------------------------------------------------------------ partial-summation identity


@dataclass(frozen=True)
class ArithmeticSpec:
    """An arithmetic function f, given by its values on an integer array."""

    values: Callable[[np.ndarray], np.ndarray]
    name: str = "f"


@dataclass(frozen=True)
class SmoothSpec:
    """A continuously differentiable g with its derivative, both vectorized."""

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    name: str = "g"


def zero_arithmetic() -> ArithmeticSpec:
    return ArithmeticSpec(lambda n: np.zeros(np.shape(n)), "0")


def zero_smooth() -> SmoothSpec:
    return SmoothSpec(lambda t: np.zeros(np.shape(t)), lambda t: np.zeros(np.shape(t)), "0")


def divisor_arithmetic(pair: DivisorPair) -> ArithmeticSpec:
    """f(n) = d(a, b; n), served from a sieve sized on demand."""

    def values(n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        if n.size == 0:
            return np.zeros(0)
        counts = sieve_counts(pair, int(n.max()))
        return counts[n].astype(np.float64)

    return ArithmeticSpec(values, f"d({pair})")


def main_term_smooth(ctx: ZetaContext, pair: DivisorPair) -> SmoothSpec:
    return SmoothSpec(
        lambda t: main_term(ctx, pair, t),
        lambda t: main_term_derivative(ctx, pair, t),
        f"M({pair})",
    )


def furuya_identity_check(
    f_spec: ArithmeticSpec,
    g_spec: SmoothSpec,
    k: int,
    x: float,
    quad: QuadratureSpec | None = None,
) -> float:
    """LHS minus RHS of the summation identity

        sum_{n<=x} E(n)**k = (1/2 - psi(x)) E(x)**k + int_1^x E**k
                             + k int_1^x (1/2 - psi(u)) g'(u) E(u)**(k-1) du

    with E(t) = sum_{n<=t} f(n) - g(t).  Both integrals go through the
    adaptive quadrature with breakpoints at the integers, where E jumps.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    x = float(x)
    if x < 1:
        raise ValueError("x must be >= 1")
    X = math.floor(x)
    n = np.arange(1, X + 1, dtype=np.int64)
    S = np.zeros(X + 1)
    S[1:] = np.cumsum(np.asarray(f_spec.values(n), dtype=np.float64))

    def E(t):
        t = np.asarray(t, dtype=np.float64)
        idx = np.clip(np.floor(t).astype(np.int64), 0, X)
        return S[idx] - np.asarray(g_spec.value(t), dtype=np.float64)

    En = S[1:] - np.asarray(g_spec.value(n.astype(np.float64)), dtype=np.float64)
    lhs = math.fsum(En**k)

    # E is S(n) - g(t), a difference of numbers as large as |S|, so E**k carries
    # an absolute evaluation error near k |E|**(k-1) eps max(|S|, |g|)
    probe = np.linspace(1.0, x, 8 * X + 1)
    size = max(float(np.max(np.abs(S))), float(np.max(np.abs(g_spec.value(probe)))), 1.0)
    cond = k * max(float(np.max(np.abs(E(probe)))), 1.0) ** (k - 1) * size
    base = quad or QuadratureSpec(abs_tol=1e-13, noise=16.0 * np.finfo(float).eps * cond)
    spec = base.with_breakpoints(integer_breakpoints(1.0, x))
    moment = integrate(lambda t: E(t) ** k, 1.0, x, spec).value

    def correction_integrand(t):
        w = 0.5 - psi(t)
        return w * np.asarray(g_spec.derivative(t), dtype=np.float64) * E(t) ** (k - 1)

    correction = k * integrate(correction_integrand, 1.0, x, spec).value
    Ex = float(E(np.array([x]))[0])
    rhs = math.fsum([_half_minus_psi(x) * Ex**k, moment, correction])
    return lhs - rhs


# ------------------------------------------------------------ right-hand sides


def _require_off_diagonal(pair: DivisorPair, what: str) -> None:
    if pair.diagonal:
        raise InvalidPairError(f"{what} is stated for 1 <= a < b; (1, 1) has its own formula")


def _require_x2(x: float) -> float:
    x = float(x)
    if x < 2:
        raise ValueError("x must be >= 2")
    return x


def theorem1_rhs(
    ctx: ZetaContext,
    pair: DivisorPair,
    x: float,
    trunc: SeriesTruncation | None = None,
    table: DeltaTable | None = None,
) -> float:
    """Explicit terms of the mean-square relation for 1 <= a < b."""
    _require_off_diagonal(pair, "theorem1_rhs")
    x = _require_x2(x)
    tab = _table(ctx, pair, x, table)
    trunc = trunc or auto_truncation(ctx, pair, x)
    a, b = pair.a, pair.b
    d = tab.delta_at(x)
    terms = [
        _half_minus_psi(x) * d * d,
        tab.integral(x, 2),
        0.25 * main_term(ctx, pair, x),
        main_term_derivative(ctx, pair, x) * g_series(ctx, pair, x, trunc),
    ]
    if a == 1:
        zb = ctx.zeta(float(b))
        terms.append(zb * (zb * x + 2.0 * ctx.zeta(1.0 / b) * x ** (1.0 / b)) / 6.0)
    return math.fsum(terms)


def corollary1_branch(ctx: ZetaContext, pair: DivisorPair, x: float) -> float:
    a, b = pair.a, pair.b
    if a == 1:
        zb = ctx.zeta(float(b))
        return zb * (3.0 + 2.0 * zb) * x / 12.0
    return 0.25 * main_term(ctx, pair, x)


def corollary1_rhs(ctx: ZetaContext, pair: DivisorPair, x: float, table: DeltaTable | None = None) -> float:
    """int_1^x Delta**2 plus the branch term; what is left over is R*(x)."""
    _require_off_diagonal(pair, "corollary1_rhs")
    x = _require_x2(x)
    return math.fsum([continuous_mean_square(ctx, pair, x, table), corollary1_branch(ctx, pair, x)])


def theorem2_coefficients(ctx: ZetaContext) -> tuple[float, float, float]:
    """Coefficients of x log**2 x, x log x and x in the (1, 1) relation."""
    g = ctx.gamma
    return 1.0 / 6.0, (8.0 * g - 1.0) / 12.0, (8.0 * g * g - 2.0 * g + 1.0) / 12.0


def theorem2_rhs(
    ctx: ZetaContext,
    x: float,
    trunc: SeriesTruncation | None = None,
    table: DeltaTable | None = None,
) -> float:
    """Explicit terms of the (1, 1) mean-square relation."""
    pair = DivisorPair(1, 1)
    x = _require_x2(x)
    tab = _table(ctx, pair, x, table)
    trunc = trunc or auto_truncation(ctx, pair, x)
    L = math.log(x)
    c2, c1, c0 = theorem2_coefficients(ctx)
    d = tab.delta_at(x)
    return math.fsum(
        [
            _half_minus_psi(x) * d * d,
            tab.integral(x, 2),
            c2 * x * L * L,
            c1 * x * L,
            c0 * x,
            (L + 2.0 * ctx.gamma) * g_series(ctx, pair, x, trunc),
        ]
    )


def first_moment_rhs(ctx: ZetaContext, pair: DivisorPair, x: float, table: DeltaTable | None = None) -> float:
    """(1/2 - psi(x)) Delta(x) + int_1^x Delta + M(x)/2; the diagonal has the same shape."""
    x = _require_x2(x)
    tab = _table(ctx, pair, x, table)
    return math.fsum([_half_minus_psi(x) * tab.delta_at(x), tab.integral(x, 1), 0.5 * main_term(ctx, pair, x)])


def first_moment_identity(ctx: ZetaContext, pair: DivisorPair, x: float, table: DeltaTable | None = None) -> float:
    """sum_{n<=x} Delta(n) minus :func:`first_moment_rhs`; O(1), or O(log x) for (1, 1)."""
    tab = _table(ctx, pair, x, table)
    return tab.discrete_sum(x, 1) - first_moment_rhs(ctx, pair, x, tab)


def mean_value_constant(ctx: ZetaContext, pair: DivisorPair) -> float:
    """The limit of x**-1 sum_{n<=x} Delta(n): 1/4 + zeta(b)/2 when a = 1 < b, else 1/4."""
    _require_off_diagonal(pair, "mean_value_constant")
    if pair.a == 1:
        return 0.25 + 0.5 * ctx.zeta(float(pair.b))
    return 0.25


# ------------------------------------------------------------ normalizations


def theorem1_exponent(pair: DivisorPair) -> float:
    return 1.0 / pair.a - 3.0 / (2.0 * pair.s)


def corollary1_exponent(pair: DivisorPair) -> float:
    return 1.0 / pair.a - 1.0 / (2.0 * pair.s)


def mean_square_exponent(pair: DivisorPair) -> float:
    return (1.0 + pair.s) / pair.s


def voronoi_exponent(pair: DivisorPair) -> float:
    return 1.0 - 3.0 / (2.0 * pair.s)


def mean_value_exponent(pair: DivisorPair) -> float:
    return 1.0 - 1.0 / (2.0 * pair.s)


def _report(x, discrete, continuous, rhs, scale) -> MomentReport:
    residual = discrete - rhs
    return MomentReport(float(x), discrete, continuous, rhs, residual, residual / scale)


def theorem1_report(ctx, pair, x, trunc=None, table=None) -> MomentReport:
    tab = _table(ctx, pair, x, table)
    rhs = theorem1_rhs(ctx, pair, x, trunc, tab)
    return _report(x, tab.discrete_sum(x, 2), tab.integral(x, 2), rhs, float(x) ** theorem1_exponent(pair))


def theorem2_report(ctx, x, trunc=None, table=None) -> MomentReport:
    pair = DivisorPair(1, 1)
    tab = _table(ctx, pair, x, table)
    rhs = theorem2_rhs(ctx, x, trunc, tab)
    x = float(x)
    return _report(x, tab.discrete_sum(x, 2), tab.integral(x, 2), rhs, math.sqrt(x) * math.log(x))


def corollary1_report(ctx, pair, x, table=None) -> MomentReport:
    tab = _table(ctx, pair, x, table)
    rhs = corollary1_rhs(ctx, pair, x, tab)
    return _report(x, tab.discrete_sum(x, 2), tab.integral(x, 2), rhs, float(x) ** corollary1_exponent(pair))


def corollary2_report(ctx, pair, x, constant: float, table=None) -> MomentReport:
    """rhs is c x**((1+a+b)/(a+b)); normalized_residual is the ratio minus c."""
    tab = _table(ctx, pair, x, table)
    scale = float(x) ** mean_square_exponent(pair)
    return _report(x, tab.discrete_sum(x, 2), tab.integral(x, 2), constant * scale, scale)


def first_moment_report(ctx, pair, x, table=None) -> MomentReport:
    tab = _table(ctx, pair, x, table)
    rhs = first_moment_rhs(ctx, pair, x, tab)
    scale = math.log(float(x)) if pair.diagonal else 1.0
    return _report(x, tab.discrete_sum(x, 1), tab.integral(x, 1), rhs, scale)


def mean_value_report(ctx, pair, x, table=None) -> MomentReport:
    tab = _table(ctx, pair, x, table)
    x = float(x)
    rhs = mean_value_constant(ctx, pair) * x
    return _report(x, tab.discrete_sum(x, 1), tab.integral(x, 1), rhs, x ** mean_value_exponent(pair))


def voronoi_report(ctx, pair, x, trunc=None, table=None) -> MomentReport:
    """lhs int_0^x Delta against x/4 + zeta(-a) zeta(-b) + G(x)."""
    tab = _table(ctx, pair, x, table)
    x = float(x)
    trunc = trunc or auto_truncation(ctx, pair, x)
    lhs = integral_delta_from_0(ctx, pair, x, tab)
    rhs = voronoi_integral(ctx, pair, x, trunc)
    return _report(x, lhs, lhs, rhs, x ** voronoi_exponent(pair))
