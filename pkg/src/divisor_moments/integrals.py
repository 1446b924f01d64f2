"""Integral calculus of the sawtooth psi.

Contents:

* closed forms for the integrals of powers of psi;
* ``W_alpha(x) = int_1^x t**alpha psi(t) dt`` for every real alpha;
* tail integrals of psi1 and psi2 against powers of t, with analytic
  remainders obtained from the Bernoulli-function expansion;
* the product integral ``I(n, x) = int t**alpha psi(t) psi((t/n**b)**(1/a)) dt``
  in closed form, with an adaptive-quadrature oracle next to it.

W_alpha is evaluated by summing the exact integral over each unit interval
``[n, n+1]`` (a convergent binomial series in 1/n, or the antiderivative
for small n) and a compensated prefix table.  This keeps full precision at
every x, while the power-sum form used as a cross-check loses digits to
cancellation once x**(alpha+2) is large.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .arith import DivisorPair, iroot
from .psi import psi, psi1
from .quadrature import (
    UNIT_NODES,
    UNIT_WEIGHTS,
    QuadratureSpec,
    integrate,
    unit_interval_gl,
)
from .zeta import EULER_GAMMA, ZetaContext, bernoulli_numbers, default_context

BRANCH_GENERAL = "general"
BRANCH_MINUS_1 = "alpha_minus_1"
BRANCH_MINUS_2 = "alpha_minus_2"

_SERIES_FROM = 16  # unit intervals [n, n+1] with n >= this use the 1/n series
_SERIES_TERMS = 30  # (1/16)**30 is far below double precision

DIRECT_SUM_LIMIT = 10**6


# ---------------------------------------------------------------- psi powers


def psi_power_integral(k: int, parity: str, x):
    """Closed form of int_1^x psi(t)**m dt with m = 2k-1 (odd) or m = 2k (even)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    xv = np.asarray(x, dtype=np.float64)
    if np.any(xv < 1):
        raise ValueError("x must be >= 1")
    p = psi(xv)
    q = 0.25**k  # 2**(-2k)
    if parity == "odd":
        out = (p ** (2 * k) - q) / (2 * k)
    elif parity == "even":
        out = ((xv - 1.0) * q - p * q + p ** (2 * k + 1)) / (2 * k + 1)
    else:
        raise ValueError("parity must be 'odd' or 'even'")
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- W_alpha


@dataclass(frozen=True)
class WAlphaResult:
    """Value of W_alpha(x) and which branch produced it.

    For alpha = -1, ``remainder`` is the exact value minus the two leading
    asymptotic terms, i.e. the part the asymptotic form leaves as O(x**-2).
    """

    alpha: float
    x: float
    value: float
    branch: str
    remainder: float | None = None


@lru_cache(maxsize=64)
def _binomials(alpha: float, K: int) -> np.ndarray:
    c = np.empty(K + 1)
    c[0] = 1.0
    for k in range(1, K + 1):
        c[k] = c[k - 1] * (alpha - k + 1) / k
    return c


def _antiderivative(p: float, t):
    if p == -1.0:
        return np.log(t)
    return t ** (p + 1.0) / (p + 1.0)


def _direct_piece(alpha: float, lo, hi, n):
    """int_lo^hi t**alpha (t - n - 1/2) dt by antiderivatives."""
    return (_antiderivative(alpha + 1.0, hi) - _antiderivative(alpha + 1.0, lo)) - (n + 0.5) * (
        _antiderivative(alpha, hi) - _antiderivative(alpha, lo)
    )


def unit_w_integrals(alpha: float, n) -> np.ndarray:
    """int_n^{n+1} t**alpha psi(t) dt for integer n >= 1."""
    n = np.asarray(n, dtype=np.float64)
    out = np.empty_like(n)
    small = n < _SERIES_FROM
    if small.any():
        ns = n[small]
        out[small] = _direct_piece(alpha, ns, ns + 1.0, ns)
    big = ~small
    if big.any():
        nb = n[big]
        h = 1.0 / nb
        c = _binomials(float(alpha), _SERIES_TERMS)
        k = np.arange(_SERIES_TERMS + 1)
        coef = c * k / (2.0 * (k + 1) * (k + 2))
        # Horner in h, highest power first
        acc = np.zeros_like(h)
        for ck in coef[:0:-1]:
            acc = (acc + ck) * h
        out[big] = nb**alpha * acc
    return out


def _partial_w(alpha: float, N, f):
    """int_N^{N+f} t**alpha psi(t) dt for integer N >= 1 and 0 <= f < 1."""
    N = np.asarray(N, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    out = np.empty(np.broadcast(N, f).shape)
    N, f = np.broadcast_arrays(N, f)
    small = N < _SERIES_FROM
    if small.any():
        Ns, fs = N[small], f[small]
        out[small] = _direct_piece(alpha, Ns, Ns + fs, Ns)
    big = ~small
    if big.any():
        Nb, fb = N[big], f[big]
        hf = fb / Nb
        c = _binomials(float(alpha), _SERIES_TERMS)
        acc = np.zeros_like(Nb)
        term = np.ones_like(Nb)  # (f/N)**k
        for k in range(_SERIES_TERMS + 1):
            acc += c[k] * term * (fb * fb / (k + 2) - fb / (2.0 * (k + 1)))
            term = term * hf
        out[big] = Nb**alpha * acc
    return out


class _WTables:
    """Compensated prefix tables P[m] = W_alpha(m), grown on demand."""

    def __init__(self) -> None:
        self._tables: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    def prefix(self, alpha: float, nmax: int) -> np.ndarray:
        with self._lock:
            tab = self._tables.get(alpha)
            if tab is not None and tab.size > nmax:
                return tab
            size = 1024
            while size <= nmax:
                size *= 2
            w = unit_w_integrals(alpha, np.arange(1, size, dtype=np.float64))
            tab = np.zeros(size + 1)
            tab[2:] = kernels.compensated_cumsum(w)
            self._tables[alpha] = tab
            return tab


_W_TABLES = _WTables()


def _w_alpha_engine(alpha: float, x: np.ndarray) -> np.ndarray:
    N = np.floor(x)
    Ni = N.astype(np.int64)
    tab = _W_TABLES.prefix(float(alpha), int(Ni.max()) if Ni.size else 1)
    return tab[Ni] + _partial_w(alpha, N, x - N)


@lru_cache(maxsize=8)
def _harmonic_table(size: int) -> np.ndarray:
    h = np.zeros(size + 1)
    h[1:] = kernels.compensated_cumsum(1.0 / np.arange(1, size + 1, dtype=np.float64))
    return h


def harmonic_numbers(n) -> np.ndarray:
    """H_n for an integer array; exact prefix sums up to 10**6, Euler-Maclaurin beyond."""
    n = np.asarray(n, dtype=np.int64)
    out = np.empty(n.shape)
    direct = n <= DIRECT_SUM_LIMIT
    if direct.any():
        top = int(n[direct].max())
        size = 1024
        while size < top:
            size *= 2
        out[direct] = _harmonic_table(size)[n[direct]]
    if (~direct).any():
        m = n[~direct].astype(np.float64)
        B = bernoulli_numbers(8)
        acc = np.log(m) + EULER_GAMMA + 0.5 / m
        for k in range(1, 5):
            acc -= float(B[2 * k]) / (2 * k) * m ** (-2.0 * k)
        out[~direct] = acc
    return out


def _w1_closed(x: np.ndarray) -> np.ndarray:
    p = psi(x)
    return -x / 24.0 + 0.5 * p * p * x - p**3 / 6.0 + p / 24.0 - 1.0 / 12.0


def _w_minus2_closed(x: np.ndarray) -> np.ndarray:
    N = np.floor(x).astype(np.int64)
    return np.log(x) - psi(x) / x - harmonic_numbers(N) + 0.5


def w_alpha_values(alpha: float, x) -> np.ndarray:
    """Vectorized W_alpha(x); see :func:`w_alpha_exact` for the branches."""
    alpha = float(alpha)
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xv < 1):
        raise ValueError("W_alpha needs x >= 1")
    if alpha == 0.0:
        out = psi1(xv)
    elif alpha == 1.0:
        out = _w1_closed(xv)
    elif alpha == -2.0:
        out = _w_minus2_closed(xv)
    else:
        out = _w_alpha_engine(alpha, xv)
    return out.reshape(np.shape(x)) if np.ndim(x) else out


def w_alpha_exact(alpha: float, x: float) -> WAlphaResult:
    """W_alpha(x) = int_1^x t**alpha psi(t) dt, exactly up to rounding."""
    alpha, x = float(alpha), float(x)
    if x < 1:
        raise ValueError("W_alpha needs x >= 1")
    value = float(w_alpha_values(alpha, np.array([x]))[0])
    if alpha == -1.0:
        lead = w_minus1_constant() + (float(psi1(x)) + 1.0 / 12.0) / x
        return WAlphaResult(alpha, x, value, BRANCH_MINUS_1, value - lead)
    if alpha == -2.0:
        return WAlphaResult(alpha, x, value, BRANCH_MINUS_2)
    return WAlphaResult(alpha, x, value, BRANCH_GENERAL)


def w_alpha_power_sum(alpha: float, x: float) -> float:
    """W_alpha(x) through the power-sum form (alpha not -1, -2).

    Kept as an independent cross-check; the sum of n**(alpha+1) is direct
    up to 10**6 terms and asymptotic beyond.
    """
    alpha, x = float(alpha), float(x)
    if alpha in (-1.0, -2.0):
        raise ValueError("power-sum form excludes alpha = -1, -2")
    p = float(psi(x))
    N = math.floor(x)
    e = alpha + 1.0
    if N <= DIRECT_SUM_LIMIT:
        S = kernels.neumaier_sum(np.arange(1, N + 1, dtype=np.float64) ** e)
    else:
        s = -e
        S = math.fsum(
            [
                default_context().zeta(s),
                x ** (1 - s) / (1 - s),
                -p * x ** (-s),
                -s * (float(psi1(x)) + 1 / 12) * x ** (-s - 1),
            ]
        )
    return math.fsum(
        [
            -(x ** (alpha + 2)) / (e * (alpha + 2)),
            S / e,
            p * x**e / e,
            -alpha / (2 * e * (alpha + 2)),
        ]
    )


def w_alpha_constant(ctx: ZetaContext, alpha: float) -> float:
    """The constant (zeta(-1-alpha) - alpha/(2(2+alpha))) / (alpha+1)."""
    alpha = float(alpha)
    if alpha in (-1.0, -2.0):
        raise ValueError("alpha = -1, -2 have their own asymptotic forms")
    return (ctx.zeta(-1.0 - alpha) - alpha / (2.0 * (2.0 + alpha))) / (alpha + 1.0)


def w_alpha_asymptotic(ctx: ZetaContext, alpha: float, x) -> float:
    """Constant plus (psi1(x) + 1/12) x**alpha; the error is O(x**(alpha-1))."""
    c = w_alpha_constant(ctx, alpha)
    xv = np.asarray(x, dtype=np.float64)
    if np.any(xv < 1):
        raise ValueError("x must be >= 1")
    out = c + (psi1(xv) + 1.0 / 12.0) * xv**alpha
    return float(out) if out.ndim == 0 else out


def w_minus1_asymptotic(x: float) -> float:
    return w_minus1_constant() + (float(psi1(x)) + 1.0 / 12.0) / x


def w_minus2_asymptotic(x: float) -> float:
    return 0.5 - EULER_GAMMA + (float(psi1(x)) + 1.0 / 12.0) / (x * x)


# ---------------------------------------------------------------- tails


@dataclass(frozen=True)
class TailValue:
    """A tail integral and a rigorous bound on the truncated expansion."""

    value: float
    bound: float


def _bernoulli_sup(m: int) -> float:
    # |B_m(t)| <= 2 zeta(m) m! / (2 pi)**m on [0, 1] for m >= 2, zeta(m) <= zeta(2)
    return 2.0 * (math.pi**2 / 6.0) * math.factorial(m) / (2.0 * math.pi) ** m


def bernoulli_tail(k: int, sigma: float, Y: int, depth: int = 8) -> TailValue:
    """int_Y^inf Bt_k(t) t**(-sigma) dt for integer Y >= 1.

    Bt_k is the periodic Bernoulli function (Bt_1 = psi).  Repeated
    integration by parts gives a series in Y**(-sigma-j) whose truncation
    error is bounded by the sup of the next Bernoulli function.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    B = bernoulli_numbers(k + depth + 1)
    terms = []
    coef = 1.0  # factor in front of int Bt_m f^(j)
    dc = 1.0  # f^(j)(Y) = dc * Y**(-sigma - j)
    m = k
    for j in range(depth):
        terms.append(coef * (-float(B[m + 1])) * dc * float(Y) ** (-sigma - j) / (m + 1))
        coef *= -1.0 / (m + 1)
        dc *= -sigma - j
        m += 1
    bound = abs(coef) * _bernoulli_sup(m) * abs(dc) * float(Y) ** (1 - sigma - depth) / (sigma + depth - 1)
    return TailValue(math.fsum(terms), bound)


def _window(y: float, window: int, integrand) -> tuple[float, int]:
    """GL integral of ``integrand(t, u)`` over [y, Y], Y = floor(y) + 1 + window.

    ``u`` is the fractional part of t, passed separately so psi is exact.
    """
    start = math.floor(y)
    parts = []
    first = start
    if y > start:
        width = start + 1 - y
        t = y + width * UNIT_NODES
        parts.append(width * float(integrand(t, t - start) @ UNIT_WEIGHTS))
        first = start + 1
    Y = start + 1 + window
    n = np.arange(first, Y, dtype=np.float64)
    if n.size:
        vals = unit_interval_gl(lambda nn, u: integrand(nn + u, u + 0 * nn), n)
        parts.append(kernels.neumaier_sum(vals))
    return math.fsum(parts), Y


def psi1_tail(sigma: float, y: float, window: int = 32) -> TailValue:
    """int_y^inf psi1(t) t**(-sigma) dt for sigma > 1, y >= 1."""
    if sigma <= 1:
        raise ValueError("sigma must exceed 1")
    if y < 1:
        raise ValueError("y must be >= 1")
    head, Y = _window(y, window, lambda t, u: 0.5 * ((u - 0.5) ** 2 - 0.25) * t ** (-sigma))
    bt = bernoulli_tail(2, sigma, Y)
    tail = 0.5 * bt.value - float(Y) ** (1 - sigma) / (12.0 * (sigma - 1))
    return TailValue(head + tail, 0.5 * bt.bound)


def psi2_tail(sigma: float, y: float, window: int = 32) -> TailValue:
    """int_y^inf psi2(t) t**(-sigma) dt for sigma > 2, y >= 1."""
    if sigma <= 2:
        raise ValueError("sigma must exceed 2")

    def f(t, u):
        p = u - 0.5
        return (-t / 12.0 + p**3 / 6.0 - p / 24.0 + 1.0 / 12.0) * t ** (-sigma)

    head, Y = _window(y, window, f)
    bt = bernoulli_tail(3, sigma, Y)
    Yf = float(Y)
    tail = bt.value / 6.0 - Yf ** (2 - sigma) / (12.0 * (sigma - 2)) + Yf ** (1 - sigma) / (12.0 * (sigma - 1))
    return TailValue(head + tail, bt.bound / 6.0)


@lru_cache(maxsize=1)
def w_minus1_constant() -> float:
    """2 int_1^inf psi2(t) t**-3 dt, by quadrature on [1, 10**4] plus the analytic tail."""
    return 2.0 * psi2_tail(3.0, 1.0, window=10**4 - 1).value


def tail_integral_psi1(ctx: ZetaContext, s: float) -> float:
    """Closed form of int_1^inf t**(-s-2) psi1(t) dt for s > 0."""
    s = float(s)
    if s <= 0:
        raise ValueError("s must be positive")
    if s == 1.0:
        return 0.5 * (0.5 - ctx.gamma)
    return 1.0 / (2.0 * s * (s - 1.0)) - ctx.zeta(s) / (s * (s + 1.0))


def tail_integral_psi1_numeric(s: float, cutoff: int = 10**5) -> TailValue:
    """The same integral by quadrature on [1, cutoff] plus the analytic tail."""
    return psi1_tail(float(s) + 2.0, 1.0, window=cutoff - 1)


def partial_sum_power_formula(ctx: ZetaContext, s: float, x: float) -> float:
    """sum_{n <= x} n**(-s) through zeta(s) and a psi1 tail (s > 0)."""
    s, x = float(s), float(x)
    p = float(psi(x))
    q = float(psi1(x))
    tail = psi1_tail(s + 2.0, x).value
    if s == 1.0:
        return math.fsum([math.log(x), ctx.gamma, -p / x, -q / (x * x), 2.0 * tail])
    return math.fsum(
        [x ** (1 - s) / (1 - s), ctx.zeta(s), -p * x ** (-s), -s * q * x ** (-s - 1), s * (s + 1) * tail]
    )


def partial_sum_power(ctx: ZetaContext, s: float, x: float) -> float:
    """sum_{n <= x} n**(-s) for s > 0: direct below 10**6 terms, zeta form beyond."""
    s, x = float(s), float(x)
    if s <= 0:
        raise ValueError("s must be positive")
    if x < 1:
        raise ValueError("x must be >= 1")
    N = math.floor(x)
    if N <= DIRECT_SUM_LIMIT:
        return kernels.neumaier_sum(np.arange(1, N + 1, dtype=np.float64) ** (-s))
    return partial_sum_power_formula(ctx, s, x)


# ---------------------------------------------------------------- product integrals


def _roles(pair: DivisorPair, swapped: bool) -> tuple[int, int]:
    return (pair.b, pair.a) if swapped else (pair.a, pair.b)


def psi_product_breakpoints(pair: DivisorPair, n: int, x: float, swapped: bool = False) -> list[float]:
    """Every jump of psi(t) and of psi((t/n**q)**(1/p)) inside (n**(a+b), x)."""
    p, q = _roles(pair, swapped)
    lo = n ** (p + q)
    pts = set(float(k) for k in range(lo + 1, math.ceil(x)))
    J = iroot(math.floor(x) // n**q, p)
    pts.update(float(j**p * n**q) for j in range(n + 1, J + 1))
    return sorted(t for t in pts if lo < t < x)


def quad_psi_product(
    pair: DivisorPair,
    n: int,
    alpha: float,
    x: float,
    spec: QuadratureSpec | None = None,
    swapped: bool = False,
) -> float:
    """Adaptive quadrature of int_{n**(a+b)}^x t**alpha psi(t) psi((t/n**b)**(1/a)) dt.

    The breakpoints from :func:`psi_product_breakpoints` are always added to
    whatever ``spec.breakpoints`` already holds.
    """
    p, q = _roles(pair, swapped)
    lo = n ** (p + q)
    if x < lo:
        raise ValueError("need n**(a+b) <= x")
    spec = spec or QuadratureSpec()
    spec = spec.with_breakpoints([*spec.breakpoints, *psi_product_breakpoints(pair, n, x, swapped)])
    nq = float(n**q)

    def f(t):
        return t**alpha * psi(t) * psi((t / nq) ** (1.0 / p))

    return integrate(f, float(lo), float(x), spec).value


def i_integral_closed(pair: DivisorPair, n: int, alpha: float, x: float, swapped: bool = False) -> float:
    """I(n, x) exactly, as a combination of W_alpha and W_{alpha + 1/a} values."""
    p, q = _roles(pair, swapped)
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    lo = n ** (p + q)
    x = float(x)
    if x < lo:
        raise ValueError("need n**(a+b) <= x")
    J = iroot(math.floor(x) // n**q, p)
    beta = alpha + 1.0 / p
    wb = w_alpha_values(beta, np.array([x, float(lo)]))
    pts = np.array([float(j**p * n**q) for j in range(n, J + 1)] + [float(lo), x])
    wa = w_alpha_values(alpha, pts)
    parts = [
        n ** (-q / p) * (wb[0] - wb[1]),
        kernels.neumaier_sum(wa[:-2]),
        (n - 0.5) * wa[-2],
        -(J + 0.5) * wa[-1],
    ]
    return math.fsum(parts)


def i_integral_asymptotic(pair: DivisorPair, n: int, alpha: float, x: float, swapped: bool = False) -> float:
    """Main terms of I(n, x), without the O-remainder."""
    alpha = float(alpha)
    if alpha in (-1.0, -2.0):
        raise ValueError("alpha = -1, -2 are not covered by the asymptotic form")
    p, q = _roles(pair, swapped)
    lo = n ** (p + q)
    x = float(x)
    if x < lo:
        raise ValueError("need n**(a+b) <= x")
    J = iroot(math.floor(x) // n**q, p)
    y = (x / n**q) ** (1.0 / p)
    oscill = (y - J - 0.5) * float(psi1(x)) * x**alpha
    if alpha == -1.0 / p:
        main = n ** (-q / p) * (math.log(x) - (p + q) * math.log(n)) / (12.0 * p)
    else:
        main = (x ** (alpha + 1.0 / p) / n ** (q / p) - float(n) ** ((p + q) * alpha + 1)) / (12.0 * (1 + p * alpha))
    return main + oscill
