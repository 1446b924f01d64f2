"""The oscillating series G(x), the integrated Voronoi formula and the constant c_{a,b}.

    G(x) = c0 x**(1 - 1/(2(a+b))) sum_n d*(n) n**(-1 - 1/(2(a+b)))
                 * cos(2 (a+b) pi (n x / (a**a b**b))**(1/(a+b)) - 3 pi / 4)

The normalizing constant is ``c0 = (a**a b**b)**(1 + 1/(2(a+b))) /
(2 pi**2 sqrt(ab(a+b)) a**(a-1) b**(b-1))``.  The extra factor
``a**(a-1) b**(b-1)`` (1 only for the pair (1, 1); 2 for (1, 2)) is what
makes ``int_0^x Delta - x/4`` track G numerically; see
:func:`voronoi_c0_unscaled`.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import kernels
from .arith import DivisorPair, primes_upto
from .errors import InvalidPairError
from .zeta import ZetaContext

THETA0 = -0.75 * math.pi
DEFAULT_TRUNC_MIN = 10_000
DEFAULT_TRUNC_FACTOR = 4


@dataclass(frozen=True)
class SeriesTruncation:
    """Term count N and a bound on sum_{n > N} d*(n) n**(-1 - 1/(2(a+b)))."""

    N: int
    tail_bound: float

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError("N must be >= 1")


def _sigma(pair: DivisorPair) -> float:
    return 1.0 + 1.0 / (2 * pair.s)


class _DStarCache:
    """Largest-so-far table of the nonzero d*(n) n**(-sigma) and n**(1/(a+b))."""

    def __init__(self) -> None:
        self._store: dict[DivisorPair, tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def get(self, pair: DivisorPair, N: int):
        with self._lock:
            hit = self._store.get(pair)
            if hit is None or hit[0] < N:
                w = kernels.sieve_weights(pair.a, pair.b, N, float(pair.a - 1), float(pair.b - 1))
                idx = np.flatnonzero(w)
                nf = idx.astype(np.float64)
                coef = w[idx] * nf ** (-_sigma(pair))
                nodes = nf ** (1.0 / pair.s)
                prefix = kernels.compensated_cumsum(coef)
                hit = (N, idx, coef, nodes, prefix)
                self._store[pair] = hit
            _, idx, coef, nodes, prefix = hit
        k = int(np.searchsorted(idx, N, side="right"))
        return coef[:k], nodes[:k], (float(prefix[k - 1]) if k else 0.0)


_DSTAR = _DStarCache()


def dstar_dirichlet_value(ctx: ZetaContext, pair: DivisorPair) -> float:
    """sum_n d*(n) n**(-sigma) = zeta(1 + a/(2(a+b))) zeta(1 + b/(2(a+b)))."""
    s = pair.s
    return ctx.zeta(1.0 + pair.a / (2 * s)) * ctx.zeta(1.0 + pair.b / (2 * s))


def truncation(ctx: ZetaContext, pair: DivisorPair, N: int) -> SeriesTruncation:
    """Truncation after N terms with its exact tail.

    The tail is the closed Dirichlet series value minus the computed partial
    sum, padded by a rounding allowance so it stays an upper bound.
    """
    N = int(N)
    _, _, partial = _DSTAR.get(pair, N)
    total = dstar_dirichlet_value(ctx, pair)
    tail = total - partial
    return SeriesTruncation(N, max(tail, 0.0) + 1e-12 * total)


def auto_truncation(
    ctx: ZetaContext,
    pair: DivisorPair,
    x: float,
    minimum: int = DEFAULT_TRUNC_MIN,
    factor: int = DEFAULT_TRUNC_FACTOR,
) -> SeriesTruncation:
    """N = max(minimum, ceil(factor * x)); the series needs N of order x to settle."""
    return truncation(ctx, pair, max(int(minimum), int(math.ceil(factor * float(x)))))


def voronoi_c0_unscaled(pair: DivisorPair) -> float:
    """(a**a b**b)**(1 + 1/(2(a+b))) / (2 pi**2 sqrt(ab(a+b))), without the a, b rescaling."""
    a, b = pair.a, pair.b
    return (a**a * b**b) ** (1.0 + 1.0 / (2 * (a + b))) / (2.0 * math.pi**2 * math.sqrt(a * b * (a + b)))


def voronoi_c0(pair: DivisorPair) -> float:
    """The normalizing constant actually used in G."""
    return voronoi_c0_unscaled(pair) / (pair.a ** (pair.a - 1) * pair.b ** (pair.b - 1))


def _omega(pair: DivisorPair, x: float) -> float:
    a, b = pair.a, pair.b
    return 2.0 * (a + b) * math.pi * (x / (a**a * b**b)) ** (1.0 / (a + b))


def g_series(ctx: ZetaContext, pair: DivisorPair, x: float, trunc: SeriesTruncation) -> float:
    """G(x) truncated after ``trunc.N`` terms.

    The truncation error is at most ``c0 * x**(1 - 1/(2(a+b))) * trunc.tail_bound``.
    """
    x = float(x)
    if x < 1:
        raise ValueError("x must be >= 1")
    coef, nodes, _ = _DSTAR.get(pair, trunc.N)
    s = kernels.cos_series(coef, nodes, _omega(pair, x), THETA0)
    return voronoi_c0(pair) * x ** (1.0 - 1.0 / (2 * pair.s)) * s


def g_series_error_bound(pair: DivisorPair, x: float, trunc: SeriesTruncation) -> float:
    return voronoi_c0(pair) * float(x) ** (1.0 - 1.0 / (2 * pair.s)) * trunc.tail_bound


def g_terms_cosine(pair: DivisorPair, x: float, N: int) -> np.ndarray:
    """Individual terms of G (cosine form), n = 1..N, for term-by-term checks."""
    n = np.arange(1, N + 1, dtype=np.float64)
    w = kernels.sieve_weights(pair.a, pair.b, N, float(pair.a - 1), float(pair.b - 1))[1:]
    amp = voronoi_c0(pair) * float(x) ** (1.0 - 1.0 / (2 * pair.s)) * w * n ** (-_sigma(pair))
    return amp * np.cos(_omega(pair, x) * n ** (1.0 / pair.s) + THETA0)


def g_terms_sine_11(x: float, N: int) -> np.ndarray:
    """Terms of the (1, 1) series in its sine form, d(n) n**(-5/4) sin(4 pi sqrt(n x) - pi/4)."""
    n = np.arange(1, N + 1, dtype=np.float64)
    d = kernels.sieve_counts(1, 1, N)[1:].astype(np.float64)
    x = float(x)
    return x**0.75 / (2.0 * math.sqrt(2.0) * math.pi**2) * d * n**-1.25 * np.sin(4.0 * math.pi * np.sqrt(n * x) - 0.25 * math.pi)


def voronoi_integral(ctx: ZetaContext, pair: DivisorPair, x: float, trunc: SeriesTruncation, q: int = 1) -> float:
    """x/4 + zeta(-a) zeta(-b) + G(x), the one-term Voronoi form of int_0^x Delta."""
    if q != 1:
        raise NotImplementedError("only the one-term (q = 1) form is available")
    x = float(x)
    return x / 4.0 + ctx.zeta(-pair.a) * ctx.zeta(-pair.b) + g_series(ctx, pair, x, trunc)


# ------------------------------------------------------------------ c_{a,b}


@dataclass(frozen=True)
class GSquareSeries:
    """sum_n g(n)**2 by an accelerated Euler product, with diagnostics."""

    value: float
    prime_limit: int
    tail_estimate: float
    partial_sum: float | None
    partial_terms: int | None


def _dstar_prime_power_rows(pair: DivisorPair, kmax: int):
    """For each k <= kmax, the exponents i(a-1) + j(b-1) over a i + b j = k."""
    a, b = pair.a, pair.b
    rows = []
    for k in range(kmax + 1):
        ex = [i * (a - 1) + ((k - a * i) // b) * (b - 1) for i in range(k // a + 1) if (k - a * i) % b == 0]
        rows.append(ex)
    return rows


def g_square_series(
    ctx: ZetaContext,
    pair: DivisorPair,
    prime_limit: int = 10**6,
    partial_terms: int | None = None,
) -> GSquareSeries:
    """sum_n d*(n)**2 n**(-tau), tau = 2 - 1/(a+b), as an Euler product.

    d* is multiplicative, so the sum is a product of local factors L_p.  The
    two slowest local terms p**e1, p**e2 (e1 = -2 + a/(a+b), e2 = -2 + b/(a+b))
    are divided out and restored as zeta(-e1) zeta(-e2) (zeta(-e1)**4 on the
    diagonal, where d(p)**2 = 4); what remains
    converges like p**(min(e1, e2) - 1).  The neglected primes > prime_limit
    are estimated from a power-law fit to the last decade of factors.
    """
    a, b = pair.a, pair.b
    s = a + b
    tau = 2.0 - 1.0 / s
    e1 = -2.0 + a / s
    e2 = -2.0 + b / s
    p = primes_upto(int(prime_limit)).astype(np.float64)
    logp = np.log(p)
    # local factor L_p = sum_k d*(p^k)^2 p^(-k tau); stop once the k-th term is negligible at p = 2
    kmax = 8
    while (2.0 ** (kmax * ((b - 1) / b - tau / 2.0))) ** 2 * (kmax + 1) ** 2 > 1e-20:
        kmax += 8
    rows = _dstar_prime_power_rows(pair, kmax)
    Lm1 = np.zeros_like(p)  # L_p - 1, accumulated without the leading 1
    for k in range(1, kmax + 1):
        if not rows[k]:
            continue
        root = np.zeros_like(p)
        for ex in rows[k]:
            root += np.exp((ex - 0.5 * k * tau) * logp)
        Lm1 += root * root
    if pair.diagonal:
        # e1 == e2 and d(p)**2 = 4: the slow local term is 4 p**e1
        slow = [e1] * 4
    else:
        slow = [e1, e2]
    logs = np.log1p(Lm1)
    for e in slow:
        logs = logs + np.log1p(-np.exp(e * logp))
    body = kernels.neumaier_sum(logs)
    # tail over primes beyond the limit: fit |log factor| ~ C p**nu on the last decade
    tail = 0.0
    top = p >= prime_limit / 10.0
    if top.sum() > 10 and np.all(logs[top] != 0):
        mag = np.abs(logs[top])
        nu, logC = np.polyfit(logp[top], np.log(mag), 1)
        if nu < -1:
            P = float(prime_limit)
            tail = float(np.sign(np.mean(logs[top])) * np.exp(logC) * P ** (nu + 1) / ((-nu - 1) * math.log(P)))
    log_value = math.fsum([*(math.log(ctx.zeta(-e)) for e in slow), body, tail])
    value = math.exp(log_value)
    psum = None
    if partial_terms:
        w = kernels.sieve_weights(a, b, int(partial_terms), float(a - 1), float(b - 1))[1:]
        n = np.arange(1, int(partial_terms) + 1, dtype=np.float64)
        psum = kernels.neumaier_sum(w * w * n ** (-tau))
    return GSquareSeries(value, int(prime_limit), abs(value * tail), psum, partial_terms)


def c_ab_prefactor(pair: DivisorPair) -> float:
    a, b = pair.a, pair.b
    return a ** (b / (a + b)) * b ** (a / (a + b)) / (2.0 * (a + b + 1) * math.pi**2)


def c_ab_constant(ctx: ZetaContext, pair: DivisorPair, trunc: int = 10**6) -> float:
    """Mean-square constant c_{a,b} for a < b; ``trunc`` is the Euler-product prime cutoff."""
    if pair.diagonal:
        raise InvalidPairError("c_{a,b} is stated for a < b; use c11_constant for (1, 1)")
    return c_ab_prefactor(pair) * g_square_series(ctx, pair, trunc).value


def c11_constant(ctx: ZetaContext) -> float:
    """zeta(3/2)**4 / (6 pi**2 zeta(3)), the (1, 1) mean-square constant."""
    return ctx.zeta(1.5) ** 4 / (6.0 * math.pi**2 * ctx.zeta(3.0))
