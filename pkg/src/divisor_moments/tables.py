"""Sieve-backed tables of Delta at the integers and its exact interval integrals.

On ``[n, n + 1)`` the count is the constant D(n), so

    Delta(n + u) = Delta(n) - m(u),   m(u) = M(n + u) - M(n) = sum_k mu_k u**k,

and every integral of a power of Delta over a unit interval (or a piece of
one) is a polynomial in the mu_k.  For small n the binomial series converges
slowly, so closed-form antiderivatives are used there instead.
"""
from __future__ import annotations

import math
import threading

import numpy as np

from . import kernels
from .arith import DivisorPair, sieve_counts
from .error_terms import main_term
from .zeta import ZetaContext

_SERIES_FROM = 16
_SERIES_TERMS = 18
_CHUNK = 1 << 18


def _binomials(e: float, K: int) -> np.ndarray:
    c = np.empty(K + 1)
    c[0] = 1.0
    for k in range(1, K + 1):
        c[k] = c[k - 1] * (e - k + 1) / k
    return c


def _main_parts(ctx: ZetaContext, pair: DivisorPair) -> list[tuple[float, float]]:
    """M(t) = sum c t**e for a < b, as (c, e) pairs."""
    a, b = pair.a, pair.b
    return [(ctx.zeta(b / a), 1.0 / a), (ctx.zeta(a / b), 1.0 / b)]


def _mu(ctx: ZetaContext, pair: DivisorPair, n: np.ndarray) -> np.ndarray:
    """Coefficients mu_1..mu_K of m(u) = M(n + u) - M(n), shape (K, len(n))."""
    K = _SERIES_TERMS
    h = 1.0 / n
    mu = np.zeros((K, n.size))
    if pair.diagonal:
        mu[0] = np.log(n) + 2.0 * ctx.gamma
        hp = np.ones_like(n)
        for k in range(2, K + 1):
            hp = hp * h
            mu[k - 1] = (-1.0) ** k * hp / (k * (k - 1))
    else:
        for c, e in _main_parts(ctx, pair):
            cb = _binomials(e, K)
            base = c * n**e
            hp = np.ones_like(n)
            for k in range(1, K + 1):
                hp = hp * h
                mu[k - 1] += base * cb[k] * hp
    return mu


def _series_moments(delta: np.ndarray, mu: np.ndarray, f: np.ndarray, power: int) -> np.ndarray:
    """int_0^f (delta - m(u))**power du for power 1 or 2."""
    K = mu.shape[0]
    fp = [f]
    for _ in range(2 * K):
        fp.append(fp[-1] * f)  # fp[j] = f**(j+1)
    lin = np.zeros_like(f)  # int_0^f m(u) du
    for k in range(1, K + 1):
        lin += mu[k - 1] * fp[k] / (k + 1)
    if power == 1:
        return delta * f - lin
    sq = np.zeros_like(f)  # int_0^f m(u)**2 du
    for i in range(1, K + 1):
        for j in range(i, K + 1):
            w = 1.0 if i == j else 2.0
            sq += w * mu[i - 1] * mu[j - 1] * fp[i + j] / (i + j + 1)
    return delta * delta * f - 2.0 * delta * lin + sq


def _antiderivatives(ctx: ZetaContext, pair: DivisorPair, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Antiderivatives of M and M**2 at t."""
    if pair.diagonal:
        c = 2.0 * ctx.gamma - 1.0
        L = np.log(t)
        t2, t3 = t * t, t * t * t
        A1 = t2 * L / 2.0 - t2 / 4.0 + c * t2 / 2.0
        A2 = (t3 * L * L / 3.0 - 2.0 * t3 * L / 9.0 + 2.0 * t3 / 27.0) + 2.0 * c * (t3 * L / 3.0 - t3 / 9.0) + c * c * t3 / 3.0
        return A1, A2
    parts = _main_parts(ctx, pair)
    A1 = sum(c * t ** (e + 1) / (e + 1) for c, e in parts)
    A2 = sum(ci * cj * t ** (ei + ej + 1) / (ei + ej + 1) for ci, ei in parts for cj, ej in parts)
    return A1, A2


def _direct_moments(ctx, pair, delta, n, f, power):
    """int_n^{n+f} (D(n) - M(t))**power dt via antiderivatives, with D(n) = delta + M(n)."""
    Dn = delta + main_term(ctx, pair, n)
    lo1, lo2 = _antiderivatives(ctx, pair, n)
    hi1, hi2 = _antiderivatives(ctx, pair, n + f)
    if power == 1:
        return Dn * f - (hi1 - lo1)
    return Dn * Dn * f - 2.0 * Dn * (hi1 - lo1) + (hi2 - lo2)


def piece_integrals(ctx: ZetaContext, pair: DivisorPair, n, delta_n, f, power: int) -> np.ndarray:
    """int_n^{n+f} Delta(t)**power dt for integer n >= 1, 0 <= f <= 1, power in {1, 2}.

    ``delta_n`` is Delta(n), i.e. D(n) - M(n).
    """
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    n = np.atleast_1d(np.asarray(n, dtype=np.float64))
    delta_n = np.broadcast_to(np.asarray(delta_n, dtype=np.float64), n.shape)
    f = np.broadcast_to(np.asarray(f, dtype=np.float64), n.shape)
    out = np.empty(n.shape)
    small = n < _SERIES_FROM
    if small.any():
        out[small] = _direct_moments(ctx, pair, delta_n[small], n[small], f[small], power)
    big = np.flatnonzero(~small)
    for s in range(0, big.size, _CHUNK):
        sel = big[s : s + _CHUNK]
        mu = _mu(ctx, pair, n[sel])
        out[sel] = _series_moments(delta_n[sel], mu, f[sel], power)
    return out


class DeltaTable:
    """Delta(n) for 0 <= n <= N with lazily built prefix sums and integrals.

    Prefix arrays are created on first use only; at N = 10**7 each costs
    80 MB, so a discrete-moment-only workload never pays for the integrals.
    """

    def __init__(self, ctx: ZetaContext, pair: DivisorPair, N: int, *, budget: int | None = None):
        self.ctx = ctx
        self.pair = pair
        self.N = int(N)
        if self.N < 1:
            raise ValueError("table size must be >= 1")
        counts = sieve_counts(pair, self.N, budget=budget)
        self.D = np.cumsum(counts, dtype=np.int64)
        del counts
        self.delta = np.zeros(self.N + 1)
        self.delta[1:] = self.D[1:] - main_term(ctx, pair, np.arange(1, self.N + 1, dtype=np.float64))
        self._cache: dict[tuple[str, int], np.ndarray] = {}
        self._lock = threading.Lock()

    def _check(self, x: float) -> int:
        X = math.floor(x)
        if X > self.N:
            raise ValueError(f"x={x!r} lies beyond the table size {self.N}")
        if x < 1:
            raise ValueError("x must be >= 1")
        return X

    def discrete_prefix(self, k: int) -> np.ndarray:
        """P[n] = sum_{m <= n} Delta(m)**k."""
        key = ("sum", k)
        with self._lock:
            if key not in self._cache:
                P = np.zeros(self.N + 1)
                P[1:] = kernels.compensated_cumsum(self.delta[1:] ** k)
                self._cache[key] = P
            return self._cache[key]

    def integral_prefix(self, k: int) -> np.ndarray:
        """Q[n] = int_1^n Delta(t)**k dt for k in {1, 2}."""
        key = ("int", k)
        with self._lock:
            if key not in self._cache:
                Q = np.zeros(self.N + 1)
                if self.N >= 2:
                    n = np.arange(1, self.N, dtype=np.float64)
                    pieces = piece_integrals(self.ctx, self.pair, n, self.delta[1 : self.N], 1.0, k)
                    Q[2:] = kernels.compensated_cumsum(pieces)
                self._cache[key] = Q
            return self._cache[key]

    def discrete_sum(self, x: float, k: int) -> float:
        """sum_{n <= x} Delta(n)**k, read from the prefix table.

        Always going through the table (rather than summing a slice when the
        table is missing) keeps the value independent of call order, which
        the parallel scans rely on.
        """
        X = self._check(x)
        return float(self.discrete_prefix(k)[X])

    def integral(self, x: float, k: int) -> float:
        """int_1^x Delta(t)**k dt."""
        X = self._check(x)
        Q = self.integral_prefix(k)
        f = float(x) - X
        if f == 0.0:
            return float(Q[X])
        piece = piece_integrals(self.ctx, self.pair, np.array([float(X)]), self.delta[X], f, k)
        return math.fsum([float(Q[X]), float(piece[0])])

    def delta_at(self, x: float) -> float:
        X = self._check(x)
        return float(self.D[X]) - main_term(self.ctx, self.pair, float(x))
