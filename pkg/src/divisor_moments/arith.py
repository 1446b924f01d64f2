"""Exponent pairs and the generalized divisor functions built on them.

For coprime 1 <= a <= b, ``d(a, b; n)`` counts the representations
``n = h**a * r**b`` with positive integers h, r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import CapacityError, InvalidPairError

# Largest sieve length (entries) any single table may allocate.
DEFAULT_SIEVE_BUDGET = 120_000_000


@dataclass(frozen=True)
class DivisorPair:
    """Exponent pair (a, b) with 1 <= a <= b and gcd(a, b) = 1."""

    a: int
    b: int

    def __post_init__(self) -> None:
        for name in ("a", "b"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise InvalidPairError(f"{name} must be an integer, got {v!r}")
        if not (1 <= self.a <= self.b):
            raise InvalidPairError(f"need 1 <= a <= b, got ({self.a}, {self.b})")
        if math.gcd(int(self.a), int(self.b)) != 1:
            raise InvalidPairError(f"a and b must be coprime, got ({self.a}, {self.b})")
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))

    @classmethod
    def parse(cls, text: str) -> "DivisorPair":
        """Parse ``"a,b"``."""
        parts = text.replace(" ", "").split(",")
        if len(parts) != 2:
            raise InvalidPairError(f"pair must look like 'a,b', got {text!r}")
        try:
            a, b = (int(p) for p in parts)
        except ValueError as exc:
            raise InvalidPairError(f"pair must look like 'a,b', got {text!r}") from exc
        return cls(a, b)

    @property
    def diagonal(self) -> bool:
        return self.a == self.b

    @property
    def s(self) -> int:
        """a + b."""
        return self.a + self.b

    @property
    def swapped(self) -> tuple[int, int]:
        return (self.b, self.a)

    def __str__(self) -> str:
        return f"{self.a},{self.b}"


def iroot(y: int, k: int) -> int:
    """Exact floor(y ** (1/k)) for a non-negative Python integer y."""
    if k < 1:
        raise ValueError("root order must be >= 1")
    y = int(y)
    if y < 0:
        raise ValueError("iroot needs y >= 0")
    if y < 2 or k == 1:
        return y
    if k == 2:
        return math.isqrt(y)
    r = int(round(y ** (1.0 / k))) if y < 2**1000 else 1 << (y.bit_length() // k + 1)
    # Newton from above, then settle exactly
    if r ** k <= y:
        while (r + 1) ** k <= y:
            r += 1
        return r
    while True:
        nr = ((k - 1) * r + y // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r ** k > y:
        r -= 1
    while (r + 1) ** k <= y:
        r += 1
    return r


def _representations(pair: DivisorPair, n: int):
    """Yield (h, r) with h**a * r**b == n."""
    a, b = pair.a, pair.b
    r = 1
    while r ** b <= n:
        q, rem = divmod(n, r ** b)
        if rem == 0:
            h = iroot(q, a)
            if h ** a == q:
                yield h, r
        r += 1


def d_ab(pair: DivisorPair, n: int) -> int:
    """Number of representations n = h**a * r**b."""
    if n < 1:
        raise ValueError("d(a, b; n) is defined for n >= 1")
    return sum(1 for _ in _representations(pair, int(n)))


def d_star(pair: DivisorPair, n: int) -> int:
    """Weighted count: sum of h**(a-1) * r**(b-1) over n = h**a * r**b."""
    if n < 1:
        raise ValueError("d* is defined for n >= 1")
    return sum(h ** (pair.a - 1) * r ** (pair.b - 1) for h, r in _representations(pair, int(n)))


def g_ab(pair: DivisorPair, n: int) -> float:
    """Sum of h**(-(a+2b)/(2a+2b)) * r**(-(b+2a)/(2a+2b)) over n = h**a * r**b.

    Equals n**(-1 + 1/(2(a+b))) * d*(n).
    """
    if pair.diagonal:
        raise InvalidPairError("g_ab is only defined for a < b")
    if n < 1:
        raise ValueError("g_ab is defined for n >= 1")
    a, b = pair.a, pair.b
    eh = -(a + 2 * b) / (2 * a + 2 * b)
    er = -(b + 2 * a) / (2 * a + 2 * b)
    return math.fsum(float(h) ** eh * float(r) ** er for h, r in _representations(pair, int(n)))


def _check_budget(N: int, budget: int | None) -> None:
    limit = DEFAULT_SIEVE_BUDGET if budget is None else budget
    if N + 1 > limit:
        raise CapacityError(f"a sieve of length {N + 1} exceeds the budget of {limit} entries")


def sieve_counts(pair: DivisorPair, N: int, *, budget: int | None = None) -> np.ndarray:
    """Array c of length N + 1 with c[n] = d(a, b; n) and c[0] = 0."""
    N = int(N)
    if N < 0:
        raise ValueError("N must be >= 0")
    _check_budget(N, budget)
    return kernels.sieve_counts(pair.a, pair.b, N)


def sieve_d_ab(pair: DivisorPair, N: int, *, budget: int | None = None) -> np.ndarray:
    """d(a, b; n) for n = 1..N; position i holds d(a, b; i + 1)."""
    if int(N) < 1:
        raise ValueError("N must be >= 1")
    return sieve_counts(pair, N, budget=budget)[1:]


def sieve_d_star(pair: DivisorPair, N: int, *, budget: int | None = None) -> np.ndarray:
    """Array w with w[n] = d*(n) as float64 for 0 <= n <= N."""
    N = int(N)
    _check_budget(N, budget)
    return kernels.sieve_weights(pair.a, pair.b, N, float(pair.a - 1), float(pair.b - 1))


def primes_upto(N: int) -> np.ndarray:
    """All primes <= N via an Eratosthenes sieve."""
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(N + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(N) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)
