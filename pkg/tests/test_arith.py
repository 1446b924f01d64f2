import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divisor_moments.arith import (
    DivisorPair,
    d_ab,
    d_star,
    g_ab,
    iroot,
    primes_upto,
    sieve_counts,
    sieve_d_ab,
    sieve_d_star,
)
from divisor_moments.errors import CapacityError, InvalidPairError


def brute_reps(a, b, n):
    """All (h, r) with h**a r**b = n by exhaustive search."""
    return [(h, r) for h in range(1, n + 1) for r in range(1, n + 1) if h**a * r**b == n]


@pytest.mark.parametrize("a,b", [(2, 4), (3, 6), (0, 1), (3, 2), (-1, 2)])
def test_pair_rejects_bad_exponents(a, b):
    with pytest.raises(InvalidPairError):
        DivisorPair(a, b)


def test_pair_rejects_non_integers():
    with pytest.raises(InvalidPairError):
        DivisorPair(1.0, 2)
    with pytest.raises(InvalidPairError):
        DivisorPair(True, 2)


def test_pair_parse_roundtrip():
    p = DivisorPair.parse(" 2, 3")
    assert (p.a, p.b) == (2, 3)
    assert str(p) == "2,3"
    assert DivisorPair.parse(str(p)) == p
    with pytest.raises(InvalidPairError):
        DivisorPair.parse("1;2")
    with pytest.raises(InvalidPairError):
        DivisorPair.parse("1,2,3")


def test_pair_properties():
    p = DivisorPair(1, 1)
    assert p.diagonal and p.s == 2
    assert DivisorPair(2, 5).swapped == (5, 2)


@given(st.integers(min_value=0, max_value=10**40), st.integers(min_value=1, max_value=7))
@settings(max_examples=300, deadline=None)
def test_iroot_is_exact_floor(y, k):
    r = iroot(y, k)
    assert r**k <= y < (r + 1) ** k


def test_iroot_perfect_powers_and_errors():
    for k in range(2, 8):
        for r in (2, 3, 10, 99991, 2**20 + 1):
            assert iroot(r**k, k) == r
            assert iroot(r**k - 1, k) == r - 1
    with pytest.raises(ValueError):
        iroot(-1, 2)
    with pytest.raises(ValueError):
        iroot(5, 0)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 3), (1, 3)])
def test_d_ab_and_d_star_against_brute_force(a, b):
    pair = DivisorPair(a, b)
    for n in range(1, 80):
        reps = brute_reps(a, b, n)
        assert d_ab(pair, n) == len(reps)
        assert d_star(pair, n) == sum(h ** (a - 1) * r ** (b - 1) for h, r in reps)


def test_g_ab_definition_and_identity():
    pair = DivisorPair(1, 2)
    assert g_ab(pair, 1) == 1.0
    for n in range(1, 60):
        # g(n) = n**(-1 + 1/(2(a+b))) d*(n)
        want = n ** (-1 + 1 / 6) * d_star(pair, n)
        assert g_ab(pair, n) == pytest.approx(want, rel=1e-14, abs=1e-300)
    with pytest.raises(InvalidPairError):
        g_ab(DivisorPair(1, 1), 3)


def test_sieve_d_ab_example():
    # d(1, 1; n) for n = 1..4
    assert list(sieve_d_ab(DivisorPair(1, 1), 4)) == [1, 2, 2, 3]


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 3), (3, 5)])
def test_sieves_match_definitions(a, b):
    pair = DivisorPair(a, b)
    N = 500
    c = sieve_counts(pair, N)
    w = sieve_d_star(pair, N)
    assert c[0] == 0 and w[0] == 0
    for n in range(1, N + 1):
        assert c[n] == d_ab(pair, n)
        assert w[n] == d_star(pair, n)


def test_sieve_budget_is_enforced():
    with pytest.raises(CapacityError):
        sieve_counts(DivisorPair(1, 2), 1000, budget=100)


def test_primes():
    p = primes_upto(100)
    assert list(p[:10]) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(p) == 25
    assert len(primes_upto(10**5)) == 9592
    assert primes_upto(1).size == 0
    assert all(all(q % f for f in range(2, math.isqrt(int(q)) + 1)) for q in primes_upto(2000))
