import math

import mpmath
import numpy as np
import pytest

from divisor_moments.arith import DivisorPair
from divisor_moments.integrals import (
    BRANCH_MINUS_1,
    bernoulli_tail,
    i_integral_asymptotic,
    i_integral_closed,
    partial_sum_power,
    partial_sum_power_formula,
    psi1_tail,
    psi2_tail,
    quad_psi_product,
    tail_integral_psi1,
    tail_integral_psi1_numeric,
    w_alpha_asymptotic,
    w_alpha_exact,
    w_alpha_power_sum,
    w_alpha_values,
    w_minus1_asymptotic,
    w_minus1_constant,
    w_minus2_asymptotic,
)

mpmath.mp.dps = 30


def mp_piecewise(f_on, lo: float, hi: float):
    """mpmath quadrature of f_on(n)(t) over the unit pieces of [lo, hi]."""
    total = mpmath.mpf(0)
    n = math.floor(lo)
    while n < hi:
        a, b = max(lo, n), min(hi, n + 1)
        if b > a:
            total += mpmath.quad(f_on(n), [a, b])
        n += 1
    return total


def mp_w(alpha, x):
    return mp_piecewise(lambda n: (lambda t: t**alpha * (t - n - mpmath.mpf(1) / 2)), 1, x)


ALPHAS = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.5]


@pytest.mark.parametrize("alpha", ALPHAS)
def test_w_alpha_against_mpmath(alpha):
    for x in (1.0, 1.37, 2.0, 7.5, 16.2, 33.9):
        want = float(mp_w(mpmath.mpf(alpha), mpmath.mpf(x)))
        got = w_alpha_exact(alpha, x).value
        assert got == pytest.approx(want, abs=1e-13 * max(1.0, x ** (alpha + 1)))


def test_w_alpha_vectorized_matches_scalar():
    xs = np.array([1.0, 3.3, 17.0, 250.25, 1e5 + 0.5])
    for alpha in (-0.5, 0.5):
        vec = w_alpha_values(alpha, xs)
        for x, v in zip(xs, vec):
            assert v == w_alpha_exact(alpha, float(x)).value


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 1.0, 1.5])
def test_power_sum_cross_check(alpha):
    for x in (5.5, 100.25, 12345.678):
        exact = w_alpha_exact(alpha, x).value
        assert w_alpha_power_sum(alpha, x) == pytest.approx(exact, abs=1e-9 * x ** (alpha + 2))


def test_w_branches_and_remainder():
    r = w_alpha_exact(-1.0, 50.5)
    assert r.branch == BRANCH_MINUS_1
    assert r.remainder == pytest.approx(r.value - w_minus1_asymptotic(50.5), abs=1e-16)
    assert abs(r.remainder) < 50.5**-2
    with pytest.raises(ValueError):
        w_alpha_exact(0.5, 0.9)


def test_w_minus1_constant():
    assert w_minus1_constant() == pytest.approx(0.5 * math.log(2 * math.pi) - 1.0, abs=1e-13)


@pytest.mark.parametrize("alpha", [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
def test_w_asymptotic_error_decays_like_x_to_alpha_minus_1(ctx, alpha):
    ratios = []
    for x in (10.3, 100.3, 1000.3, 10000.3):
        exact = w_alpha_exact(alpha, x).value
        if alpha == -1.0:
            asym = w_minus1_asymptotic(x)
        elif alpha == -2.0:
            asym = w_minus2_asymptotic(x)
        else:
            asym = w_alpha_asymptotic(ctx, alpha, x)
        ratios.append(abs(exact - asym) / x ** (alpha - 1))
    assert max(ratios) < 1.0


def test_bernoulli_tail_against_mpmath():
    # int_Y^inf psi(t) t**-sigma dt, with psi = Bt_1
    for sigma, Y in ((2.0, 10), (3.5, 4), (1.5, 30)):
        tv = bernoulli_tail(1, sigma, Y)
        head = mp_piecewise(lambda n: (lambda t: (t - n - 0.5) * t ** (-sigma)), Y, Y + 400)
        # beyond Y + 400 the psi tail is below 0.5 * (Y+400)**-sigma in size
        assert float(head) == pytest.approx(tv.value, abs=(Y + 400) ** -sigma + tv.bound)
        assert tv.bound < 1e-6


def test_psi1_tail_matches_its_closed_form(ctx):
    for s in (0.5, 1.0, 1.5, 2.0, 3.0):
        closed = tail_integral_psi1(ctx, s)
        numeric = psi1_tail(s + 2.0, 1.0)
        assert numeric.value == pytest.approx(closed, abs=1e-14)
        assert numeric.bound < 1e-14
        assert tail_integral_psi1_numeric(s, cutoff=2000).value == pytest.approx(closed, abs=1e-14)


def test_psi1_tail_differences_against_mpmath():
    # int_y1^y2 psi1 t**-sigma = tail(y1) - tail(y2); the piece is checked with mpmath
    for sigma in (2.5, 4.0):
        for y1, y2 in ((1.0, 9.25), (3.7, 20.0)):
            want = mp_piecewise(
                lambda n: (lambda t: ((t - n - 0.5) ** 2 - 0.25) / 2 * t ** (-sigma)), y1, y2
            )
            got = psi1_tail(sigma, y1).value - psi1_tail(sigma, y2).value
            assert got == pytest.approx(float(want), abs=1e-15)


def test_psi2_tail_against_mpmath():
    sigma = 3.0

    def f(n):
        def g(t):
            p = t - n - 0.5
            return (-t / 12 + p**3 / 6 - p / 24 + mpmath.mpf(1) / 12) * t ** (-sigma)

        return g

    got = psi2_tail(sigma, 2.5).value - psi2_tail(sigma, 11.0).value
    assert got == pytest.approx(float(mp_piecewise(f, 2.5, 11.0)), abs=1e-15)


def test_partial_sum_power(ctx):
    for s in (0.5, 1.0, 1.5, 2.0):
        for x in (10.5, 1000.0, 54321.7):
            direct = partial_sum_power(ctx, s, x)
            assert partial_sum_power_formula(ctx, s, x) == pytest.approx(direct, rel=1e-13)
    with pytest.raises(ValueError):
        partial_sum_power(ctx, 0.0, 5.0)


PRODUCT_PAIRS = [DivisorPair(1, 2), DivisorPair(1, 3), DivisorPair(2, 3)]


@pytest.mark.parametrize("pair", PRODUCT_PAIRS, ids=str)
@pytest.mark.parametrize("swapped", [False, True])
def test_psi_product_closed_against_quadrature(pair, swapped):
    a, b = pair.a, pair.b
    for n in (1, 2):
        lo = n ** (a + b)
        for x in (lo + 0.5, lo + 17.3, 260.0):
            for alpha in sorted({0.0, 1 / a - 1, 1 / b - 1}):
                q = quad_psi_product(pair, n, alpha, x, swapped=swapped)
                c = i_integral_closed(pair, n, alpha, x, swapped=swapped)
                assert c == pytest.approx(q, abs=1e-10)


def test_psi_product_against_mpmath_small():
    pair = DivisorPair(1, 2)
    n, alpha, x = 1, -0.5, 12.4
    # jumps at integers (psi(t)) and at j**1 * 1**2 = j; all integer points
    pts = [1.0] + [float(k) for k in range(2, 13)] + [x]
    f = lambda t: t**alpha * (t - mpmath.floor(t) - 0.5) * (t - mpmath.floor(t) - 0.5)
    want = mpmath.quad(f, pts)
    assert i_integral_closed(pair, n, alpha, x) == pytest.approx(float(want), abs=1e-13)


def test_psi_product_asymptotic_is_close(ctx):
    pair = DivisorPair(1, 2)
    for x in (1e3 + 0.3, 1e4 + 0.7):
        c = i_integral_closed(pair, 1, 0.0, x)
        asym = i_integral_asymptotic(pair, 1, 0.0, x)
        assert abs(c - asym) < 0.05 * max(1.0, abs(c))
    with pytest.raises(ValueError):
        i_integral_asymptotic(pair, 1, -1.0, 100.0)
    with pytest.raises(ValueError):
        i_integral_closed(pair, 3, 0.0, 10.0)
