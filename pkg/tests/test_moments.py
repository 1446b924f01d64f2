import math

import mpmath
import numpy as np
import pytest

from divisor_moments.arith import DivisorPair, sieve_counts
from divisor_moments.error_terms import delta_eval, main_term
from divisor_moments.errors import InvalidPairError
from divisor_moments.moments import (
    ArithmeticSpec,
    SmoothSpec,
    continuous_mean_square,
    corollary1_branch,
    corollary1_rhs,
    discrete_moment,
    divisor_arithmetic,
    first_moment_identity,
    furuya_identity_check,
    integral_delta,
    integral_delta_0_1,
    main_term_smooth,
    mean_value_constant,
    theorem1_rhs,
    theorem2_coefficients,
    theorem2_rhs,
    zero_arithmetic,
    zero_smooth,
)
from divisor_moments.quadrature import QuadratureSpec, integer_breakpoints, integrate
from divisor_moments.series import truncation
from divisor_moments.tables import DeltaTable, piece_integrals

PAIRS = [DivisorPair(1, 1), DivisorPair(1, 2), DivisorPair(2, 3)]


def quad_delta_power(ctx, pair, T, k):
    """int_1^T Delta**k by adaptive quadrature, breaking at every integer."""
    N = math.floor(T)
    D = np.cumsum(sieve_counts(pair, N)).astype(np.float64)

    def f(t):
        return (D[np.floor(t).astype(np.int64)] - main_term(ctx, pair, t)) ** k

    # Delta is a difference of numbers of size M(T); its rounding error sets the floor
    probe = np.linspace(1.0, T, 4001)
    big = float(np.abs(main_term(ctx, pair, probe)).max())
    small = float(np.abs(f(probe) ** (1.0 / k)).max()) if k > 1 else 1.0
    noise = 8 * np.finfo(float).eps * big * k * small
    spec = QuadratureSpec(abs_tol=1e-12, noise=noise).with_breakpoints(integer_breakpoints(1.0, T))
    r = integrate(f, 1.0, T, spec)
    assert r.converged
    return r.value


@pytest.mark.parametrize("pair", PAIRS, ids=str)
@pytest.mark.parametrize("T", [1.5, 10.0, 57.3, 999.7])
def test_mean_square_against_quadrature(ctx, pair, T):
    tab = DeltaTable(ctx, pair, 1000)
    for k in (1, 2):
        want = quad_delta_power(ctx, pair, T, k)
        assert tab.integral(T, k) == pytest.approx(want, rel=1e-11, abs=1e-9)
    assert continuous_mean_square(ctx, pair, T, tab) == tab.integral(T, 2)


def test_mean_square_trivial_and_table_checks(ctx, p12, p11):
    assert continuous_mean_square(ctx, p12, 1.0) == 0.0
    tab = DeltaTable(ctx, p12, 20)
    with pytest.raises(ValueError):
        tab.integral(21.0, 2)
    with pytest.raises(ValueError):
        continuous_mean_square(ctx, p11, 5.0, tab)
    with pytest.raises(ValueError):
        piece_integrals(ctx, p12, [3.0], [0.1], [0.5], 3)


def mp_main(ctx, pair):
    if pair.diagonal:
        return lambda t: t * mpmath.log(t) + (2 * mpmath.euler - 1) * t
    a, b = pair.a, pair.b
    return lambda t: mpmath.zeta(mpmath.mpf(b) / a) * t ** (mpmath.mpf(1) / a) + mpmath.zeta(
        mpmath.mpf(a) / b
    ) * t ** (mpmath.mpf(1) / b)


@pytest.mark.parametrize("pair", PAIRS, ids=str)
def test_piece_integrals_against_mpmath(ctx, pair):
    M = mp_main(ctx, pair)
    with mpmath.workdps(40):
        for n, d, f in ((3.0, 0.7, 0.5), (16.0, 0.3, 1.0), (40.0, -1.2, 0.37), (1000.0, 5.0, 0.999), (123456.0, -40.0, 0.25)):
            Dn = mpmath.mpf(d) + M(mpmath.mpf(n))
            for power in (1, 2):
                want = float(mpmath.quad(lambda t: (Dn - M(t)) ** power, [n, n + f]))
                got = piece_integrals(ctx, pair, [n], [d], [f], power)[0]
                assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("pair", PAIRS, ids=str)
def test_series_and_direct_pieces_agree_near_switch(ctx, pair):
    # close to the switch point both constructions are well conditioned
    from divisor_moments.tables import _direct_moments

    n = np.array([16.0, 17.0, 40.0])
    d = np.array([0.3, -1.2, 2.0])
    f = np.array([1.0, 0.37, 0.999])
    for power in (1, 2):
        series = piece_integrals(ctx, pair, n, d, f, power)
        direct = _direct_moments(ctx, pair, d, n, f, power)
        assert np.allclose(series, direct, rtol=1e-10, atol=1e-10)


def test_discrete_moment_three_terms(ctx, p12):
    want = math.fsum(delta_eval(ctx, p12, n).delta ** 2 for n in (1, 2, 3))
    assert discrete_moment(ctx, p12, 3, 2) == pytest.approx(want, rel=1e-14)
    assert discrete_moment(ctx, p12, 3.99, 2) == discrete_moment(ctx, p12, 3, 2)
    with pytest.raises(ValueError):
        discrete_moment(ctx, p12, 3, 0)


def test_discrete_moment_higher_power(ctx, p23):
    tab = DeltaTable(ctx, p23, 500)
    want = math.fsum(delta_eval(ctx, p23, n).delta ** 3 for n in range(1, 501))
    assert discrete_moment(ctx, p23, 500, 3, tab) == pytest.approx(want, rel=1e-12, abs=1e-9)


def test_integral_from_zero_offset(ctx, p11, p12):
    assert integral_delta_0_1(ctx, p11) == pytest.approx(-(-0.25 + (2 * ctx.gamma - 1) / 2), rel=1e-15)
    assert integral_delta_0_1(ctx, p12) == pytest.approx(-(ctx.zeta(2) / 2 + ctx.zeta(0.5) * 2 / 3), rel=1e-15)
    spec = QuadratureSpec(abs_tol=1e-13)
    r = integrate(lambda t: -main_term(ctx, p12, t), 0.0, 1.0, spec)
    assert integral_delta_0_1(ctx, p12) == pytest.approx(r.value, abs=1e-11)
    assert integral_delta(ctx, p12, 1.0) == 0.0


def test_summation_identity_trivial():
    assert furuya_identity_check(zero_arithmetic(), zero_smooth(), 1, 10.0) == 0.0
    assert furuya_identity_check(zero_arithmetic(), zero_smooth(), 3, 4.5) == 0.0


@pytest.mark.parametrize("pair", [DivisorPair(1, 1), DivisorPair(1, 2)], ids=str)
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [10.0, 50.0, 200.0, 77.7])
def test_summation_identity(ctx, pair, k, x):
    r = furuya_identity_check(divisor_arithmetic(pair), main_term_smooth(ctx, pair), k, x)
    assert abs(r) <= 1e-8


def test_summation_identity_arbitrary_functions():
    f = ArithmeticSpec(lambda n: np.sin(np.asarray(n, dtype=float)), "sin")
    g = SmoothSpec(lambda t: 0.3 * t**1.5, lambda t: 0.45 * t**0.5, "t^1.5")
    for k in (1, 2, 4):
        assert abs(furuya_identity_check(f, g, k, 31.4)) <= 1e-8


def test_summation_identity_rejects_bad_input():
    with pytest.raises(ValueError):
        furuya_identity_check(zero_arithmetic(), zero_smooth(), 0, 5.0)
    with pytest.raises(ValueError):
        furuya_identity_check(zero_arithmetic(), zero_smooth(), 1, 0.5)


def test_mean_square_rhs_at_integer_uses_full_jump(ctx, p12):
    tab = DeltaTable(ctx, p12, 200)
    t = truncation(ctx, p12, 1000)
    x = 150.0
    d = delta_eval(ctx, p12, x).delta
    rhs = theorem1_rhs(ctx, p12, x, t, tab)
    from divisor_moments.series import g_series
    from divisor_moments.error_terms import main_term_derivative

    zb = ctx.zeta(2.0)
    rest = [
        tab.integral(x, 2),
        0.25 * main_term(ctx, p12, x),
        main_term_derivative(ctx, p12, x) * g_series(ctx, p12, x, t),
        zb * (zb * x + 2 * ctx.zeta(0.5) * math.sqrt(x)) / 6,
    ]
    assert rhs == pytest.approx(d * d + math.fsum(rest), rel=1e-14)


def test_mean_square_rhs_rejects_diagonal_and_small_x(ctx, p11, p12):
    with pytest.raises(InvalidPairError):
        theorem1_rhs(ctx, p11, 10.0)
    with pytest.raises(ValueError):
        theorem1_rhs(ctx, p12, 1.5)


def test_boundary_term_branches(ctx, p12, p23):
    z2 = ctx.zeta(2.0)
    assert corollary1_branch(ctx, p12, 1.0) == pytest.approx(z2 * (3 + 2 * z2) / 12, rel=1e-15)
    x = 1000.0
    want = 0.25 * ctx.zeta(1.5) * x**0.5 + 0.25 * ctx.zeta(2 / 3) * x ** (1 / 3)
    assert corollary1_branch(ctx, p23, x) == pytest.approx(want, rel=1e-15)
    assert corollary1_rhs(ctx, p23, 100.0) == pytest.approx(
        continuous_mean_square(ctx, p23, 100.0) + corollary1_branch(ctx, p23, 100.0), rel=1e-15
    )
    # 1/b against 1/a - 1/(2(a+b)) for (2, 3)
    assert 1 / 3 < 1 / 2 - 1 / 10


def test_diagonal_coefficients(ctx):
    g = ctx.gamma
    c2, c1, c0 = theorem2_coefficients(ctx)
    assert (c2, c1, c0) == (1 / 6, (8 * g - 1) / 12, (8 * g * g - 2 * g + 1) / 12)
    with pytest.raises(ValueError):
        theorem2_rhs(ctx, 1.0)


def test_first_moment(ctx, p12, p11):
    tab = DeltaTable(ctx, p12, 10_000)
    for x in (100.0, 1234.5, 10_000.0):
        assert abs(first_moment_identity(ctx, p12, x, tab)) < 2.0
    tab11 = DeltaTable(ctx, p11, 10_000)
    assert abs(first_moment_identity(ctx, p11, 5000.5, tab11)) < math.log(5000.5)
    assert mean_value_constant(ctx, p12) == pytest.approx(0.25 + ctx.zeta(2.0) / 2, rel=1e-15)
    assert mean_value_constant(ctx, DivisorPair(2, 3)) == 0.25
