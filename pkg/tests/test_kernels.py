"""The compiled kernels and the numpy fallback must agree, and both must be right."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divisor_moments import _fallback, kernels
from divisor_moments.arith import iroot

try:
    from divisor_moments import _kernels
except ImportError:  # pragma: no cover - extension not built
    _kernels = None

BACKENDS = [pytest.param(_fallback, id="fallback")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="compiled"))

PAIRS = [(1, 1), (1, 2), (2, 3), (1, 3), (3, 4)]


def brute_count(a, b, X):
    return sum(1 for h in range(1, X + 1) for r in range(1, X + 1) if h**a * r**b <= X)


def test_backend_selection():
    found = kernels.backends()
    assert kernels.BACKEND in found
    assert found["python"] is _fallback
    assert kernels.sieve_counts is found[kernels.BACKEND].sieve_counts


@pytest.mark.parametrize("m", BACKENDS)
@pytest.mark.parametrize("a,b", PAIRS)
def test_hyperbola_counts_small(m, a, b):
    xs = np.arange(0, 60, dtype=np.int64)
    got = m.hyperbola_counts(a, b, xs)
    assert list(got) == [brute_count(a, b, int(X)) for X in xs]


@pytest.mark.parametrize("m", BACKENDS)
@pytest.mark.parametrize("a,b", PAIRS)
def test_sieve_prefix_is_hyperbola(m, a, b):
    N = 20000
    c = np.cumsum(m.sieve_counts(a, b, N), dtype=np.int64)
    assert np.array_equal(c, m.hyperbola_counts(a, b, np.arange(N + 1, dtype=np.int64)))


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
@given(
    st.lists(st.integers(min_value=0, max_value=2**62), min_size=1, max_size=50),
    st.integers(min_value=1, max_value=6),
)
@settings(max_examples=150, deadline=None)
def test_iroot_array_parity(ys, k):
    arr = np.array(ys, dtype=np.int64)
    want = [iroot(y, k) for y in ys]
    assert list(_kernels.iroot_array(arr, k)) == want
    assert list(_fallback.iroot_array(arr, k)) == want


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
@given(st.integers(min_value=1, max_value=4000), st.sampled_from(PAIRS))
@settings(max_examples=40, deadline=None)
def test_sieve_parity(N, pair):
    a, b = pair
    assert np.array_equal(_kernels.sieve_counts(a, b, N), _fallback.sieve_counts(a, b, N))
    wa, wb = float(a - 1), float(b - 1)
    assert np.array_equal(_kernels.sieve_weights(a, b, N, wa, wb), _fallback.sieve_weights(a, b, N, wa, wb))


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
def test_summation_parity_is_bitwise():
    rng = np.random.default_rng(3)
    v = rng.standard_normal(200_000) * np.exp(rng.uniform(-25, 25, 200_000))
    assert np.array_equal(_kernels.compensated_cumsum(v), _fallback.compensated_cumsum(v))
    assert _kernels.neumaier_sum(v) == _fallback.neumaier_sum(v)


@pytest.mark.parametrize("m", BACKENDS)
def test_compensated_sums_are_accurate(m):
    rng = np.random.default_rng(11)
    v = rng.standard_normal(50_000) * 1e8
    v = np.concatenate([v, -v[::-1], [1e-3]])
    assert m.neumaier_sum(v) == pytest.approx(math.fsum(v), abs=1e-12)
    pref = m.compensated_cumsum(v)
    for i in (0, 10, 49_999, v.size - 1):
        assert pref[i] == pytest.approx(math.fsum(v[: i + 1]), rel=1e-15, abs=1e-9)


@pytest.mark.parametrize("m", BACKENDS)
def test_cos_series(m):
    w = np.array([1.0, 0.5, 0.25])
    u = np.array([1.0, 2.0, 3.0])
    want = math.fsum(wi * math.cos(0.7 * ui - 0.3) for wi, ui in zip(w, u))
    assert m.cos_series(w, u, 0.7, -0.3) == pytest.approx(want, rel=1e-15)
    with pytest.raises(ValueError):
        m.cos_series(w, u[:2], 0.7, 0.0)
