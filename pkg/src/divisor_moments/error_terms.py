"""The lattice count D(a, b; x), its main term, Delta = D - M, and the remainder R.

For a < b the main term is ``M(x) = zeta(b/a) x**(1/a) + zeta(a/b) x**(1/b)``;
for (1, 1) it is ``x log x + (2 gamma - 1) x``.  R is defined by

    R(x) = Delta(x) + sum_{n**(a+b) <= x} [psi((x/n**b)**(1/a)) + psi((x/n**a)**(1/b))]

and has an exact expression through psi1 and two tail integrals of psi1.
Both are computed here and compared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .arith import DivisorPair, iroot
from .errors import IdentityViolation, UndefinedDerivativeError
from .integrals import psi1_tail
from .psi import psi, psi1
from .zeta import ZetaContext

TAIL_WINDOW = 10**4


@dataclass(frozen=True)
class DeltaEval:
    x: float
    count: int
    main: float
    delta: float
    pair: DivisorPair


@dataclass(frozen=True)
class RemainderEval:
    """R at x by the closed formula, with the definition-side value kept for audit."""

    x: float
    r_value: float
    r_prime: float | None
    tail_a: float
    tail_b: float
    r_definition: float
    tail_bound: float


def count_exact(pair: DivisorPair, x) -> int:
    """D(a, b; x) by the hyperbola method in exact integer arithmetic."""
    if x < 1:
        return 0
    X = math.floor(x)
    a, b = pair.a, pair.b
    Y = iroot(X, a + b)
    total = 0
    for m in range(1, Y + 1):
        total += iroot(X // m**a, b)
        total += iroot(X // m**b, a)
    return total - Y * Y


def count_exact_many(pair: DivisorPair, xs) -> np.ndarray:
    """Vectorized :func:`count_exact` for x below 2**62, via the kernel core."""
    X = np.floor(np.asarray(xs, dtype=np.float64)).astype(np.int64)
    X = np.maximum(X, 0)
    return kernels.hyperbola_counts(pair.a, pair.b, X)


def main_term(ctx: ZetaContext, pair: DivisorPair, x):
    """M(x), vectorized over x."""
    xv = np.asarray(x, dtype=np.float64)
    if pair.diagonal:
        out = xv * np.log(xv) + (2.0 * ctx.gamma - 1.0) * xv
    else:
        a, b = pair.a, pair.b
        out = ctx.zeta(b / a) * xv ** (1.0 / a) + ctx.zeta(a / b) * xv ** (1.0 / b)
    return float(out) if out.ndim == 0 else out


def main_term_derivative(ctx: ZetaContext, pair: DivisorPair, x):
    """M'(x); for (1, 1) this is log x + 2 gamma."""
    xv = np.asarray(x, dtype=np.float64)
    if pair.diagonal:
        out = np.log(xv) + 2.0 * ctx.gamma
    else:
        a, b = pair.a, pair.b
        out = ctx.zeta(b / a) / a * xv ** (1.0 / a - 1.0) + ctx.zeta(a / b) / b * xv ** (1.0 / b - 1.0)
    return float(out) if out.ndim == 0 else out


def delta_eval(ctx: ZetaContext, pair: DivisorPair, x: float) -> DeltaEval:
    x = float(x)
    if x < 1:
        raise ValueError("Delta is evaluated for x >= 1")
    count = count_exact(pair, x)
    main = main_term(ctx, pair, x)
    return DeltaEval(x, count, main, count - main, pair)


def psi_sum(pair: DivisorPair, x: float) -> float:
    """sum_{n**(a+b) <= x} [psi((x/n**b)**(1/a)) + psi((x/n**a)**(1/b))].

    Integer parts come from exact integer roots of floor(x) // n**k, so a
    root that lands a hair below an integer in floating point still gets
    the right floor.
    """
    x = float(x)
    X = math.floor(x)
    a, b = pair.a, pair.b
    Y = iroot(X, a + b)
    if Y == 0:
        return 0.0
    n = np.arange(1, Y + 1, dtype=np.int64)
    na, nb = n**a, n**b
    fa = kernels.iroot_array(X // nb, a)
    fb = kernels.iroot_array(X // na, b)
    va = (x / nb.astype(np.float64)) ** (1.0 / a)
    vb = (x / na.astype(np.float64)) ** (1.0 / b)
    terms = np.concatenate([va - fa - 0.5, vb - fb - 0.5])
    return kernels.neumaier_sum(terms)


def remainder_definition(ctx: ZetaContext, pair: DivisorPair, x: float) -> float:
    """R(x) straight from its definition: Delta(x) plus the psi sum."""
    d = delta_eval(ctx, pair, x)
    return math.fsum([float(d.count), -d.main, psi_sum(pair, x)])


def _root_is_integer(pair: DivisorPair, x: float) -> bool:
    if x != math.floor(x):
        return False
    X = int(x)
    return iroot(X, pair.s) ** pair.s == X


def _remainder_parts(pair: DivisorPair, x: float, window: int):
    a, b = pair.a, pair.b
    s = a + b
    y = x ** (1.0 / s)
    if _root_is_integer(pair, x):
        y = float(iroot(int(x), s))
    sig_a = 2.0 + b / a
    sig_b = 2.0 + a / b
    ta = psi1_tail(sig_a, y, window)
    tb = psi1_tail(sig_b, y, window)
    ca = b * s / a**2 * x ** (1.0 / a)
    cb = a * s / b**2 * x ** (1.0 / b)
    K = s * s / (a * b)
    return y, K, ca, cb, sig_a, sig_b, ta, tb


def remainder_formula(pair: DivisorPair, x: float, window: int = TAIL_WINDOW) -> tuple[float, float, float, float]:
    """R(x) by the psi1 closed formula; returns (R, tail_a, tail_b, bound)."""
    x = float(x)
    y, K, ca, cb, _, _, ta, tb = _remainder_parts(pair, x, window)
    r = math.fsum([-K * float(psi1(y)), ca * ta.value, cb * tb.value])
    return r, ta.value, tb.value, abs(ca) * ta.bound + abs(cb) * tb.bound


def remainder_exact(
    ctx: ZetaContext,
    pair: DivisorPair,
    x: float,
    tol: float = 1e-8,
    window: int = TAIL_WINDOW,
) -> RemainderEval:
    """R(x) by both routes; raises :class:`IdentityViolation` if they disagree.

    ``r_prime`` is the exact derivative of the closed formula, present only
    when x**(1/(a+b)) is not an integer.
    """
    x = float(x)
    if x < 1:
        raise ValueError("R is evaluated for x >= 1")
    y, K, ca, cb, sig_a, sig_b, ta, tb = _remainder_parts(pair, x, window)
    bound = abs(ca) * ta.bound + abs(cb) * tb.bound
    if bound > tol:
        raise IdentityViolation(
            f"analytic tail bound {bound:.3g} exceeds tolerance {tol:.3g}", x=x, discrepancy=bound, tol=tol
        )
    p1 = float(psi1(y))
    r = math.fsum([-K * p1, ca * ta.value, cb * tb.value])
    r_def = remainder_definition(ctx, pair, x)
    gap = abs(r - r_def)
    if not gap <= tol:
        raise IdentityViolation(
            f"R by definition and by formula differ by {gap:.3g} at x={x!r}", x=x, discrepancy=gap, tol=tol
        )
    r_prime = None
    if not _root_is_integer(pair, x):
        a, b = pair.a, pair.b
        dy = y / ((a + b) * x)
        r_prime = math.fsum(
            [
                -K * float(psi(y)) * dy,
                ca * (ta.value / (a * x) - p1 * y ** (-sig_a) * dy),
                cb * (tb.value / (b * x) - p1 * y ** (-sig_b) * dy),
            ]
        )
    return RemainderEval(x, r, r_prime, ta.value, tb.value, r_def, bound)


def remainder_asymptotic(pair: DivisorPair, x: float) -> float:
    """Leading terms -((a+b)**2/(ab)) psi1(y) - (a**2+b**2)/(12ab) of R."""
    a, b = pair.a, pair.b
    y = float(x) ** (1.0 / (a + b))
    return -((a + b) ** 2) / (a * b) * float(psi1(y)) - (a * a + b * b) / (12.0 * a * b)


def _check_differentiable(pair: DivisorPair, x: float) -> float:
    if _root_is_integer(pair, x):
        raise UndefinedDerivativeError(f"x**(1/(a+b)) is an integer at x={x!r}")
    return float(x) ** (1.0 / pair.s)


def remainder_derivative(ctx: ZetaContext, pair: DivisorPair, x: float) -> float:
    """Main terms of R'(x), as obtained by differentiating the closed formula.

        R'(x) ~ -((a+b)/(ab)) psi(y) y / x - (b/a**2 + a/b**2) (psi1(y) + 1/12) / x

    with y = x**(1/(a+b)); the neglected part is O(x**(-1-1/(a+b))).
    """
    x = float(x)
    y = _check_differentiable(pair, x)
    a, b = pair.a, pair.b
    c = b / a**2 + a / b**2
    return -(a + b) / (a * b) * float(psi(y)) * y / x - c * (float(psi1(y)) + 1.0 / 12.0) / x


def remainder_derivative_printed(pair: DivisorPair, x: float) -> float:
    """The same main terms with the coefficients (a**2+b**2)/(ab) and (a+b)/12.

    Kept only to show, in tests, that these coefficients do not match the
    derivative of the exact formula.
    """
    x = float(x)
    y = _check_differentiable(pair, x)
    a, b = pair.a, pair.b
    return (
        -(a + b) / (a * b) * float(psi(y)) * y / x
        - (a * a + b * b) / (a * b) * float(psi1(y)) / x
        - (a + b) / 12.0 / x
    )
