"""Breakpoint-aware adaptive Gauss-Legendre quadrature.

This is the independent oracle behind every identity check: it knows
nothing about the closed forms it is compared with.  Integrands must be
vectorized callables and smooth between consecutive breakpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)
# nodes and weights mapped to [0, 1]
UNIT_NODES = 0.5 * (_GL_NODES + 1.0)
UNIT_WEIGHTS = 0.5 * _GL_WEIGHTS
_MAX_INTERVALS = 1 << 20


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and breakpoints for :func:`integrate`.

    ``abs_tol`` is a per-unit-length budget: an interval of length L is
    accepted once its error estimate is below ``abs_tol * L`` (or at the
    rounding level of the integral of |f| over it).  ``noise`` is the caller's
    statement of how accurately f itself can be evaluated, as an absolute
    error per unit length; it matters when f is a small difference of large
    numbers, which the rounding floor cannot detect.  Refinement stops at
    ``max_depth`` or about a million intervals, and the result is then
    flagged unconverged.
    """

    abs_tol: float = 1e-11
    max_depth: int = 40
    breakpoints: tuple[float, ...] = field(default_factory=tuple)
    noise: float = 0.0

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        bp = tuple(float(b) for b in self.breakpoints)
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)

    def with_breakpoints(self, points: Sequence[float]) -> "QuadratureSpec":
        pts = sorted(set(float(p) for p in points))
        return QuadratureSpec(self.abs_tol, self.max_depth, tuple(pts), self.noise)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    intervals: int
    converged: bool


def _gl(f: Callable, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rule values of int f and int |f| on each interval."""
    width = hi - lo
    t = lo[:, None] + width[:, None] * UNIT_NODES[None, :]
    vals = np.asarray(f(t), dtype=np.float64).reshape(t.shape)
    return width * (vals @ UNIT_WEIGHTS), width * (np.abs(vals) @ UNIT_WEIGHTS)


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None) -> QuadResult:
    """Integrate ``f`` over [a, b], splitting first at ``spec.breakpoints``."""
    spec = spec or QuadratureSpec()
    a, b = float(a), float(b)
    if b == a:
        return QuadResult(0.0, 0.0, 0, True)
    if b < a:
        r = integrate(f, b, a, spec)
        return QuadResult(-r.value, r.error_estimate, r.intervals, r.converged)
    inner = [p for p in spec.breakpoints if a < p < b]
    edges = np.array([a, *inner, b], dtype=np.float64)
    lo, hi = edges[:-1], edges[1:]
    accepted: list[np.ndarray] = []
    errors: list[float] = []
    count = 0
    converged = True
    for depth in range(spec.max_depth + 1):
        mid = 0.5 * (lo + hi)
        whole, _ = _gl(f, lo, hi)
        left, left_abs = _gl(f, lo, mid)
        right, right_abs = _gl(f, mid, hi)
        halves = left + right
        err = np.abs(whole - halves)
        # an estimate at the rounding level of the integrand values cannot be
        # improved by bisecting further (this matters where f changes sign)
        floor = np.maximum(64.0 * np.finfo(float).eps * (left_abs + right_abs), spec.noise * (hi - lo))
        ok = err <= np.maximum(spec.abs_tol * (hi - lo), floor)
        if depth == spec.max_depth or 2 * int((~ok).sum()) + count > _MAX_INTERVALS:
            converged = bool(ok.all())
            ok[:] = True
        accepted.append(halves[ok])
        errors.append(math.fsum(err[ok]))
        count += int(ok.sum())
        if ok.all():
            break
        keep = ~ok
        lo, hi, mid = lo[keep], hi[keep], mid[keep]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
    value = math.fsum(np.concatenate(accepted))
    return QuadResult(value, math.fsum(errors), count, converged)


def integer_breakpoints(a: float, b: float) -> list[float]:
    """All integers strictly inside (a, b)."""
    return [float(k) for k in range(math.floor(a) + 1, math.ceil(b))]


def unit_interval_gl(g: Callable, n: np.ndarray) -> np.ndarray:
    """Fixed 15-point rule on each [n, n + 1]; ``g(n, u)`` sees the offset u in [0, 1]."""
    n = np.asarray(n, dtype=np.float64)
    vals = np.asarray(g(n[:, None], UNIT_NODES[None, :]), dtype=np.float64)
    return vals @ UNIT_WEIGHTS
