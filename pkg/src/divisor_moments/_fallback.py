"""Numpy implementations of the kernel core.

Used when the compiled extension is not built, and as the reference the
compiled kernels are tested against.
"""
from __future__ import annotations

import math

import numpy as np


def _pow_le(base: np.ndarray, k: int, y: np.ndarray) -> np.ndarray:
    """Elementwise base**k <= y, computed in Python integers where float is unsafe."""
    approx = base.astype(np.float64) ** k
    out = approx <= y.astype(np.float64)
    # floats are exact below 2**53; re-check the borderline cases exactly
    risky = np.abs(approx - y.astype(np.float64)) <= 4.0 + approx * 4e-16
    risky &= approx > 2.0**52
    if risky.any():
        for i in np.flatnonzero(risky):
            out[i] = int(base[i]) ** k <= int(y[i])
    return out


def iroot_array(y, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError("root order must be >= 1")
    arr = np.asarray(y, dtype=np.int64)
    flat = arr.ravel()
    if k == 1:
        return np.maximum(arr, 0).copy()
    pos = np.maximum(flat, 0)
    r = np.floor(pos.astype(np.float64) ** (1.0 / k)).astype(np.int64)
    while True:
        over = (r > 0) & ~_pow_le(r, k, pos)
        if not over.any():
            break
        r[over] -= 1
    while True:
        under = _pow_le(r + 1, k, pos)
        if not under.any():
            break
        r[under] += 1
    r[flat <= 0] = 0
    return r.reshape(arr.shape)


def hyperbola_counts(a: int, b: int, xs) -> np.ndarray:
    arr = np.asarray(xs, dtype=np.int64)
    flat = arr.ravel()
    order = np.argsort(flat, kind="stable")
    srt = np.maximum(flat[order], 0)
    Y = iroot_array(srt, a + b)
    total = np.zeros(srt.shape, dtype=np.int64)
    ymax = int(Y.max()) if Y.size else 0
    for m in range(1, ymax + 1):
        start = int(np.searchsorted(srt, m ** (a + b), side="left"))
        sub = srt[start:]
        part = iroot_array(sub // m**a, b)
        if a == b:
            part = 2 * part
        else:
            part = part + iroot_array(sub // m**b, a)
        total[start:] += part
    total -= Y * Y
    out = np.empty_like(total)
    out[order] = total
    return out.reshape(arr.shape)


def _scatter(a: int, b: int, N: int, out: np.ndarray, weight) -> None:
    """Add weight(h, r) at every h**a * r**b <= N, looping over the shorter side."""
    if N < 1:
        return
    R0 = int(iroot_array(np.array([N]), a + b)[0])
    # points with r <= R0: loop over r
    for r in range(1, R0 + 1):
        rb = r**b
        hmax = int(iroot_array(np.array([N // rb]), a)[0])
        h = np.arange(1, hmax + 1, dtype=np.int64)
        if a == 1:
            out[rb : hmax * rb + 1 : rb] += weight(h, r)
        else:
            out[h**a * rb] += weight(h, r)
    # points with r > R0 have h < R0 + 1: loop over h
    for hh in range(1, R0 + 1):
        ha = hh**a
        rmax = int(iroot_array(np.array([N // ha]), b)[0])
        if rmax <= R0:
            continue
        r = np.arange(R0 + 1, rmax + 1, dtype=np.int64)
        if b == 1:
            out[(R0 + 1) * ha : rmax * ha + 1 : ha] += weight(hh, r)
        else:
            out[ha * r**b] += weight(hh, r)


def sieve_counts(a: int, b: int, N: int) -> np.ndarray:
    c = np.zeros(N + 1, dtype=np.int32)
    _scatter(a, b, N, c, lambda h, r: 1)
    return c


def sieve_weights(a: int, b: int, N: int, wa: float, wb: float) -> np.ndarray:
    w = np.zeros(N + 1, dtype=np.float64)

    def weight(h, r):
        hw = np.power(np.asarray(h, dtype=np.float64), wa) if wa != 0.0 else 1.0
        rw = np.power(np.asarray(r, dtype=np.float64), wb) if wb != 0.0 else 1.0
        return hw * rw

    _scatter(a, b, N, w, weight)
    return w


def neumaier_sum(values) -> float:
    """Compensated sum in array order (same recurrence as the compiled kernel)."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        return 0.0
    return float(compensated_cumsum(v)[-1])


def compensated_cumsum(values) -> np.ndarray:
    """Neumaier running sums, vectorized.

    ``np.add.accumulate`` adds strictly left to right, so the rounding error
    of each step is recovered exactly by TwoSum against the previous partial
    sum; accumulating those errors reproduces the compiled loop bit for bit.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        return v.copy()
    s = np.add.accumulate(v)
    prev = np.empty_like(s)
    prev[0] = 0.0
    prev[1:] = s[:-1]
    bv = s - prev
    err = (prev - (s - bv)) + (v - bv)
    return s + np.add.accumulate(err)


def cos_series(weights, nodes, omega: float, theta: float) -> float:
    w = np.asarray(weights, dtype=np.float64).ravel()
    u = np.asarray(nodes, dtype=np.float64).ravel()
    if w.shape != u.shape:
        raise ValueError("weights and nodes differ in length")
    return math.fsum(w * np.cos(omega * u + theta))
