# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Every function here has a numpy twin in ``_fallback`` with the same
signature and the same results (bit-for-bit on the integer kernels, to the
last few ulps on the compensated float kernels).
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, cos, fabs

cnp.import_array()

ctypedef long long i64

cdef i64 TWO53 = 9007199254740992


cdef inline bint _pow_le(i64 base, int k, i64 y) nogil:
    """Return base**k <= y without overflowing (base >= 0, y >= 0)."""
    cdef i64 p = 1
    cdef int i
    if base <= 1:
        return base <= y or base == 0
    for i in range(k):
        if p > y // base:
            return False
        p *= base
    return p <= y


cdef inline i64 _iroot(i64 y, int k) nogil:
    cdef i64 r
    if y <= 0:
        return 0
    if k == 1:
        return y
    if k == 2:
        r = <i64>sqrt(<double>y)
    else:
        r = <i64>pow(<double>y, 1.0 / k)
    while r > 0 and not _pow_le(r, k, y):
        r -= 1
    while _pow_le(r + 1, k, y):
        r += 1
    return r


cdef inline i64 _ipow(i64 base, int k) nogil:
    cdef i64 p = 1
    cdef int i
    for i in range(k):
        p *= base
    return p


cdef inline i64 _fdiv(i64 x, i64 m) nogil:
    # floor(x / m) via a double estimate plus correction; exact division past 2**53
    cdef i64 q
    if x > TWO53:
        return x // m
    q = <i64>(<double>x / <double>m)
    while q * m > x:
        q -= 1
    while (q + 1) * m <= x:
        q += 1
    return q


def iroot_array(y, int k):
    """Elementwise integer k-th root floor(y**(1/k)) of a non-negative int64 array."""
    cdef cnp.ndarray[i64, ndim=1] src = np.ascontiguousarray(y, dtype=np.int64).ravel()
    cdef Py_ssize_t n = src.shape[0], i
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(n, dtype=np.int64)
    if k < 1:
        raise ValueError("root order must be >= 1")
    with nogil:
        for i in range(n):
            out[i] = _iroot(src[i], k)
    return out.reshape(np.shape(y))


def hyperbola_counts(int a, int b, xs):
    """D(a, b; x) for each non-negative integer x by the hyperbola method."""
    cdef cnp.ndarray[i64, ndim=1] src = np.ascontiguousarray(xs, dtype=np.int64).ravel()
    cdef Py_ssize_t n = src.shape[0], i
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef i64 x, Y, m, total, ma, mb
    cdef int s = a + b
    with nogil:
        for i in range(n):
            x = src[i]
            if x < 1:
                out[i] = 0
                continue
            Y = _iroot(x, s)
            total = 0
            for m in range(1, Y + 1):
                ma = _ipow(m, a)
                if a == b:
                    total += 2 * _iroot(_fdiv(x, ma), b)
                else:
                    mb = _ipow(m, b)
                    total += _iroot(_fdiv(x, ma), b) + _iroot(_fdiv(x, mb), a)
            out[i] = total - Y * Y
    return out.reshape(np.shape(xs))


def sieve_counts(int a, int b, i64 N):
    """Array c with c[n] = #{(h, r) : h**a * r**b = n} for 0 <= n <= N."""
    cdef cnp.ndarray[cnp.int32_t, ndim=1] c = np.zeros(N + 1, dtype=np.int32)
    cdef i64 r, rb, h, hmax
    with nogil:
        r = 1
        while _pow_le(r, b, N):
            rb = _ipow(r, b)
            hmax = _iroot(N // rb, a)
            for h in range(1, hmax + 1):
                c[_ipow(h, a) * rb] += 1
            r += 1
    return c


def sieve_weights(int a, int b, i64 N, double wa, double wb):
    """Array w with w[n] = sum of h**wa * r**wb over h**a * r**b = n."""
    cdef cnp.ndarray[double, ndim=1] w = np.zeros(N + 1, dtype=np.float64)
    cdef i64 r, rb, h, hmax
    cdef double rw
    with nogil:
        r = 1
        while _pow_le(r, b, N):
            rb = _ipow(r, b)
            hmax = _iroot(N // rb, a)
            rw = 1.0 if wb == 0.0 else pow(<double>r, wb)
            for h in range(1, hmax + 1):
                if wa == 0.0:
                    w[_ipow(h, a) * rb] += rw
                else:
                    w[_ipow(h, a) * rb] += rw * pow(<double>h, wa)
            r += 1
    return w


def neumaier_sum(values):
    """Compensated sum in array order."""
    cdef cnp.ndarray[double, ndim=1] v = np.ascontiguousarray(values, dtype=np.float64).ravel()
    cdef Py_ssize_t n = v.shape[0], i
    cdef double s = 0.0, c = 0.0, t, x
    with nogil:
        for i in range(n):
            x = v[i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c


def compensated_cumsum(values):
    """Running compensated prefix sums, out[i] = sum(values[:i + 1])."""
    cdef cnp.ndarray[double, ndim=1] v = np.ascontiguousarray(values, dtype=np.float64).ravel()
    cdef Py_ssize_t n = v.shape[0], i
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double s = 0.0, c = 0.0, t, x
    with nogil:
        for i in range(n):
            x = v[i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
            out[i] = s + c
    return out


def cos_series(weights, nodes, double omega, double theta):
    """Compensated sum of weights[n] * cos(omega * nodes[n] + theta)."""
    cdef cnp.ndarray[double, ndim=1] w = np.ascontiguousarray(weights, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] u = np.ascontiguousarray(nodes, dtype=np.float64).ravel()
    cdef Py_ssize_t n = w.shape[0], i
    cdef double s = 0.0, c = 0.0, t, x
    if u.shape[0] != n:
        raise ValueError("weights and nodes differ in length")
    with nogil:
        for i in range(n):
            x = w[i] * cos(omega * u[i] + theta)
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c
