"""Time the compiled kernels against the numpy fallback and check they agree.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from divisor_moments import _fallback

try:
    from divisor_moments import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best(fn, repeat: int) -> tuple[float, object]:
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    if isinstance(a, float):
        return abs(a - b) <= 1e-12 * max(1.0, abs(a))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind in "iu":
        return bool(np.array_equal(a, b))
    return bool(np.allclose(a, b, rtol=1e-12, atol=0.0))


def cases(n: int):
    rng = np.random.default_rng(7)
    xs = rng.integers(1, n, size=2000, dtype=np.int64)
    ys = rng.integers(1, 2**62, size=200_000, dtype=np.int64)
    vals = rng.standard_normal(n)
    w = np.abs(rng.standard_normal(n // 10))
    nodes = np.sqrt(np.arange(1, n // 10 + 1, dtype=np.float64))
    return [
        ("sieve_counts(1,2)", lambda m: m.sieve_counts(1, 2, n)),
        ("sieve_counts(1,1)", lambda m: m.sieve_counts(1, 1, n)),
        ("sieve_weights(2,3)", lambda m: m.sieve_weights(2, 3, n, 1.0, 2.0)),
        ("hyperbola_counts(1,2)", lambda m: m.hyperbola_counts(1, 2, xs)),
        ("iroot_array(k=3)", lambda m: m.iroot_array(ys, 3)),
        ("compensated_cumsum", lambda m: m.compensated_cumsum(vals)),
        ("neumaier_sum", lambda m: float(m.neumaier_sum(vals))),
        ("cos_series", lambda m: float(m.cos_series(w, nodes, 12.5, -2.356))),
    ]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; only the fallback can run")
    print(f"{'kernel':24s} {'compiled [s]':>13s} {'fallback [s]':>13s} {'speedup':>8s}  agree")
    ok = True
    for name, call in cases(args.n):
        tf, of = _best(lambda: call(_fallback), args.repeat)
        if _kernels is None:
            print(f"{name:24s} {'-':>13s} {tf:13.4f} {'-':>8s}  -")
            continue
        tc, oc = _best(lambda: call(_kernels), args.repeat)
        agree = _same(oc, of)
        ok &= agree
        print(f"{name:24s} {tc:13.4f} {tf:13.4f} {tf / tc:8.1f}  {'yes' if agree else 'NO'}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
