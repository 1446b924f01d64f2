"""Exact error terms and mean-square identities for the divisor problem d(a, b; n)."""
from .arith import DivisorPair, d_ab, d_star, g_ab, sieve_d_ab
from .kernels import BACKEND

__all__ = ["BACKEND", "DivisorPair", "d_ab", "d_star", "g_ab", "sieve_d_ab"]
__version__ = "0.1.0"
