"""The sawtooth psi(u) = u - floor(u) - 1/2 and its first two integrals.

    psi1(u) = (psi(u)**2 - 1/4) / 2
    psi2(u) = -u/12 + psi(u)**3/6 - psi(u)/24 + 1/12

psi1 is periodic; psi2 is not because psi1 has mean -1/12.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PsiState:
    """psi and its first two integrals evaluated at one point."""

    u: float
    psi: float
    psi1: float
    psi2: float


def psi_eval(u: float, floor_u: int | None = None) -> PsiState:
    """Evaluate psi, psi1, psi2 at u.

    ``floor_u`` may be supplied when the integer part is known exactly (for
    instance from an integer root), which keeps psi right-continuous at
    points where the float value of u lands a hair below an integer.
    """
    u = float(u)
    fl = math.floor(u) if floor_u is None else int(floor_u)
    p = (u - fl) - 0.5
    p1 = 0.5 * (p * p - 0.25)
    p2 = -u / 12.0 + p**3 / 6.0 - p / 24.0 + 1.0 / 12.0
    return PsiState(u, p, p1, p2)


def psi(u):
    """Vectorized psi."""
    u = np.asarray(u, dtype=np.float64)
    return u - np.floor(u) - 0.5


def psi1(u):
    p = psi(u)
    return 0.5 * (p * p - 0.25)


def psi2(u):
    u = np.asarray(u, dtype=np.float64)
    p = psi(u)
    return -u / 12.0 + p**3 / 6.0 - p / 24.0 + 1.0 / 12.0


def psi_from_floor(u, floor_u):
    """psi(u) given an exact integer part, vectorized."""
    return np.asarray(u, dtype=np.float64) - np.asarray(floor_u, dtype=np.float64) - 0.5
