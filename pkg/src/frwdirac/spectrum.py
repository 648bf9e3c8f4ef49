"""Closed-form per-mode spectral quantities on the unit three-sphere.

Frequencies omega_n = n + 3/2, eigenspace degeneracies g_n = (n+1)(n+2),
the Hamiltonian-diagonalization coefficients (xi_n, f1, f2), the large-n
pairing coefficient Gamma_n with its phase, and the constant coupling
matrices that decouple the degeneracy labels.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModeIndex:
    n: int

    def __post_init__(self):
        if self.n < 0 or self.n != int(self.n):
            raise ValueError(f"mode index must be a non-negative integer, got {self.n}")


def _n_of(n):
    if isinstance(n, ModeIndex):
        return n.n
    if isinstance(n, np.ndarray):
        return n.astype(np.int64)
    return int(n)


def omega(n):
    """Mode frequency omega_n = n + 3/2.  Accepts scalars or integer arrays."""
    return _n_of(n) + 1.5


def degeneracy(n):
    """Eigenspace dimension g_n = (n+1)(n+2); equals omega_n^2 - 1/4."""
    k = _n_of(n)
    return (k + 1) * (k + 2)


@dataclass(frozen=True)
class SpectralCoefficients:
    """Per-mode coefficients at a fixed (mass, alpha, alpha') point.

    xi >= 1 with equality iff m e^alpha = 0; f1^2 + f2^2 = 1 by construction;
    gamma is m e^alpha / (2 omega + i alpha'), stored as modulus and principal phase.
    """

    omega: float
    degeneracy: int
    xi: float
    f1: float
    f2: float
    gamma_modulus: float
    gamma_phase: float


def spectral_coefficients(n, m: float, alpha: float, alpha_prime: float = 0.0) -> SpectralCoefficients:
    """All closed-form spectral coefficients for mode n at the given background point."""
    if m < 0:
        raise ValueError(f"mass must be >= 0, got {m}")
    om = omega(n)
    ratio = m * math.exp(alpha) / om
    xi = math.sqrt(1.0 + ratio * ratio)
    f1 = math.sqrt(0.5 - 0.5 / xi)
    f2 = math.sqrt(1.0 - f1 * f1)
    gamma = m * math.exp(alpha) / (2.0 * om + 1j * alpha_prime)
    return SpectralCoefficients(
        omega=om,
        degeneracy=degeneracy(n),
        xi=xi,
        f1=f1,
        f2=f2,
        gamma_modulus=abs(gamma),
        gamma_phase=cmath.phase(gamma),
    )


# 2x2 blocks tiling the constant coupling matrices; g_n = (n+1)(n+2) is a
# product of consecutive integers, hence always even, so the tiling is exact.
_ALPHA_BLOCK = np.array([[1, 1], [1, -1]], dtype=int)
_BETA_BLOCK = np.array([[1, -1], [-1, -1]], dtype=int)


def coupling_matrices(n):
    """The pair of g_n x g_n block-diagonal integer matrices decoupling the p labels.

    Both are symmetric and square to 2 * identity.  They enter no dynamical
    computation; consecutive degeneracy labels are paired (p = 1,2), (3,4), ...
    """
    g = degeneracy(n)
    assert g % 2 == 0
    nblocks = g // 2
    a = np.zeros((g, g), dtype=int)
    b = np.zeros((g, g), dtype=int)
    for k in range(nblocks):
        sl = slice(2 * k, 2 * k + 2)
        a[sl, sl] = _ALPHA_BLOCK
        b[sl, sl] = _BETA_BLOCK
    return a, b
