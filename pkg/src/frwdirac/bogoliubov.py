"""Dynamical Bogoliubov matrices of the annihilation/creation pair.

B_n(eta, eta0) = C_n(eta) Phi_n(eta, eta0) C_n(eta0), with C the reference
map (its own inverse) and Phi the fundamental mode propagator.  B is unitary,
equals the identity at coincident times, and obeys the evolution group law.
Entry naming is positional: row 1 = (alpha_f, beta_f), row 2 = (beta_g, alpha_g).

Assembling B from the propagator avoids differentiating f1, f2 even though
C_n(eta) is time dependent through e^{alpha(eta)}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .background import BackgroundModel
from .complex_structure import MixingMatrix, reference_map
from .mode_dynamics import propagate, propagate_batch
from .spectrum import omega as omega_of
from .spectrum import spectral_coefficients


@dataclass(frozen=True)
class BogoliubovMatrix:
    """One B_n(eta, eta0) with named entries and quality metrics."""

    matrix: np.ndarray
    mode: int
    times: tuple
    tolerance: float

    @property
    def alpha_f(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def beta_f(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def beta_g(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def alpha_g(self) -> complex:
        return complex(self.matrix[1, 1])

    @property
    def unitarity_defect(self) -> float:
        d = self.matrix.conj().T @ self.matrix - np.eye(2)
        return float(np.max(np.abs(d)))


def bogoliubov_matrix(background: BackgroundModel, n, eta0: float, eta: float,
                      tolerance: float = 1e-11, method: str = "magnus") -> BogoliubovMatrix:
    """Assemble B_n(eta, eta0) from the mode propagator and the reference maps."""
    prop = propagate(background, n, eta0, eta, tolerance, method=method)
    c_from = reference_map(n, background, eta0).matrix
    c_to = reference_map(n, background, eta).matrix
    nn = int(n.n) if hasattr(n, "n") else int(n)
    return BogoliubovMatrix(matrix=c_to @ prop.matrix @ c_from, mode=nn,
                            times=(eta0, eta), tolerance=tolerance)


def bogoliubov_table(background: BackgroundModel, ns, eta0: float, eta: float,
                     tolerance: float = 1e-11) -> np.ndarray:
    """B_n for every mode in ns on a shared integration grid, shape (len(ns), 2, 2)."""
    ns = np.asarray(np.atleast_1d(ns), dtype=int)
    phis = propagate_batch(background, ns, eta0, eta, tolerance)
    a_from = background.alpha(eta0)
    a_to = background.alpha(eta)
    c_from = np.stack([reference_coeffs(n, background.mass, a_from) for n in ns])
    c_to = np.stack([reference_coeffs(n, background.mass, a_to) for n in ns])
    return np.einsum("nij,njk,nkl->nil", c_to, phis, c_from)


def reference_coeffs(n, m: float, alpha: float) -> np.ndarray:
    """The 2x2 real reference map for one mode at one background point."""
    coeff = spectral_coefficients(n, m, alpha)
    return np.array([[coeff.f1, coeff.f2], [coeff.f2, -coeff.f1]])


def alpha_difference(b: BogoliubovMatrix) -> complex:
    """alpha_g - alpha_f, the diagonal mismatch driving the equivalence analysis."""
    return b.alpha_g - b.alpha_f


def leading_asymptote_residual(background: BackgroundModel, n, eta0: float, eta: float,
                               tolerance: float = 1e-11) -> float:
    """|(alpha_g - alpha_f) - 2i sin(omega_n (eta - eta0))|.

    Over a fixed smooth background and fixed times this residual decays like
    1/omega_n at large n.
    """
    b = bogoliubov_matrix(background, n, eta0, eta, tolerance)
    om = omega_of(n)
    return abs(alpha_difference(b) - 2j * np.sin(om * (eta - eta0)))


def residual_table(background: BackgroundModel, ns, eta0: float, eta: float,
                   tolerance: float = 1e-11) -> np.ndarray:
    """Leading-asymptote residuals for a whole mode range (batch route)."""
    ns = np.asarray(np.atleast_1d(ns), dtype=int)
    table = bogoliubov_table(background, ns, eta0, eta, tolerance)
    oms = ns + 1.5
    diff = table[:, 1, 1] - table[:, 0, 0]
    return np.abs(diff - 2j * np.sin(oms * (eta - eta0)))


def transformed_dynamics(k: MixingMatrix, b: BogoliubovMatrix) -> np.ndarray:
    """K B K-dagger, the dynamics seen by the alternative structure K."""
    if k.mode != b.mode:
        raise ValueError(f"mode mismatch: K is for n = {k.mode}, B for n = {b.mode}")
    return k.matrix @ b.matrix @ k.matrix.conj().T


def offdiagonal_sequences(k: np.ndarray, b: np.ndarray):
    """The two combinations whose square-summability unitarity demands.

    For stacked K and B arrays of shape (..., 2, 2) returns
    (kappa_f^2 beta_f - lambda_f^2 beta_g + kappa_f lambda_f (alpha_g - alpha_f),
     kappa_g^2 beta_g - lambda_g^2 beta_f + kappa_g lambda_g (alpha_f - alpha_g)).

    These equal the (0,1), (1,0) entries of K B K-dagger times kappa_f/conj(kappa_g)
    and kappa_g/conj(kappa_f) respectively, whenever the kappas are nonzero.
    """
    kf, lf = k[..., 0, 0], k[..., 0, 1]
    lg, kg = k[..., 1, 0], k[..., 1, 1]
    af, bf = b[..., 0, 0], b[..., 0, 1]
    bg, ag = b[..., 1, 0], b[..., 1, 1]
    seq_f = kf * kf * bf - lf * lf * bg + kf * lf * (ag - af)
    seq_g = kg * kg * bg - lg * lg * bf + kg * lg * (af - ag)
    return seq_f, seq_g
