"""FRW background: log scale factor alpha(eta), its conformal-time derivative, and the mass.

The three-sphere radius is fixed to 1, so the fermion mass is dimensionless.
Three kinds of background are supported:

* ``constant``      -- alpha(eta) = c
* ``power_law``     -- alpha(eta) = offset + k * ln(eta)  (scale factor is a power of eta)
* ``tabulated``     -- natural cubic spline through strictly increasing samples

Models are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

_DOMAIN_SLACK = 1e-12

KINDS = ("constant", "power_law", "tabulated")


@dataclass(frozen=True)
class BackgroundModel:
    """Validated FRW background on a closed conformal-time interval.

    Parameters
    ----------
    kind : str
        One of ``constant``, ``power_law``, ``tabulated``.
    domain : tuple of float
        Closed interval [eta_min, eta_max].
    mass : float
        Fermion mass, >= 0 (inverse-length units, S^3 radius = 1).
    alpha0 : float
        Constant value (``constant``) or additive offset (``power_law``).
    exponent : float
        ln-coefficient k for the ``power_law`` kind.
    samples : ndarray, optional
        (eta_i, alpha_i) table for the ``tabulated`` kind, shape (N, 2).
    """

    kind: str
    domain: tuple
    mass: float
    alpha0: float = 0.0
    exponent: float = 0.0
    samples: Optional[np.ndarray] = None
    _spline: CubicSpline = field(init=False, repr=False, compare=False, default=None)
    _spline_deriv: CubicSpline = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        lo, hi = self.domain
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"domain must be a finite interval with eta_min < eta_max, got {self.domain}")
        object.__setattr__(self, "domain", (float(lo), float(hi)))
        if self.kind not in KINDS:
            raise ValueError(f"unknown background kind {self.kind!r}; expected one of {KINDS}")
        if not (self.mass >= 0.0):
            raise ValueError(f"mass must be >= 0, got {self.mass}")
        if self.kind == "power_law" and lo <= 0.0:
            raise ValueError("power_law background requires a strictly positive domain (ln eta)")
        if self.kind == "tabulated":
            tab = np.asarray(self.samples, dtype=float)
            if tab.ndim != 2 or tab.shape[1] != 2 or tab.shape[0] < 4:
                raise ValueError("tabulated background needs an (N, 2) sample table with N >= 4")
            if not np.all(np.diff(tab[:, 0]) > 0):
                raise ValueError("tabulated samples must be strictly increasing in eta")
            if not np.all(np.isfinite(tab)):
                raise ValueError("tabulated samples must be finite")
            if tab[0, 0] > lo + _DOMAIN_SLACK or tab[-1, 0] < hi - _DOMAIN_SLACK:
                raise ValueError("tabulated samples must cover the declared domain")
            object.__setattr__(self, "samples", tab)
            spline = CubicSpline(tab[:, 0], tab[:, 1], bc_type="natural")
            object.__setattr__(self, "_spline", spline)
            object.__setattr__(self, "_spline_deriv", spline.derivative())

    def _check_domain(self, eta):
        lo, hi = self.domain
        eta = np.asarray(eta, dtype=float)
        if np.any(eta < lo - _DOMAIN_SLACK) or np.any(eta > hi + _DOMAIN_SLACK):
            bad = eta.flat[int(np.argmax((eta < lo - _DOMAIN_SLACK) | (eta > hi + _DOMAIN_SLACK)))]
            raise DomainError(float(bad), lo, hi)
        return eta

    def alpha(self, eta):
        """alpha(eta); accepts scalars or arrays, raises DomainError outside the interval."""
        eta = self._check_domain(eta)
        if self.kind == "constant":
            out = np.full_like(eta, self.alpha0)
        elif self.kind == "power_law":
            out = self.alpha0 + self.exponent * np.log(eta)
        else:
            out = self._spline(eta)
        return out if out.ndim else float(out)

    def alpha_prime(self, eta):
        """d alpha / d eta, analytic for analytic kinds, spline derivative otherwise."""
        eta = self._check_domain(eta)
        if self.kind == "constant":
            out = np.zeros_like(eta)
        elif self.kind == "power_law":
            out = self.exponent / eta
        else:
            out = self._spline_deriv(eta)
        return out if out.ndim else float(out)

    def mu(self, eta):
        """Effective mass coupling m * e^alpha(eta) entering the mode equations."""
        return self.mass * np.exp(self.alpha(eta))


def constant_background(alpha=0.0, mass=0.0, domain=(0.0, 2.0)):
    return BackgroundModel(kind="constant", domain=domain, mass=mass, alpha0=alpha)


def power_law_background(exponent, offset=0.0, mass=0.0, domain=(1.0, 2.0)):
    return BackgroundModel(kind="power_law", domain=domain, mass=mass,
                           alpha0=offset, exponent=exponent)


def tabulated_background(etas, alphas, mass=0.0, domain=None):
    etas = np.asarray(etas, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    if domain is None:
        domain = (float(etas[0]), float(etas[-1]))
    return BackgroundModel(kind="tabulated", domain=domain, mass=mass,
                           samples=np.column_stack([etas, alphas]))


def log_scale_factor(model: BackgroundModel, eta: float) -> float:
    """alpha(eta) for a single conformal time."""
    return model.alpha(eta)


def log_scale_factor_derivative(model: BackgroundModel, eta: float) -> float:
    """alpha'(eta) for a single conformal time."""
    return model.alpha_prime(eta)
