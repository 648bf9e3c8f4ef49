"""Reference annihilation/creation map and families of invariant alternative structures.

The reference map C_n(eta) = [[f1, f2], [f2, -f1]] sends (x, ybar) to the
annihilation/creation pair (a, b-dagger); it is orthogonal, symmetric and
squares to the identity.  Alternative invariant structures are parametrized
per mode by a unitary mixing matrix

    K_n = [[kappa_f, lambda_f], [lambda_g, kappa_g]],

generated from a closed-form rule in n so that summability sweeps can extend
the mode range freely.  All generated matrices satisfy the unitarity
relations |kappa_f|^2 + |lambda_f|^2 = 1, |kappa_g|^2 + |lambda_g|^2 = 1,
kappa_f conj(lambda_g) + lambda_f conj(kappa_g) = 0.

The particle-antiparticle convention ("the kappa sequences stay away from
zero") is operationalized as a declared positive floor plus a finite
exemption prefix n_cut, checked empirically up to a requested n_max.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .background import BackgroundModel
from .spectrum import spectral_coefficients

FAMILY_KINDS = (
    "identity",
    "diagonal_phase",
    "constant_angle",
    "power_decay",
    "swap",
    "random_phase",
    "explicit",
)


@dataclass(frozen=True)
class ReferenceMap:
    """C_n(eta) mapping (x, ybar) to (a, b-dagger)."""

    matrix: np.ndarray
    mode: int
    time: float


def reference_map(n, background: BackgroundModel, eta: float) -> ReferenceMap:
    """Reference structure C_n(eta) = [[f1, f2], [f2, -f1]] at the given time."""
    alpha = background.alpha(eta)
    coeff = spectral_coefficients(n, background.mass, alpha)
    c = np.array([[coeff.f1, coeff.f2], [coeff.f2, -coeff.f1]])
    nn = int(n.n) if hasattr(n, "n") else int(n)
    return ReferenceMap(matrix=c, mode=nn, time=eta)


@dataclass(frozen=True)
class MixingMatrix:
    """One unitary K_n with named entries (kappa_f, lambda_f; lambda_g, kappa_g)."""

    matrix: np.ndarray
    mode: int

    @property
    def kappa_f(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def lambda_f(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def lambda_g(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def kappa_g(self) -> complex:
        return complex(self.matrix[1, 1])

    @property
    def unitarity_defect(self) -> float:
        d = self.matrix.conj().T @ self.matrix - np.eye(2)
        return float(np.max(np.abs(d)))


@dataclass(frozen=True)
class StructureFamily:
    """Rule generating K_n for all n.

    Kinds and their parameters:

    * ``identity``        -- K = I.
    * ``diagonal_phase``  -- K = diag(e^{i phase1 (n+1)}, e^{i phase2 (n+1)}); lambda = 0.
    * ``constant_angle``  -- |lambda| = sin(angle) for every n.
    * ``power_decay``     -- |lambda_n| = amplitude * (n+1)^{-exponent}.
    * ``swap``            -- K = [[0, 1], [1, 0]]; interchanges the roles of the
                             two variable types, excluded by the convention.
    * ``random_phase``    -- |lambda| fixed, phases drawn reproducibly from seed.
    * ``explicit``        -- literal per-mode list of 2x2 unitaries.

    convention_floor declares a lower bound for inf_n min(|kappa_f|, |kappa_g|)
    holding for all n >= n_cut; 0 means no convention is claimed.
    """

    kind: str
    name: str = ""
    amplitude: float = 0.0
    exponent: float = 0.0
    angle: float = 0.0
    phase1: float = 0.0
    phase2: float = 0.0
    seed: int = 0
    matrices: Optional[tuple] = None
    convention_floor: float = 0.0
    n_cut: int = 0

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {FAMILY_KINDS}")
        if not self.name:
            object.__setattr__(self, "name", self.kind)
        if self.kind == "constant_angle" and not 0.0 <= abs(np.sin(self.angle)) <= 1.0:
            raise ValueError("constant_angle requires a real mixing angle")
        if self.kind == "power_decay":
            if self.amplitude < 0 or self.amplitude > 1.0:
                raise ValueError(f"power_decay amplitude must lie in [0, 1], got {self.amplitude}")
        if self.kind == "random_phase" and not 0.0 <= self.amplitude <= 1.0:
            raise ValueError(f"random_phase |lambda| must lie in [0, 1], got {self.amplitude}")
        if self.convention_floor < 0:
            raise ValueError("convention_floor must be >= 0")

    def _lambda_modulus(self, n: int) -> float:
        if self.kind in ("identity", "diagonal_phase"):
            return 0.0
        if self.kind == "constant_angle":
            return abs(float(np.sin(self.angle)))
        if self.kind == "power_decay":
            return self.amplitude * (n + 1) ** (-self.exponent)
        if self.kind == "random_phase":
            return self.amplitude
        if self.kind == "swap":
            return 1.0
        raise AssertionError(self.kind)


def generate(family: StructureFamily, n) -> MixingMatrix:
    """The mixing matrix K_n of the family; deterministic for a fixed seed.

    Off-diagonal kinds use the unitary completion
    K = [[kappa, lam], [-conj(lam), kappa]] with kappa = sqrt(1 - |lam|^2) real,
    which satisfies all three unitarity relations for any complex lam.
    """
    nn = int(n.n) if hasattr(n, "n") else int(n)
    kind = family.kind
    if kind == "explicit":
        mats = family.matrices
        if mats is None or nn >= len(mats):
            raise ValueError(f"explicit family has no matrix for n = {nn}")
        k = np.asarray(mats[nn], dtype=complex)
    elif kind == "identity":
        k = np.eye(2, dtype=complex)
    elif kind == "diagonal_phase":
        k = np.diag([np.exp(1j * family.phase1 * (nn + 1)),
                     np.exp(1j * family.phase2 * (nn + 1))])
    elif kind == "swap":
        k = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    else:
        lam_mod = family._lambda_modulus(nn)
        if lam_mod > 1.0:
            raise ValueError(f"|lambda| = {lam_mod} > 1 at n = {nn}")
        if kind == "random_phase":
            rng = np.random.default_rng((family.seed, nn))
            lam = lam_mod * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        else:
            lam = complex(lam_mod)
        kappa = np.sqrt(max(0.0, 1.0 - lam_mod * lam_mod))
        k = np.array([[kappa, lam], [-np.conj(lam), kappa]])
    return MixingMatrix(matrix=k, mode=nn)


@dataclass(frozen=True)
class ConventionReport:
    """Empirical check of the particle-antiparticle convention up to n_max."""

    family: str
    n_max: int
    minimum: float
    min_at: int
    floor: float
    n_cut: int
    compliant: bool
    violations: tuple = field(default=())


def check_convention(family: StructureFamily, n_max: int) -> ConventionReport:
    """Scan min(|kappa_f|, |kappa_g|) over n <= n_max against the declared floor.

    Violation is a report outcome, not an error.  A family declaring no
    positive floor (e.g. the swap family) is flagged as non-compliant.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    mins = np.empty(n_max + 1)
    for n in range(n_max + 1):
        k = generate(family, n)
        mins[n] = min(abs(k.kappa_f), abs(k.kappa_g))
    min_at = int(np.argmin(mins))
    violations = tuple(int(n) for n in range(family.n_cut, n_max + 1)
                       if mins[n] < family.convention_floor)
    compliant = family.convention_floor > 0.0 and not violations
    return ConventionReport(
        family=family.name,
        n_max=n_max,
        minimum=float(mins[min_at]),
        min_at=min_at,
        floor=family.convention_floor,
        n_cut=family.n_cut,
        compliant=compliant,
        violations=violations[:20],
    )


def mixing_table(family: StructureFamily, ns) -> np.ndarray:
    """Stacked K_n matrices for every n in ns, shape (len(ns), 2, 2)."""
    return np.stack([generate(family, int(n)).matrix for n in np.atleast_1d(ns)])
