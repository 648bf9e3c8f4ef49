"""Time-averaging lower bound for sin^2 integrals with slowly drifting phase.

For frequencies omega >= omega_{n0} and a phase perturbation whose rate is
C(T)/omega with C, C' continuous on a closed interval of length L, an
integration by parts gives

    integral of sin^2(omega T + phase(T)) over the interval
        >= L/2 - 1/(2 omega_{n0} (1-D)) - (integral |C'|)/(4 omega_{n0}^3 (1-D)^2)
        =: Lambda_{n0},

valid whenever 0 < D < 1 and omega_{n0}^2 > max|C|/(2D) on the interval, and
Lambda_{n0} tends to L/2 as n0 grows.  Removing an excised set of measure
below delta < Lambda_{n0} costs at most delta, so the excised integral stays
above Lambda_{n0} - delta; dividing that into the excised integral of the
weighted sin^2 series bounds every partial sum of the weights by
I_delta / (Lambda_{n0} - delta).

The excision existence statement itself (a continuous function agreeing with
the series off a small set) is not constructed; the checkable content is the
inequality chain, verified here on an adversarial library of interval-union
excisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class PhaseProfile:
    """Coefficient C(T) of the 1/omega phase-rate perturbation on [a, a+L].

    c_antiderivative, when supplied, must satisfy d/dT antiderivative = c;
    otherwise a spline antiderivative is built from dense samples.
    """

    c: Callable[[np.ndarray], np.ndarray]
    c_prime: Callable[[np.ndarray], np.ndarray]
    interval: tuple
    c_antiderivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = "custom"
    _anti: Callable = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        a, b = self.interval
        if not (np.isfinite(a) and np.isfinite(b) and b > a):
            raise ValueError(f"interval must have positive finite length, got {self.interval}")
        object.__setattr__(self, "interval", (float(a), float(b)))
        grid = np.linspace(a, b, 513)
        if not (np.all(np.isfinite(self.c(grid))) and np.all(np.isfinite(self.c_prime(grid)))):
            raise ValueError("C and C' must be finite on the interval")
        if self.c_antiderivative is not None:
            object.__setattr__(self, "_anti", self.c_antiderivative)
        else:
            from scipy.interpolate import CubicSpline
            dense = np.linspace(a, b, 4097)
            spline = CubicSpline(dense, self.c(dense)).antiderivative()
            object.__setattr__(self, "_anti", spline)

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    def phase(self, omega: float, t: np.ndarray) -> np.ndarray:
        """Accumulated phase perturbation (1/omega) * integral of C from the interval start."""
        a = self.interval[0]
        return (np.asarray(self._anti(t)) - self._anti(a)) / omega


def constant_profile(value: float, interval=(0.0, 1.0)) -> PhaseProfile:
    v = float(value)
    return PhaseProfile(c=lambda t: np.full_like(np.asarray(t, float), v),
                        c_prime=lambda t: np.zeros_like(np.asarray(t, float)),
                        c_antiderivative=lambda t: v * np.asarray(t, float),
                        interval=interval, label=f"constant({v})")


def sinusoid_profile(amplitude: float, frequency: float = 1.0, phase: float = 0.0,
                     interval=(0.0, 1.0)) -> PhaseProfile:
    amp, k, p0 = float(amplitude), float(frequency), float(phase)
    return PhaseProfile(
        c=lambda t: amp * np.sin(k * np.asarray(t, float) + p0),
        c_prime=lambda t: amp * k * np.cos(k * np.asarray(t, float) + p0),
        c_antiderivative=lambda t: -(amp / k) * np.cos(k * np.asarray(t, float) + p0),
        interval=interval, label=f"sinusoid({amp},{k},{p0})")


def polynomial_profile(coeffs, interval=(0.0, 1.0)) -> PhaseProfile:
    poly = np.polynomial.Polynomial(list(coeffs))
    dpoly = poly.deriv()
    ipoly = poly.integ()
    return PhaseProfile(c=poly, c_prime=dpoly, c_antiderivative=ipoly,
                        interval=interval, label=f"polynomial{tuple(coeffs)}")


def _integral_abs(f: Callable, a: float, b: float) -> float:
    """Integral of |f| on [a, b]: split at sign changes, Gauss-Legendre per piece."""
    grid = np.linspace(a, b, 4097)
    vals = f(grid)
    cuts = [a]
    sign = np.sign(vals)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        cuts.append(float(brentq(lambda t: float(f(t)), grid[i], grid[i + 1])))
    cuts.append(b)
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        total += _gauss(lambda t: np.abs(f(t)), lo, hi, max_panel=(hi - lo) / 8 + 1e-30)
    return total


def _gauss(f: Callable, a: float, b: float, max_panel: float) -> float:
    """Composite 12-node Gauss-Legendre with panel width <= max_panel."""
    if b <= a:
        return 0.0
    npanels = max(1, int(math.ceil((b - a) / max_panel)))
    edges = np.linspace(a, b, npanels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return float(np.sum(half[:, None] * _GL_WEIGHTS[None, :] * f(pts)))


def omega_of_mode(n0: int) -> float:
    return n0 + 1.5


def lower_bound(profile: PhaseProfile, d: float, n0: int) -> float:
    """Lambda_{n0}: the integration-by-parts lower bound for modes n >= n0."""
    if not 0.0 < d < 1.0:
        raise ValueError(f"D must lie in (0, 1), got {d}")
    om = omega_of_mode(n0)
    a, b = profile.interval
    cmax = float(np.max(np.abs(profile.c(np.linspace(a, b, 8193)))))
    if not om * om > cmax / (2.0 * d):
        raise ValueError(
            f"omega_n0^2 = {om * om:.6g} <= max|C|/(2D) = {cmax / (2 * d):.6g}; increase n0")
    int_abs_cprime = _integral_abs(profile.c_prime, a, b)
    lam = (profile.length / 2.0
           - 1.0 / (2.0 * om * (1.0 - d))
           - int_abs_cprime / (4.0 * om ** 3 * (1.0 - d) ** 2))
    if lam <= 0.0:
        raise ValueError(f"Lambda_n0 = {lam:.6g} <= 0; increase n0 (it tends to L/2)")
    return lam


@dataclass(frozen=True)
class BoundParameters:
    """Validated (D, n0, Lambda_{n0}, delta) tuple for the excision chain."""

    d: float
    n0: int
    lambda_n0: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < self.lambda_n0:
            raise ValueError(
                f"delta must satisfy 0 < delta < Lambda_n0 = {self.lambda_n0:.6g}, got {self.delta}")


def bound_parameters(profile: PhaseProfile, d: float, n0: int, delta: float) -> BoundParameters:
    return BoundParameters(d=d, n0=n0, lambda_n0=lower_bound(profile, d, n0), delta=delta)


def _normalize_excision(excised, interval) -> list:
    """Clip to the interval, sort, and merge overlapping pieces."""
    a, b = interval
    pieces = []
    for lo, hi in excised or []:
        lo, hi = max(float(lo), a), min(float(hi), b)
        if hi > lo:
            pieces.append((lo, hi))
    pieces.sort()
    merged = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def excision_measure(excised, interval) -> float:
    return sum(hi - lo for lo, hi in _normalize_excision(excised, interval))


def sin2_integral(omega: float, profile: PhaseProfile, excised=None) -> float:
    """Integral of sin^2(omega T + phase(T)) over the interval minus the excised set."""
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    a, b = profile.interval
    pieces = _normalize_excision(excised, profile.interval)
    if excised is not None and excision_measure(excised, profile.interval) > profile.length:
        raise ValueError("excised set exceeds the interval")
    f = lambda t: np.sin(omega * t + profile.phase(omega, t)) ** 2
    max_panel = math.pi / (4.0 * omega)
    kept, cursor = [], a
    for lo, hi in pieces:
        if lo > cursor:
            kept.append((cursor, lo))
        cursor = max(cursor, hi)
    if cursor < b:
        kept.append((cursor, b))
    return sum(_gauss(f, lo, hi, max_panel) for lo, hi in kept)


def _excision_library(omega: float, profile: PhaseProfile, delta: float,
                      n_random: int, seed: int) -> list:
    """Adversarial excised sets of measure < delta: endpoint blocks, combs, random unions."""
    a, b = profile.interval
    width = 0.95 * delta
    library = [
        ("left-endpoint", [(a, a + width)]),
        ("right-endpoint", [(b - width, b)]),
        ("split-endpoints", [(a, a + width / 2), (b - width / 2, b)]),
    ]
    # combs aligned to the zeros and to the maxima of sin(omega T + phase)
    for name, offset in (("comb-zeros", 0.0), ("comb-maxima", math.pi / 2.0)):
        ks = np.arange(math.ceil((omega * a - offset) / math.pi),
                       math.floor((omega * b - offset) / math.pi) + 1)
        centers = (offset + math.pi * ks) / omega
        if len(centers):
            half = width / (2.0 * len(centers))
            library.append((name, [(c - half, c + half) for c in centers]))
    rng = np.random.default_rng(seed)
    for j in range(n_random):
        k = int(rng.integers(1, 24))
        lows = np.sort(rng.uniform(a, b, size=k))
        lengths = rng.uniform(0, 1, size=k)
        lengths *= width / np.sum(lengths)
        library.append((f"random-{j}", [(lo, lo + ln) for lo, ln in zip(lows, lengths)]))
    return library


@dataclass(frozen=True)
class BoundChainRecord:
    """Worst-case margin of the excised-integral inequality over the tested library."""

    passed: bool
    worst_margin: float
    worst_case: str
    lambda_n0: float
    delta: float
    n0: int
    d: float
    omegas: tuple
    n_excisions: int
    quadrature_slack: float


def verify_bound_chain(profile: PhaseProfile, d: float, n0: int, delta: float,
                       omegas, n_random: int = 16, seed: int = 0,
                       quadrature_slack: float = 1e-7) -> BoundChainRecord:
    """Check sin2_integral >= Lambda_{n0} - delta for every (omega, excision) tested.

    omegas must all be >= omega_{n0}; the record reports the minimal observed
    margin (which the inequality chain predicts to be non-negative).
    """
    params = bound_parameters(profile, d, n0, delta)
    omegas = tuple(float(w) for w in np.atleast_1d(omegas))
    om0 = omega_of_mode(n0)
    if any(w < om0 for w in omegas):
        raise ValueError(f"all omegas must be >= omega_n0 = {om0}")
    floor = params.lambda_n0 - delta
    worst_margin, worst_case = math.inf, ""
    count = 0
    for w in omegas:
        for name, excised in _excision_library(w, profile, delta, n_random, seed):
            val = sin2_integral(w, profile, excised)
            margin = val - floor
            count += 1
            if margin < worst_margin:
                worst_margin, worst_case = margin, f"omega={w} excision={name}"
    return BoundChainRecord(
        passed=worst_margin >= -quadrature_slack,
        worst_margin=float(worst_margin),
        worst_case=worst_case,
        lambda_n0=params.lambda_n0,
        delta=delta,
        n0=n0,
        d=d,
        omegas=omegas,
        n_excisions=count,
        quadrature_slack=quadrature_slack,
    )


def bounded_sum_conclusion(partial_sums, i_delta: float, lambda_n0: float,
                           delta: float, slack: float = 1e-12) -> float:
    """The final bound I_delta / (Lambda_{n0} - delta) over all partial sums.

    partial_sums is a list of (M, S_M) pairs; raises on the first M whose
    partial sum exceeds the bound (the theorem predicts none for compliant
    inputs).
    """
    if not lambda_n0 > delta:
        raise ValueError(f"requires Lambda_n0 > delta, got {lambda_n0} <= {delta}")
    bound = i_delta / (lambda_n0 - delta)
    for m, s in partial_sums:
        if s > bound * (1.0 + slack) + slack:
            raise ValueError(f"partial sum at M = {m} is {s:.6g}, exceeding the bound {bound:.6g}")
    return bound


def weighted_excised_integral(profile: PhaseProfile, omegas, weights, excised=None) -> float:
    """Integral over the (possibly excised) interval of the weighted sin^2 series.

    This is the finite-range I_delta when the excised complement plays the
    role of the small set: sum_n w_n * sin2_integral(omega_n).
    """
    omegas = np.atleast_1d(omegas)
    weights = np.atleast_1d(weights)
    return float(sum(w * sin2_integral(float(om), profile, excised)
                     for om, w in zip(omegas, weights)))
