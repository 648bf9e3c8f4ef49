"""Finite-range summability analysis and the uniqueness verdict.

Every criterion is an infinite sum of non-negative, degeneracy-weighted terms.
On a finite mode range the verdict is a documented deterministic function of
three diagnostics computed from the term sequence:

* ``cauchy_metric``    -- largest partial-sum increment across geometric
  checkpoint pairs (N, 2N), relative to the full partial sum.
* ``tail_exponent``    -- least-squares slope of log(binned mean term) against
  log(n) over the top decade of n, with its fit residual.
* ``increment_ratio``  -- largest ratio of successive checkpoint increments;
  a power-law tail n^s gives 2^(s+1), so ratios >= 1 signal a non-summable
  tail even when the exponent sits in the margin band (e.g. the harmonic
  series).

Verdict rule (thresholds are configurable, defaults below):

* convergent   if the top-decade terms are all below the zero floor, or the
  Cauchy metric is below cauchy_epsilon (saturation), or the tail exponent is
  below -1 - margin with shrinking increments (increment_ratio < 1);
* divergent    if the tail exponent exceeds -1 + margin, or increments fail
  to shrink while the Cauchy metric shows no saturation, or the partial sums
  exceed the divergence threshold without saturation;
* inconclusive otherwise.

"Inconclusive" is a first-class outcome: a finite range cannot certify an
asymptotic statement, only refute or support it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .background import BackgroundModel
from .bogoliubov import bogoliubov_table, offdiagonal_sequences
from .complex_structure import StructureFamily, check_convention, mixing_table

CONVERGENT = "convergent"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Thresholds:
    """Tunable constants of the verdict rule."""

    margin: float = 0.15
    cauchy_epsilon: float = 1e-6
    divergence_threshold: float = 1e12
    zero_floor: float = 1e-18
    min_fit_bins: int = 5
    bins_per_decade: int = 12
    oscillation_cv: float = 0.2


@dataclass(frozen=True)
class WeightedSequence:
    """Ordered non-negative terms (n, value), value including the g_n weight."""

    ns: np.ndarray
    values: np.ndarray
    label: str

    def __post_init__(self):
        ns = np.asarray(self.ns, dtype=int)
        vals = np.asarray(self.values, dtype=float)
        if ns.shape != vals.shape or ns.ndim != 1:
            raise ValueError("ns and values must be 1-d arrays of equal length")
        if not np.all(np.diff(ns) > 0):
            raise ValueError("mode indices must be strictly increasing")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("sequence values must be finite and non-negative")
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SummabilityReport:
    """Diagnostics and verdict for one weighted sequence."""

    label: str
    n_terms: int
    total: float
    partial_sums: tuple            # ((N, S(N)), ...) at geometric checkpoints
    cauchy_metric: float
    increment_ratio: Optional[float]
    tail_exponent: Optional[float]
    tail_residual: Optional[float]
    oscillation_flag: bool
    verdict: str
    thresholds: Thresholds = field(default_factory=Thresholds)
    note: str = ""

    def as_dict(self) -> dict:
        d = asdict(self)
        d["partial_sums"] = [[int(n), float(s)] for n, s in self.partial_sums]
        return d


def _tail_fit(ns, values, thresholds: Thresholds):
    """Binned log-log fit over the top decade; returns (slope, residual, cv)."""
    n_max = ns[-1]
    lo = max(ns[0], n_max / 10.0)
    mask = ns >= lo
    tail_ns = ns[mask].astype(float)
    tail_vals = values[mask]
    if len(tail_ns) < 2 * thresholds.min_fit_bins:
        return None, None, False
    nbins = max(thresholds.min_fit_bins, thresholds.bins_per_decade)
    edges = np.geomspace(tail_ns[0], tail_ns[-1] * (1 + 1e-12), nbins + 1)
    centers, means = [], []
    samples = []
    for k in range(nbins):
        sel = (tail_ns >= edges[k]) & (tail_ns < edges[k + 1])
        if not np.any(sel):
            continue
        m = float(np.mean(tail_vals[sel]))
        if m <= thresholds.zero_floor:
            continue
        centers.append(float(np.sqrt(edges[k] * edges[k + 1])))
        means.append(m)
        samples.append((tail_ns[sel], tail_vals[sel]))
    if len(means) < thresholds.min_fit_bins:
        return None, None, False
    lx = np.log(centers)
    ly = np.log(means)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    # oscillation diagnostic: spread of the detrended terms within bins
    cvs = []
    for bn, bv in samples:
        detr = bv / np.exp(intercept + slope * np.log(bn))
        if np.mean(detr) > 0:
            cvs.append(float(np.std(detr) / np.mean(detr)))
    oscillating = bool(cvs) and float(np.median(cvs)) > thresholds.oscillation_cv
    return float(slope), residual, oscillating


def analyze(seq: WeightedSequence, thresholds: Thresholds = Thresholds()) -> SummabilityReport:
    """Partial sums, Cauchy tail metrics, tail-exponent fit, and the verdict."""
    ns, values = seq.ns, seq.values
    spans_3_decades = ns[-1] >= 1000 * max(ns[0], 1)
    if len(ns) < 200 and not spans_3_decades:
        raise ValueError(f"too few terms for {seq.label!r}: need >= 200 terms or 3 decades of n, got {len(ns)}")
    csum = np.cumsum(values)
    total = float(csum[-1])
    n_max = int(ns[-1])
    checkpoints = sorted({max(1, n_max // 8), max(1, n_max // 4), max(1, n_max // 2), n_max})
    partial = []
    for ncp in checkpoints:
        idx = np.searchsorted(ns, ncp, side="right") - 1
        partial.append((ncp, float(csum[idx]) if idx >= 0 else 0.0))
    increments = [b[1] - a[1] for a, b in zip(partial, partial[1:])]
    scale = max(total, 1e-300)
    cauchy = max((d / scale for d in increments), default=0.0)

    tail_mask = ns >= max(ns[0], n_max / 10.0)
    zero_tail = bool(np.all(values[tail_mask] <= thresholds.zero_floor))

    ratio = None
    pos = [d for d in increments if d > thresholds.zero_floor]
    if len(pos) == len(increments) and len(increments) >= 2:
        ratio = max(b / a for a, b in zip(increments, increments[1:]))

    slope, residual, oscillating = _tail_fit(ns, values, thresholds)

    if zero_tail:
        verdict = CONVERGENT
        slope = float("-inf") if slope is None else slope
    elif cauchy < thresholds.cauchy_epsilon:
        verdict = CONVERGENT
    elif slope is not None and slope < -1.0 - thresholds.margin and (ratio is None or ratio < 1.0):
        verdict = CONVERGENT
    elif slope is not None and slope > -1.0 + thresholds.margin:
        verdict = DIVERGENT
    elif ratio is not None and ratio >= 0.95:
        verdict = DIVERGENT
    elif total > thresholds.divergence_threshold:
        verdict = DIVERGENT
    else:
        verdict = INCONCLUSIVE

    return SummabilityReport(
        label=seq.label,
        n_terms=len(ns),
        total=total,
        partial_sums=tuple(partial),
        cauchy_metric=float(cauchy),
        increment_ratio=None if ratio is None else float(ratio),
        tail_exponent=slope,
        tail_residual=residual,
        oscillation_flag=oscillating,
        verdict=verdict,
        thresholds=thresholds,
    )


def _degeneracies(ns: np.ndarray) -> np.ndarray:
    return (ns + 1.0) * (ns + 2.0)


def _numeric_floor(thresholds: Thresholds, ns: np.ndarray, tolerance: float) -> Thresholds:
    """Raise the zero floor to the noise level of numerically built beta entries."""
    g_max = float(_degeneracies(ns)[-1])
    floor = max(thresholds.zero_floor, g_max * (10.0 * tolerance) ** 2)
    if floor == thresholds.zero_floor:
        return thresholds
    return Thresholds(**{**asdict(thresholds), "zero_floor": floor})


def _mode_range(n_max: int, n_min: int = 0) -> np.ndarray:
    return np.arange(n_min, n_max + 1)


def dynamics_unitarity(background: BackgroundModel, eta0: float, eta: float, n_max: int,
                       tolerance: float = 1e-11, thresholds: Thresholds = Thresholds(),
                       table: Optional[np.ndarray] = None) -> SummabilityReport:
    """The implementability sum: terms g_n (|beta_f|^2 + |beta_g|^2)."""
    ns = _mode_range(n_max)
    if table is None:
        table = bogoliubov_table(background, ns, eta0, eta, tolerance)
    g = _degeneracies(ns)
    vals = g * (np.abs(table[:, 0, 1]) ** 2 + np.abs(table[:, 1, 0]) ** 2)
    seq = WeightedSequence(ns, vals, label="dynamics-unitarity")
    return analyze(seq, _numeric_floor(thresholds, ns, tolerance))


def equivalence(family: StructureFamily, n_max: int,
                thresholds: Thresholds = Thresholds()) -> SummabilityReport:
    """The unitary-equivalence sum: terms g_n (|lambda_f|^2 + |lambda_g|^2)."""
    ns = _mode_range(n_max)
    k = mixing_table(family, ns)
    g = _degeneracies(ns)
    vals = g * (np.abs(k[:, 0, 1]) ** 2 + np.abs(k[:, 1, 0]) ** 2)
    seq = WeightedSequence(ns, vals, label=f"equivalence[{family.name}]")
    return analyze(seq, thresholds)


@dataclass(frozen=True)
class MixedConditionsResult:
    """The two mixed sums plus the full off-diagonal precursor sums.

    The mixed sums equal the precursors minus combinations of the
    sqrt(g) beta sequences, which are square summable on their own; for
    bounded mixings all four receive matching verdicts.
    """

    mixed_f: SummabilityReport
    mixed_g: SummabilityReport
    precursor_f: SummabilityReport
    precursor_g: SummabilityReport


def mixed_conditions(family: StructureFamily, background: BackgroundModel,
                     eta0: float, eta: float, n_max: int, tolerance: float = 1e-11,
                     thresholds: Thresholds = Thresholds(),
                     table: Optional[np.ndarray] = None) -> MixedConditionsResult:
    """Terms g_n |kappa lambda (alpha_g - alpha_f)|^2 for both variable types."""
    ns = _mode_range(n_max)
    if table is None:
        table = bogoliubov_table(background, ns, eta0, eta, tolerance)
    k = mixing_table(family, ns)
    g = _degeneracies(ns)
    adiff = table[:, 1, 1] - table[:, 0, 0]
    thr = _numeric_floor(thresholds, ns, tolerance)
    mixed_f = analyze(WeightedSequence(
        ns, g * np.abs(k[:, 0, 0] * k[:, 0, 1] * adiff) ** 2,
        label=f"mixed-f[{family.name}]"), thr)
    mixed_g = analyze(WeightedSequence(
        ns, g * np.abs(k[:, 1, 1] * k[:, 1, 0] * (-adiff)) ** 2,
        label=f"mixed-g[{family.name}]"), thr)
    seq_f, seq_g = offdiagonal_sequences(k, table)
    pre_f = analyze(WeightedSequence(
        ns, g * np.abs(seq_f) ** 2, label=f"offdiag-f[{family.name}]"), thr)
    pre_g = analyze(WeightedSequence(
        ns, g * np.abs(seq_g) ** 2, label=f"offdiag-g[{family.name}]"), thr)
    return MixedConditionsResult(mixed_f=mixed_f, mixed_g=mixed_g,
                                 precursor_f=pre_f, precursor_g=pre_g)


def _phase_correction(adiff: np.ndarray, oms: np.ndarray, deta: float) -> np.ndarray:
    """Small-phase surrogate for the order-1/omega remainder of the mode phase.

    Linearizes Re[(alpha_g - alpha_f)/(2i)] = sin(omega deta + c) around c = 0
    where the linearization is well conditioned, and clips to the declared
    O(1/omega) envelope.  Exact (c = 0) in the massless case.
    """
    s = np.real(adiff / 2j)
    base = oms * deta
    cosb = np.cos(base)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(np.abs(cosb) > 0.3, (s - np.sin(base)) / np.where(cosb == 0, 1.0, cosb), 0.0)
    bound = 10.0 / oms
    return np.clip(c, -bound, bound)


def sine_weighted_conditions(family: StructureFamily, background: BackgroundModel,
                             eta0: float, eta: float, n_max: int,
                             tolerance: float = 1e-11,
                             thresholds: Thresholds = Thresholds(),
                             table: Optional[np.ndarray] = None):
    """Terms g_n |kappa lambda|^2 sin^2(omega deta + correction), both types.

    A single time pair is insufficient (sin vanishes at deta = 0 and can alias
    at special deta); callers must sample several distinct deta values.
    """
    ns = _mode_range(n_max)
    if table is None:
        table = bogoliubov_table(background, ns, eta0, eta, tolerance)
    k = mixing_table(family, ns)
    g = _degeneracies(ns)
    oms = ns + 1.5
    adiff = table[:, 1, 1] - table[:, 0, 0]
    theta = oms * (eta - eta0) + _phase_correction(adiff, oms, eta - eta0)
    s2 = np.sin(theta) ** 2
    thr = _numeric_floor(thresholds, ns, tolerance)
    rep_f = analyze(WeightedSequence(
        ns, g * np.abs(k[:, 0, 0] * k[:, 0, 1]) ** 2 * s2,
        label=f"sine-f[{family.name}]"), thr)
    rep_g = analyze(WeightedSequence(
        ns, g * np.abs(k[:, 1, 1] * k[:, 1, 0]) ** 2 * s2,
        label=f"sine-g[{family.name}]"), thr)
    return rep_f, rep_g


CONSISTENT = "consistent-with-theorem"
COUNTEREXAMPLE = "counterexample-candidate"


@dataclass(frozen=True)
class VerdictRecord:
    """Outcome of the finite-range uniqueness check for one family.

    The theorem: convention compliance plus convergent sine-weighted sums for
    every sampled time pair force the equivalence sum to converge.  A
    counterexample candidate would contradict it and triggers a full dump.
    """

    family: str
    outcome: str
    reason: str
    convention: object
    equivalence: SummabilityReport
    sine_reports: tuple          # ((eta0, eta, report_f, report_g), ...)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "outcome": self.outcome,
            "reason": self.reason,
            "convention": asdict(self.convention),
            "equivalence": self.equivalence.as_dict(),
            "sine_reports": [
                {"eta0": t0, "eta": t1, "f": rf.as_dict(), "g": rg.as_dict()}
                for t0, t1, rf, rg in self.sine_reports
            ],
        }


def uniqueness_verdict(family: StructureFamily, background: BackgroundModel,
                       time_pairs, n_max: int, tolerance: float = 1e-11,
                       thresholds: Thresholds = Thresholds(),
                       tables: Optional[dict] = None) -> VerdictRecord:
    """Finite-range instantiation of the uniqueness theorem for one family.

    tables may map (eta0, eta) to precomputed Bogoliubov tables shared across
    families.
    """
    pairs = [(float(a), float(b)) for a, b in time_pairs]
    detas = {round(b - a, 12) for a, b in pairs}
    if len(pairs) < 3 or len(detas) < 3:
        raise ValueError("need at least 3 time pairs with distinct time differences")
    convention = check_convention(family, n_max)
    eq_report = equivalence(family, n_max, thresholds)
    sine_reports = []
    for eta0, eta in pairs:
        table = None if tables is None else tables.get((eta0, eta))
        rf, rg = sine_weighted_conditions(family, background, eta0, eta, n_max,
                                          tolerance, thresholds, table=table)
        sine_reports.append((eta0, eta, rf, rg))
    flat = [r for _, _, rf, rg in sine_reports for r in (rf, rg)]
    all_convergent = all(r.verdict == CONVERGENT for r in flat)
    any_divergent = any(r.verdict == DIVERGENT for r in flat)

    if not convention.compliant:
        outcome, reason = CONSISTENT, "hypothesis fails: particle-antiparticle convention violated"
    elif any_divergent:
        outcome, reason = CONSISTENT, "hypothesis fails: a sine-weighted sum diverges (contrapositive)"
    elif all_convergent:
        if eq_report.verdict == CONVERGENT:
            outcome, reason = CONSISTENT, "hypothesis and conclusion both hold"
        elif eq_report.verdict == DIVERGENT:
            outcome, reason = COUNTEREXAMPLE, ("sine-weighted sums convergent for all sampled "
                                               "time pairs but the equivalence sum diverges")
        else:
            outcome, reason = INCONCLUSIVE, "equivalence sum inconclusive"
    else:
        if eq_report.verdict == CONVERGENT:
            outcome, reason = CONSISTENT, "conclusion holds regardless of hypothesis"
        else:
            outcome, reason = INCONCLUSIVE, "a sine-weighted sum is inconclusive"

    return VerdictRecord(family=family.name, outcome=outcome, reason=reason,
                         convention=convention, equivalence=eq_report,
                         sine_reports=tuple(sine_reports))
