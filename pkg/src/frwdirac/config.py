"""Run configuration: YAML round-trip, validation, and construction of run objects.

Validation collects every violation before failing so a bad config reports
all problems at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np
import yaml

from .averaging_bound import (PhaseProfile, constant_profile, polynomial_profile,
                              sinusoid_profile)
from .background import BackgroundModel, constant_background, power_law_background, tabulated_background
from .complex_structure import FAMILY_KINDS, StructureFamily
from .errors import ConfigError
from .summability import Thresholds

DEFAULT_TIME_PAIRS = ((0.1, 0.4), (0.1, 0.8), (0.3, 1.6))


@dataclass(frozen=True)
class BoundDemoConfig:
    profile_kind: str = "constant"
    profile_params: dict = field(default_factory=lambda: {"value": 0.0})
    interval: tuple = (0.0, 1.0)
    d: float = 0.5
    n0: int = 10
    delta: float = 0.2
    omega_mode_range: tuple = (10, 50)
    excisions: int = 100

    def build_profile(self) -> PhaseProfile:
        if self.profile_kind == "constant":
            return constant_profile(self.profile_params.get("value", 0.0), self.interval)
        if self.profile_kind == "sinusoid":
            return sinusoid_profile(self.profile_params.get("amplitude", 1.0),
                                    self.profile_params.get("frequency", 1.0),
                                    self.profile_params.get("phase", 0.0), self.interval)
        if self.profile_kind == "polynomial":
            return polynomial_profile(self.profile_params.get("coefficients", [0.0]), self.interval)
        raise ConfigError([f"bound_demo.profile.kind: unknown kind {self.profile_kind!r}"])


@dataclass(frozen=True)
class RunConfig:
    """Everything a batch run needs; round-trips losslessly through YAML."""

    background: dict
    families: tuple
    n_min: int = 0
    n_max: int = 300
    time_pairs: tuple = DEFAULT_TIME_PAIRS
    tolerance: float = 1e-11
    thresholds: Thresholds = field(default_factory=Thresholds)
    output_dir: str = "out"
    seed: int = 0
    threads: int = 1
    bound_demo: BoundDemoConfig = field(default_factory=BoundDemoConfig)

    def build_background(self) -> BackgroundModel:
        return _build_background(self.background)

    def build_families(self) -> list:
        return [_build_family(f, self.seed, i) for i, f in enumerate(self.families)]

    def to_dict(self) -> dict:
        return {
            "background": dict(self.background),
            "families": [dict(f) for f in self.families],
            "mode_range": {"n_min": self.n_min, "n_max": self.n_max},
            "time_pairs": [[float(a), float(b)] for a, b in self.time_pairs],
            "tolerance": self.tolerance,
            "thresholds": asdict(self.thresholds),
            "seed": self.seed,
            "threads": self.threads,
            "bound_demo": {
                "profile": {"kind": self.bound_demo.profile_kind,
                            "interval": list(self.bound_demo.interval),
                            **self.bound_demo.profile_params},
                "D": self.bound_demo.d,
                "n0": self.bound_demo.n0,
                "delta": self.bound_demo.delta,
                "omega_mode_range": list(self.bound_demo.omega_mode_range),
                "excisions": self.bound_demo.excisions,
            },
        }


def _build_background(spec: dict) -> BackgroundModel:
    kind = spec.get("kind")
    mass = float(spec.get("mass", 0.0))
    domain = tuple(spec.get("domain", (0.0, 2.0)))
    if kind == "constant":
        return constant_background(alpha=float(spec.get("alpha", 0.0)), mass=mass, domain=domain)
    if kind == "power_law":
        return power_law_background(exponent=float(spec.get("exponent", 0.0)),
                                    offset=float(spec.get("offset", 0.0)),
                                    mass=mass, domain=domain)
    if kind == "tabulated":
        samples = np.asarray(spec["samples"], dtype=float)
        return tabulated_background(samples[:, 0], samples[:, 1], mass=mass, domain=domain)
    raise ConfigError([f"background.kind: unknown kind {kind!r}"])


def _build_family(spec: dict, run_seed: int, index: int) -> StructureFamily:
    known = {"name", "kind", "amplitude", "exponent", "angle", "phase1", "phase2",
             "seed", "convention_floor", "n_cut"}
    extra = set(spec) - known
    if extra:
        raise ConfigError([f"families[{index}]: unknown keys {sorted(extra)}"])
    return StructureFamily(
        kind=spec.get("kind", "identity"),
        name=spec.get("name", ""),
        amplitude=float(spec.get("amplitude", 0.0)),
        exponent=float(spec.get("exponent", 0.0)),
        angle=float(spec.get("angle", 0.0)),
        phase1=float(spec.get("phase1", 0.0)),
        phase2=float(spec.get("phase2", 0.0)),
        seed=int(spec.get("seed", run_seed + index)),
        convention_floor=float(spec.get("convention_floor", 0.0)),
        n_cut=int(spec.get("n_cut", 0)),
    )


def _validate(raw: dict) -> list:
    """Collect every violation in the raw mapping; empty list means valid."""
    errs = []
    bg = raw.get("background")
    if not isinstance(bg, dict):
        errs.append("background: required mapping is missing")
    else:
        if bg.get("kind") not in ("constant", "power_law", "tabulated"):
            errs.append(f"background.kind: unknown kind {bg.get('kind')!r}")
        if float(bg.get("mass", 0.0)) < 0:
            errs.append("background.mass: must be >= 0")
        dom = bg.get("domain", (0.0, 2.0))
        if not (isinstance(dom, (list, tuple)) and len(dom) == 2 and float(dom[0]) < float(dom[1])):
            errs.append(f"background.domain: must be [eta_min, eta_max] with eta_min < eta_max, got {dom!r}")
        if bg.get("kind") == "tabulated" and "samples" not in bg:
            errs.append("background.samples: required for the tabulated kind")
    fams = raw.get("families", [])
    if not isinstance(fams, list):
        errs.append("families: must be a list")
        fams = []
    for i, f in enumerate(fams):
        if not isinstance(f, dict):
            errs.append(f"families[{i}]: must be a mapping")
            continue
        if f.get("kind") not in FAMILY_KINDS:
            errs.append(f"families[{i}].kind: unknown kind {f.get('kind')!r}")
        if f.get("kind") == "power_decay" and not 0.0 <= float(f.get("amplitude", 0.0)) <= 1.0:
            errs.append(f"families[{i}].amplitude: must lie in [0, 1]")
    mr = raw.get("mode_range", {})
    n_min, n_max = int(mr.get("n_min", 0)), int(mr.get("n_max", 300))
    if n_min < 0 or n_max < n_min:
        errs.append(f"mode_range: need 0 <= n_min <= n_max, got ({n_min}, {n_max})")
    tol = float(raw.get("tolerance", 1e-11))
    if not 1e-13 <= tol <= 1e-6:
        errs.append(f"tolerance: must lie in [1e-13, 1e-6], got {tol}")
    pairs = raw.get("time_pairs", list(map(list, DEFAULT_TIME_PAIRS)))
    if not (isinstance(pairs, list) and all(isinstance(p, (list, tuple)) and len(p) == 2 for p in pairs)):
        errs.append("time_pairs: must be a list of [eta0, eta] pairs")
    bd = raw.get("bound_demo", {})
    if isinstance(bd, dict):
        if "D" in bd and not 0.0 < float(bd["D"]) < 1.0:
            errs.append(f"bound_demo.D: must lie strictly inside (0, 1), got {bd['D']}")
        if "delta" in bd and float(bd["delta"]) <= 0.0:
            errs.append("bound_demo.delta: must be > 0")
        if "n0" in bd and int(bd["n0"]) < 1:
            errs.append("bound_demo.n0: must be >= 1")
    else:
        errs.append("bound_demo: must be a mapping")
    thr = raw.get("thresholds", {})
    if isinstance(thr, dict):
        extra = set(thr) - {f.name for f in Thresholds.__dataclass_fields__.values()} - {"margin"}
        extra -= {"cauchy_epsilon", "divergence_threshold", "zero_floor"}
        if extra:
            errs.append(f"thresholds: unknown keys {sorted(extra)}")
    else:
        errs.append("thresholds: must be a mapping")
    return errs


def from_dict(raw: dict) -> RunConfig:
    errs = _validate(raw)
    if errs:
        raise ConfigError(errs)
    bg = raw["background"]
    mr = raw.get("mode_range", {})
    thr = raw.get("thresholds", {})
    bd = raw.get("bound_demo", {})
    profile = bd.get("profile", {"kind": "constant", "value": 0.0})
    pkind = profile.get("kind", "constant")
    pparams = {k: v for k, v in profile.items() if k not in ("kind", "interval")}
    bound = BoundDemoConfig(
        profile_kind=pkind,
        profile_params=pparams,
        interval=tuple(profile.get("interval", (0.0, 1.0))),
        d=float(bd.get("D", 0.5)),
        n0=int(bd.get("n0", 10)),
        delta=float(bd.get("delta", 0.2)),
        omega_mode_range=tuple(bd.get("omega_mode_range", (10, 50))),
        excisions=int(bd.get("excisions", 100)),
    )
    return RunConfig(
        background=dict(bg),
        families=tuple(dict(f) for f in raw.get("families", [])),
        n_min=int(mr.get("n_min", 0)),
        n_max=int(mr.get("n_max", 300)),
        time_pairs=tuple((float(a), float(b)) for a, b in
                         raw.get("time_pairs", list(map(list, DEFAULT_TIME_PAIRS)))),
        tolerance=float(raw.get("tolerance", 1e-11)),
        thresholds=Thresholds(**{k: v for k, v in thr.items()}),
        output_dir=str(raw.get("output_dir", "out")),
        seed=int(raw.get("seed", 0)),
        threads=int(raw.get("threads", 1)),
        bound_demo=bound,
    )


def load(path: str, overrides: Optional[dict] = None) -> RunConfig:
    """Parse a YAML config file, apply command-line overrides, validate."""
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "n_max":
            raw.setdefault("mode_range", {})["n_max"] = value
        elif key in ("tolerance", "seed", "threads", "output_dir"):
            raw[key] = value
        else:
            raw[key] = value
    return from_dict(raw)


def dump(config: RunConfig, path: str) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=True)
