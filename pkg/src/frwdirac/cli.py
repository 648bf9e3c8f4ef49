"""Batch front-end: config-driven sweeps with CSV/JSON artifacts.

Subcommands: evolve, bogoliubov, unitarity, equivalence, conditions, verdict,
bound-demo, all.  Exit codes: 0 success, 1 error, 2 counterexample-candidate
verdict.  Payload files are deterministic for a fixed config and seed;
timestamps live only in run_meta.json.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as config_mod
from .averaging_bound import (bounded_sum_conclusion, lower_bound, sin2_integral,
                              verify_bound_chain, weighted_excised_integral)
from .bogoliubov import bogoliubov_table
from .complex_structure import StructureFamily, check_convention, mixing_table
from .errors import ConfigError
from .mode_dynamics import propagate_batch
from .summability import (COUNTEREXAMPLE, MixedConditionsResult, dynamics_unitarity,
                          equivalence, mixed_conditions, sine_weighted_conditions,
                          uniqueness_verdict)

ENV_OUT = "FRWDIRAC_OUT"


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class Emitter:
    """Serialized artifact writer; records content hashes for the manifest."""

    def __init__(self, outdir: str, resolved_config: dict):
        self.outdir = outdir
        self.config = resolved_config
        self.hashes = {}
        os.makedirs(outdir, exist_ok=True)

    def csv(self, name: str, header, rows):
        path = os.path.join(self.outdir, name)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
            writer.writerow(header)
            writer.writerows(rows)
        with open(path, "rb") as fh:
            self.hashes[name] = _sha256(fh.read())

    def json(self, name: str, results) -> None:
        body = json.dumps(results, sort_keys=True, indent=2, default=_json_default)
        payload = {"config": self.config, "content_hash": _sha256(body.encode()), "results": results}
        path = os.path.join(self.outdir, name)
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2, default=_json_default)
            fh.write("\n")
        with open(path, "rb") as fh:
            self.hashes[name] = _sha256(fh.read())

    def finish(self) -> None:
        manifest = {"config": self.config, "files": dict(sorted(self.hashes.items()))}
        with open(os.path.join(self.outdir, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
            fh.write("\n")
        meta = {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                "output_dir": os.path.abspath(self.outdir)}
        with open(os.path.join(self.outdir, "run_meta.json"), "w") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "as_dict"):
        return obj.as_dict()
    from dataclasses import asdict, is_dataclass
    if is_dataclass(obj):
        return asdict(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _tables(cfg, background):
    """Bogoliubov tables for every configured time pair, optionally in parallel."""
    ns = np.arange(cfg.n_min, cfg.n_max + 1)
    pairs = list(cfg.time_pairs)

    def one(pair):
        eta0, eta = pair
        return pair, bogoliubov_table(background, ns, eta0, eta, cfg.tolerance)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return ns, dict(pool.map(one, pairs))
    return ns, dict(map(one, pairs))


def cmd_evolve(cfg, emitter):
    background = cfg.build_background()
    ns = np.arange(cfg.n_min, cfg.n_max + 1)
    rows = []
    for eta0, eta in cfg.time_pairs:
        phis = propagate_batch(background, ns, eta0, eta, cfg.tolerance)
        eye = np.eye(2)
        udef = np.max(np.abs(np.einsum("nji,njk->nik", phis.conj(), phis) - eye), axis=(1, 2))
        ddef = np.abs(phis[:, 0, 0] * phis[:, 1, 1] - phis[:, 0, 1] * phis[:, 1, 0] - 1.0)
        for i, n in enumerate(ns):
            p = phis[i]
            rows.append([n, _fmt(n + 1.5), _fmt(eta0), _fmt(eta)]
                        + [_fmt(v) for entry in p.ravel() for v in (entry.real, entry.imag)]
                        + [_fmt(udef[i]), _fmt(ddef[i])])
    emitter.csv("propagators.csv",
                ["n", "omega", "eta0", "eta",
                 "re_phi00", "im_phi00", "re_phi01", "im_phi01",
                 "re_phi10", "im_phi10", "re_phi11", "im_phi11",
                 "unitarity_defect", "det_defect"], rows)
    return 0


def cmd_bogoliubov(cfg, emitter):
    background = cfg.build_background()
    ns, tables = _tables(cfg, background)
    g = (ns + 1) * (ns + 2)
    rows = []
    for (eta0, eta), tab in tables.items():
        eye = np.eye(2)
        udef = np.max(np.abs(np.einsum("nji,njk->nik", tab.conj(), tab) - eye), axis=(1, 2))
        for i, n in enumerate(ns):
            b = tab[i]
            rows.append([n, _fmt(n + 1.5), int(g[i]), _fmt(eta0), _fmt(eta),
                         _fmt(b[0, 0].real), _fmt(b[0, 0].imag), _fmt(b[0, 1].real), _fmt(b[0, 1].imag),
                         _fmt(b[1, 0].real), _fmt(b[1, 0].imag), _fmt(b[1, 1].real), _fmt(b[1, 1].imag),
                         _fmt(udef[i])])
    emitter.csv("bogoliubov.csv",
                ["n", "omega", "g", "eta0", "eta",
                 "re_alpha_f", "im_alpha_f", "re_beta_f", "im_beta_f",
                 "re_beta_g", "im_beta_g", "re_alpha_g", "im_alpha_g",
                 "unitarity_defect"], rows)
    return 0


def cmd_unitarity(cfg, emitter):
    background = cfg.build_background()
    ns, tables = _tables(cfg, background)
    g = (ns + 1.0) * (ns + 2.0)
    reports, rows = {}, []
    for (eta0, eta), tab in tables.items():
        rep = dynamics_unitarity(background, eta0, eta, cfg.n_max, cfg.tolerance,
                                 cfg.thresholds, table=tab)
        reports[f"eta0={eta0},eta={eta}"] = rep
        vals = g * (np.abs(tab[:, 0, 1]) ** 2 + np.abs(tab[:, 1, 0]) ** 2)
        rows += [["dynamics-unitarity", _fmt(eta0), _fmt(eta), int(n), _fmt(v)]
                 for n, v in zip(ns, vals)]
    emitter.csv("unitarity_terms.csv", ["criterion", "eta0", "eta", "n", "summand"], rows)
    emitter.json("unitarity.json", reports)
    return 0


def cmd_equivalence(cfg, emitter):
    reports, rows = {}, []
    ns = np.arange(cfg.n_min, cfg.n_max + 1)
    g = (ns + 1.0) * (ns + 2.0)
    for family in cfg.build_families():
        rep = equivalence(family, cfg.n_max, cfg.thresholds)
        reports[family.name] = rep
        k = mixing_table(family, ns)
        vals = g * (np.abs(k[:, 0, 1]) ** 2 + np.abs(k[:, 1, 0]) ** 2)
        rows += [["equivalence", family.name, int(n), _fmt(v)] for n, v in zip(ns, vals)]
    emitter.csv("equivalence_terms.csv", ["criterion", "family", "n", "summand"], rows)
    emitter.json("equivalence.json", reports)
    return 0


def cmd_conditions(cfg, emitter):
    background = cfg.build_background()
    ns, tables = _tables(cfg, background)
    reports = {}
    for family in cfg.build_families():
        per_pair = {}
        for (eta0, eta), tab in tables.items():
            mixed = mixed_conditions(family, background, eta0, eta, cfg.n_max,
                                     cfg.tolerance, cfg.thresholds, table=tab)
            sine_f, sine_g = sine_weighted_conditions(family, background, eta0, eta,
                                                      cfg.n_max, cfg.tolerance,
                                                      cfg.thresholds, table=tab)
            per_pair[f"eta0={eta0},eta={eta}"] = {
                "mixed_f": mixed.mixed_f, "mixed_g": mixed.mixed_g,
                "precursor_f": mixed.precursor_f, "precursor_g": mixed.precursor_g,
                "sine_f": sine_f, "sine_g": sine_g,
            }
        reports[family.name] = per_pair
    emitter.json("conditions.json", reports)
    return 0


def cmd_verdict(cfg, emitter):
    background = cfg.build_background()
    ns, tables = _tables(cfg, background)
    records = {}
    exit_code = 0
    for family in cfg.build_families():
        rec = uniqueness_verdict(family, background, cfg.time_pairs, cfg.n_max,
                                 cfg.tolerance, cfg.thresholds, tables=tables)
        records[family.name] = rec
        if rec.outcome == COUNTEREXAMPLE:
            exit_code = 2
    emitter.json("verdicts.json", records)
    return exit_code


def cmd_bound_demo(cfg, emitter):
    bd = cfg.bound_demo
    profile = bd.build_profile()
    lam = lower_bound(profile, bd.d, bd.n0)
    lo, hi = bd.omega_mode_range
    omegas = [n + 1.5 for n in range(int(lo), int(hi) + 1)]
    chain = verify_bound_chain(profile, bd.d, bd.n0, bd.delta, omegas,
                               n_random=max(1, bd.excisions - 5), seed=cfg.seed)
    # demo of the final conclusion with a compliant power-decay family
    ns = np.arange(bd.n0, cfg.n_max + 1)
    k = mixing_table(StructureFamily(kind="power_decay", amplitude=1.0, exponent=2.0,
                                     convention_floor=0.9), ns)
    weights = (ns + 1.0) * (ns + 2.0) * np.abs(k[:, 0, 0] * k[:, 0, 1]) ** 2
    excised = [(profile.interval[0], profile.interval[0] + 0.95 * bd.delta)]
    i_delta = weighted_excised_integral(profile, ns + 1.5, weights, excised)
    partial = np.cumsum(weights)
    bound = bounded_sum_conclusion(list(zip(ns.tolist(), partial.tolist())), i_delta, lam, bd.delta)
    emitter.json("bound_demo.json", {
        "lambda_n0": lam,
        "chain": chain,
        "i_delta": i_delta,
        "partial_sum_bound": bound,
        "max_partial_sum": float(partial[-1]),
        "full_interval_integral_at_n0": sin2_integral(bd.n0 + 1.5, profile),
    })
    return 0 if chain.passed else 1


COMMANDS = {
    "evolve": cmd_evolve,
    "bogoliubov": cmd_bogoliubov,
    "unitarity": cmd_unitarity,
    "equivalence": cmd_equivalence,
    "conditions": cmd_conditions,
    "verdict": cmd_verdict,
    "bound-demo": cmd_bound_demo,
}


def cmd_all(cfg, emitter):
    worst = 0
    for name in ("evolve", "bogoliubov", "unitarity", "equivalence",
                 "conditions", "verdict", "bound-demo"):
        code = COMMANDS[name](cfg, emitter)
        worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frwdirac",
        description="Mode-by-mode Bogoliubov dynamics of the Dirac field on a "
                    "closed FRW background, with summability verdicts.")
    parser.add_argument("subcommand", choices=list(COMMANDS) + ["all"])
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--n-max", type=int, default=None, help="override mode_range.n_max")
    parser.add_argument("--tolerance", type=float, default=None, help="override integration tolerance")
    parser.add_argument("--out", default=None, help="override output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the run seed")
    parser.add_argument("--threads", type=int, default=None, help="override worker count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_mod.load(args.config, overrides={
            "n_max": args.n_max,
            "tolerance": args.tolerance,
            "seed": args.seed,
            "threads": args.threads,
            "output_dir": args.out or os.environ.get(ENV_OUT),
        })
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emitter = Emitter(cfg.output_dir, cfg.to_dict())
    try:
        if args.subcommand == "all":
            code = cmd_all(cfg, emitter)
        else:
            code = COMMANDS[args.subcommand](cfg, emitter)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emitter.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
