import json
import pathlib

import pytest
import yaml

import frwdirac.cli as cli
import frwdirac.config as config_mod
from frwdirac.errors import ConfigError


def _base_config(n_max=260):
    return {
        "background": {"kind": "constant", "alpha": 0.0, "mass": 1.0,
                       "domain": [0.0, 2.0]},
        "families": [
            {"kind": "identity", "convention_floor": 0.99},
            {"kind": "power_decay", "name": "p2", "amplitude": 0.5,
             "exponent": 2.0, "convention_floor": 0.8},
            {"kind": "random_phase", "amplitude": 0.3, "seed": 7,
             "convention_floor": 0.9},
        ],
        "mode_range": {"n_min": 0, "n_max": n_max},
        "time_pairs": [[0.15, 0.6], [0.6, 1.35], [0.15, 1.35]],
        "tolerance": 1e-10,
        "seed": 42,
        "threads": 2,
        "bound_demo": {
            "profile": {"kind": "constant", "value": 0.0, "interval": [0.0, 1.0]},
            "D": 0.5, "n0": 10, "delta": 0.2,
            "omega_mode_range": [10, 30], "excisions": 20,
        },
    }


def _write_config(tmp_path, raw, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(raw))
    return str(path)


def test_config_round_trip(tmp_path):
    path = _write_config(tmp_path, _base_config())
    cfg = config_mod.load(path)
    assert cfg.n_max == 260
    assert cfg.tolerance == 1e-10
    assert cfg.build_background().mu(1.0) == 1.0
    fams = cfg.build_families()
    assert len(fams) == 3 and fams[1].exponent == 2.0
    assert cfg.bound_demo.build_profile().interval == (0.0, 1.0)
    # the dict echo drops nothing needed to rebuild the run
    echo = cfg.to_dict()
    cfg2 = config_mod.from_dict(echo)
    assert cfg2.to_dict() == echo


def test_config_collects_every_violation(tmp_path):
    raw = _base_config()
    raw["background"]["kind"] = "desitter"
    raw["background"]["mass"] = -2.0
    raw["tolerance"] = 0.5
    raw["families"].append({"kind": "power_decay", "amplitude": 7.0})
    path = _write_config(tmp_path, raw)
    with pytest.raises(ConfigError) as err:
        config_mod.load(path)
    text = str(err.value)
    for fragment in ("background.kind", "background.mass", "tolerance",
                     "families[3].amplitude"):
        assert fragment in text


def test_cli_rejects_bad_config(tmp_path, capsys):
    raw = _base_config()
    raw["tolerance"] = 1.0
    path = _write_config(tmp_path, raw)
    assert cli.main(["unitarity", "--config", path]) == 1
    assert "tolerance" in capsys.readouterr().err


def test_cli_overrides_win(tmp_path):
    path = _write_config(tmp_path, _base_config())
    out = tmp_path / "out"
    code = cli.main(["bound-demo", "--config", path, "--out", str(out),
                     "--seed", "5"])
    assert code == 0
    payload = json.loads((out / "bound_demo.json").read_text())
    assert payload["config"]["seed"] == 5
    assert payload["results"]["chain"]["passed"] is True


def test_cli_unitarity_artifacts(tmp_path):
    path = _write_config(tmp_path, _base_config())
    out = tmp_path / "out"
    assert cli.main(["unitarity", "--config", path, "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"unitarity.json", "unitarity_terms.csv", "manifest.json",
            "run_meta.json"} <= names
    manifest = json.loads((out / "manifest.json").read_text())
    report = json.loads((out / "unitarity.json").read_text())
    assert "content_hash" in report
    for pair_report in report["results"].values():
        assert pair_report["verdict"] == "convergent"


def test_cli_all_is_deterministic(tmp_path):
    path = _write_config(tmp_path, _base_config())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["all", "--config", path, "--out", str(out1)]) == 0
    assert cli.main(["all", "--config", path, "--out", str(out2)]) == 0
    for f in sorted(out1.iterdir()):
        if f.name == "run_meta.json":
            continue  # timestamps live here by design
        assert f.read_bytes() == (out2 / f.name).read_bytes(), f.name


def test_cli_exit_2_on_counterexample(tmp_path, monkeypatch):
    import numpy as np

    from frwdirac import WeightedSequence, analyze, equivalence
    from frwdirac.complex_structure import check_convention
    from frwdirac.summability import COUNTEREXAMPLE, VerdictRecord

    ns = np.arange(1, 300)
    rep = analyze(WeightedSequence(ns, ns**-3.0, "stub"))

    def fake_verdict(family, background, time_pairs, n_max, tolerance=1e-11,
                     thresholds=None, tables=None):
        return VerdictRecord(family=family.name, outcome=COUNTEREXAMPLE,
                             reason="forced by test",
                             convention=check_convention(family, 10),
                             equivalence=rep,
                             sine_reports=((0.1, 0.5, rep, rep),))

    monkeypatch.setattr(cli, "uniqueness_verdict", fake_verdict)
    path = _write_config(tmp_path, _base_config())
    code = cli.main(["verdict", "--config", path, "--out", str(tmp_path / "out")])
    assert code == 2


def test_env_var_output_dir(tmp_path, monkeypatch):
    path = _write_config(tmp_path, _base_config())
    out = tmp_path / "from_env"
    monkeypatch.setenv(cli.ENV_OUT, str(out))
    assert cli.main(["bound-demo", "--config", path]) == 0
    assert (out / "bound_demo.json").exists()
