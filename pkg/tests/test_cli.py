import json
import math
import os

import pytest

from grig import __version__, analytics
from grig.cli import main
from grig.config import config_from_dict, default_sweep_values, load_config, resolve_torus
from grig.errors import ConfigError
from grig.experiments import build_profile

GAUSS = {"family": "gaussian", "sigma": 1.0, "norm": 1.0, "d": 2}
BOOL = {"family": "boolean", "r": 1.0, "d": 2}


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _degrees_cfg(tmp_path, **extra):
    payload = {
        "kind": "degrees",
        "kernel": GAUSS,
        "torus": {"d": 2, "measure": "side", "value": 12.0},
        "lambda": 1.0,
        "mu": 1.0,
        "replicates": 2,
        "seed": 11,
        "threads": 1,
    }
    payload.update(extra)
    return _write(tmp_path, "cfg.json", payload)


# ---------------------------------------------------------------------------
# config layer


def test_config_defaults():
    cfg = config_from_dict({"kind": "degrees", "kernel": GAUSS})
    assert cfg.torus.d == 2
    assert cfg.torus.side == pytest.approx(math.sqrt(1000.0))
    assert cfg.replicates == 10
    assert cfg.seed == 0
    assert cfg.mode == "auto"
    assert cfg.eps_tail == 1e-3
    assert cfg.confidence == 0.99


def test_config_phase_default_grids():
    cfg = config_from_dict({"kind": "phase", "kernel": GAUSS})
    assert cfg.lambda_values == default_sweep_values()
    assert len(cfg.lambda_values) == 16
    assert cfg.lambda_values[0] == pytest.approx(0.25)
    assert cfg.lambda_values[-1] == pytest.approx(4.0)
    assert cfg.mu_values == cfg.lambda_values


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown config keys"):
        config_from_dict({"kind": "degrees", "kernel": GAUSS, "lambda_": 1.0})
    with pytest.raises(ConfigError, match="unknown profile keys"):
        config_from_dict({"kind": "degrees", "kernel": GAUSS, "profile": {"tolx": 1}})
    with pytest.raises(ConfigError, match="unknown torus keys"):
        resolve_torus({"d": 2, "value": 4.0, "shape": "square"})


def test_config_dimension_mismatch():
    with pytest.raises(ConfigError, match="does not match"):
        config_from_dict(
            {"kind": "degrees", "kernel": GAUSS, "torus": {"d": 3, "value": 1000.0}}
        )


def test_config_torus_side_measure():
    torus = resolve_torus({"d": 3, "measure": "side", "value": 4.0})
    assert torus.side == 4.0
    assert resolve_torus({"d": 2, "measure": "area", "value": 49.0}).side == pytest.approx(7.0)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "nope.json"))


# ---------------------------------------------------------------------------
# exit codes


def test_cli_degrees_ok(tmp_path, capsys):
    cfg = _degrees_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["degrees", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    # concavity of 1 - exp(-f) keeps the mean under lambda*mu*||g||^2 = 1
    assert 0.9 < summary["theoretical_mean"] < 1.0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["version"] == __version__
    assert manifest["subcommand"] == "degrees"
    assert manifest["status"] == "ok"
    assert manifest["error"] is None
    assert manifest["config"]["seed"] == 11
    assert manifest["outputs"] == ["histogram.csv", "report.json"]


def test_cli_config_error_writes_nothing(tmp_path, capsys):
    bad = _write(tmp_path, "bad.json", {"kind": "degrees", "kernel": GAUSS, "typo": 1})
    out = tmp_path / "out"
    assert main(["degrees", "--config", bad, "--out", str(out)]) == 2
    captured = capsys.readouterr()
    assert "config error" in captured.err
    assert captured.out == ""
    assert not out.exists()


def test_cli_missing_config_file(tmp_path):
    assert main(["degrees", "--config", str(tmp_path / "gone.json"), "--out", str(tmp_path)]) == 2


def test_cli_validate_rejects_other_kinds(tmp_path, capsys):
    cfg = _degrees_cfg(tmp_path)
    assert main(["validate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "joint_groups" in capsys.readouterr().err


def test_cli_bad_override_values(tmp_path):
    cfg = _degrees_cfg(tmp_path)
    out = str(tmp_path / "o")
    assert main(["degrees", "--config", cfg, "--out", out, "--seed", "-1"]) == 2
    assert main(["degrees", "--config", cfg, "--out", out, "--replicates", "0"]) == 2
    assert main(["degrees", "--config", cfg, "--out", out, "--threads", "0"]) == 2


def test_cli_runtime_failure_partial_manifest(tmp_path, capsys):
    cfg = _write(
        tmp_path,
        "cfg.json",
        {
            "kind": "degrees",
            "kernel": {"family": "powerlaw", "alpha": 2.5, "amplitude": 0.8, "d": 2},
            "torus": {"d": 2, "measure": "side", "value": 12.0},
            "lambda": 0.5,
            "mu": 0.5,
            "replicates": 2,
            "seed": 2,
            "threads": 1,
            "profile": {"tol": 1e-6, "max_refinements": 2, "n_radii": 256},
        },
    )
    out = tmp_path / "out"
    assert main(["degrees", "--config", cfg, "--out", str(out)]) == 1
    assert "error:" in capsys.readouterr().err
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "partial"
    assert manifest["error"].startswith("ConvergenceError")
    # artifacts from the partial run are still listed
    assert "report.json" in manifest["outputs"]
    assert "histogram.csv" in manifest["outputs"]


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


# ---------------------------------------------------------------------------
# subcommand behavior


def test_cli_validate_joint_groups(tmp_path, capsys):
    cfg = _write(
        tmp_path,
        "cfg.json",
        {
            "kind": "joint_groups",
            "kernel": BOOL,
            "torus": {"d": 2, "measure": "side", "value": 12.0},
            "mu": 2.0,
            "replicates": 300,
            "seed": 3,
            "threads": 1,
            "probe_distances": [0.0, 1.0, 3.0],
        },
    )
    out = tmp_path / "out"
    assert main(["validate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["kind"] == "joint_groups"
    report = json.loads((out / "report.json").read_text())
    assert {p["t"] for p in report["probes"]} == {0.0, 1.0, 3.0}


def test_cli_validate_connection(tmp_path, capsys):
    cfg = _write(
        tmp_path,
        "cfg.json",
        {
            "kind": "connection",
            "kernel": BOOL,
            "torus": {"d": 2, "measure": "side", "value": 12.0},
            "mu": 1.5,
            "replicates": 250,
            "seed": 6,
            "threads": 1,
            "probe_distances": [0.5, 2.5],
        },
    )
    out = tmp_path / "out"
    assert main(["validate", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert len(report["probes"]) == 2


def test_cli_phase_and_grid_override(tmp_path, capsys):
    cfg = _write(
        tmp_path,
        "cfg.json",
        {
            "kind": "phase",
            "kernel": BOOL,
            "torus": {"d": 2, "measure": "side", "value": 10.0},
            "lambda_values": [0.5, 1.5],
            "mu_values": [0.5, 1.5],
            "replicates": 5,
            "seed": 5,
            "threads": 1,
        },
    )
    out = tmp_path / "out"
    assert main(["phase", "--config", cfg, "--out", str(out), "--replicates", "2"]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary == {"cells": 4, "failures": 0, "replicates": 2}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["replicates"] == 2
    rows = (out / "phase.csv").read_text().strip().splitlines()
    assert len(rows) == 3
    for row in rows[1:]:
        for cell in row.split(",")[1:]:
            assert 0.0 <= float(cell) <= 1.0


def test_cli_sample_and_visualize(tmp_path, capsys):
    cfg = _degrees_cfg(tmp_path, kind="sample")
    out = tmp_path / "s"
    assert main(["sample", "--config", cfg, "--out", str(out), "--seed", "4"]) == 0
    assert (out / "vertices.csv").exists() and (out / "groups.csv").exists()
    out2 = tmp_path / "v"
    assert main(["visualize", "--config", cfg, "--out", str(out2)]) == 0
    assert (out2 / "scene.svg").exists()
    capsys.readouterr()


# ---------------------------------------------------------------------------
# analytics subcommand


def test_cli_analytics_matches_library(tmp_path, capsys):
    cfg_path = _degrees_cfg(tmp_path, kind="analytics", **{"lambda": 2.0, "mu": 2.0})
    out = tmp_path / "out"
    code = main(
        ["analytics", "--config", cfg_path, "--out", str(out), "--quantity", "expected-degree"]
    )
    assert code == 0
    record = json.loads((out / "analytics.json").read_text())
    cfg = load_config(cfg_path, kind="analytics")
    expected = analytics.expected_degree(build_profile(cfg), 2.0, 2.0)
    assert record["value"] == pytest.approx(expected, rel=1e-12)
    assert record["quantity"] == "expected_degree"
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["value"] == record["value"]


def test_cli_analytics_kernel_norm_and_profile(tmp_path, capsys):
    cfg = _degrees_cfg(tmp_path, kind="analytics")
    out1 = tmp_path / "n"
    assert main(["analytics", "--config", cfg, "--out", str(out1), "--quantity", "kernel-norm"]) == 0
    record = json.loads((out1 / "analytics.json").read_text())
    assert record["value"] == pytest.approx(1.0, rel=1e-12)
    out2 = tmp_path / "p"
    assert main(["analytics", "--config", cfg, "--out", str(out2), "--quantity", "profile"]) == 0
    assert (out2 / "profile.csv").read_text().startswith("radius,f")
    capsys.readouterr()


def test_cli_analytics_connection_probability_needs_t(tmp_path, capsys):
    cfg = _degrees_cfg(tmp_path, kind="analytics")
    out = tmp_path / "out"
    code = main(
        ["analytics", "--config", cfg, "--out", str(out), "--quantity", "connection-probability"]
    )
    assert code == 1  # runtime config problem: manifest records failure
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "partial"
    code = main(
        [
            "analytics",
            "--config",
            cfg,
            "--out",
            str(tmp_path / "ok"),
            "--quantity",
            "connection-probability",
            "--t",
            "0.5",
        ]
    )
    assert code == 0
    capsys.readouterr()


def test_cli_analytics_offspring_and_bounds(tmp_path, capsys):
    cfg = _degrees_cfg(tmp_path, kind="analytics", **{"lambda": 0.25, "mu": 1.0})
    out = tmp_path / "o"
    assert main(["analytics", "--config", cfg, "--out", str(out), "--quantity", "offspring-mean"]) == 0
    record = json.loads((out / "analytics.json").read_text())
    assert record["value"] == pytest.approx(0.25, rel=1e-12)
    assert record["subcritical"] is True
    cfg_bool = _degrees_cfg(tmp_path, kind="analytics", kernel=BOOL, mu=1.0)
    out2 = tmp_path / "b"
    code = main(["analytics", "--config", cfg_bool, "--out", str(out2), "--quantity", "degree-bounds"])
    assert code == 0
    bounds = json.loads((out2 / "analytics.json").read_text())
    # 1/mu = 1 sits below f(0) = pi, so the bracket is finite and ordered
    assert 0.0 < bounds["bracket_low"] <= bounds["bracket_high"] < math.inf
    assert bounds["bracket_high"] == pytest.approx(1.0 * math.pi * 4.0, rel=1e-12)
    capsys.readouterr()


# ---------------------------------------------------------------------------
# output directory resolution and determinism


def test_cli_out_dir_from_env(tmp_path, monkeypatch, capsys):
    cfg = _degrees_cfg(tmp_path, kind="sample")
    env_dir = tmp_path / "env-out"
    monkeypatch.setenv("GRIG_OUT", str(env_dir))
    assert main(["sample", "--config", cfg]) == 0
    assert (env_dir / "manifest.json").exists()
    capsys.readouterr()


def test_cli_out_dir_default(tmp_path, monkeypatch, capsys):
    cfg = _degrees_cfg(tmp_path, kind="sample")
    monkeypatch.delenv("GRIG_OUT", raising=False)
    monkeypatch.chdir(tmp_path)
    assert main(["sample", "--config", cfg]) == 0
    assert (tmp_path / "grig-out" / "manifest.json").exists()
    capsys.readouterr()


def test_cli_reruns_are_byte_identical(tmp_path, capsys):
    cfg = _degrees_cfg(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["degrees", "--config", cfg, "--out", str(out_a)]) == 0
    assert main(["degrees", "--config", cfg, "--out", str(out_b)]) == 0
    names = sorted(os.listdir(out_a))
    assert names == sorted(os.listdir(out_b))
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    capsys.readouterr()
