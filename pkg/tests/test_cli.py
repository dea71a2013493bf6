"""CLI subcommands: dispatch, overrides, fit, and error reporting."""

import json

import numpy as np
import pytest

from moneta.cli import cli_dispatch


def write_cfg(tmp_path, text):
    f = tmp_path / "exp.cfg"
    f.write_text(text)
    return str(f)


SERIES = """
kind = strength-series
n_agents = 10
threshold = 2.5
horizon = 30
n_realizations = 2
base_seed = 4
workers = 1
output_dir = {out}
"""


def test_validate_ok(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SERIES.format(out=tmp_path / "o"))
    assert cli_dispatch(["validate", "--config", cfg]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_bad_config(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "kind = bogus\n")
    assert cli_dispatch(["validate", "--config", cfg]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error: ConfigError:")


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = write_cfg(tmp_path, SERIES.format(out=out))
    assert cli_dispatch(["run", "--config", cfg]) == 0
    assert (out / "strength_series.csv").exists()
    assert (out / "manifest.json").exists()


def test_run_stream_prints_records(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SERIES.format(out=tmp_path / "o"))
    assert cli_dispatch(["run", "--config", cfg, "--stream"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,v_max,j_max"
    assert len(lines) == 1 + 30
    t, v, j = lines[1].split(",")
    assert t == "1" and float(v) >= 1.0 and 1 <= int(j) <= 10


def test_kind_mismatch_is_an_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SERIES.format(out=tmp_path / "o"))
    assert cli_dispatch(["sweep", "--config", cfg]) == 1
    assert "does not match subcommand" in capsys.readouterr().err


def test_seed_and_out_overrides(tmp_path):
    cfg = write_cfg(tmp_path, SERIES.format(out=tmp_path / "ignored"))
    out = tmp_path / "override"
    assert cli_dispatch(["run", "--config", cfg, "--seed", "123", "--out", str(out)]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["config"]["base_seed"] == 123


def test_bad_workers_override(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SERIES.format(out=tmp_path / "o"))
    assert cli_dispatch(["run", "--config", cfg, "--workers", "0"]) == 1
    assert "error:" in capsys.readouterr().err


def test_lifetimes_then_refit(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = write_cfg(
        tmp_path,
        f"""
kind = lifetimes
n_agents = 10
threshold = 2.5
horizon = 4000
n_realizations = 4
base_seed = 7
lifetime_low_cutoff = 2
lifetime_high_cutoff = 4000
fit_window_lo = 10
workers = 1
output_dir = {out}
""",
    )
    assert cli_dispatch(["lifetimes", "--config", cfg]) == 0
    hist = out / "histogram.csv"
    assert hist.exists()

    fit_out = out / "refit.json"
    assert (
        cli_dispatch(["fit", "--in", str(hist), "--window", "10:4000", "--out", str(fit_out)])
        == 0
    )
    refit = json.loads(fit_out.read_text())
    assert refit["window"] == [10.0, 4000.0]
    assert np.isfinite(refit["alpha"]) and refit["A"] > 0


def test_fit_rejects_bad_window(tmp_path, capsys):
    assert cli_dispatch(["fit", "--in", "x.csv", "--window", "100:10"]) == 1
    assert "error: FitError" in capsys.readouterr().err


def test_fit_rejects_missing_or_bad_file(tmp_path, capsys):
    assert cli_dispatch(["fit", "--in", str(tmp_path / "nope.csv"), "--window", "10:100"]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert cli_dispatch(["fit", "--in", str(bad), "--window", "10:100"]) == 1
    assert "bad header" in capsys.readouterr().err
