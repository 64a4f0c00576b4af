import json
import subprocess
import sys

import numpy as np
import pytest

from sagnac_nli import cli, formats


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_reference(capsys):
    code, out, _ = run(capsys, "simulate", "--gain", "1.5", "--alpha2", "1", "--phi", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["exact"]["mean_c"] == pytest.approx(6.0, rel=1e-12)
    assert rep["exact"]["var_c"] == pytest.approx(33.0, rel=1e-12)


def test_simulate_dark_and_unit_gain(capsys):
    _, out, _ = run(capsys, "simulate", "--phi", str(np.pi / 2))
    assert json.loads(out)["exact"]["mean_c"] == pytest.approx(0.0, abs=1e-9)
    _, out, _ = run(capsys, "simulate", "--gain", "1", "--phi", "0.3")
    assert json.loads(out)["exact"]["mean_c"] == pytest.approx(0.0, abs=1e-12)


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"g1": 3.0, "g2": 3.0, "alpha2": 10.0}))
    _, out, _ = run(capsys, "simulate", "--config", str(cfg), "--phi", "0")
    assert json.loads(out)["closed_form"]["mean_c"] == pytest.approx(4 * 3 * 2 * 10)
    _, out, _ = run(capsys, "simulate", "--config", str(cfg), "--alpha2", "20", "--phi", "0")
    assert json.loads(out)["closed_form"]["mean_c"] == pytest.approx(4 * 3 * 2 * 20)


def test_sweep_endpoints_and_fringe(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "sweep", "--n", "2", "--k-const", "1", "--floor-dbm", "-200",
                     "--out", str(out))
    assert code == 0
    scan = formats.csv_to_scan(out.read_bytes())
    assert scan.phi.tolist() == [0.0, pytest.approx(np.pi)]
    manifest = json.loads((tmp_path / "scan.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "sweep" and manifest["outputs"] == [str(out)]

    _, text, _ = run(capsys, "sweep", "--n", "5", "--k-const", "1", "--closed-form")
    scan5 = formats.csv_to_scan(text)
    # K <n^2> + floor at the bright point, with <n> = 800
    assert scan5.p_sideband[0] == pytest.approx(640800 + 1e-12, rel=1e-12)
    # the exact model keeps the spontaneous terms, <n> = 8 (alpha2 + 1) = 808
    assert scan.p_sideband[0] == pytest.approx(808**2 + 13672, rel=1e-12)


def test_synth_writes_traces_scan_and_manifest(tmp_path, capsys):
    code, _, _ = run(capsys, "synth", "--n", "5", "--seed", "3", "--out", str(tmp_path / "s"))
    assert code == 0
    files = sorted(p.name for p in (tmp_path / "s").iterdir())
    assert files == ["manifest.json", "scan.csv"] + [f"trace_{i:04d}.csv" for i in range(5)]
    man = json.loads((tmp_path / "s" / "manifest.json").read_text())
    assert man["seed"] == 3 and len(man["outputs"]) == 6


def test_synth_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        run(capsys, "synth", "--n", "8", "--seed", "11", "--out", str(tmp_path / d))
    for f in (tmp_path / "a").glob("*.csv"):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
    run(capsys, "synth", "--n", "8", "--seed", "12", "--out", str(tmp_path / "c"))
    assert (tmp_path / "a" / "scan.csv").read_bytes() != (tmp_path / "c" / "scan.csv").read_bytes()


def test_synth_needs_out(capsys):
    code, _, err = run(capsys, "synth", "--n", "3")
    assert code == 1
    assert json.loads(err)["subcommand"] == "synth"


def test_fit_and_noise_pipeline(tmp_path, capsys):
    run(capsys, "synth", "--n", "60", "--gain", "4.1", "--alpha2", "1e4", "--out", str(tmp_path))
    code, out, _ = run(capsys, "fit", str(tmp_path / "scan.csv"), "--weighting", "relative",
                       "--bootstrap", "100")
    assert code == 0
    rep = json.loads(out)
    assert {"c0", "c1", "c2", "cov", "visibility", "visibility_sigma", "residual_rms",
            "phi_offset", "phi_scale"} <= set(rep)
    assert rep["visibility"] > 0.99
    assert rep["visibility_sigma_bootstrap"] > 0

    code, out, _ = run(capsys, "noise", str(tmp_path / "scan.csv"), "--n-boot", "50")
    assert code == 0
    rep = json.loads(out)
    assert rep["degree"] == 3 and rep["n_included"] + rep["n_excluded"] == 60


def test_fit_reports_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("phi,power\n0,1\n")
    code, _, err = run(capsys, "fit", str(bad))
    assert code == 1
    diag = json.loads(err)
    assert diag["error"] == "FormatError" and "phi_rad" in diag["message"]
    code, _, err = run(capsys, "fit", str(tmp_path / "missing.csv"))
    assert code == 1 and json.loads(err)["error"] == "FileNotFoundError"


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "--gain", "4", "--alpha2", "1e6")
    rep = json.loads(out)
    assert code == 0
    assert rep["ratio"] == pytest.approx(rep["dphi_sql"] / rep["dphi_nli"])
    assert rep["ratio"] == pytest.approx(2 * np.sqrt(12.0), rel=1e-3)


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--n-cases", "3")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "oracle-check", "--n-cases", "3", "--inject-fault")
    assert code == 1 and not json.loads(out)["passed"]
    code, _, err = run(capsys, "oracle-check", "--n-cases", "0")
    assert code == 1 and "n_cases" in json.loads(err)["message"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sagnac_nli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "sagnac-nli" in res.stdout
