import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

EXE = os.environ.get("TWISTAB_EXE", "build/twistab")


def run(tmp_path, config, command, name="out", extra=()):
    cfg = tmp_path / f"{name}.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / name
    proc = subprocess.run(
        [EXE, "--config", str(cfg), "--out", str(out), "--command", command, *extra],
        capture_output=True,
        text=True,
    )
    return proc, out


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_mz_scan_contains_bg_row(tmp_path):
    proc, out = run(tmp_path, {}, "mz-scan")
    assert proc.returncode == 0, proc.stderr
    with open(out / "mz_scan.csv") as f:
        rows = list(csv.DictReader(f))
    hit = [r for r in rows if abs(float(r["z_A"]) - 3.35) < 1e-12]
    assert len(hit) == 1
    assert abs(float(hit[0]["closed_meV"]) - -483.5) <= 0.5
    assert float(rows[0]["z_A"]) == pytest.approx(3.0)
    assert float(rows[-1]["z_A"]) == pytest.approx(4.5)
    assert hit[0]["product_derived_meV"] == "nan"
    m = manifest(out)
    assert m["status"] == "ok"
    assert m["files"] == ["mz_scan.csv", "mz_report.json"]
    assert len(m["config_sha256"]) == 64


def test_well_report_gsfe(tmp_path):
    proc, out = run(tmp_path, {}, "well-report")
    assert proc.returncode == 0
    report = json.loads((out / "well_report.json").read_text())
    assert abs(report["min_eig_AB_meV"] - 117.0) <= 0.5


def test_well_report_lattice_sum_table(tmp_path):
    cfg = {"misfit": {"source": "lattice_sum"}, "potential": {"kind": "morse"}}
    proc, out = run(tmp_path, cfg, "well-report")
    assert proc.returncode == 0
    lines = (out / "well_report.csv").read_text().splitlines()
    assert lines[0] == "n,min_eig_AB_meV,min_eig_BA_meV,tail_bound"
    assert len(lines) == 6
    assert json.loads((out / "well_report.json").read_text())["stable"] is True


def test_zero_twist_is_a_precondition_error(tmp_path):
    proc, out = run(tmp_path, {"geometry": {"twist_deg": 0}}, "geometry")
    assert proc.returncode == 2
    m = manifest(out)
    assert m["status"] == "error"
    assert m["error"] == "SingularMoire"


def test_unknown_key_names_path(tmp_path):
    proc, out = run(tmp_path, {"numerics": {"gridres": 4}}, "geometry")
    assert proc.returncode == 2
    assert "numerics.gridres" in proc.stderr
    assert manifest(out)["error"] == "ConfigInvalid"


def test_non_convergence_exit_code(tmp_path):
    cfg = {"numerics": {"grid_res": 8, "epsilon_list": [0.25], "max_iter": 2, "tolerances": {"relax_grad": 1e-12}}}
    proc, out = run(tmp_path, cfg, "relax")
    assert proc.returncode == 3
    m = manifest(out)
    assert m["error"] == "NotConverged"
    assert "relax_summary.json" in m["files"]


def test_bad_flags(tmp_path):
    assert subprocess.run([EXE, "--command", "geometry"], capture_output=True).returncode == 2
    proc, _ = run(tmp_path, {}, "geometry", extra=("--threads", "0"))
    assert proc.returncode == 2


def test_surface_csv_header(tmp_path):
    proc, out = run(tmp_path, {"numerics": {"surface_res": 4}}, "misfit-surface")
    assert proc.returncode == 0
    lines = (out / "misfit_surface.csv").read_text().splitlines()
    assert lines[0] == "# res=4 source=gsfe"
    assert len(lines) == 17
    assert lines[1].startswith("0,0,17.61")


def test_stability_report_schema(tmp_path):
    proc, out = run(tmp_path, {"numerics": {"stability_grid_res": 4}}, "stability-report")
    assert proc.returncode == 0
    rep = json.loads((out / "stability_report.json").read_text())
    assert set(rep) == {"criterion", "verdict", "tol_eig", "worst_direction", "samples", "diagnostics"}
    assert set(rep["diagnostics"]) == {"cutoff", "quad_err", "n_samples"}
    assert rep["diagnostics"]["n_samples"] == 16
    wells = json.loads((out / "stability_wells.json").read_text())
    assert wells["verdict"] == "stable"


def test_threads_do_not_change_bytes(tmp_path):
    cfg = {"numerics": {"grid_res": 16, "epsilon_list": [0.5]}}
    _, a = run(tmp_path, cfg, "relax", name="one", extra=("--threads", "1"))
    _, b = run(tmp_path, cfg, "relax", name="four", extra=("--threads", "4"))
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_consecutive_runs_are_identical(tmp_path):
    cfg = {"ergodic": {"n_list": [5, 10]}}
    _, a = run(tmp_path, cfg, "ergodic", name="a")
    _, b = run(tmp_path, cfg, "ergodic", name="b")
    for f in ("ergodic.csv", "ergodic.json", "manifest.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    lines = (a / "ergodic.csv").read_text().splitlines()
    assert lines[0] == "n,value,abs_err"
