import csv
import json

import pytest

from dilute_fermi import cli
from dilute_fermi.scattering import NoBracketError


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_hf_command(tmp_path):
    cfg = write(tmp_path, "[potential]\n[box]\nL = 4 8\nN_up = 7\nN_down = 19\n")
    assert cli.main(["hf", "--config", cfg, "--out", str(tmp_path)]) == 0
    text = (tmp_path / "hf.csv").read_text()
    assert text.startswith("# dilute-fermi 0.1.0\n# command hf\n# config ")
    rows = read_csv(tmp_path / "hf.csv")
    assert [r["N_down"] for r in rows] == ["19", "19"]
    assert float(rows[0]["total"]) == pytest.approx(sum(float(rows[0][k]) for k in ("kinetic", "direct", "exchange")))


def test_hf_density_targets_snap(tmp_path):
    cfg = write(tmp_path, "[potential]\n[box]\nL = 4 8 16\nrho_up = 0.1\nrho_down = 0.05\n")
    assert cli.main(["hf", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "hf.csv")
    assert all(float(r["rho_up"]) <= 0.1 for r in rows)
    assert (tmp_path / "hf_fits.csv").exists()


def test_hf_inadmissible_count_exits_1(tmp_path, capsys):
    cfg = write(tmp_path, "[potential]\n[box]\nN_up = 8\nN_down = 7\n")
    assert cli.main(["hf", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "auto_snap" in capsys.readouterr().err
    cfg = write(tmp_path, "[potential]\n[box]\nN_up = 8\nN_down = 7\nauto_snap = yes\n")
    assert cli.main(["hf", "--config", cfg, "--out", str(tmp_path)]) == 0


def test_scatter_command(tmp_path):
    cfg = write(tmp_path, "[potential]\nkind = soft_sphere\nV0 = 2\n[scattering]\nrho = 1e-3 1e-2\n")
    assert cli.main(["scatter", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "scatter.csv")
    assert len(rows) == 2 and float(rows[0]["lambda"]) > 0
    fits = read_csv(tmp_path / "scatter_fits.csv")
    assert {f["quantity"] for f in fits} == {"lambda", "a_gamma_error"}


def test_asympt_uses_scattering_length(tmp_path):
    cfg = write(tmp_path, "[potential]\nkind = soft_sphere\nV0 = 2\n[asymptotics]\nrho_up = 0.01\nrho_down = 0.01\n")
    assert cli.main(["asympt", "--config", cfg, "--out", str(tmp_path)]) == 0
    row = read_csv(tmp_path / "asympt.csv")[0]
    assert float(row["a"]) == pytest.approx(1 - __import__("math").tanh(1) / 1, rel=1e-10)


def test_numerical_failure_exits_2(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise NoBracketError("no sign change")

    monkeypatch.setattr(cli, "solve_scattering", boom)
    cfg = write(tmp_path, "[potential]\n[scattering]\n")
    assert cli.main(["scatter", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_missing_config_exits_1(tmp_path):
    assert cli.main(["asympt", "--config", str(tmp_path / "nope.ini")]) == 1


def test_seed_range_and_threads_env(tmp_path, monkeypatch):
    cfg = write(tmp_path, "[potential]\n[asymptotics]\n")
    assert cli.main(["asympt", "--config", cfg, "--seed", str(2**64), "--out", str(tmp_path)]) == 1
    monkeypatch.setenv("DILUTE_FERMI_THREADS", "many")
    assert cli.main(["asympt", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_verify_corrupted_sign_exits_3(tmp_path):
    cfg = write(tmp_path, "[potential]\n[fock]\nN_up = 1\nN_down = 1\nextra_up = 1,0,0; 0,1,0\nextra_down = -1,0,0\ncorrupt_sign = true\n")
    assert cli.main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 3
    report = json.loads((tmp_path / "verify.json").read_text())
    assert "decomposition_routes_agree" in report["failed"]


def test_verify_small_instance_passes(tmp_path):
    cfg = write(tmp_path, "[potential]\n[fock]\nN_up = 1\nN_down = 1\nextra_up = 1,0,0; 0,1,0\nextra_down = -1,0,0\n")
    assert cli.main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] and report["failed"] == []
    names = [c["name"] for c in report["checks"]]
    assert names[0] == "car_mixed_anticommutator" and len(names) == len(set(names))
