import csv
import json

import pytest

from eckhaus_lab.cli import main

TINY = {"n": 128, "length": 50.0, "dt": 0.5, "t_end": 20.0, "delta": 0.05, "track_slaving": False}


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_derive_latex_matches_golden(capsys):
    from pathlib import Path

    golden = Path(__file__).parent / "golden"
    code, out = _run(capsys, "derive", "--target", "s2", "--order", "4")
    assert code == 0 and out == (golden / "s2.tex").read_text()
    code, out = _run(capsys, "derive", "--target", "vsstar", "--order", "4")
    assert code == 0 and out == (golden / "vsstar.tex").read_text()


def test_derive_json_and_eigsystem(capsys):
    code, out = _run(capsys, "derive", "--target", "s5", "--format", "json", "--order", "4")
    data = json.loads(out)
    assert code == 0 and data["target"] == "s5" and len(data["terms"]) == 2
    code, out = _run(capsys, "derive", "--target", "eigsystem", "--format", "json", "--order", "4")
    jets = json.loads(out)
    assert jets["lambda1"]["coeffs"][4] == ["-3/4", "0", "0", "0"]
    code, out = _run(capsys, "derive", "--target", "eigsystem", "--order", "4")
    assert "O(k^{5})" in out


def test_dispersion(tmp_path, capsys):
    p = tmp_path / "d.csv"
    code, _ = _run(capsys, "dispersion", "--q", "0.3", "--kmax", "1", "--samples", "5", "--out", str(p))
    rows = list(csv.DictReader(open(p)))
    assert code == 0 and len(rows) == 5 and float(rows[0]["k"]) == -1.0


def test_profile_files(tmp_path, capsys):
    code, out = _run(capsys, "profile", "--A", "0.05", "--out", str(tmp_path), "--xi-max", "5")
    assert code == 0 and "residual" in out
    res = json.loads((tmp_path / "residual.json").read_text())
    assert res["residual"] <= 1e-10
    for name in ("psi.csv", "psi_hat.csv", "iterations.log"):
        assert (tmp_path / name).stat().st_size > 0


def test_collapse_short(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 256, "length": 200.0, "t_end": 20.0, "dt": 0.1, "out_dir": str(tmp_path / "o")}))
    code, out = _run(capsys, "collapse", "--config", str(cfg))
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "t,e" and len(lines) > 3
    assert (tmp_path / "o" / "collapse.csv").read_text() == out
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["collapse", "--config", str(cfg)]) == 2


def test_simulate_decay_fit_and_sweep(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps(TINY))
    code, _ = _run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path / "r"))
    assert code == 0
    for name in ("manifest.json", "trajectory.csv", "decay.json", "weighted_norms.json"):
        assert (tmp_path / "r" / name).exists()
    code, out = _run(capsys, "decay-fit", "--csv", str(tmp_path / "r" / "trajectory.csv"),
                     "--t-lo", "1", "--t-hi", "20")
    assert code == 0 and "alpha" in json.loads(out)
    code, _ = _run(capsys, "sweep", "--config", str(cfg), "--q", "0.2,0.4", "--out", str(tmp_path / "w"))
    index = json.loads((tmp_path / "w" / "index.json").read_text())
    assert code == 0 and [r["q"] for r in index["runs"]] == [0.2, 0.4]


def test_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"dt": -1}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 2
    with pytest.raises(SystemExit):
        main(["derive", "--target", "nope"])
