import csv
import json

import pytest

from tau2.cli import main, spectrum_header, tq_header
from tau2 import ModelConfig


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "cfg.json"
    assert main(["gen", "--seed", "1", "--p", "3", "--N", "1", "--out", str(path)]) == 0
    return path


def test_gen_is_byte_identical(tmp_path, config_file):
    other = tmp_path / "again.json"
    main(["gen", "--seed", "1", "--p", "3", "--N", "1", "--out", str(other)])
    assert other.read_bytes() == config_file.read_bytes()
    data = json.loads(config_file.read_text())
    assert data["N"] == 1 and data["p"] == 3 and data["seed"] == 1
    assert set(data["boundary"]) == {"alpha_minus", "beta_minus", "theta_minus",
                                     "alpha_plus", "beta_plus", "theta_plus"}


def test_gen_two_sites(tmp_path):
    path = tmp_path / "c.json"
    main(["gen", "--seed", "1", "--p", "3", "--N", "2", "--out", str(path)])
    assert len(json.loads(path.read_text())["sites"]) == 2


def test_gen_bad_p(capsys):
    assert main(["gen", "--p", "4"]) == 2
    assert "p must be odd" in capsys.readouterr().err


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_missing_file():
    assert main(["verify", "/nonexistent/cfg.json"]) == 2


def test_unknown_flag():
    assert main(["verify", "--bogus"]) == 2


def test_verify_algebra(tmp_path, config_file):
    out = tmp_path / "r.json"
    assert main(["verify", str(config_file), "--level", "algebra", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["pass"] is True
    assert {"config_digest", "checks", "timing", "version"} <= set(report)
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names) and len(names) == len(set(names))
    assert all({"name", "anchor", "residual", "tolerance", "pass"} <= set(c) for c in report["checks"])


def test_verify_truncation(tmp_path, config_file):
    out = tmp_path / "r.json"
    assert main(["verify", str(config_file), "--level", "truncation", "--out", str(out)]) == 0
    checks = {c["name"]: c for c in json.loads(out.read_text())["checks"]}
    assert checks["truncation.identity"]["pass"]


def test_tol_scale_forces_failure(tmp_path, config_file, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", str(config_file), "--level", "algebra", "--tol-scale", "1e-8",
                 "--out", str(out)]) == 1
    assert "FAIL algebra." in capsys.readouterr().err


def test_verify_deterministic(tmp_path, config_file):
    reports = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["verify", str(config_file), "--level", "fusion", "--out", str(out)])
        data = json.loads(out.read_text())
        data.pop("timing")
        reports.append(data)
    assert reports[0] == reports[1]


def test_spectrum_csv(tmp_path, config_file):
    out = tmp_path / "s.csv"
    assert main(["spectrum", str(config_file), "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    cfg = ModelConfig.from_json_dict(json.loads(config_file.read_text()))
    assert rows[0] == spectrum_header(cfg)
    body = [r for r in rows[1:4]]
    # 2N+5 = 7 coefficients in exp(2u) at N = 1
    assert len(body) == 3 and all(len(r) == 1 + 2 * 7 + 1 + 7 for r in body)
    assert rows[-1][0] == "# trace_check" and float(rows[-1][1]) < 1e-9


def test_tq_csv(tmp_path, config_file):
    out = tmp_path / "t.csv"
    assert main(["tq", str(config_file), "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    cfg = ModelConfig.from_json_dict(json.loads(config_file.read_text()))
    assert rows[0] == tq_header(cfg)
    assert len(rows[0]) == 1 + 2 * 8 + 4
    footer = [r for r in rows if r and r[0] == "# degenerate_constraints"][0]
    assert len(footer) == 1 + cfg.N + 3 and float(footer[1]) > 1e-2


def test_tq_negative_control(tmp_path, config_file):
    out = tmp_path / "t.csv"
    assert main(["tq", str(config_file), "--corrupt-c", "--csv", str(out)]) == 1
    rows = list(csv.reader(out.open()))
    k = rows[0].index("tq_residual")
    assert max(float(r[k]) for r in rows[1:4]) > 1e-4


def test_threads_env(tmp_path, config_file, monkeypatch):
    monkeypatch.setenv("TAU2_THREADS", "3")
    out = tmp_path / "t.csv"
    assert main(["tq", str(config_file), "--csv", str(out)]) == 0
