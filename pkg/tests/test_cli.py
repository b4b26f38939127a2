import json
import subprocess
import sys

import pytest

from sstraffic.cli import main
from sstraffic.tableio import import_trace


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_calibrate(capsys):
    code, out, _ = run(capsys, "calibrate", "--mean", "1", "--cv", "1.2")
    assert code == 0
    d = json.loads(out)
    assert d["k"] == pytest.approx(0.9444564782482624)
    assert d["b"] == pytest.approx(0.6401843996644798)


def test_calibrate_domain_error(capsys):
    code, _, err = run(capsys, "calibrate", "--mean", "-1", "--cv", "1.2")
    assert code != 0
    assert err.count("\n") == 1 and "error" in err


def test_generate_with_seed_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        code, _, err = run(capsys, "generate", "--kind", "fgn", "--hurst", "0.7", "--length", "300", "--seed", "9", "-o", str(p))
        assert code == 0 and "seed=9" in err
    assert a.read_bytes() == b.read_bytes()
    assert len(import_trace(a.read_bytes())) == 300


def test_generate_without_seed_echoes_it(capsys):
    code, out, err = run(capsys, "generate", "--kind", "ar1", "--length", "20")
    assert code == 0
    seed = int(err.strip().split("=")[1])
    code, out2, _ = run(capsys, "generate", "--kind", "ar1", "--length", "20", "--seed", str(seed))
    assert out2 == out


def test_estimate_and_mux(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "generate", "--hurst", "0.8", "--length", "2000", "--seed", "1", "-o", str(a))
    run(capsys, "generate", "--kind", "white", "--cv", "2.4", "--length", "2000", "--seed", "2", "-o", str(b))
    code, out, _ = run(capsys, "estimate", str(a), "--method", "rs", "--min-scale", "10")
    assert code == 0
    est = json.loads(out)
    assert est["method"] == "rs" and 0 < est["hurst"] < 1.5
    code, out, _ = run(capsys, "mux", str(a), str(b), "--hursts", "0.8,0.5")
    assert code == 0
    rep = json.loads(out)
    assert rep["ratio_kind"] == "R1" and rep["max_index"] == 0
    assert 0.3 < rep["ratio"] < 0.8


def test_estimate_rejects_bad_file(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("value\n1\n-3\n")
    code, _, err = run(capsys, "estimate", str(p))
    assert code != 0 and "line 3" in err


def test_mux_needs_two(tmp_path, capsys):
    p = tmp_path / "a.csv"
    run(capsys, "generate", "--length", "100", "--seed", "1", "-o", str(p))
    code, _, _ = run(capsys, "mux", str(p))
    assert code != 0


def test_experiment_requires_seed(capsys):
    code, _, err = run(capsys, "experiment", "--scenario", "self_plus_white", "--replications", "2")
    assert code != 0 and "--seed" in err


def test_experiment_config_file_and_formats(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "multi_stream", "h_values": [0.8, 0.6, 0.6], "ratio_grid": [1.0, 0.5],
                               "length": 512, "replications": 3}))
    out_json = tmp_path / "t.json"
    code, _, _ = run(capsys, "experiment", "--config", str(cfg), "--seed", "5", "-o", str(out_json))
    assert code == 0
    doc = json.loads(out_json.read_text())
    assert doc["config"]["base_seed"] == 5 and len(doc["rows"]) == 2
    code, out, _ = run(capsys, "experiment", "--config", str(cfg), "--seed", "5", "--format", "csv")
    assert out.splitlines()[0] == "ratio,mean_h_1,mean_h_2,mean_h_3,mean_h_total,sd_h_total,reps"


def test_entry_point_module():
    out = subprocess.run([sys.executable, "-m", "sstraffic.cli", "calibrate", "--mean", "5", "--cv", "0"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["k"] == 0.0
