import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from capmon.cli import main
from capmon.config import PSO_KEYS, SCENARIO_KEYS
from capmon.estimator import EstimationReport
from capmon.signals import read_window_csv

from conftest import C0, ESR0


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture
def window_csv(tmp_path):
    out = tmp_path / "sm1.csv"
    assert main(["simulate", "--out", str(out)]) == 0
    return out


def stderr_json(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_simulate_then_estimate(window_csv, tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["estimate", "--window", str(window_csv), "--out", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["schema_version"] == 1
    assert data["config"]["seed"] == 0
    assert len(data["repeats"]) == 15
    assert abs(data["c_median"] / C0 - 1) <= 0.01
    assert abs(data["esr_median"] / ESR0 - 1) <= 0.10
    assert len(read_window_csv(window_csv)) == 1000


def test_simulate_config_json_and_toml(tmp_path):
    js = tmp_path / "s.json"
    js.write_text(json.dumps({"c_farads": 1.76e-3, "esr_ohms": 0.08, "noise_sigma_v_volts": 0.01,
                              "seed": 7}))
    tm = tmp_path / "s.toml"
    tm.write_text("c_farads = 1.76e-3\nesr_ohms = 0.08\nnoise_sigma_v_volts = 0.01\nseed = 7\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", str(js), "--out", str(a)]) == 0
    assert main(["simulate", "--config", str(tm), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_unknown_config_key_exit_2(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    cfg.write_text('{"c_mF": 2.2}')
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 2
    assert stderr_json(capsys)["code"] == "invalid_config"


def test_non_binary_switching_exit_2(window_csv, tmp_path, capsys):
    lines = window_csv.read_text().splitlines()
    t, v, s, i = lines[5].split(",")
    lines[5] = ",".join([t, v, "0.5", i])
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["estimate", "--window", str(bad), "--out", str(tmp_path / "r.json")]) == 2
    err = stderr_json(capsys)
    assert err["code"] == "non_binary_switching"
    assert set(err) == {"code", "message", "context"}
    assert not (tmp_path / "r.json").exists()


def test_missing_input_exit_2(tmp_path, capsys):
    assert main(["estimate", "--window", str(tmp_path / "nope.csv"), "--out",
                 str(tmp_path / "r.json")]) == 2
    assert "not found" in stderr_json(capsys)["message"]


def test_strict_unobservable_exit_3(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    cfg.write_text('{"duty": 0.0}')
    w = tmp_path / "w.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(w)]) == 0
    out = tmp_path / "r.json"
    assert main(["estimate", "--window", str(w), "--out", str(out), "--strict"]) == 3
    assert stderr_json(capsys)["code"] == "unobservable_esr"
    # without --strict it runs and reports a warning
    assert main(["estimate", "--window", str(w), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["esr_observable"] is False


def test_estimate_byte_identical_and_inputs_untouched(window_csv, tmp_path):
    before = sha(window_csv)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["estimate", "--window", str(window_csv), "--out", str(out),
                     "--seed", "17"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert sha(window_csv) == before
    assert json.loads(a.read_text())["config"]["seed"] == 17


def test_estimate_config_file(window_csv, tmp_path):
    cfg = tmp_path / "pso.toml"
    cfg.write_text("swarm_size = 5\nrepeats = 3\nerror_limit = 1e-4\nc_min_farads = 1e-3\n")
    out = tmp_path / "r.json"
    assert main(["estimate", "--window", str(window_csv), "--config", str(cfg), "--out",
                 str(out)]) == 0
    rep = EstimationReport.from_dict(json.loads(out.read_text()))
    assert rep.config.swarm_size == 5 and len(rep.per_repeat) == 3
    assert rep.config.bounds_c == (1e-3, 6.6e-3)


def write_report(path, c_pu, esr_pu):
    from capmon.estimator import PsoConfig
    from capmon.signals import CapacitorParams

    rep = EstimationReport(per_repeat=(), c_median=c_pu * C0, esr_median=esr_pu * ESR0, c_iqr=0.0,
                           esr_iqr=0.0, window_id="sm7", reference=CapacitorParams(C0, ESR0),
                           config=PsoConfig())
    path.write_text(rep.to_json())


def test_assess_eol_capacitance(tmp_path, capsys):
    rep = tmp_path / "r.json"
    write_report(rep, 0.79, 1.2)
    assert main(["assess", "--report", str(rep), "--c0", str(C0), "--esr0", str(ESR0)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "eol_capacitance" in out[0]
    assert json.loads(out[1])["verdict"] == "eol_capacitance"


def test_predict_output(window_csv, tmp_path, capsys):
    out = tmp_path / "p.csv"
    fig = tmp_path / "p.png"
    assert main(["predict", "--window", str(window_csv), "--c", "2.2e-3", "--esr", "0.04",
                 "--out", str(out), "--figure", str(fig)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,v_sm,v_hat,err"
    assert len(lines) == 1001
    err = np.array([float(line.split(",")[3]) for line in lines[1:]])
    assert np.max(np.abs(err)) < 1e-9
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert json.loads(capsys.readouterr().out)["v_err"] < 1e-20


def test_sweep_and_report(window_csv, tmp_path):
    sweep = tmp_path / "s.csv"
    fig = tmp_path / "s.png"
    assert main(["sweep", "--window", str(window_csv), "--param", "swarm_size", "--values",
                 "5,10", "--runs", "12", "--out", str(sweep), "--figure", str(fig),
                 "--c0", str(C0), "--esr0", str(ESR0)]) == 0
    rows = sweep.read_text().splitlines()
    assert rows[0].startswith("param,value,quantity,n,median,q1,q3,iqr_pct")
    assert [r.split(",")[1:3] for r in rows[1:]] == [["5", "c"], ["5", "esr"], ["10", "c"],
                                                      ["10", "esr"]]
    assert fig.exists()

    reports = []
    for k in range(2):
        r = tmp_path / f"sm{k}.json"
        assert main(["estimate", "--window", str(window_csv), "--out", str(r), "--seed",
                     str(k)]) == 0
        reports.append(str(r))
    box = tmp_path / "box.csv"
    assert main(["report", "--reports", *reports, "--format", "boxplot-csv", "--quantity", "esr",
                 "--c0", str(C0), "--esr0", str(ESR0), "--out", str(box), "--figure",
                 str(tmp_path / "box.svg")]) == 0
    lines = box.read_text().splitlines()
    assert lines[0] == "id,median,q1,q3,whisker_lo,whisker_hi,n_outliers"
    assert [line.split(",")[0] for line in lines[1:]] == ["sm1", "sm1"]
    assert abs(float(lines[1].split(",")[1]) - 1) < 0.1


def test_sweep_error_limit_values(window_csv, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--window", str(window_csv), "--param", "error_limit", "--values",
                 "1e-3,1e-6", "--runs", "5", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1].split(",")[1] == "0.001"


@pytest.mark.parametrize("command, keys", [("simulate", SCENARIO_KEYS), ("estimate", PSO_KEYS),
                                           ("sweep", PSO_KEYS)])
def test_help_lists_config_keys(command, keys):
    res = subprocess.run([sys.executable, "-m", "capmon", command, "--help"], capture_output=True,
                         text=True, check=True)
    for key, (_, desc) in keys.items():
        assert key in res.stdout
        assert "[" in desc
