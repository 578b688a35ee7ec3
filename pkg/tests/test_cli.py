import csv
import io
import json

import numpy as np
import pytest

from fbin_sim import cli
from fbin_sim.errors import ParseError


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_fig2_columns_and_period(tmp_path):
    out = tmp_path / "fringe.csv"
    assert cli.main(["fig2", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["t_R_minus_t_L_ns", "P_theta_0", "P_theta_pi_over_4"]
    assert len(rows) == 601
    data = np.array(rows, dtype=float)
    x, p0 = data[:, 0], data[:, 1]
    peaks = [i for i in range(1, len(p0) - 1) if p0[i] >= p0[i - 1] and p0[i] > p0[i + 1]]
    period = np.mean(np.diff(x[peaks]))
    assert period == pytest.approx(0.5650, rel=5e-3)
    assert data[:, 1:].max() == pytest.approx(1.0, abs=1e-12)


def test_fig2_product_input_flat(tmp_path):
    out = tmp_path / "flat.csv"
    assert cli.main(["fig2", "--product-input", "--out", str(out)]) == 0
    data = np.array(read_csv(out)[1], dtype=float)
    assert np.ptp(data[:, 1:]) < 1e-12


def test_fig2_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["fig2", "--out", str(a)])
    cli.main(["fig2", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_fig3_long_format(tmp_path):
    out = tmp_path / "fig3.csv"
    assert cli.main(["fig3", "--grid-time", "21", "--grid-theta", "8", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["state_id", "t_L_ns", "theta_R", "rate"]
    assert len(rows) == 2 * 21 * 8
    assert {r[0] for r in rows} == {"a", "b"}


def test_witness_json(capsys):
    assert cli.main(["witness", "--state", "fig3a"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "ENTANGLED_WITNESSED"
    assert doc["criteria"]["fc_t_independence"]["flagged"] is True


def test_witness_random_trials_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["witness", "--state", "random-separable", "--trials", "20", "--seed", "11"]
    assert cli.main(args + ["--out", str(a)]) == 0
    cli.main(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["summary"] == {"INCONCLUSIVE": 20}


def test_witness_csv(capsys):
    assert cli.main(["witness", "--state", "fig3b", "--format", "csv",
                     "--grid-time", "11", "--grid-theta", "8"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["trial", "t_L_ns", "theta_R", "F_c", "K_LR"]
    assert len(rows) == 1 + 11 * 8


def test_witness_state_file(tmp_path, capsys):
    w = 2 * np.pi * 20e6
    m = np.zeros((4, 4))
    m[np.ix_([0, 3], [0, 3])] = 0.5
    path = tmp_path / "bell.json"
    path.write_text(json.dumps({
        "photon": {"side": "L", "bins": [{"label": "w1", "omega": 2 * w},
                                         {"label": "w2", "omega": w}]},
        "atom": {"side": "R", "levels": ["g1", "g2"]},
        "matrix": {"re": m.tolist()}}))
    assert cli.main(["witness", "--state", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "ENTANGLED_WITNESSED"


def test_state_file_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"photon": {"bins": []}, "atom": {"levels": ["g1", "g2"]},
                                "matrix": {"re": [[1]]}}))
    with pytest.raises(ParseError) as info:
        cli.load_state_file(str(path))
    assert info.value.location.endswith(":photon")
    assert cli.main(["witness", "--state", str(path)]) == 2
    path.write_text("{not json")
    with pytest.raises(ParseError):
        cli.load_state_file(str(path))


def test_cavity_scan_writes_two_files(tmp_path):
    out = tmp_path / "scan.csv"
    assert cli.main(["cavity-scan", "--out", str(out)]) == 0
    header, rows = read_csv(tmp_path / "scan_gate_error.csv")
    assert header == ["g", "kappa", "gamma", "gate_error"]
    errs = np.array(rows, dtype=float)[:, 3]
    assert np.all(np.diff(errs) < 0)
    assert len(read_csv(out)[1]) == 1001


def test_config_file_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"state": "fig3b", "grid": {"T": 1e-7, "n_time": 21, "n_theta": 8},
                               "eps_l": 0.1}))
    config = cli.load_config(str(cfg), "witness", {"eps_r": 0.2})
    assert config.state == "fig3b" and config.eps_l == 0.1 and config.eps_r == 0.2
    assert config.grid.n_time == 21


@pytest.mark.parametrize("argv", [
    ["witness", "--state", "nope"],
    ["witness", "--eps-l", "1.5"],
    ["fig2", "--detuning-hz", "-1"],
    ["witness", "--trials", "0"],
])
def test_config_errors_exit_2(argv):
    assert cli.main(argv) == 2


def test_bad_config_json_location(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"seed": 1,\n "eps_l": }')
    with pytest.raises(ParseError) as info:
        cli.load_config(str(cfg), "witness", {})
    assert ":2:" in info.value.location


def test_io_errors_exit_3(tmp_path):
    assert cli.main(["fig2", "--out", str(tmp_path / "missing" / "x.csv")]) == 3
    assert cli.main(["fig2", "--config", str(tmp_path / "absent.json")]) == 3


def test_threads_env_does_not_change_output(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["fig2", "--out", str(a)])
    monkeypatch.setenv("FBIN_SIM_THREADS", "4")
    cli.main(["fig2", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
