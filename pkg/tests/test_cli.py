import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from tmsvchannel.cli import dumps, format_float, main, parse_state
from tmsvchannel.fock import output_density
from tmsvchannel.gaussian import SqueezeSpec


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def run_csv(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    return rows[0], rows[1:], err


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(math.pi)) == math.pi
    assert json.loads(dumps({"b": 1.0 / 3, "a": math.inf})) == {"a": None, "b": 1.0 / 3}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_threshold_max_length(capsys):
    doc = run_json(capsys, "threshold", "--max-length", "--zeta", "1", "--nth", "0.1", "--la", "1")
    assert doc["kind"] == "max_length"
    assert doc["value"] == pytest.approx(0.5 * math.log(1 + (1 - math.exp(-2.0)) / 0.2), rel=1e-15)


def test_threshold_gain_vacuum(capsys):
    doc = run_json(capsys, "threshold", "--gain", "--zeta", "0")
    assert doc["value"] == 1.0
    assert doc["excess_gain"] == 0.0


def test_threshold_zero_temperature_diverges(capsys):
    doc = run_json(capsys, "threshold", "--max-length", "--zeta", "1", "--nth", "0")
    assert doc["value"] is None
    assert doc["diverges"] is True
    assert doc["message"]


def test_threshold_hw_over_kt(capsys):
    a = run_json(capsys, "threshold", "--max-length", "--zeta", "1", "--hw-over-kt", str(math.log(2.0)))
    b = run_json(capsys, "threshold", "--max-length", "--zeta", "1", "--nth", "1")
    assert a["value"] == pytest.approx(b["value"], rel=1e-14)


def test_threshold_nth(capsys):
    doc = run_json(capsys, "threshold", "--nth-threshold", "--zeta", "0.5", "--t", "0.8")
    e = math.exp(-1.0)
    assert doc["value"] == pytest.approx(0.64 * (1 - e) / (2 * 0.36), rel=1e-14)


def test_threshold_photons_input(capsys):
    doc = run_json(capsys, "threshold", "--gain", "--photons", "1")
    q = math.sqrt(0.5)
    assert doc["value"] == pytest.approx(1 + q, rel=1e-14)


@pytest.mark.parametrize(
    "argv",
    [
        ["threshold", "--zeta", "1"],
        ["threshold", "--max-length", "--zeta", "1"],
        ["threshold", "--max-length", "--gain", "--zeta", "1", "--nth", "1"],
        ["sweep", "--param", "length", "--start", "1", "--stop", "0", "--steps", "3", "--zeta", "1"],
        ["sweep", "--param", "length", "--start", "0", "--stop", "1", "--steps", "1", "--zeta", "1"],
        ["bogus"],
    ],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code != 0
    capsys.readouterr()


def test_domain_error_exit_status(capsys):
    code, out, err = run(capsys, "threshold", "--gain", "--q", "1.5")
    assert code == 1
    assert out == ""
    assert "error" in err


def test_sweep_two_steps(capsys):
    header, rows, _ = run_csv(
        capsys, "sweep", "--param", "length", "--start", "0", "--stop", "1", "--steps", "2", "--q", "0.5"
    )
    assert header == ["length", "simon_margin", "verdict", "estimate", "estimate_ratio"]
    assert len(rows) == 2


def test_sweep_length_monotone(capsys):
    header, rows, _ = run_csv(
        capsys, "sweep", "--param", "length", "--start", "0", "--stop", "2",
        "--steps", "81", "--q", str(math.sqrt(0.5)),
    )
    est = np.array([float(r[3]) for r in rows])
    assert est[0] == pytest.approx(2 * math.log(2.0), rel=1e-12)
    assert np.all(np.diff(est) <= 0)
    assert {r[2] for r in rows} == {"inseparable"}


def test_sweep_degradation_length_monotone(capsys):
    header, rows, _ = run_csv(
        capsys, "sweep", "--param", "squeezing", "--squeeze-unit", "photons",
        "--start", "0.1", "--stop", "10", "--steps", "25",
    )
    assert header[0] == "photons" and header[-1] == "degradation_length"
    lengths = np.array([float(r[-1]) for r in rows])
    assert np.all(lengths > 0)
    assert np.all(np.diff(lengths) < 0)


def test_sweep_vacuum_row_is_nan(capsys):
    header, rows, err = run_csv(
        capsys, "sweep", "--param", "squeezing", "--squeeze-unit", "q",
        "--start", "0", "--stop", "0.5", "--steps", "3",
    )
    assert math.isnan(float(rows[0][-1]))
    assert "warning" in err
    assert float(rows[1][-1]) > 0


def test_sweep_thermal_estimate_is_nan(capsys):
    header, rows, err = run_csv(
        capsys, "sweep", "--param", "n_th", "--start", "0", "--stop", "1", "--steps", "3",
        "--zeta", "1", "--length", "0.3",
    )
    assert not math.isnan(float(rows[0][3]))
    assert math.isnan(float(rows[1][3]))
    assert "warning" in err
    margins = [float(r[1]) for r in rows]
    assert margins[0] < margins[1] < margins[2]


def test_sweep_gain_crosses_boundary(capsys):
    header, rows, _ = run_csv(
        capsys, "sweep", "--param", "gain", "--start", "1", "--stop", "2", "--steps", "11", "--zeta", "0.5",
    )
    assert header[0] == "gain_t2"
    g = 1 + math.tanh(0.5)
    for r in rows:
        if abs(float(r[0]) - g) > 1e-6:
            assert r[2] == ("inseparable" if float(r[0]) < g else "separable")


def test_sweep_jobs_same_output(capsys, tmp_path):
    argv = ["sweep", "--param", "length", "--start", "0", "--stop", "1", "--steps", "9", "--zeta", "0.7"]
    _, serial, _ = run(capsys, *argv)
    _, threaded, _ = run(capsys, *argv, "--jobs", "4")
    assert serial == threaded
    path = tmp_path / "sweep.csv"
    assert main(argv + ["-o", str(path)]) == 0
    assert path.read_text() == serial


def test_state_vacuum(capsys):
    doc = run_json(capsys, "state", "--q", "0", "--t1", "1", "--t2", "1", "--nmax", "2")
    assert doc["elements"] == [[0, 0, 1.0, 0.0]]


def test_state_lossless(capsys):
    q = 0.5
    doc = run_json(capsys, "state", "--q", "0.5", "--t1", "1", "--t2", "1", "--nmax", "4")
    d = 5
    for i, j, re, im in doc["elements"]:
        m1, m2 = divmod(i, d)
        n1, n2 = divmod(j, d)
        assert m1 == m2 and n1 == n2
        assert re == pytest.approx((1 - q * q) * q ** (m1 + n1), rel=1e-14)
        assert im == 0.0


def test_state_witness(capsys):
    doc = run_json(capsys, "state", "--q", "0.5", "--t1", "0.9", "--t2", "0.7", "--nmax", "8", "--witness")
    assert doc["ppt_min_eigenvalue"] < 0


def test_state_round_trip(capsys):
    _, out, _ = run(capsys, "state", "--q", "0.5", "--t1", "0.9+0.2j", "--t2", "0.7", "--nmax", "6")
    rho = parse_state(out)
    direct = output_density(SqueezeSpec.from_q(0.5), 0.9 + 0.2j, 0.7, n_max=6, tail_tol=1.0)
    doc = json.loads(out)
    for i, j, _, _ in doc["elements"]:
        assert rho.elements[i, j] == direct.elements[i, j]
    # re-serializing the parsed state reproduces the digits
    again = json.loads(dumps(rho.to_json_dict()))
    assert again["elements"] == doc["elements"]


def test_state_resource_limit(capsys, monkeypatch):
    with pytest.raises(SystemExit) as exc:
        main(["state", "--q", "0.5", "--t1", "1", "--t2", "1", "--nmax", "65"])
    assert exc.value.code != 0
    capsys.readouterr()
    monkeypatch.setenv("TMSV_MAX_NMAX", "3")
    with pytest.raises(SystemExit):
        main(["state", "--q", "0.5", "--t1", "1", "--t2", "1", "--nmax", "4"])
    capsys.readouterr()


def test_verify_quick(capsys):
    doc = run_json(capsys, "verify", "--quick")
    assert doc["passed"]
    assert {c["name"] for c in doc["checks"]} == {
        "fock_vs_dilation",
        "covariance_fock_vs_gaussian",
        "ppt_sign_vs_simon",
    }


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tmsvchannel", "threshold", "--gain", "--zeta", "0.5"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == pytest.approx(1 + math.tanh(0.5), rel=1e-14)
    bad = subprocess.run(
        [sys.executable, "-m", "tmsvchannel", "threshold", "--zeta", "0.5"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert bad.returncode == 2
