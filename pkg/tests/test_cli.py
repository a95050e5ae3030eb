import csv
import io
import json
import math
import shutil
import subprocess
import sys

import pytest

from laplace_asym.cli import main

MOMENT = ["--g", "x^2", "--h", "-x^2", "--a", "-1", "--b", "1"]
SLOPE = ["--g", "1", "--h", "-x", "--a", "0", "--b", "1"]


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    return json.loads(out)


def test_classify_interior():
    rec = run_json("classify", *MOMENT)
    assert rec["command"] == "classify"
    assert rec["result"]["case"] == "interior" and rec["result"]["k"] == 2
    assert set(rec) == {"command", "input", "result", "warnings"}
    assert rec["input"]["g"] == "(x ^ 2)"


def test_classify_non_unique_exits_3():
    code, out, err = run("classify", "--g", "1", "--h", "-(x-1)^2*(x+1)^2", "--a", "-2", "--b", "2")
    assert code == 3 and out == "" and "non-unique maximum" in err


def test_missing_endpoint_exits_2_with_usage(capsys):
    code, out, err = run("classify", "--g", "1", "--h", "-x", "--a", "0")
    assert code == 2 and out == ""
    assert "usage" in err.lower()


def test_parse_error_exits_2():
    code, out, err = run("classify", "--g", "2x", "--h", "-x", "--a", "0", "--b", "1")
    assert code == 2 and out == "" and "implicit" in err


def test_asym_slope_value():
    rec = run_json("asym", *SLOPE, "--t", "10")
    (v,) = rec["result"]["values"]
    assert v["approx"] == pytest.approx(0.1, rel=1e-15) and v["underflow_flag"] is False
    assert rec["result"]["power"] == -1 and rec["result"]["amplitude"] == 1


def test_asym_moment_value():
    rec = run_json("asym", *MOMENT, "--t", "100")
    assert rec["result"]["values"][0]["approx"] == pytest.approx(math.sqrt(math.pi) / 2000, rel=1e-14)


def test_asym_bad_t_exits_2():
    assert run("asym", *SLOPE, "--t", "-1")[0] == 2
    assert run("asym", *SLOPE, "--t", "0")[0] == 2


def test_asym_range_and_underflow_warning():
    rec = run_json("asym", "--g", "1", "--h", "-2-x^2", "--a", "-1", "--b", "1",
                   "--t-min", "1", "--t-max", "1000", "--points", "4")
    vals = rec["result"]["values"]
    assert [v["underflow_flag"] for v in vals] == [False, False, False, True]
    assert vals[-1]["approx"] == 0 and rec["warnings"]


def test_quad_examples():
    rec = run_json("quad", "--g", "1", "--h", "0", "--a", "0", "--b", "1", "--t", "1", "--n", "4")
    assert rec["result"]["value"] == 1.0 and rec["result"]["error_bound"] == 0.0
    rec = run_json("quad", "--g", "1", "--h", "-x^2", "--a", "0", "--b", "1", "--t", "1", "--n", "64")
    assert rec["result"]["value"] == pytest.approx(0.7468241328, abs=1e-9)
    rec = run_json("quad", "--g", "1", "--h", "-x^2", "--a", "0", "--b", "1", "--t", "1", "--tol", "1e-12")
    assert rec["result"]["method"] == "adaptive"
    assert rec["result"]["value"] == pytest.approx(math.sqrt(math.pi) / 2 * math.erf(1), abs=1e-11)


@pytest.mark.parametrize("extra", [["--n", "5"], ["--tol", "1e-14"], ["--n", "4", "--tol", "1e-8"], []])
def test_quad_bad_args_exit_2(extra):
    assert run("quad", *SLOPE, "--t", "1", *extra)[0] == 2


COMPARE = ["compare", "--g", "1+x", "--h", "-x^2", "--a", "0", "--b", "1",
           "--t-min", "5", "--t-max", "500", "--points", "12", "--n", "16", "--n", "64"]


def test_compare_payload():
    rec = run_json(*COMPARE)
    res = rec["result"]
    assert res["fit"]["pass"] is True
    assert res["fit"]["slope"] == pytest.approx(-1.0, abs=0.05)
    assert res["C0"] > 0 and res["c0"] > 0
    Ts = [c["T"] for c in res["crossover"]]
    assert [c["n"] for c in res["crossover"]] == [16, 64] and Ts[0] < Ts[1]
    assert len(res["table"]) == 12
    assert set(res["table"][0]) == {"t", "oracle", "approx", "scaled_residual",
                                    "simpson_error_n16", "simpson_error_n64"}


def test_compare_points_4_exits_2():
    args = list(COMPARE)
    args[args.index("12")] = "4"
    assert run(*args)[0] == 2


def test_compare_fit_failure_exits_4():
    # all residuals are rounding-level, so no fit is possible
    code, out, err = run("compare", *SLOPE, "--t-min", "100", "--t-max", "1000", "--points", "6", "--n", "8")
    assert code == 4 and out == ""


def test_csv_matches_json():
    rec = run_json(*COMPARE)
    code, out, _ = run(*COMPARE, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == len(rec["result"]["table"])
    for row, jrow in zip(rows, rec["result"]["table"]):
        assert set(row) == set(jrow)
        for k, v in jrow.items():
            assert float(row[k]) == v


def test_sweep_command():
    rec = run_json("sweep", *SLOPE, "--t-min", "1", "--t-max", "50", "--points", "5")
    assert len(rec["result"]["table"]) == 5
    assert rec["result"]["approximation"]["remainder_exponent"] == -2


def test_output_is_deterministic(monkeypatch):
    a = run(*COMPARE)[1]
    monkeypatch.setenv("LAPLACE_ASYM_THREADS", "1")
    b = run(*COMPARE)[1]
    assert a == b and a


def test_bad_thread_env_exits_2(monkeypatch):
    monkeypatch.setenv("LAPLACE_ASYM_THREADS", "zero")
    assert run(*COMPARE)[0] == 2


def test_reals_round_trip_17_digits():
    rec = run("asym", *MOMENT, "--t", "3")[1]
    v = json.loads(rec)["result"]["amplitude"]
    assert v == math.sqrt(math.pi) / 2
    assert '"hc": 0' in rec


def test_problem_file(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"g": "x", "h": "-x^2", "a": 0, "b": 1, "options": {"grid_points": 513}}))
    rec = run_json("classify", "--problem", str(f))
    assert rec["result"]["case"] == "endpoint_flat" and rec["result"]["k"] == 1
    assert run("classify", "--problem", str(f), "--g", "1")[0] == 2
    f.write_text(json.dumps({"g": "x", "h": "-x^2", "a": 0}))
    assert run("classify", "--problem", str(f))[0] == 2
    f.write_text(json.dumps({"g": "x", "h": "-x^2", "a": 0, "b": 1, "options": {"bogus": 1}}))
    assert run("classify", "--problem", str(f))[0] == 2
    f.write_text(json.dumps({"g": "x", "h": "-x^2", "a": 0, "b": 1, "options": {"grid_points": 4}}))
    assert run("classify", "--problem", str(f))[0] == 2
    assert run("classify", "--problem", str(tmp_path / "missing.json"))[0] == 2


@pytest.mark.parametrize("h, g, a, b, hyp", [
    ("-x^4", "1", -1, 1, "degenerate"),
    ("-x^2", "x", -1, 1, "odd"),
])
def test_hypothesis_exit_3(h, g, a, b, hyp):
    code, out, err = run("classify", "--g", g, "--h", h, "--a", str(a), "--b", str(b))
    assert code == 3 and out == "" and hyp in err


def test_console_script():
    exe = shutil.which("laplace-asym")
    cmd = [exe] if exe else [sys.executable, "-m", "laplace_asym"]
    proc = subprocess.run(cmd + ["classify", *SLOPE], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["case"] == "endpoint_slope"
    proc = subprocess.run([sys.executable, "-m", "laplace_asym", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
