import csv
import io
import json

import numpy as np
import pytest

from su2cov.cli import dumps_json, main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    config = json.loads(lines[0][2:])
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return config, rows


def test_ppt_region_small_grid(capsys):
    code, out = run(["ppt-region", "--family", "cov1l", "--l", "1", "--grid", "3", "--format", "csv"], capsys)
    assert code == 0
    config, rows = read_csv(out.out)
    assert config["command"] == "ppt-region" and config["grid"] == 3
    assert [float(r["p"]) for r in rows if r["member"] == "true"] == [0.5, 1.0]


def test_ppt_region_threshold_l3(capsys):
    _, out = run(["ppt-region", "--l", "3", "--grid", "101", "--format", "csv"], capsys)
    _, rows = read_csv(out.out)
    first = min(float(r["p"]) for r in rows if r["member"] == "true")
    assert abs(first - 0.25) <= 0.01


def test_ppt_region_cov22(capsys):
    _, out = run(["ppt-region", "--family", "cov22", "--grid", "101", "--format", "csv"], capsys)
    _, rows = read_csv(out.out)
    step = 0.01
    for r in rows:
        p, q = float(r["p"]), float(r["q"])
        closed = p <= 0.5 and 2 / 3 <= p + q <= 1 + 1e-12
        if min(abs(p - 0.5), abs(p + q - 2 / 3)) > step:
            assert (r["member"] == "true") == closed, (p, q)


def test_moe_sweeps(capsys):
    _, out = run(["moe", "--family", "cov1l", "--l", "2", "--grid", "4", "--format", "csv"], capsys)
    _, rows = read_csv(out.out)
    chi = {round(float(r["p"]), 6): float(r["holevo"]) for r in rows}
    assert chi[round(2 / 3, 6)] == pytest.approx(0.0, abs=1e-10)
    _, out = run(["moe", "--family", "cov22", "--grid", "21", "--format", "csv"], capsys)
    _, rows = read_csv(out.out)
    for r in rows:
        p, q = float(r["p"]), float(r["q"])
        if min(abs(p - 3 * q / 5), abs(p - (5 - 6 * q) / 5)) > 1e-9:
            assert r["minimizer"] == ("ket0" if float(r["rule_value"]) <= 0 else "ket1")
    code, out = run(["moe", "--family", "cov22", "--p", "0.5", "--q", "0.5"], capsys)
    res = json.loads(out.out)
    assert res["rows"][0]["h_min"] == pytest.approx(1.055, abs=5e-3)


def test_bits_flag_only_rescales(capsys):
    _, nats = run(["holevo", "--l", "2", "--p", "0", "--format", "csv"], capsys)
    _, bits = run(["holevo", "--l", "2", "--p", "0", "--format", "csv", "--bits"], capsys)
    a = float(read_csv(nats.out)[1][0]["holevo"])
    b = float(read_csv(bits.out)[1][0]["holevo"])
    assert b == pytest.approx(a / np.log(2), rel=1e-15)


def test_superactivation_outputs_and_determinism(tmp_path, capsys):
    out = tmp_path / "sa.json"
    argv = ["superactivation", "--l", "2", "--p", "0.1045", "--out", str(out)]
    assert main(argv) == 0
    first_json, first_csv = out.read_bytes(), (tmp_path / "sa_scan.csv").read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first_json
    assert (tmp_path / "sa_scan.csv").read_bytes() == first_csv
    rep = json.loads(first_json)["result"]
    assert rep["two_copy_half_bound"] == pytest.approx(0.0039, abs=1e-4)
    assert rep["gap"] > 0
    config, rows = read_csv(first_csv.decode())
    assert list(rows[0]) == ["lambda", "h_out", "h_env", "ic"]
    assert len(rows) == 100_001
    assert len(rows[1]["lambda"].replace("0.", "").replace("e-05", "")) >= 1


def test_superactivation_identity_has_no_gap(capsys):
    _, out = run(["superactivation", "--l", "1", "--p", "0", "--grid", "1001"], capsys)
    assert json.loads(out.out)["result"]["gap"] <= 0


def test_seeded_commands_reproducible(capsys):
    argv = ["twirl-verify", "--family", "cov1l", "--l", "2", "--samples", "2000", "--seed", "7", "--format", "csv"]
    _, a = run(argv, capsys)
    _, b = run(argv, capsys)
    assert a.out == b.out
    _, rows = read_csv(a.out)
    assert len(rows) == 2


def test_other_commands(capsys):
    code, out = run(["degradability", "--family", "cov22", "--p", "0.5", "--q", "0.2"], capsys)
    res = json.loads(out.out)["result"]
    assert code == 0 and res["conclusion"] == "not_degradable"
    assert {"closed_form", "witness_value", "difference"} <= set(res)
    code, out = run(["degradability", "--family", "cov1l", "--l", "2", "--grid", "5", "--format", "csv"], capsys)
    assert read_csv(out.out)[1][0]["conclusion"] == "degradable_known"
    code, out = run(["positivity", "--family", "cov1l", "--l", "2", "--p", "1.3333333333333333", "--samples", "100"], capsys)
    assert json.loads(out.out)["result"]["member"] is True
    code, out = run(["ebt-certify", "--family", "cov22", "--p", "0.3", "--q", "0.5", "--samples", "2000"], capsys)
    assert json.loads(out.out)["result"]["region"] == "EBT"
    code, out = run(["kraus-dump", "--family", "cov22", "--p", "0.2", "--q", "0.3"], capsys)
    assert len(json.loads(out.out)["kraus"]) == 9
    code, out = run(["coherent-info", "--l", "1", "--p", "0", "--grid", "11", "--format", "csv"], capsys)
    assert len(read_csv(out.out)[1]) == 11


def test_usage_errors(capsys):
    assert main(["moe", "--p", "1.5"]) == 2
    assert main(["kraus-dump"]) == 2
    assert main(["coherent-info", "--p", "0.1", "--grid", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_verify_subset_passes(capsys):
    code, out = run(["verify", "--only", "1", "6"], capsys)
    res = json.loads(out.out)
    assert code == 0 and res["passed"]
    assert "[PASS] criterion 1" in out.err


def test_verify_fault_injection(capsys):
    code, out = run(["verify", "--only", "2", "--inject-fault", "cg-sign"], capsys)
    res = json.loads(out.out)
    assert code == 1
    crit = res["criteria"][0]
    assert not crit["passed"] and not crit["tolerance_induced"]
    assert any("covariance" in c["name"] and not c["passed"] for c in crit["checks"])


def test_verify_tolerance_override(capsys):
    code, out = run(["verify", "--only", "1", "--tol-override", "1e-20"], capsys)
    res = json.loads(out.out)
    assert code == 1
    assert res["criteria"][0]["tolerance_induced"]


def test_json_number_format():
    text = dumps_json({"a": 0.1, "b": [1, 2.5], "c": float("nan")})
    assert '"a": 0.10000000000000001' in text
    assert json.loads(text)["b"] == [1, 2.5]
