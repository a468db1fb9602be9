import io
import json

import pytest

from orthoflow.cli import dispatch, to_json


def run(*argv):
    buf = io.StringIO()
    code = dispatch(list(argv), out=buf)
    return code, buf.getvalue(), json.loads(buf.getvalue())


def test_verify_action_axiom_report(monkeypatch):
    monkeypatch.delenv("ORTHOFLOW_SEED", raising=False)
    code, _, rep = run("verify", "--suite", "action-axiom", "--p", "3", "--q", "3", "--samples", "20", "--seed", "42")
    assert code == 0
    assert rep["command"] == "verify" and rep["config"]["seed"] == 42
    (chk,) = rep["checks"]
    assert set(chk) >= {"name", "value", "threshold", "pass"}
    assert chk["threshold"] == 1e-6 and chk["pass"] is True
    assert rep["summary"]["status"] == "pass"


def test_reports_are_deterministic_and_seed_env_wins(monkeypatch):
    monkeypatch.delenv("ORTHOFLOW_SEED", raising=False)
    _, a, _ = run("verify", "--suite", "k-extension", "--samples", "10", "--seed", "5")
    monkeypatch.setenv("ORTHOFLOW_SEED", "5")
    _, b, rep = run("verify", "--suite", "k-extension", "--samples", "10", "--seed", "99")
    assert a == b and rep["config"]["seed"] == 5


def test_flow_invariants():
    code, _, rep = run("flow", "--make", "basicJ1", "--n", "1", "--a", "0.5", "--invariants")
    assert code == 0
    assert rep["result"]["jacobians"] == pytest.approx([-2.0, 2.0])
    assert rep["result"]["mu_pv"] == pytest.approx(1.8137993642, abs=1e-9)


def test_flow_conjugacy_and_lift():
    _, _, rep = run("flow", "--make", "basicJ1", "--conjugacy", "basicJ1:2:0.0")
    assert rep["result"]["conjugacy"]["certificate"].startswith("Jacobian mismatch")
    code, _, rep = run("flow", "--make", "basicJ1J2", "--n", "2", "--a", "0.4", "--lift")
    assert code == 0 and rep["checks"][0]["name"] == "double-cover-lift-defect"


def test_tables():
    code, _, rep = run("tables", "--parabolic", "--range", "3:9", "--table1")
    assert code == 0
    rows = {(r["kind"], r["p"], r["q"]): r for r in rep["result"]["parabolic"]}
    assert rows[("MaxIsotropic", 4, 3)]["codim"] == 6
    assert all(r["codim"] == p + q - 2 for (k, p, q), r in rows.items() if k == "NullLine")
    assert any(r["subgroupName"] == "Spin(7)" and r["dimOrbit"] == 15 for r in rep["result"]["table1"])


def test_act_decompose_orbit():
    coeffs = ",".join(["0.1"] * 15)
    code, _, rep = run("act", "--coeffs", coeffs, "--point", "0,0,0,1,1,0,0")
    assert code == 0 and len(rep["result"]["v"]) == 4
    code, _, rep = run("decompose", "--coeffs", coeffs, "--f", "0.3")
    assert code == 0 and rep["result"]["accepted_branches"] == 1
    code, _, rep = run("orbit", "--phi", "0.0")
    assert code == 0 and rep["result"]["orbit_type"] == "ClosedPnull" and rep["result"]["dimension"] == 4


@pytest.mark.parametrize("argv,flag", [
    (["verify", "--suite", "nope"], "--suite"),
    (["act", "--coeffs", "1,2", "--point", "1,0,0,0,1,0,0"], "--coeffs"),
    (["verify", "--suite", "boost-projector", "--p", "2"], "--p"),
    (["tables"], "--parabolic"),
    (["flow", "--conjugacy", "bad"], "--conjugacy"),
])
def test_usage_errors_exit_2(argv, flag):
    code, _, rep = run(*argv)
    assert code == 2 and rep["summary"]["status"] == "usage-error"
    assert flag in rep["summary"]["error"]


def test_failed_check_exits_1():
    # the point is on the decomposition boundary, so the direct route must refuse
    code, _, rep = run("decompose", "--coeffs", ",".join(["0"] * 15), "--f", "0.0")
    assert code == 1 and "OutsideWPlus" in rep["summary"]["error"]


def test_floats_round_trip_with_17_digits():
    x = 0.1 + 0.2
    text = to_json({"x": x, "m": [[1 / 3, 2.0]], "inf": float("inf")})
    back = json.loads(text)
    assert back["x"] == x and back["m"][0][0] == 1 / 3 and back["inf"] == "inf"
    assert "0.30000000000000004" in text


def test_suite_alias():
    _, a, _ = run("verify", "--suite", "eq10", "--seed", "1")
    _, b, _ = run("verify", "--suite", "boost-projector", "--seed", "1")
    assert json.loads(a)["checks"] == json.loads(b)["checks"]
