import json

import pytest

from gridheal import cli
from gridheal.cli import main
from gridheal.grid import load_scenario, validate
from gridheal.plan import RestorationPlan
from gridheal.powerflow import verify_plan
from gridheal.strategies import StrategyOutcome

from conftest import SCENARIOS

T1 = str(SCENARIOS / "t1.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_writes_verified_plan(tmp_path, capsys):
    out = tmp_path / "plan.json"
    code, _, _ = run(capsys, "solve", "--scenario", T1, "--strategy", "proposed", "--out", str(out))
    assert code == 0
    plan = RestorationPlan.from_json(out.read_text(encoding="utf-8"))
    assert plan.restored_mw == 3.0


def test_solve_nodsc_stdout(capsys):
    code, out, _ = run(capsys, "solve", "--scenario", T1, "--strategy", "nodsc")
    assert code == 0 and json.loads(out)["restored_mw"] == 1.0


def test_unknown_strategy_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--scenario", T1, "--strategy", "foo"])
    assert exc.value.code == 64


def test_missing_scenario(tmp_path, capsys):
    code, _, err = run(capsys, "solve", "--scenario", str(tmp_path / "none.json"))
    assert code == 64 and "cannot load" in err


def test_invalid_scenario(tmp_path, capsys):
    doc = json.loads((SCENARIOS / "t1.json").read_text())
    doc["dscs"][0]["capacity"] = 0
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "solve", "--scenario", str(path))
    assert code == 64 and "capacity ≥ 1" in err


@pytest.mark.parametrize("status,code", [("infeasible", 3), ("time_limit", 5), ("error", 5)])
def test_solver_status_exit_codes(monkeypatch, capsys, status, code):
    # an all-dead restoration is always feasible, so solver failures are simulated
    monkeypatch.setattr(cli, "run_strategy", lambda *a, **k: StrategyOutcome("proposed", status))
    assert run(capsys, "solve", "--scenario", T1)[0] == code


def test_unverified_plan_exit_code(monkeypatch, capsys):
    real = cli.run_strategy

    def tampered(*a, **k):
        out = real(*a, **k)
        out.plan.restored_mw += 1.0
        out.report = verify_plan(load_scenario(T1), out.plan)
        out.status = "unverified"
        return out

    monkeypatch.setattr(cli, "run_strategy", tampered)
    code, out, err = run(capsys, "solve", "--scenario", T1)
    assert code == 4 and out == "" and "pickup" in err


def test_compare_text_and_json(capsys):
    code, out, _ = run(capsys, "compare", "--scenario", T1, "--format", "text")
    assert code == 0 and out.splitlines()[0].startswith("Strategy")
    code, out, _ = run(capsys, "compare", "--scenario", T1)
    rows = json.loads(out)["rows"]
    assert [r["restored_mw"] for r in rows] == [3.0, 1.0, 3.0]


def test_verify_pass_and_fail(tmp_path, capsys):
    plan_path = tmp_path / "plan.json"
    run(capsys, "solve", "--scenario", T1, "--out", str(plan_path))
    code, out, _ = run(capsys, "verify", "--scenario", T1, "--plan", str(plan_path))
    assert code == 0 and json.loads(out)["passed"] is True
    doc = json.loads(plan_path.read_text())
    doc["branch_state"]["2-3"] = True
    plan_path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", "--scenario", T1, "--plan", str(plan_path))
    assert code == 2 and json.loads(out)["passed"] is False


def test_candidates(capsys):
    code, out, _ = run(capsys, "candidates", "--scenario", T1)
    doc = json.loads(out)["d1"]
    assert code == 0
    assert len(doc["positions"]) == len(doc["coverage"]) == len(doc["travel_sq"])
    assert set(doc["positions"][0]) == {"x_m", "y_m"}


def test_map(tmp_path, capsys):
    plan_path = tmp_path / "plan.json"
    run(capsys, "solve", "--scenario", T1, "--out", str(plan_path))
    code, out, _ = run(capsys, "map", "--scenario", T1, "--plan", str(plan_path))
    assert code == 0 and json.loads(out)["type"] == "FeatureCollection"
    doc = json.loads(plan_path.read_text())
    doc["restored_mw"] = 10.0
    plan_path.write_text(json.dumps(doc))
    assert run(capsys, "map", "--scenario", T1, "--plan", str(plan_path))[0] == 2


def test_gen(tmp_path, capsys):
    path = tmp_path / "tiny.json"
    assert run(capsys, "gen", "--seed", "4", "--out", str(path))[0] == 0
    s = load_scenario(path)
    assert validate(s) == [] and len(s.nodes) <= 6
    run(capsys, "gen", "--seed", "4", "--out", str(tmp_path / "again.json"))
    assert (tmp_path / "again.json").read_text() == path.read_text()
