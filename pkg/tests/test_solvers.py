import pytest

from gridheal.formulation import build_proposed, extract_plan
from gridheal.grid import apply_damage
from gridheal.model import MilpModel, affine
from gridheal.solvers import BACKENDS, BackendError, get_backend, solve

BACKEND_NAMES = sorted(BACKENDS)


def trivial() -> MilpModel:
    m = MilpModel("trivial")
    m.add_var("d", "binary")
    m.set_objective({"d": 1.0})
    return m


def infeasible() -> MilpModel:
    m = MilpModel("infeasible")
    m.add_var("x", lb=-10.0, ub=10.0)
    m.add("lo", {"x": 1.0}, ">=", 1.0)
    m.add("hi", {"x": 1.0}, "<=", 0.0)
    m.set_objective({"x": 1.0})
    return m


@pytest.mark.parametrize("name", BACKEND_NAMES)
def test_trivial(name):
    res = solve(trivial(), name)
    assert res.status == "optimal" and res.objective == 1.0 and res.values["d"] == 1.0
    assert res.backend == name


@pytest.mark.parametrize("name", BACKEND_NAMES)
def test_infeasible(name):
    assert solve(infeasible(), name).status == "infeasible"


@pytest.mark.parametrize("name", BACKEND_NAMES)
def test_t1_objective(name, t1):
    m = build_proposed(apply_damage(t1))
    res = solve(m, name)
    plan = extract_plan(m, res.values)
    assert res.objective == pytest.approx(3.0 - plan.travel_penalty, abs=1e-9)
    assert 0 < plan.travel_penalty < 0.5


def test_cone_support():
    m = MilpModel("cone")
    m.add_var("x", lb=-5.0, ub=5.0)
    m.add_var("y", lb=-5.0, ub=5.0)
    m.add_cone("disk", [affine({"x": 1.0}, -1.0), affine({"y": 1.0})], affine({}, 2.0))
    m.set_objective({"x": 1.0})
    assert solve(m, "scip").objective == pytest.approx(3.0, abs=1e-6)
    with pytest.raises(BackendError):
        solve(m, "highs")


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("GRIDHEAL_BACKEND", "scip")
    assert get_backend().name == "scip"
    assert get_backend("highs").name == "highs"
    monkeypatch.delenv("GRIDHEAL_BACKEND")
    assert get_backend().name == "highs"
    with pytest.raises(BackendError):
        get_backend("cplex")


def test_continuous_mode_not_worse(t2):
    st = apply_damage(t2)
    disc = build_proposed(st)
    cont = build_proposed(st, mode="continuous")
    pd = extract_plan(disc, solve(disc, "scip").values)
    pc = extract_plan(cont, solve(cont, "scip").values)
    assert pc.restored_mw == pytest.approx(pd.restored_mw)
    assert pc.travel_sq <= pd.travel_sq + 1e-3
