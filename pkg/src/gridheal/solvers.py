"""MIP backends behind a narrow interface.

A backend translates a :class:`MilpModel` into its own API, solves, and
reports values keyed by model variable names. ``highs`` handles linear
models; ``scip`` additionally accepts second-order cones and is required
for continuous drone placement.

Set ``GRIDHEAL_BACKEND`` to choose the default backend.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .model import MilpModel

DEFAULT_MIP_GAP = 1e-9


class BackendError(RuntimeError):
    pass


@dataclass
class SolveResult:
    status: str  # optimal | infeasible | time_limit | error
    objective: float = math.nan
    values: dict[str, float] = field(default_factory=dict)
    bound: float = math.nan
    wall_time: float = 0.0
    backend: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


class Backend:
    name = "abstract"
    supports_cones = False

    def solve(self, model: MilpModel, mip_gap: float = DEFAULT_MIP_GAP,
              time_limit: float | None = None) -> SolveResult:
        raise NotImplementedError


class HighsBackend(Backend):
    name = "highs"
    supports_cones = False

    def solve(self, model, mip_gap=DEFAULT_MIP_GAP, time_limit=None):
        import highspy

        if model.cones:
            raise BackendError("highs backend does not support second-order cones")
        names = list(model.variables)
        col = {n: i for i, n in enumerate(names)}
        inf = highspy.kHighsInf

        lp = highspy.HighsLp()
        lp.num_col_ = len(names)
        lp.num_row_ = len(model.constraints)
        lp.col_cost_ = np.array([model.objective.get(n, 0.0) for n in names])
        lp.offset_ = model.objective_constant
        lp.sense_ = highspy.ObjSense.kMaximize
        lp.col_lower_ = np.array([_inf(model.variables[n].lb, inf) for n in names])
        lp.col_upper_ = np.array([_inf(model.variables[n].ub, inf) for n in names])
        lower, upper = [], []
        cols: list[list[tuple[int, float]]] = [[] for _ in names]
        for r, c in enumerate(model.constraints):
            for v, a in c.coeffs:
                cols[col[v]].append((r, a))
            lower.append(c.rhs if c.sense in (">=", "==") else -inf)
            upper.append(c.rhs if c.sense in ("<=", "==") else inf)
        lp.row_lower_ = np.array(lower, dtype=float)
        lp.row_upper_ = np.array(upper, dtype=float)
        start, index, value = [0], [], []
        for entries in cols:
            for r, a in entries:
                index.append(r)
                value.append(a)
            start.append(len(index))
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = np.array(start, dtype=np.int32)
        lp.a_matrix_.index_ = np.array(index, dtype=np.int32)
        lp.a_matrix_.value_ = np.array(value, dtype=float)
        integral = [model.variables[n].kind == "binary" for n in names]
        if any(integral):
            lp.integrality_ = [
                highspy.HighsVarType.kInteger if i else highspy.HighsVarType.kContinuous
                for i in integral
            ]

        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("threads", 1)
        h.setOptionValue("random_seed", 0)
        h.setOptionValue("mip_rel_gap", mip_gap)
        h.setOptionValue("mip_abs_gap", 0.0)
        # restart presolve has returned suboptimal "optimal" points on tight rows
        h.setOptionValue("mip_allow_restart", False)
        if time_limit:
            h.setOptionValue("time_limit", float(time_limit))
        h.passModel(lp)
        t0 = time.perf_counter()
        h.run()
        wall = time.perf_counter() - t0

        status = h.getModelStatus()
        S = highspy.HighsModelStatus
        if status == S.kOptimal:
            label = "optimal"
        elif status in (S.kInfeasible, S.kUnboundedOrInfeasible):
            return SolveResult("infeasible", wall_time=wall, backend=self.name)
        elif status == S.kTimeLimit:
            label = "time_limit"
        else:
            return SolveResult("error", wall_time=wall, backend=self.name)
        sol = h.getSolution()
        if not sol.value_valid:
            return SolveResult(label if label != "optimal" else "error", wall_time=wall, backend=self.name)
        x = list(sol.col_value)
        info = h.getInfo()
        obj = h.getInfoValue("objective_function_value")[1]
        bound = info.mip_dual_bound if any(integral) else obj
        return SolveResult(label, float(obj), dict(zip(names, map(float, x))), float(bound), wall, self.name)


def _inf(x: float, inf: float) -> float:
    if math.isinf(x):
        return inf if x > 0 else -inf
    return x


class ScipBackend(Backend):
    name = "scip"
    supports_cones = True

    def solve(self, model, mip_gap=DEFAULT_MIP_GAP, time_limit=None):
        try:
            import pyscipopt as ps
        except ImportError as exc:  # pragma: no cover - optional dependency
            raise BackendError("scip backend needs the pyscipopt package") from exc

        m = ps.Model(model.name)
        m.hideOutput()
        m.setParam("limits/gap", mip_gap)
        m.setParam("limits/absgap", 0.0)
        m.setParam("randomization/randomseedshift", 0)
        if time_limit:
            m.setParam("limits/time", float(time_limit))
        xs = {}
        for n, v in model.variables.items():
            lb = None if math.isinf(v.lb) else v.lb
            ub = None if math.isinf(v.ub) else v.ub
            xs[n] = m.addVar(n, vtype="B" if v.kind == "binary" else "C", lb=lb, ub=ub)
        for i, c in enumerate(model.constraints):
            expr = ps.quicksum(a * xs[v] for v, a in c.coeffs)
            if c.sense == "<=":
                m.addCons(expr <= c.rhs, name=f"{c.tag}_{i}")
            elif c.sense == ">=":
                m.addCons(expr >= c.rhs, name=f"{c.tag}_{i}")
            else:
                m.addCons(expr == c.rhs, name=f"{c.tag}_{i}")
        for i, c in enumerate(model.cones):
            terms = [t.const + ps.quicksum(a * xs[v] for v, a in t.coeffs) for t in c.terms]
            bound = c.bound.const + ps.quicksum(a * xs[v] for v, a in c.bound.coeffs)
            m.addCons(bound >= 0, name=f"{c.tag}_{i}_nonneg")
            m.addCons(ps.quicksum(t * t for t in terms) <= bound * bound, name=f"{c.tag}_{i}")
        m.setObjective(
            ps.quicksum(a * xs[v] for v, a in model.objective.items()) + model.objective_constant,
            "maximize",
        )
        t0 = time.perf_counter()
        m.optimize()
        wall = time.perf_counter() - t0
        st = m.getStatus()
        if st == "infeasible":
            return SolveResult("infeasible", wall_time=wall, backend=self.name)
        label = {"optimal": "optimal", "timelimit": "time_limit", "gaplimit": "optimal"}.get(st, "error")
        if m.getNSols() == 0:
            return SolveResult("error" if label == "optimal" else label, wall_time=wall, backend=self.name)
        sol = m.getBestSol()
        values = {n: float(m.getSolVal(sol, x)) for n, x in xs.items()}
        return SolveResult(label, float(m.getObjVal()), values, float(m.getDualbound()), wall, self.name)


BACKENDS: dict[str, type[Backend]] = {"highs": HighsBackend, "scip": ScipBackend}


def get_backend(name: str | Backend | None = None) -> Backend:
    if isinstance(name, Backend):
        return name
    name = name or os.environ.get("GRIDHEAL_BACKEND", "highs")
    try:
        return BACKENDS[name]()
    except KeyError:
        raise BackendError(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}") from None


def solve(model: MilpModel, backend: str | Backend | None = None,
          mip_gap: float = DEFAULT_MIP_GAP, time_limit: float | None = None) -> SolveResult:
    b = get_backend(backend)
    if model.cones and not b.supports_cones:
        raise BackendError(f"backend {b.name} cannot handle second-order cone constraints")
    return b.solve(model, mip_gap=mip_gap, time_limit=time_limit)
