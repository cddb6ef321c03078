"""Integrated restoration model with drone-based communication recovery.

The model couples three layers:

* communication recovery: which failed switches each drone restores, given
  its coverage disk and connection capacity, and the resulting operability
  of every switch and switchability of every branch;
* topology: closed branches over energized nodes form a forest in which
  every tree is rooted at exactly one DG (virtual-root spanning forest with a
  single-commodity fictitious flow);
* operation: lossless linearized branch flow with voltage limits.

The objective maximizes picked-up load and, as a strictly subordinate term,
minimizes the fleet's squared travel from its starting point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .coverage import BigM, CandidateSet, big_m_for, euclidean_distance, fleet_candidates, scenario_extent
from .grid import Dsc, OperationalState, SolveOptions, Switch
from .model import MilpModel, affine
from .plan import DscPlacement, RestorationPlan


class ExtractionError(RuntimeError):
    def __init__(self, tag: str, detail: str = ""):
        super().__init__(f"solution violates {tag} after rounding {detail}".rstrip())
        self.tag = tag


# --------------------------------------------------------------------------- naming


def v_alpha(b: str) -> str:
    return f"alpha[{b}]"


def v_mu(b: str) -> str:
    return f"mu[{b}]"


def v_beta(b: str) -> str:
    return f"beta[{b}]"


def v_gamma(sw: str) -> str:
    return f"gamma[{sw}]"


def v_lambda(sw: str, k: str) -> str:
    return f"lambda[{sw},{k}]"


def v_z(k: str, c: int) -> str:
    return f"z[{k},{c}]"


def v_delta(n: str) -> str:
    return f"delta[{n}]"


def v_e(n: str) -> str:
    return f"e[{n}]"


def v_root(n: str) -> str:
    return f"v[{n}]"


def _sym_branch(state: OperationalState, b: str) -> str:
    br = state.scenario.branch_map[b]
    return f"({br.from_node},{br.to_node})"


def _sym_switch(state: OperationalState, sw: Switch) -> str:
    br = state.scenario.branch_map[sw.branch]
    return f"({sw.end},{br.other(sw.end)})"


@dataclass(frozen=True)
class BuildContext:
    """What a built model needs to be mapped back to a plan."""

    state: OperationalState
    fleet: tuple[Dsc, ...]
    candidates: tuple[CandidateSet, ...]
    bigm: BigM
    mode: str
    strategy: str

    @property
    def m_operability(self) -> float:
        return float(max(1, len(self.fleet)))


def _ctx(model: MilpModel) -> BuildContext:
    return model.meta["ctx"]


def restorable_branches(state: OperationalState) -> list[str]:
    """Switchable branches with at least one comm-failed switch."""
    out = []
    for b in state.scenario.branches:
        if b.switchable and any(f"{b.id}@{n}" in state.comm_failed for n in b.ends):
            out.append(b.id)
    return out


# --------------------------------------------------------------------------- variables


def declare_comm_variables(model: MilpModel, ctx: BuildContext) -> None:
    state = ctx.state
    for sw in state.scenario.switches:
        model.add_var(v_gamma(sw.address), "binary", symbol=f"γ{_sym_switch(state, sw)}")
    for b in state.scenario.branches:
        if b.switchable:
            model.add_var(v_mu(b.id), "binary", symbol=f"μ{_sym_branch(state, b.id)}")
    failed = state.failed_switches()
    for k, dsc in enumerate(ctx.fleet):
        for sw in failed:
            model.add_var(
                v_lambda(sw.address, dsc.id), "binary",
                symbol=f"λ{_sym_switch(state, sw)}@k={dsc.id}",
            )
        if ctx.mode == "discrete":
            for c in range(len(ctx.candidates[k])):
                model.add_var(v_z(dsc.id, c), "binary", symbol=f"z[{dsc.id},{c}]")
        else:
            box = scenario_extent(state, dsc.radius)
            model.add_var(f"xbar[{dsc.id}]", lb=box.xmin, ub=box.xmax, symbol=f"x̄[{dsc.id}]")
            model.add_var(f"ybar[{dsc.id}]", lb=box.ymin, ub=box.ymax, symbol=f"ȳ[{dsc.id}]")
            model.add_var(f"t[{dsc.id}]", lb=0.0, ub=box.diagonal**2, symbol=f"travel²[{dsc.id}]")
            for sw in failed:
                model.add_var(
                    f"d[{sw.address},{dsc.id}]", lb=0.0, ub=box.diagonal,
                    symbol=f"d{_sym_switch(state, sw)}^k={dsc.id}",
                )


def declare_grid_variables(model: MilpModel, ctx: BuildContext) -> None:
    state, opts = ctx.state, ctx.state.scenario.options
    s = state.scenario
    for b in s.branches:
        if b.id in state.faulted:
            continue
        sym = _sym_branch(state, b.id)
        if b.switchable:
            model.add_var(v_alpha(b.id), "binary", symbol=f"α{sym}")
        else:
            fixed = float(state.effective_closed[b.id])
            model.add_var(v_alpha(b.id), "binary", lb=fixed, ub=fixed, symbol=f"α{sym}")
        model.add_var(v_beta(b.id), "binary", symbol=f"β{sym}")
        model.add_var(f"F[{b.id}]", lb=-math.inf, ub=math.inf, symbol=f"F{sym}")
        model.add_var(f"P[{b.id}]", lb=-b.s_max, ub=b.s_max, symbol=f"P{sym}")
        model.add_var(f"Q[{b.id}]", lb=-b.s_max, ub=b.s_max, symbol=f"Q{sym}")
    for n in s.nodes:
        model.add_var(v_e(n.id), "binary", symbol=f"e({n.id})")
        model.add_var(v_delta(n.id), "binary", symbol=f"δ({n.id})")
        model.add_var(
            f"V[{n.id}]", lb=opts.voltage_min - 1.0, ub=opts.voltage_max + 1.0, symbol=f"V({n.id})"
        )
        if n.dg is not None:
            model.add_var(v_root(n.id), "binary", symbol=f"v_g({n.id})")
            model.add_var(f"F0[{n.id}]", lb=0.0, symbol=f"F(0,{n.id})")
            model.add_var(f"pg[{n.id}]", lb=0.0, ub=n.dg.p_max, symbol=f"p^g({n.id})")
            model.add_var(f"qg[{n.id}]", lb=0.0, ub=n.dg.q_max, symbol=f"q^g({n.id})")


# --------------------------------------------------------------------------- emitters


def emit_comm_constraints(
    model: MilpModel,
    state: OperationalState,
    candidates: Sequence[CandidateSet],
    fleet: Sequence[Dsc],
    bigm: BigM,
) -> int:
    """Capacity, coverage, operability and placement constraints."""
    start = len(model.constraints) + len(model.cones)
    mode = _ctx(model).mode
    failed = state.failed_switches()
    for k, dsc in enumerate(fleet):
        if dsc.capacity < 0:
            raise ValueError(f"dsc {dsc.id}: negative capacity")
        if mode == "discrete":
            cs = candidates[k]
            if len(cs) == 0:
                raise ValueError(f"dsc {dsc.id}: empty candidate set")
            model.add("placement", {v_z(dsc.id, c): 1.0 for c in range(len(cs))}, "==", 1.0)
            col = {a: j for j, a in enumerate(cs.switches)}
            for sw in failed:
                row = {v_lambda(sw.address, dsc.id): 1.0}
                for c in range(len(cs)):
                    if cs.coverage[c, col[sw.address]]:
                        row[v_z(dsc.id, c)] = -1.0
                model.add("coverage", row, "<=", 0.0)
        else:
            r = dsc.radius + state.scenario.options.coverage_tol
            m = bigm.m_coverage
            xb, yb = f"xbar[{dsc.id}]", f"ybar[{dsc.id}]"
            for sw in failed:
                d = f"d[{sw.address},{dsc.id}]"
                lam = v_lambda(sw.address, dsc.id)
                model.add_cone(
                    "distance",
                    [affine({xb: 1.0}, -sw.position[0]), affine({yb: 1.0}, -sw.position[1])],
                    affine({d: 1.0}),
                )
                model.add("coverage", {lam: 1.0, d: 1.0 / m}, ">=", r / m - 1.0)
                model.add("coverage", {lam: 1.0, d: 1.0 / m}, "<=", r / m + 1.0)
        model.add("capacity", {v_lambda(sw.address, dsc.id): 1.0 for sw in failed}, "<=", float(dsc.capacity))

    m_op = float(max(1, len(fleet)))
    for sw in state.scenario.switches:
        g = v_gamma(sw.address)
        if sw.address in state.comm_failed:
            lams = {v_lambda(sw.address, d.id): 1.0 for d in fleet}
            model.add("operability", {**{k: v / m_op for k, v in lams.items()}, g: -1.0}, "<=", 0.0)
            model.add("operability", {g: 1.0, **{k: -v for k, v in lams.items()}}, "<=", 0.0)
        else:
            model.add("operable", {g: 1.0}, "==", 1.0)
    return len(model.constraints) + len(model.cones) - start


def emit_switchability_constraints(model: MilpModel, state: OperationalState) -> int:
    """Both-ends operability product and the keep-initial-state rule."""
    start = len(model.constraints)
    for b in state.scenario.branches:
        if not b.switchable:
            continue
        mu = v_mu(b.id)
        gi, gj = v_gamma(f"{b.id}@{b.from_node}"), v_gamma(f"{b.id}@{b.to_node}")
        model.add("switchability", {mu: 1.0, gi: -1.0}, "<=", 0.0)
        model.add("switchability", {mu: 1.0, gj: -1.0}, "<=", 0.0)
        model.add("switchability", {gi: 1.0, gj: 1.0, mu: -1.0}, "<=", 1.0)
        if b.id in state.faulted:
            continue
        L = float(state.effective_closed[b.id])
        a = v_alpha(b.id)
        # (1 - mu) L <= alpha <= mu + L
        model.add("keep-state", {a: 1.0, mu: L}, ">=", L)
        model.add("keep-state", {a: 1.0, mu: -1.0}, "<=", L)
    return len(model.constraints) - start


def emit_radiality_constraints(model: MilpModel, state: OperationalState) -> int:
    s = state.scenario
    if not s.dg_nodes:
        raise ValueError("scenario has no DG")
    start = len(model.constraints)
    big = float(len(s.nodes))
    live = [b for b in s.branches if b.id not in state.faulted]
    for b in live:
        a, be = v_alpha(b.id), v_beta(b.id)
        ei, ej = v_e(b.from_node), v_e(b.to_node)
        # beta = alpha AND e_i; a closed branch joins nodes of equal energization
        model.add("radiality", {be: 1.0, a: -1.0}, "<=", 0.0)
        model.add("radiality", {be: 1.0, ei: -1.0}, "<=", 0.0)
        model.add("radiality", {be: 1.0, ej: -1.0}, "<=", 0.0)
        model.add("radiality", {be: 1.0, a: -1.0, ei: -1.0}, ">=", -1.0)
        model.add("radiality", {ei: 1.0, ej: -1.0, a: 1.0}, "<=", 1.0)
        model.add("radiality", {ej: 1.0, ei: -1.0, a: 1.0}, "<=", 1.0)
        f = f"F[{b.id}]"
        model.add("radiality", {f: 1.0, be: -big}, "<=", 0.0)
        model.add("radiality", {f: 1.0, be: big}, ">=", 0.0)
    for g in s.dg_nodes:
        model.add("radiality", {v_root(g): 1.0, v_e(g): -1.0}, "<=", 0.0)
        model.add("radiality", {f"F0[{g}]": 1.0, v_root(g): -big}, "<=", 0.0)
    count = {v_beta(b.id): 1.0 for b in live}
    count.update({v_root(g): 1.0 for g in s.dg_nodes})
    for n in s.nodes:
        count[v_e(n.id)] = -1.0
    model.add("radiality", count, "==", 0.0)
    for n in s.nodes:
        row: dict[str, float] = {v_e(n.id): -1.0}
        for b in live:
            if b.to_node == n.id:
                row[f"F[{b.id}]"] = row.get(f"F[{b.id}]", 0.0) + 1.0
            elif b.from_node == n.id:
                row[f"F[{b.id}]"] = row.get(f"F[{b.id}]", 0.0) - 1.0
        if n.dg is not None:
            row[f"F0[{n.id}]"] = 1.0
        model.add("radiality", row, "==", 0.0)
    return len(model.constraints) - start


def voltage_big_m(state: OperationalState, options: SolveOptions) -> float:
    live = [b for b in state.scenario.branches if b.id not in state.faulted]
    worst = max((b.s_max * (b.r + b.x) for b in live), default=0.0)
    return (options.voltage_max - options.voltage_min) + 2.0 * worst / options.voltage_ref


def emit_power_flow_constraints(model: MilpModel, state: OperationalState, options: SolveOptions) -> int:
    if not options.voltage_ref > 0:
        raise ValueError("voltage_ref must be positive")
    start = len(model.constraints)
    s = state.scenario
    vref = options.voltage_ref
    m_v = voltage_big_m(state, options)
    live = [b for b in s.branches if b.id not in state.faulted]
    for n in s.nodes:
        prow: dict[str, float] = {v_delta(n.id): -n.load_p}
        qrow: dict[str, float] = {v_delta(n.id): -n.load_q}
        for b in live:
            sign = 1.0 if b.to_node == n.id else -1.0 if b.from_node == n.id else 0.0
            if sign:
                prow[f"P[{b.id}]"] = sign
                qrow[f"Q[{b.id}]"] = sign
        if n.dg is not None:
            prow[f"pg[{n.id}]"] = 1.0
            qrow[f"qg[{n.id}]"] = 1.0
            model.add("dg", {f"pg[{n.id}]": 1.0, v_e(n.id): -n.dg.p_max}, "<=", 0.0)
            model.add("dg", {f"qg[{n.id}]": 1.0, v_e(n.id): -n.dg.q_max}, "<=", 0.0)
        model.add("flow", prow, "==", 0.0)
        model.add("flow", qrow, "==", 0.0)
        model.add("pickup", {v_delta(n.id): 1.0, v_e(n.id): -1.0}, "<=", 0.0)
        V, e = f"V[{n.id}]", v_e(n.id)
        model.add("voltage", {V: 1.0, e: -1.0}, ">=", options.voltage_min - 1.0)
        model.add("voltage", {V: 1.0, e: 1.0}, "<=", options.voltage_max + 1.0)
        if n.dg is not None:
            model.add("voltage", {V: 1.0, v_root(n.id): -1.0}, ">=", vref - 1.0)
            model.add("voltage", {V: 1.0, v_root(n.id): 1.0}, "<=", vref + 1.0)
    for b in live:
        P, Q, be = f"P[{b.id}]", f"Q[{b.id}]", v_beta(b.id)
        model.add("flow", {P: 1.0, be: -b.s_max}, "<=", 0.0)
        model.add("flow", {P: 1.0, be: b.s_max}, ">=", 0.0)
        model.add("flow", {Q: 1.0, be: -b.s_max}, "<=", 0.0)
        model.add("flow", {Q: 1.0, be: b.s_max}, ">=", 0.0)
        # V_to = V_from - (r P + x Q) / V_ref on energized closed branches
        drop = {f"V[{b.to_node}]": 1.0, f"V[{b.from_node}]": -1.0}
        if b.r:
            drop[P] = b.r / vref
        if b.x:
            drop[Q] = b.x / vref
        model.add("voltage", {**drop, be: -m_v}, ">=", -m_v)
        model.add("voltage", {**drop, be: m_v}, "<=", m_v)
    return len(model.constraints) - start


def travel_terms(model: MilpModel, candidates: Sequence[CandidateSet], fleet: Sequence[Dsc]) -> dict[str, float]:
    """Squared-travel expression of the fleet, in m²."""
    ctx = _ctx(model)
    terms: dict[str, float] = {}
    for k, dsc in enumerate(fleet):
        if ctx.mode == "discrete":
            for c, t in enumerate(candidates[k].travel_sq):
                if t:
                    terms[v_z(dsc.id, c)] = t
        else:
            terms[f"t[{dsc.id}]"] = 1.0
    return terms


def _emit_travel_cones(model: MilpModel, fleet: Sequence[Dsc]) -> None:
    # t >= (x - x0)^2 + (y - y0)^2  as  ||(2(x-x0), 2(y-y0), t-1)|| <= t+1
    for dsc in fleet:
        x0, y0 = dsc.initial_position
        t = f"t[{dsc.id}]"
        model.add_cone(
            "objective-travel",
            [
                affine({f"xbar[{dsc.id}]": 2.0}, -2.0 * x0),
                affine({f"ybar[{dsc.id}]": 2.0}, -2.0 * y0),
                affine({t: 1.0}, -1.0),
            ],
            affine({t: 1.0}, 1.0),
        )


def emit_objective(model: MilpModel, candidates: Sequence[CandidateSet], bigm: BigM) -> dict[str, float]:
    ctx = _ctx(model)
    obj = {v_delta(n.id): n.load_p for n in ctx.state.scenario.nodes if n.load_p}
    for var, t in travel_terms(model, candidates, ctx.fleet).items():
        obj[var] = obj.get(var, 0.0) - t / bigm.m_objective
    if ctx.mode == "continuous":
        _emit_travel_cones(model, ctx.fleet)
    model.set_objective(obj)
    return model.objective


# --------------------------------------------------------------------------- builders


def _prepare(state: OperationalState, fleet: Sequence[Dsc] | None, mode: str | None,
             strategy: str, quantum: float | None = None) -> tuple[MilpModel, BuildContext]:
    s = state.scenario
    fleet = tuple(s.dscs if fleet is None else fleet)
    mode = mode or s.options.position_mode
    if mode not in ("discrete", "continuous"):
        raise ValueError(f"unknown position mode {mode!r}")
    cands = tuple(fleet_candidates(state, fleet)) if mode == "discrete" else ()
    ctx = BuildContext(state, fleet, cands, big_m_for(state, fleet, quantum), mode, strategy)
    model = MilpModel(name=strategy, meta={"ctx": ctx})
    return model, ctx


def _restoration_body(model: MilpModel, ctx: BuildContext) -> None:
    declare_comm_variables(model, ctx)
    declare_grid_variables(model, ctx)
    emit_comm_constraints(model, ctx.state, ctx.candidates, ctx.fleet, ctx.bigm)
    emit_switchability_constraints(model, ctx.state)
    emit_radiality_constraints(model, ctx.state)
    emit_power_flow_constraints(model, ctx.state, ctx.state.scenario.options)
    emit_objective(model, ctx.candidates, ctx.bigm)


def build_proposed(state: OperationalState, fleet: Sequence[Dsc] | None = None,
                   mode: str | None = None) -> MilpModel:
    """Integrated restoration with drone dispatch."""
    model, ctx = _prepare(state, fleet, mode, "proposed")
    _restoration_body(model, ctx)
    return model


def build_nodsc(state: OperationalState, mode: str | None = None) -> MilpModel:
    """Restoration without drones: failed switches stay inoperable."""
    model, ctx = _prepare(state, (), mode, "nodsc")
    _restoration_body(model, ctx)
    return model


def build_maxcomm(
    state: OperationalState, fleet: Sequence[Dsc] | None = None, mode: str | None = None
) -> tuple[MilpModel, Callable[[Mapping[str, float]], MilpModel]]:
    """Communication-first benchmark.

    Stage 1 places drones to maximize the number of branches whose
    switching capability is restored (ties: least travel), ignoring the
    grid. The returned builder takes stage 1's solution values and builds
    stage 2: full restoration restricted to drone decisions that are
    optimal for stage 1.
    """
    stage1, ctx1 = _prepare(state, fleet, mode, "maxcomm-stage1", quantum=1.0)
    declare_comm_variables(stage1, ctx1)
    emit_comm_constraints(stage1, state, ctx1.candidates, ctx1.fleet, ctx1.bigm)
    emit_switchability_constraints_comm_only(stage1, state)
    restorable = restorable_branches(state)
    obj = {v_mu(b): 1.0 for b in restorable}
    for var, t in travel_terms(stage1, ctx1.candidates, ctx1.fleet).items():
        obj[var] = obj.get(var, 0.0) - t / ctx1.bigm.m_objective
    if ctx1.mode == "continuous":
        _emit_travel_cones(stage1, ctx1.fleet)
    stage1.set_objective(obj)

    def stage2(values: Mapping[str, float]) -> MilpModel:
        count = sum(round(values[v_mu(b)]) for b in restorable)
        travel = _travel_value(stage1, values)
        model, ctx = _prepare(state, fleet, mode, "maxcomm")
        _restoration_body(model, ctx)
        if restorable:
            model.add("maxcomm", {v_mu(b): 1.0 for b in restorable}, ">=", float(count))
        terms = travel_terms(model, ctx.candidates, ctx.fleet)
        if terms:
            # normalized so the row has unit-scale coefficients
            scale = max(travel, 1.0)
            model.add("maxcomm", {v: t / scale for v, t in terms.items()}, "<=",
                      (travel * (1 + 1e-9) + 1e-6) / scale)
        model.meta["stage1"] = {"restored_switching": count, "travel_sq_m2": travel}
        return model

    return stage1, stage2


def emit_switchability_constraints_comm_only(model: MilpModel, state: OperationalState) -> int:
    """Branch switchability from operability alone (no grid variables)."""
    start = len(model.constraints)
    for b in state.scenario.branches:
        if not b.switchable:
            continue
        mu = v_mu(b.id)
        gi, gj = v_gamma(f"{b.id}@{b.from_node}"), v_gamma(f"{b.id}@{b.to_node}")
        model.add("switchability", {mu: 1.0, gi: -1.0}, "<=", 0.0)
        model.add("switchability", {mu: 1.0, gj: -1.0}, "<=", 0.0)
        model.add("switchability", {gi: 1.0, gj: 1.0, mu: -1.0}, "<=", 1.0)
    return len(model.constraints) - start


def _travel_value(model: MilpModel, values: Mapping[str, float]) -> float:
    ctx = _ctx(model)
    if ctx.mode == "discrete":
        return math.fsum(t * round(values[v]) for v, t in travel_terms(model, ctx.candidates, ctx.fleet).items())
    return math.fsum(
        euclidean_distance((values[f"xbar[{d.id}]"], values[f"ybar[{d.id}]"]), d.initial_position) ** 2
        for d in ctx.fleet
    )


# --------------------------------------------------------------------------- extraction


def extract_plan(model: MilpModel, raw: Mapping[str, float], tol: float = 1e-6) -> RestorationPlan:
    """Round binaries, re-check every constraint and map values to a plan."""
    ctx = _ctx(model)
    state, s = ctx.state, ctx.state.scenario
    values: dict[str, float] = {}
    for name, var in model.variables.items():
        x = float(raw[name])
        values[name] = float(round(x)) if var.kind == "binary" else x
    bad = model.violations(values, tol)
    if bad:
        tag, res = max(bad, key=lambda t: t[1])
        raise ExtractionError(tag, f"(residual {res:.3g})")

    def on(name: str) -> bool:
        return values.get(name, 0.0) > 0.5

    placements: dict[str, DscPlacement] = {}
    travel = []
    for k, dsc in enumerate(ctx.fleet):
        if ctx.mode == "discrete":
            chosen = [c for c in range(len(ctx.candidates[k])) if on(v_z(dsc.id, c))]
            c = chosen[0]
            placements[dsc.id] = DscPlacement(ctx.candidates[k].positions[c], c)
            travel.append(ctx.candidates[k].travel_sq[c])
        else:
            pos = (values[f"xbar[{dsc.id}]"], values[f"ybar[{dsc.id}]"])
            placements[dsc.id] = DscPlacement(pos, None)
            travel.append(euclidean_distance(pos, dsc.initial_position) ** 2)
    travel_sq = math.fsum(travel)

    assignments = []
    tol_cov = s.options.coverage_tol
    for dsc in ctx.fleet:
        pos = placements[dsc.id].position
        for sw in state.failed_switches():
            if on(v_lambda(sw.address, dsc.id)):
                # continuous positions come from a solver; allow its feasibility slack
                slack = tol_cov + (tol if ctx.mode == "continuous" else 0.0)
                if euclidean_distance(pos, sw.position) > dsc.radius + slack:
                    raise ExtractionError("coverage", f"({sw.address} outside coverage of {dsc.id})")
                assignments.append((sw.address, dsc.id))

    branch_state = {b.id: (b.id not in state.faulted and on(v_alpha(b.id))) for b in s.branches}
    energized = {n.id: on(v_e(n.id)) for n in s.nodes}
    pickups = {n.id: on(v_delta(n.id)) for n in s.nodes}
    flows = {
        b.id: (values[f"P[{b.id}]"], values[f"Q[{b.id}]"])
        for b in s.branches
        if branch_state[b.id]
    }
    dispatch = {
        n.id: (values[f"pg[{n.id}]"], values[f"qg[{n.id}]"])
        for n in s.nodes
        if n.dg is not None and energized[n.id]
    }
    restored = math.fsum(n.load_p for n in s.nodes if pickups[n.id])
    plan = RestorationPlan(
        strategy=ctx.strategy,
        branch_state=branch_state,
        dsc_placements=placements,
        assignments=sorted(assignments),
        operable={sw.address: on(v_gamma(sw.address)) for sw in s.switches},
        switchable={b.id: (b.switchable and on(v_mu(b.id))) for b in s.branches},
        pickups=pickups,
        energized=energized,
        roots=sorted(g for g in s.dg_nodes if on(v_root(g))),
        dg_dispatch=dispatch,
        flows=flows,
        voltages={n.id: values[f"V[{n.id}]"] for n in s.nodes if energized[n.id]},
        restored_mw=restored,
        travel_penalty=travel_sq / ctx.bigm.m_objective,
        travel_sq=travel_sq,
        objective=model.objective_value(values),
        meta={"mode": ctx.mode, "m_objective": ctx.bigm.m_objective},
    )
    return plan
