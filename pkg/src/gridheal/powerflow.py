"""Radial forward sweep and the independent plan verifier.

The sweep uses the same lossless linear physics as the optimization model:
branch flow is the sum of downstream picked-up load and each node's voltage
drops from its parent's by (r·P + x·Q)/V_ref.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .coverage import euclidean_distance
from .grid import OperationalState, Scenario, SolveOptions, apply_damage
from .plan import RestorationPlan


class SweepError(ValueError):
    pass


@dataclass(frozen=True)
class SweepViolation:
    kind: str  # voltage | dg_p | dg_q | thermal
    entity: str
    margin: float


@dataclass
class SweepResult:
    flows: dict[str, tuple[float, float]]
    voltages: dict[str, float]
    injection: tuple[float, float]
    violations: list[SweepViolation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations


def forward_sweep(
    scenario: Scenario,
    tree: Iterable[str],
    pickups: Iterable[str],
    root: str,
    options: SolveOptions | None = None,
    tol: float = 1e-9,
) -> SweepResult:
    """Flows and voltages of a single-DG radial microgrid.

    ``tree`` lists the closed branch ids; its nodes plus ``root`` must form
    a tree. Flows are reported in each branch's from→to orientation.
    """
    opts = options or scenario.options
    root_node = scenario.node_map[root]
    if root_node.dg is None:
        raise SweepError(f"root {root} has no DG")
    branches = [scenario.branch_map[b] for b in tree]
    adj: dict[str, list] = {root: []}
    for b in branches:
        adj.setdefault(b.from_node, []).append(b)
        adj.setdefault(b.to_node, []).append(b)
    if len(branches) != len(adj) - 1:
        raise SweepError("topology is not a tree")

    parent: dict[str, tuple[str, object]] = {}
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for b in adj[u]:
            w = b.other(u)
            if w in seen:
                continue
            seen.add(w)
            parent[w] = (u, b)
            order.append(w)
            queue.append(w)
    if len(seen) != len(adj):
        raise SweepError("topology is not connected")

    picked = set(pickups)
    if not picked <= seen:
        raise SweepError("pickups outside the tree")
    sub_p = {n: (scenario.node_map[n].load_p if n in picked else 0.0) for n in order}
    sub_q = {n: (scenario.node_map[n].load_q if n in picked else 0.0) for n in order}
    for n in reversed(order[1:]):
        u, _ = parent[n]
        sub_p[u] += sub_p[n]
        sub_q[u] += sub_q[n]

    vref = opts.voltage_ref
    volts = {root: vref}
    flows: dict[str, tuple[float, float]] = {}
    viol: list[SweepViolation] = []
    for n in order[1:]:
        u, b = parent[n]
        p, q = sub_p[n], sub_q[n]  # parent -> child
        volts[n] = volts[u] - (b.r * p + b.x * q) / vref
        sign = 1.0 if b.from_node == u else -1.0
        flows[b.id] = (sign * p, sign * q)
        over = max(abs(p), abs(q)) - b.s_max
        if over > tol:
            viol.append(SweepViolation("thermal", b.id, over))
    for n in order:
        v = volts[n]
        if v < opts.voltage_min - tol:
            viol.append(SweepViolation("voltage", n, opts.voltage_min - v))
        elif v > opts.voltage_max + tol:
            viol.append(SweepViolation("voltage", n, v - opts.voltage_max))
    inj = (sub_p[root], sub_q[root])
    if inj[0] > root_node.dg.p_max + tol:
        viol.append(SweepViolation("dg_p", root, inj[0] - root_node.dg.p_max))
    if inj[1] > root_node.dg.q_max + tol:
        viol.append(SweepViolation("dg_q", root, inj[1] - root_node.dg.q_max))
    return SweepResult(flows, volts, inj, viol)


# --------------------------------------------------------------------------- verification

FAMILIES = ("coverage", "capacity", "operability", "switchability", "radiality", "operation", "pickup")


@dataclass
class FamilyResult:
    passed: bool = True
    worst_residual: float = 0.0
    detail: list[str] = field(default_factory=list)

    def fail(self, msg: str, residual: float = math.inf) -> None:
        self.passed = False
        self.worst_residual = max(self.worst_residual, residual)
        self.detail.append(msg)

    def residual(self, r: float) -> None:
        self.worst_residual = max(self.worst_residual, r)


@dataclass
class VerificationReport:
    families: dict[str, FamilyResult]

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.families.values())

    def failed(self) -> list[str]:
        return [k for k, f in self.families.items() if not f.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "families": {
                k: {
                    "passed": f.passed,
                    "worst_residual": None if math.isinf(f.worst_residual) else f.worst_residual,
                    "detail": f.detail,
                }
                for k, f in self.families.items()
            },
        }


def verify_plan(scenario: Scenario, plan: RestorationPlan, tol: float = 1e-6,
                state: OperationalState | None = None) -> VerificationReport:
    """Check a plan against the scenario without reference to any solver model."""
    state = state or apply_damage(scenario)
    fam = {k: FamilyResult() for k in FAMILIES}
    dscs = {d.id: d for d in scenario.dscs}
    opts = scenario.options

    # (a) coverage and (b) capacity
    load: dict[str, int] = {}
    served: set[str] = set()
    for addr, k in plan.assignments:
        sw, dsc, place = scenario.switch_map.get(addr), dscs.get(k), plan.dsc_placements.get(k)
        if sw is None or dsc is None or place is None:
            fam["coverage"].fail(f"assignment {addr}->{k} references unknown entity")
            continue
        if addr not in state.comm_failed:
            fam["coverage"].fail(f"{addr} is not comm-failed but assigned to {k}")
        d = euclidean_distance(place.position, sw.position)
        excess = d - dsc.radius - opts.coverage_tol
        fam["coverage"].residual(max(excess, 0.0))
        if excess > tol:
            fam["coverage"].fail(f"{addr} is {d:.3f} m from {k} (radius {dsc.radius})", excess)
        load[k] = load.get(k, 0) + 1
        served.add(addr)
    for k, n in load.items():
        if k in dscs and n > dscs[k].capacity:
            fam["capacity"].fail(f"{k} serves {n} > capacity {dscs[k].capacity}", n - dscs[k].capacity)

    # (c) operability
    for sw in scenario.switches:
        expect = sw.address not in state.comm_failed or sw.address in served
        got = plan.operable.get(sw.address, False)
        if got != expect:
            fam["operability"].fail(f"{sw.address}: operable={got}, expected {expect}", 1.0)

    # (d) switchability and state freezing
    for b in scenario.branches:
        mu = plan.switchable.get(b.id, False)
        expect = b.switchable and all(plan.operable.get(f"{b.id}@{n}", False) for n in b.ends)
        if mu != expect:
            fam["switchability"].fail(f"{b.id}: switchable={mu}, expected {expect}", 1.0)
        alpha = plan.branch_state.get(b.id, False)
        if b.id in state.faulted and alpha:
            fam["switchability"].fail(f"{b.id}: faulted branch closed", 1.0)
        elif not expect and alpha != state.effective_closed[b.id]:
            fam["switchability"].fail(f"{b.id}: not switchable but state changed", 1.0)

    # (e) radiality
    energized = {n for n, on in plan.energized.items() if on}
    roots = set(plan.roots)
    for b in scenario.branches:
        if plan.branch_state.get(b.id) and ((b.from_node in energized) != (b.to_node in energized)):
            fam["radiality"].fail(f"{b.id}: closed between energized and dead node", 1.0)
    for r in roots:
        if scenario.node_map[r].dg is None or r not in energized:
            fam["radiality"].fail(f"root {r} is not an energized DG node", 1.0)
    g = nx.MultiGraph()
    g.add_nodes_from(energized)
    closed_live = [
        b for b in scenario.branches
        if plan.branch_state.get(b.id) and b.from_node in energized and b.to_node in energized
    ]
    for b in closed_live:
        g.add_edge(b.from_node, b.to_node, key=b.id)
    components = [set(c) for c in nx.connected_components(g)]
    for comp in components:
        sub = g.subgraph(comp)
        label = ",".join(sorted(comp))
        if sub.number_of_edges() != len(comp) - 1:
            fam["radiality"].fail(f"component {{{label}}} has a cycle", 1.0)
        if not any(scenario.node_map[n].dg is not None for n in comp):
            fam["radiality"].fail(f"component {{{label}}} has no DG", 1.0)
        nroots = len(comp & roots)
        if nroots != 1:
            fam["radiality"].fail(f"component {{{label}}} has {nroots} roots", 1.0)

    # (f) operation
    _check_operation(scenario, state, plan, components, closed_live, fam["operation"], tol)

    # (g) pickup
    for n, picked in plan.pickups.items():
        if picked and n not in energized:
            fam["pickup"].fail(f"{n} picked up but not energized", 1.0)
    restored = math.fsum(scenario.node_map[n].load_p for n, p in plan.pickups.items() if p)
    diff = abs(restored - plan.restored_mw)
    fam["pickup"].residual(diff)
    if diff > tol:
        fam["pickup"].fail(f"restored_mw {plan.restored_mw} != recomputed {restored}", diff)
    return VerificationReport(fam)


def _check_operation(scenario, state, plan, components, closed_live, res: FamilyResult, tol):
    opts = scenario.options
    nodes = scenario.node_map
    picked = {n for n, p in plan.pickups.items() if p}
    tree_branches = {b.id for b in closed_live}

    for bid, (p, q) in plan.flows.items():
        if bid not in tree_branches and (abs(p) > tol or abs(q) > tol):
            res.fail(f"{bid}: flow on a branch outside any microgrid", max(abs(p), abs(q)))
    for n, (p, q) in plan.dg_dispatch.items():
        if n not in plan.energized or not plan.energized[n]:
            if abs(p) > tol or abs(q) > tol:
                res.fail(f"{n}: dead DG dispatched", max(abs(p), abs(q)))

    for comp in components:
        dgs = [n for n in comp if nodes[n].dg is not None]
        comp_branches = [b for b in closed_live if b.from_node in comp]
        if len(dgs) == 1 and len(comp_branches) == len(comp) - 1:
            sweep = forward_sweep(scenario, [b.id for b in comp_branches], picked & comp, dgs[0], opts, tol)
            for v in sweep.violations:
                res.fail(f"sweep {v.kind} violation at {v.entity}", v.margin)
            for b in comp_branches:
                fp, fq = plan.flows.get(b.id, (0.0, 0.0))
                sp, sq = sweep.flows[b.id]
                r = max(abs(fp - sp), abs(fq - sq))
                res.residual(r)
                if r > tol:
                    res.fail(f"{b.id}: plan flow differs from sweep by {r:.3g}", r)
            for n in comp:
                r = abs(plan.voltages.get(n, math.nan) - sweep.voltages[n])
                if not r <= tol:
                    res.fail(f"{n}: plan voltage differs from sweep", r if r == r else math.inf)
                res.residual(r if r == r else 0.0)
            pg, qg = plan.dg_dispatch.get(dgs[0], (0.0, 0.0))
            r = max(abs(pg - sweep.injection[0]), abs(qg - sweep.injection[1]))
            res.residual(r)
            if r > tol:
                res.fail(f"{dgs[0]}: dispatch differs from sweep", r)
        else:
            _check_linear(scenario, plan, comp, comp_branches, picked, res, tol)


def _check_linear(scenario, plan, comp, comp_branches, picked, res: FamilyResult, tol):
    """Multi-DG microgrid: substitute the plan into the linear operating constraints."""
    opts = scenario.options
    nodes = scenario.node_map
    bal = {n: [0.0, 0.0] for n in comp}
    for b in comp_branches:
        p, q = plan.flows.get(b.id, (0.0, 0.0))
        bal[b.to_node][0] += p
        bal[b.to_node][1] += q
        bal[b.from_node][0] -= p
        bal[b.from_node][1] -= q
        over = max(abs(p), abs(q)) - b.s_max
        if over > tol:
            res.fail(f"{b.id}: thermal limit exceeded", over)
        vi, vj = plan.voltages.get(b.from_node), plan.voltages.get(b.to_node)
        if vi is None or vj is None:
            res.fail(f"{b.id}: missing voltage")
            continue
        r = abs(vj - vi + (b.r * p + b.x * q) / opts.voltage_ref)
        res.residual(r)
        if r > tol:
            res.fail(f"{b.id}: voltage drop mismatch", r)
    for n in comp:
        node = nodes[n]
        pg, qg = plan.dg_dispatch.get(n, (0.0, 0.0))
        dp = node.load_p if n in picked else 0.0
        dq = node.load_q if n in picked else 0.0
        r = max(abs(bal[n][0] + pg - dp), abs(bal[n][1] + qg - dq))
        res.residual(r)
        if r > tol:
            res.fail(f"{n}: power balance residual {r:.3g}", r)
        if node.dg is not None:
            if pg < -tol or pg > node.dg.p_max + tol or qg < -tol or qg > node.dg.q_max + tol:
                res.fail(f"{n}: DG dispatch out of limits")
        elif pg or qg:
            res.fail(f"{n}: dispatch at a node without DG")
        v = plan.voltages.get(n)
        if v is None or v < opts.voltage_min - tol or v > opts.voltage_max + tol:
            res.fail(f"{n}: voltage {v} out of limits")
        if n in plan.roots and v is not None and abs(v - opts.voltage_ref) > tol:
            res.fail(f"{n}: root voltage not at reference", abs(v - opts.voltage_ref))
