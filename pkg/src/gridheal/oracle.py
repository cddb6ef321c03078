"""Exhaustive enumeration oracle for tiny instances.

Solves the same restoration problem as the optimization model by brute
force, using only graph algorithms and the forward sweep. Drone decisions
are enumerated as (candidate per drone, set of restored branches);
restoration depends on drones only through the set of switchable branches
and improves monotonically with it, so each achievable restored-branch set
is evaluated once and cached.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import networkx as nx

from .coverage import CandidateSet, big_m_for, fleet_candidates
from .grid import Dsc, OperationalState
from .plan import DscPlacement, RestorationPlan
from .powerflow import forward_sweep

EPS = 1e-9


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleLimits:
    max_free_branches: int = 12
    max_loads: int = 8
    max_dscs: int = 2
    max_candidates: int = 8


@dataclass(frozen=True)
class Restoration:
    """Best restoration for one set of switchable branches."""

    restored: float
    closed: frozenset[str]
    pickups: frozenset[str]
    microgrids: tuple[tuple[str, frozenset[str], frozenset[str]], ...]  # (root, nodes, branches)
    totals: frozenset[float]  # every feasible restored total, for dominance checks


@dataclass(frozen=True)
class DroneChoice:
    candidates: tuple[int, ...]
    restored_branches: frozenset[str]
    assignment: tuple[tuple[str, str], ...]
    travel_sq: float


class _Enumerator:
    def __init__(self, state: OperationalState, limits: OracleLimits):
        self.state = state
        self.s = state.scenario
        self.limits = limits
        self.live = [b for b in self.s.branches if b.id not in state.faulted]

    # ----------------------------------------------------------------- pickups

    @lru_cache(maxsize=None)
    def microgrid(self, branches: frozenset[str], nodes: frozenset[str], root: str):
        """(best total, best pickup set, all feasible totals) for one single-DG tree."""
        loads = sorted(n for n in nodes if self.s.node_map[n].load_p > 0)
        infeasible: list[frozenset[str]] = []
        best, best_set = 0.0, frozenset()
        totals = {0.0}
        for size in range(1, len(loads) + 1):
            for combo in itertools.combinations(loads, size):
                pick = frozenset(combo)
                # adding load never relieves a radial network
                if any(bad <= pick for bad in infeasible):
                    continue
                sweep = forward_sweep(self.s, sorted(branches), pick, root, tol=EPS)
                if not sweep.feasible:
                    infeasible.append(pick)
                    continue
                total = math.fsum(self.s.node_map[n].load_p for n in pick)
                totals.add(total)
                if total > best + EPS:
                    best, best_set = total, pick
        return best, best_set, frozenset(totals)

    # ----------------------------------------------------------------- topology

    @lru_cache(maxsize=None)
    def restoration(self, switchable: frozenset[str]) -> Restoration:
        free = [b for b in self.live if b.id in switchable]
        fixed = [b for b in self.live if b.id not in switchable and self.state.effective_closed[b.id]]
        if len(free) > self.limits.max_free_branches:
            raise OracleError(f"{len(free)} free branches exceed limit")
        best: Restoration | None = None
        all_totals: set[float] = set()
        for bits in itertools.product((0, 1), repeat=len(free)):
            closed = [b for b, on in zip(free, bits) if on] + fixed
            g = nx.MultiGraph()
            g.add_nodes_from(n.id for n in self.s.nodes)
            for b in closed:
                g.add_edge(b.from_node, b.to_node, key=b.id)
            value, picks, mgs = 0.0, set(), []
            comp_totals = [{0.0}]
            for comp in nx.connected_components(g):
                sub = g.subgraph(comp)
                if sub.number_of_edges() != len(comp) - 1:
                    continue  # meshed: must stay dead
                dgs = [n for n in comp if self.s.node_map[n].dg is not None]
                if not dgs:
                    continue
                if len(dgs) > 1:
                    raise OracleError(f"energizable component with {len(dgs)} DGs")
                edges = frozenset(k for _, _, k in sub.edges(keys=True))
                v, pick, totals = self.microgrid(edges, frozenset(comp), dgs[0])
                comp_totals.append(set(totals))
                if pick:
                    value += v
                    picks |= pick
                    mgs.append((dgs[0], frozenset(comp), edges))
            sums = {0.0}
            for t in comp_totals:
                sums = {round(a + b, 9) for a in sums for b in t}
            all_totals |= sums
            if best is None or value > best.restored + EPS:
                best = Restoration(
                    value, frozenset(b.id for b in closed), frozenset(picks),
                    tuple(sorted(mgs, key=lambda m: m[0])), frozenset(),
                )
        assert best is not None
        return Restoration(best.restored, best.closed, best.pickups, best.microgrids, frozenset(all_totals))

    # ----------------------------------------------------------------- drones

    def drone_choices(self, fleet: Sequence[Dsc], cands: Sequence[CandidateSet]):
        restorable = [
            b for b in self.s.branches
            if b.switchable and any(f"{b.id}@{n}" in self.state.comm_failed for n in b.ends)
        ]
        needs = {
            b.id: [f"{b.id}@{n}" for n in b.ends if f"{b.id}@{n}" in self.state.comm_failed]
            for b in restorable
        }
        for tup in itertools.product(*(range(len(c)) for c in cands)):
            covers = [cands[k].covered_by(c) for k, c in enumerate(tup)]
            travel = math.fsum(cands[k].travel_sq[c] for k, c in enumerate(tup))
            for size in range(len(restorable) + 1):
                for chosen in itertools.combinations(restorable, size):
                    wanted = sorted({a for b in chosen for a in needs[b.id]})
                    assign = _assign(wanted, fleet, covers)
                    if assign is not None:
                        yield DroneChoice(tup, frozenset(b.id for b in chosen), assign, travel)

    def switchable_set(self, restored: frozenset[str]) -> frozenset[str]:
        out = set()
        for b in self.s.branches:
            if not b.switchable:
                continue
            failed = any(f"{b.id}@{n}" in self.state.comm_failed for n in b.ends)
            if not failed or b.id in restored:
                out.add(b.id)
        return frozenset(out)


def _assign(wanted: list[str], fleet: Sequence[Dsc], covers: list[frozenset[str]]):
    """Capacity-respecting switch-to-drone assignment via max flow, or None."""
    if not wanted:
        return ()
    if any(not any(a in c for c in covers) for a in wanted):
        return None
    if len(fleet) == 1:
        return tuple((a, fleet[0].id) for a in wanted) if len(wanted) <= fleet[0].capacity else None
    g = nx.DiGraph()
    for k, d in enumerate(fleet):
        g.add_edge("src", f"k{k}", capacity=d.capacity)
        for a in wanted:
            if a in covers[k]:
                g.add_edge(f"k{k}", f"s{a}", capacity=1)
    for a in wanted:
        g.add_edge(f"s{a}", "sink", capacity=1)
    if "src" not in g:
        return None
    value, flow = nx.maximum_flow(g, "src", "sink")
    if value < len(wanted):
        return None
    out = []
    for k, d in enumerate(fleet):
        for a in wanted:
            if flow.get(f"k{k}", {}).get(f"s{a}", 0) > 0.5:
                out.append((a, d.id))
    return tuple(sorted(out))


def _check_limits(state: OperationalState, fleet, cands, limits: OracleLimits) -> None:
    if len(fleet) > limits.max_dscs:
        raise OracleError(f"{len(fleet)} drones exceed limit {limits.max_dscs}")
    for c in cands:
        if len(c) > limits.max_candidates:
            raise OracleError(f"{len(c)} candidates exceed limit {limits.max_candidates}")
    loads = sum(1 for n in state.scenario.nodes if n.load_p > 0)
    if loads > limits.max_loads:
        raise OracleError(f"{loads} loads exceed limit {limits.max_loads}")
    free = sum(1 for b in state.scenario.branches if b.switchable and b.id not in state.faulted)
    if free > limits.max_free_branches:
        raise OracleError(f"{free} switchable branches exceed limit {limits.max_free_branches}")


@dataclass
class OracleResult:
    plan: RestorationPlan
    outcomes: list[tuple[float, float]]  # (restored total, travel penalty) pairs


def brute_force(
    state: OperationalState,
    fleet: Sequence[Dsc] | None = None,
    candidates: Sequence[CandidateSet] | None = None,
    limits: OracleLimits = OracleLimits(),
    strategy: str = "proposed",
) -> RestorationPlan:
    return enumerate_restoration(state, fleet, candidates, limits, strategy).plan


def enumerate_restoration(
    state: OperationalState,
    fleet: Sequence[Dsc] | None = None,
    candidates: Sequence[CandidateSet] | None = None,
    limits: OracleLimits = OracleLimits(),
    strategy: str = "proposed",
) -> OracleResult:
    """Exact optimum for ``proposed``, ``nodsc`` or ``maxcomm`` by enumeration."""
    s = state.scenario
    if strategy not in ("proposed", "nodsc", "maxcomm"):
        raise ValueError(f"unknown strategy {strategy!r}")
    fleet = tuple(s.dscs if fleet is None else fleet)
    if strategy == "nodsc":
        fleet, candidates = (), ()
    cands = tuple(fleet_candidates(state, fleet) if candidates is None else candidates)
    _check_limits(state, fleet, cands, limits)
    m_obj = big_m_for(state, fleet).m_objective
    en = _Enumerator(state, limits)

    best = None
    best_key = None
    outcomes = []
    for choice in en.drone_choices(fleet, cands):
        rest = en.restoration(en.switchable_set(choice.restored_branches))
        penalty = choice.travel_sq / m_obj
        outcomes.extend((t, penalty) for t in rest.totals)
        if strategy == "maxcomm":
            key = (len(choice.restored_branches), -choice.travel_sq, rest.restored)
        else:
            key = (rest.restored, -choice.travel_sq)
        if best_key is None or _better(key, best_key):
            best, best_key = (choice, rest), key
    assert best is not None
    choice, rest = best
    return OracleResult(_plan(state, fleet, cands, choice, rest, m_obj, strategy), outcomes)


def _better(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        scale = max(1.0, abs(x), abs(y))
        if x > y + EPS * scale:
            return True
        if x < y - EPS * scale:
            return False
    return False


def _plan(state, fleet, cands, choice: DroneChoice, rest: Restoration, m_obj, strategy) -> RestorationPlan:
    s = state.scenario
    served = {a for a, _ in choice.assignment}
    operable = {sw.address: (sw.address not in state.comm_failed or sw.address in served) for sw in s.switches}
    switchable = {
        b.id: b.switchable and all(operable[f"{b.id}@{n}"] for n in b.ends) for b in s.branches
    }
    energized = {n.id: False for n in s.nodes}
    flows, volts, dispatch, roots = {}, {}, {}, []
    for root, nodes, edges in rest.microgrids:
        sweep = forward_sweep(s, sorted(edges), rest.pickups & nodes, root, tol=EPS)
        for n in nodes:
            energized[n] = True
        flows.update(sweep.flows)
        volts.update(sweep.voltages)
        dispatch[root] = sweep.injection
        roots.append(root)
    for b in rest.closed:
        flows.setdefault(b, (0.0, 0.0))
    placements = {
        d.id: DscPlacement(cands[k].positions[c], c) for k, (d, c) in enumerate(zip(fleet, choice.candidates))
    }
    restored = math.fsum(s.node_map[n].load_p for n in rest.pickups)
    return RestorationPlan(
        strategy=strategy,
        branch_state={b.id: b.id in rest.closed for b in s.branches},
        dsc_placements=placements,
        assignments=list(choice.assignment),
        operable=operable,
        switchable=switchable,
        pickups={n.id: n.id in rest.pickups for n in s.nodes},
        energized=energized,
        roots=sorted(roots),
        dg_dispatch=dispatch,
        flows=flows,
        voltages=volts,
        restored_mw=restored,
        travel_penalty=choice.travel_sq / m_obj,
        travel_sq=choice.travel_sq,
        objective=restored - choice.travel_sq / m_obj,
        meta={"source": "oracle", "m_objective": m_obj},
    )
