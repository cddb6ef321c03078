"""Run restoration strategies end to end and tabulate them side by side."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .formulation import build_maxcomm, build_nodsc, build_proposed, extract_plan
from .grid import Scenario, apply_damage
from .plan import RestorationPlan
from .powerflow import VerificationReport, verify_plan
from .solvers import DEFAULT_MIP_GAP, get_backend, solve

log = logging.getLogger(__name__)

STRATEGIES = ("proposed", "nodsc", "maxcomm")


@dataclass
class StrategyOutcome:
    strategy: str
    status: str  # optimal | infeasible | time_limit | error | unverified
    plan: RestorationPlan | None = None
    report: VerificationReport | None = None
    wall_time: float = 0.0
    message: str = ""


def run_strategy(
    scenario: Scenario,
    strategy: str,
    backend=None,
    mode: str | None = None,
    time_limit: float | None = None,
    mip_gap: float = DEFAULT_MIP_GAP,
) -> StrategyOutcome:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    backend = get_backend(backend)
    state = apply_damage(scenario)
    t0 = time.perf_counter()
    if strategy == "proposed":
        model = build_proposed(state, mode=mode)
    elif strategy == "nodsc":
        model = build_nodsc(state, mode=mode)
    else:
        stage1, stage2 = build_maxcomm(state, mode=mode)
        r1 = solve(stage1, backend, mip_gap, time_limit)
        if not r1.ok:
            return StrategyOutcome(strategy, r1.status, wall_time=time.perf_counter() - t0,
                                   message="stage 1 did not reach optimality")
        model = stage2(r1.values)
    log.info("%s: %s", strategy, model.stats())
    res = solve(model, backend, mip_gap, time_limit)
    wall = time.perf_counter() - t0
    if not res.ok:
        return StrategyOutcome(strategy, res.status, wall_time=wall)
    plan = extract_plan(model, res.values)
    plan.meta.update({"backend": backend.name, "status": res.status})
    if "stage1" in model.meta:
        plan.meta["stage1"] = model.meta["stage1"]
    report = verify_plan(scenario, plan, state=state)
    status = "optimal" if report.passed else "unverified"
    return StrategyOutcome(strategy, status, plan, report, wall)


@dataclass
class ComparisonRow:
    name: str
    status: str
    restored_mw: float | None = None
    switches_restored: list[str] = field(default_factory=list)
    branches_closed_by_reconfig: list[str] = field(default_factory=list)
    mg_count: int | None = None
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "restored_mw": self.restored_mw,
            "switches_restored": self.switches_restored,
            "branches_closed_by_reconfig": self.branches_closed_by_reconfig,
            "mg_count": self.mg_count,
            "wall_time_s": round(self.wall_time_s, 3),
        }


@dataclass
class ComparisonTable:
    rows: list[ComparisonRow]

    def row(self, name: str) -> ComparisonRow:
        return next(r for r in self.rows if r.name == name)

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows]}

    def to_text(self, scenario: Scenario | None = None) -> str:
        label = _branch_label(scenario)
        head = ("Strategy", "Restored (MW)", "Branch restored switching", "Branch closed by reconfiguration", "MGs")
        body = []
        for r in self.rows:
            if r.restored_mw is None:
                body.append((r.name, r.status, "", "", ""))
                continue
            body.append((
                r.name,
                f"{r.restored_mw:.4g}",
                "; ".join(label(b) for b in r.switches_restored) or "/",
                "; ".join(label(b) for b in r.branches_closed_by_reconfig) or "/",
                str(r.mg_count),
            ))
        widths = [max(len(str(x[i])) for x in [head, *body]) for i in range(len(head))]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        lines = [fmt.format(*head), fmt.format(*("-" * w for w in widths))]
        lines += [fmt.format(*row) for row in body]
        lines = [line.rstrip() for line in lines]
        return "\n".join(lines) + "\n"


def _branch_label(scenario: Scenario | None):
    if scenario is None:
        return str
    return lambda b: "({}, {})".format(*scenario.branch_map[b].ends)


def row_for(scenario: Scenario, outcome: StrategyOutcome) -> ComparisonRow:
    if outcome.plan is None:
        return ComparisonRow(outcome.strategy, outcome.status, wall_time_s=outcome.wall_time)
    state = apply_damage(scenario)
    plan = outcome.plan
    return ComparisonRow(
        name=outcome.strategy,
        status=outcome.status,
        restored_mw=round(plan.restored_mw, 9),
        switches_restored=plan.switching_restored(state),
        branches_closed_by_reconfig=plan.closed_by_reconfiguration(state),
        mg_count=len(plan.microgrids(scenario)),
        wall_time_s=outcome.wall_time,
    )


def run_compare(scenario: Scenario, backend=None, mode: str | None = None,
                time_limit: float | None = None, parallel: bool = False) -> tuple[ComparisonTable, dict]:
    """Solve every strategy; rows follow STRATEGIES order whatever the execution order."""
    def one(name: str) -> StrategyOutcome:
        return run_strategy(scenario, name, backend, mode, time_limit)

    if parallel:
        with ThreadPoolExecutor(len(STRATEGIES)) as pool:
            outcomes = dict(zip(STRATEGIES, pool.map(one, STRATEGIES)))
    else:
        outcomes = {name: one(name) for name in STRATEGIES}
    table = ComparisonTable([row_for(scenario, outcomes[n]) for n in STRATEGIES])
    return table, outcomes
