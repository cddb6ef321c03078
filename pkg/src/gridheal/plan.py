"""Restoration plan: the decided switching, drone dispatch and operating point."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import networkx as nx

from .grid import OperationalState, Point, Scenario


@dataclass
class DscPlacement:
    position: Point
    candidate: int | None = None


@dataclass
class RestorationPlan:
    strategy: str
    branch_state: dict[str, bool]
    dsc_placements: dict[str, DscPlacement]
    assignments: list[tuple[str, str]]  # (switch address, dsc id)
    operable: dict[str, bool]
    switchable: dict[str, bool]
    pickups: dict[str, bool]
    energized: dict[str, bool]
    roots: list[str]
    dg_dispatch: dict[str, tuple[float, float]]
    flows: dict[str, tuple[float, float]]
    voltages: dict[str, float]
    restored_mw: float
    travel_penalty: float
    travel_sq: float = 0.0
    objective: float | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    # ----------------------------------------------------------------- reporting

    def closed_branches(self) -> list[str]:
        return sorted(b for b, closed in self.branch_state.items() if closed)

    def switching_restored(self, state: OperationalState) -> list[str]:
        """Branches made switchable again by drone-restored switches."""
        out = []
        for b in state.scenario.branches:
            if not self.switchable.get(b.id):
                continue
            if any(f"{b.id}@{n}" in state.comm_failed for n in b.ends):
                out.append(b.id)
        return out

    def closed_by_reconfiguration(self, state: OperationalState) -> list[str]:
        return [
            b.id
            for b in state.scenario.branches
            if self.branch_state.get(b.id) and not state.effective_closed[b.id]
        ]

    def microgrids(self, scenario: Scenario) -> list[set[str]]:
        """Energized connected components over closed branches."""
        g = nx.Graph()
        live = [n for n, on in self.energized.items() if on]
        g.add_nodes_from(live)
        for b in scenario.branches:
            if self.branch_state.get(b.id) and self.energized.get(b.from_node) and self.energized.get(b.to_node):
                g.add_edge(b.from_node, b.to_node)
        comps = [set(c) for c in nx.connected_components(g)]
        return sorted(comps, key=lambda c: sorted(c))

    # ----------------------------------------------------------------- JSON

    def to_dict(self) -> dict[str, Any]:
        return {
            "strategy": self.strategy,
            "restored_mw": _r(self.restored_mw),
            "travel_penalty": _r(self.travel_penalty),
            "travel_sq_m2": _r(self.travel_sq),
            "objective": None if self.objective is None else _r(self.objective),
            "branch_state": dict(sorted(self.branch_state.items())),
            "switchable": dict(sorted(self.switchable.items())),
            "operable": dict(sorted(self.operable.items())),
            "dsc_placements": {
                k: {"x_m": _r(p.position[0]), "y_m": _r(p.position[1]), "candidate": p.candidate}
                for k, p in sorted(self.dsc_placements.items())
            },
            "assignments": [{"switch": s, "dsc": k} for s, k in sorted(self.assignments)],
            "pickups": dict(sorted(self.pickups.items())),
            "energized": dict(sorted(self.energized.items())),
            "roots": sorted(self.roots),
            "dg_dispatch": {
                n: {"p_mw": _r(p), "q_mvar": _r(q)} for n, (p, q) in sorted(self.dg_dispatch.items())
            },
            "flows": {b: {"p_mw": _r(p), "q_mvar": _r(q)} for b, (p, q) in sorted(self.flows.items())},
            "voltages": {n: _r(v) for n, v in sorted(self.voltages.items())},
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RestorationPlan":
        return cls(
            strategy=d.get("strategy", "unknown"),
            branch_state={k: bool(v) for k, v in d["branch_state"].items()},
            dsc_placements={
                k: DscPlacement((float(p["x_m"]), float(p["y_m"])), p.get("candidate"))
                for k, p in d.get("dsc_placements", {}).items()
            },
            assignments=[(a["switch"], a["dsc"]) for a in d.get("assignments", [])],
            operable={k: bool(v) for k, v in d.get("operable", {}).items()},
            switchable={k: bool(v) for k, v in d.get("switchable", {}).items()},
            pickups={k: bool(v) for k, v in d["pickups"].items()},
            energized={k: bool(v) for k, v in d["energized"].items()},
            roots=list(d.get("roots", [])),
            dg_dispatch={k: (float(v["p_mw"]), float(v["q_mvar"])) for k, v in d.get("dg_dispatch", {}).items()},
            flows={k: (float(v["p_mw"]), float(v["q_mvar"])) for k, v in d.get("flows", {}).items()},
            voltages={k: float(v) for k, v in d.get("voltages", {}).items()},
            restored_mw=float(d["restored_mw"]),
            travel_penalty=float(d.get("travel_penalty", 0.0)),
            travel_sq=float(d.get("travel_sq_m2", 0.0)),
            objective=d.get("objective"),
            meta=d.get("meta", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "RestorationPlan":
        return cls.from_dict(json.loads(text))


def _r(x: float) -> float:
    # stable text output: 12 significant digits, no negative zero
    y = float(f"{x:.12g}")
    return 0.0 if y == 0 else y
