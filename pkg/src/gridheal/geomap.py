"""GeoJSON rendering of a verified plan in the scenario's planar coordinates."""

from __future__ import annotations

import math

from .grid import Scenario, apply_damage
from .plan import RestorationPlan
from .powerflow import verify_plan

CIRCLE_SEGMENTS = 64


class UnverifiedPlanError(ValueError):
    pass


def _circle(center, radius, n=CIRCLE_SEGMENTS):
    ring = [
        [center[0] + radius * math.cos(2 * math.pi * i / n), center[1] + radius * math.sin(2 * math.pi * i / n)]
        for i in range(n)
    ]
    ring.append(ring[0])
    return ring


def emit_map(scenario: Scenario, plan: RestorationPlan) -> dict:
    """Feature collection: nodes, branches, drone points and coverage circles."""
    report = verify_plan(scenario, plan)
    if not report.passed:
        raise UnverifiedPlanError(f"plan fails verification: {', '.join(report.failed())}")
    state = apply_damage(scenario)
    label = {}
    for i, comp in enumerate(plan.microgrids(scenario), start=1):
        for n in comp:
            label[n] = f"MG{i}"

    features = []
    for n in scenario.nodes:
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": list(n.position)},
            "properties": {
                "kind": "node",
                "id": n.id,
                "energized": bool(plan.energized.get(n.id)),
                "picked_up": bool(plan.pickups.get(n.id)),
                "microgrid": label.get(n.id),
                "dg": n.dg is not None,
                "load_mw": n.load_p,
            },
        })
    for b in scenario.branches:
        if b.id in state.faulted:
            status = "faulted"
        else:
            status = "closed" if plan.branch_state.get(b.id) else "open"
        a, c = scenario.node_map[b.from_node], scenario.node_map[b.to_node]
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": [list(a.position), list(c.position)]},
            "properties": {
                "kind": "branch",
                "id": b.id,
                "status": status,
                "switching_restored": b.id in plan.switching_restored(state),
                "microgrid": label.get(b.from_node) if status == "closed" else None,
            },
        })
    dscs = {d.id: d for d in scenario.dscs}
    for k, place in sorted(plan.dsc_placements.items()):
        served = sorted(a for a, d in plan.assignments if d == k)
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": list(place.position)},
            "properties": {"kind": "dsc", "id": k, "serves": served},
        })
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [_circle(place.position, dscs[k].radius)]},
            "properties": {"kind": "coverage", "id": k, "radius_m": dscs[k].radius},
        })
    return {"type": "FeatureCollection", "features": features}
