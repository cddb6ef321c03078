"""Network, damage and drone-fleet data model plus scenario-file ingestion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Iterable, Mapping

import jsonschema
import networkx as nx

Point = tuple[float, float]


class ScenarioError(ValueError):
    """Raised when a scenario document cannot be turned into a Scenario."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class DanglingReferenceError(ScenarioError):
    pass


class DuplicateIdError(ScenarioError):
    pass


@dataclass(frozen=True)
class DG:
    p_max: float
    q_max: float


@dataclass(frozen=True)
class Node:
    id: str
    position: Point
    load_p: float = 0.0
    load_q: float = 0.0
    dg: DG | None = None


@dataclass(frozen=True)
class Branch:
    id: str
    from_node: str
    to_node: str
    initial_closed: bool
    switchable: bool
    r: float
    x: float
    s_max: float

    @property
    def ends(self) -> tuple[str, str]:
        return (self.from_node, self.to_node)

    def other(self, node: str) -> str:
        return self.to_node if node == self.from_node else self.from_node


@dataclass(frozen=True)
class Switch:
    """Switch (and its FTU) on ``branch`` sitting at node ``end``."""

    branch: str
    end: str
    position: Point

    @property
    def address(self) -> str:
        return switch_address(self.branch, self.end)


def switch_address(branch_id: str, node_id: str) -> str:
    return f"{branch_id}@{node_id}"


@dataclass(frozen=True)
class Dsc:
    id: str
    radius: float
    capacity: int
    initial_position: Point


@dataclass(frozen=True)
class CommRegion:
    center: Point
    radius: float

    def contains(self, p: Point) -> bool:
        return math.dist(self.center, p) <= self.radius


@dataclass(frozen=True)
class DamageScenario:
    faulted_branches: frozenset[str] = frozenset()
    comm_failed: frozenset[str] = frozenset()
    comm_failed_regions: tuple[CommRegion, ...] = ()


@dataclass(frozen=True)
class SolveOptions:
    voltage_min: float = 0.95
    voltage_max: float = 1.05
    voltage_ref: float = 1.0
    coverage_tol: float = 1e-6
    big_m_policy: str = "auto"
    position_mode: str = "discrete"


@dataclass(frozen=True)
class Scenario:
    nodes: tuple[Node, ...]
    branches: tuple[Branch, ...]
    switches: tuple[Switch, ...]
    dscs: tuple[Dsc, ...]
    damage: DamageScenario = field(default_factory=DamageScenario)
    options: SolveOptions = field(default_factory=SolveOptions)

    @cached_property
    def node_map(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def branch_map(self) -> dict[str, Branch]:
        return {b.id: b for b in self.branches}

    @cached_property
    def switch_map(self) -> dict[str, Switch]:
        return {s.address: s for s in self.switches}

    @property
    def dg_nodes(self) -> list[str]:
        return [n.id for n in self.nodes if n.dg is not None]

    def comm_failed_switches(self) -> frozenset[str]:
        """Explicit failed switches plus every switch inside a failed region."""
        failed = set(self.damage.comm_failed)
        for region in self.damage.comm_failed_regions:
            failed.update(s.address for s in self.switches if region.contains(s.position))
        return frozenset(failed)

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(n.id for n in self.nodes)
        for b in self.branches:
            g.add_edge(b.from_node, b.to_node, key=b.id)
        return g


def derive_switches(nodes: Iterable[Node], branches: Iterable[Branch]) -> tuple[Switch, ...]:
    pos = {n.id: n.position for n in nodes}
    out = []
    for b in branches:
        if b.switchable:
            out.append(Switch(b.id, b.from_node, pos[b.from_node]))
            out.append(Switch(b.id, b.to_node, pos[b.to_node]))
    return tuple(out)


# --------------------------------------------------------------------------- parsing

_NUM = {"type": "number"}
_ID = {"type": ["string", "integer"]}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["nodes", "branches"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "nodes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "x_m", "y_m"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "x_m": _NUM,
                    "y_m": _NUM,
                    "p_mw": _NUM,
                    "q_mvar": _NUM,
                    "dg": {
                        "type": "object",
                        "required": ["p_max_mw"],
                        "additionalProperties": False,
                        "properties": {"p_max_mw": _NUM, "q_max_mvar": _NUM},
                    },
                },
            },
        },
        "branches": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "from", "to"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "from": _ID,
                    "to": _ID,
                    "closed": {"type": "boolean"},
                    "switchable": {"type": "boolean"},
                    "r_pu": _NUM,
                    "x_pu": _NUM,
                    "s_max_mva": _NUM,
                },
            },
        },
        "dscs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "radius_m", "capacity", "x0_m", "y0_m"],
                "additionalProperties": False,
                "properties": {
                    "id": _ID,
                    "radius_m": _NUM,
                    "capacity": {"type": "integer"},
                    "x0_m": _NUM,
                    "y0_m": _NUM,
                },
            },
        },
        "damage": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "faulted": {"type": "array", "items": _ID},
                "comm_failed": {"type": "array", "items": {"type": "string"}},
                "comm_failed_regions": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["cx_m", "cy_m", "radius_m"],
                        "additionalProperties": False,
                        "properties": {"cx_m": _NUM, "cy_m": _NUM, "radius_m": _NUM},
                    },
                },
            },
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "voltage_min": _NUM,
                "voltage_max": _NUM,
                "voltage_ref": _NUM,
                "coverage_tol": _NUM,
                "big_m_policy": {"type": "string", "enum": ["auto"]},
                "position_mode": {"type": "string", "enum": ["discrete", "continuous"]},
            },
        },
    },
}


def _unique(ids: list[str], path: str) -> None:
    seen = set()
    for i, x in enumerate(ids):
        if x in seen:
            raise DuplicateIdError(f"duplicate id {x!r}", f"{path}[{i}].id")
        seen.add(x)


def scenario_from_dict(doc: Mapping[str, Any]) -> Scenario:
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise ScenarioError(exc.message, path) from None

    nodes = []
    for raw in doc["nodes"]:
        dg = None
        if "dg" in raw:
            p_max = float(raw["dg"]["p_max_mw"])
            # reactive capability defaults to the active rating
            dg = DG(p_max, float(raw["dg"].get("q_max_mvar", p_max)))
        nodes.append(
            Node(
                id=str(raw["id"]),
                position=(float(raw["x_m"]), float(raw["y_m"])),
                load_p=float(raw.get("p_mw", 0.0)),
                load_q=float(raw.get("q_mvar", 0.0)),
                dg=dg,
            )
        )
    _unique([n.id for n in nodes], "$.nodes")
    node_ids = {n.id for n in nodes}

    branches = []
    for i, raw in enumerate(doc["branches"]):
        b = Branch(
            id=str(raw["id"]),
            from_node=str(raw["from"]),
            to_node=str(raw["to"]),
            initial_closed=bool(raw.get("closed", True)),
            switchable=bool(raw.get("switchable", True)),
            r=float(raw.get("r_pu", 0.0)),
            x=float(raw.get("x_pu", 0.0)),
            s_max=float(raw.get("s_max_mva", 1e3)),
        )
        for key, ref in (("from", b.from_node), ("to", b.to_node)):
            if ref not in node_ids:
                raise DanglingReferenceError(f"unknown node {ref!r}", f"$.branches[{i}].{key}")
        branches.append(b)
    _unique([b.id for b in branches], "$.branches")

    dscs = tuple(
        Dsc(
            id=str(raw["id"]),
            radius=float(raw["radius_m"]),
            capacity=int(raw["capacity"]),
            initial_position=(float(raw["x0_m"]), float(raw["y0_m"])),
        )
        for raw in doc.get("dscs", [])
    )
    _unique([d.id for d in dscs], "$.dscs")

    switches = derive_switches(nodes, branches)
    addresses = {s.address for s in switches}
    branch_ids = {b.id for b in branches}
    raw_damage = doc.get("damage", {})
    faulted = [str(x) for x in raw_damage.get("faulted", [])]
    for i, ref in enumerate(faulted):
        if ref not in branch_ids:
            raise DanglingReferenceError(f"unknown branch {ref!r}", f"$.damage.faulted[{i}]")
    failed = list(raw_damage.get("comm_failed", []))
    for i, ref in enumerate(failed):
        if ref not in addresses:
            raise DanglingReferenceError(f"unknown switch {ref!r}", f"$.damage.comm_failed[{i}]")
    regions = tuple(
        CommRegion((float(r["cx_m"]), float(r["cy_m"])), float(r["radius_m"]))
        for r in raw_damage.get("comm_failed_regions", [])
    )
    damage = DamageScenario(frozenset(faulted), frozenset(failed), regions)

    options = SolveOptions(**doc.get("options", {}))
    return Scenario(tuple(nodes), tuple(branches), switches, dscs, damage, options)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from None
    return scenario_from_dict(doc)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    nodes = []
    for n in s.nodes:
        raw: dict[str, Any] = {
            "id": n.id,
            "x_m": n.position[0],
            "y_m": n.position[1],
            "p_mw": n.load_p,
            "q_mvar": n.load_q,
        }
        if n.dg is not None:
            raw["dg"] = {"p_max_mw": n.dg.p_max, "q_max_mvar": n.dg.q_max}
        nodes.append(raw)
    damage: dict[str, Any] = {
        "faulted": sorted(s.damage.faulted_branches),
        "comm_failed": sorted(s.damage.comm_failed),
    }
    if s.damage.comm_failed_regions:
        damage["comm_failed_regions"] = [
            {"cx_m": r.center[0], "cy_m": r.center[1], "radius_m": r.radius}
            for r in s.damage.comm_failed_regions
        ]
    o = s.options
    return {
        "nodes": nodes,
        "branches": [
            {
                "id": b.id,
                "from": b.from_node,
                "to": b.to_node,
                "closed": b.initial_closed,
                "switchable": b.switchable,
                "r_pu": b.r,
                "x_pu": b.x,
                "s_max_mva": b.s_max,
            }
            for b in s.branches
        ],
        "dscs": [
            {
                "id": d.id,
                "radius_m": d.radius,
                "capacity": d.capacity,
                "x0_m": d.initial_position[0],
                "y0_m": d.initial_position[1],
            }
            for d in s.dscs
        ],
        "damage": damage,
        "options": {
            "voltage_min": o.voltage_min,
            "voltage_max": o.voltage_max,
            "voltage_ref": o.voltage_ref,
            "coverage_tol": o.coverage_tol,
            "big_m_policy": o.big_m_policy,
            "position_mode": o.position_mode,
        },
    }


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2)


# --------------------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    entity: str
    invariant: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.invariant}"


def _finite(p: Point) -> bool:
    return all(math.isfinite(c) for c in p)


def validate(s: Scenario) -> list[Violation]:
    """Check every data-model invariant; an empty list means the scenario is valid."""
    out: list[Violation] = []

    def bad(entity: str, invariant: str) -> None:
        out.append(Violation(entity, invariant))

    node_ids = {n.id for n in s.nodes}
    for n in s.nodes:
        ent = f"node {n.id}"
        if n.load_p < 0:
            bad(ent, "load_p ≥ 0")
        if n.load_q < 0:
            bad(ent, "load_q ≥ 0")
        if not _finite(n.position):
            bad(ent, "position finite")
        if n.dg is not None and not n.dg.p_max > 0:
            bad(ent, "dg.p_max > 0")
        if n.dg is not None and n.dg.q_max < 0:
            bad(ent, "dg.q_max ≥ 0")

    pairs = set()
    for b in s.branches:
        ent = f"branch {b.id}"
        if b.from_node == b.to_node:
            bad(ent, "from ≠ to")
        if b.from_node not in node_ids or b.to_node not in node_ids:
            bad(ent, "endpoints exist")
        pair = frozenset(b.ends)
        if pair in pairs:
            bad(ent, "no duplicate unordered pairs")
        pairs.add(pair)
        if b.r < 0:
            bad(ent, "r ≥ 0")
        if b.x < 0:
            bad(ent, "x ≥ 0")
        if not b.s_max > 0:
            bad(ent, "s_max > 0")

    by_branch: dict[str, list[Switch]] = {}
    for sw in s.switches:
        by_branch.setdefault(sw.branch, []).append(sw)
        b = s.branch_map.get(sw.branch)
        if b is None or sw.end not in b.ends:
            bad(f"switch {sw.address}", "references an end of an existing branch")
            continue
        host = s.node_map.get(sw.end)
        if host is not None and tuple(sw.position) != tuple(host.position):
            bad(f"switch {sw.address}", "position equals host node position")
    for b in s.branches:
        recs = by_branch.get(b.id, [])
        ends = sorted(sw.end for sw in recs)
        if b.switchable and ends != sorted(b.ends):
            bad(f"branch {b.id}", "missing end switch" if len(recs) < 2 else "exactly two end switches")
        if not b.switchable and recs:
            bad(f"branch {b.id}", "non-switchable branch has no switches")

    for d in s.dscs:
        ent = f"dsc {d.id}"
        if not d.radius > 0:
            bad(ent, "radius > 0")
        if d.capacity < 1:
            bad(ent, "capacity ≥ 1")
        if not _finite(d.initial_position):
            bad(ent, "initial position finite")

    for ref in s.damage.faulted_branches:
        if ref not in s.branch_map:
            bad(f"damage.faulted {ref}", "referenced branch exists")
    for ref in s.damage.comm_failed:
        if ref not in s.switch_map:
            bad(f"damage.comm_failed {ref}", "referenced switch exists")

    if s.nodes and not nx.is_connected(s.graph()):
        bad("scenario", "graph is connected pre-damage")
    if not s.dg_nodes:
        bad("scenario", "at least one DG exists")
    o = s.options
    if not 0 < o.voltage_min < o.voltage_ref <= o.voltage_max:
        bad("options", "0 < voltage_min < voltage_ref ≤ voltage_max")
    if o.coverage_tol < 0:
        bad("options", "coverage_tol ≥ 0")
    return out


# --------------------------------------------------------------------------- damage


@dataclass(frozen=True)
class OperationalState:
    """Post-disaster view of a scenario.

    ``effective_closed`` is the branch state the restoration starts from:
    faulted branches are open whatever their pre-disaster state.
    """

    scenario: Scenario
    effective_closed: Mapping[str, bool]
    faulted: frozenset[str]
    comm_failed: frozenset[str]
    frozen: frozenset[str]

    @property
    def closable(self) -> frozenset[str]:
        return frozenset(b.id for b in self.scenario.branches if b.id not in self.faulted)

    def is_failed(self, address: str) -> bool:
        return address in self.comm_failed

    def failed_switches(self) -> list[Switch]:
        """S_f in scenario switch order."""
        return [sw for sw in self.scenario.switches if sw.address in self.comm_failed]

    def __hash__(self) -> int:
        return id(self)


def apply_damage(s: Scenario) -> OperationalState:
    faulted = frozenset(s.damage.faulted_branches)
    effective = {b.id: (b.initial_closed and b.id not in faulted) for b in s.branches}
    frozen = frozenset(b.id for b in s.branches if not b.switchable)
    return OperationalState(
        scenario=s,
        effective_closed=effective,
        faulted=faulted,
        comm_failed=s.comm_failed_switches(),
        frozen=frozen,
    )


def with_fleet(s: Scenario, dscs: Iterable[Dsc]) -> Scenario:
    return replace(s, dscs=tuple(dscs))
