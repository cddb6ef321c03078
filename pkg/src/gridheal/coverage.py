"""Drone small cell coverage geometry.

Coverage is a closed disk of fixed radius around the drone's ground
projection. Continuous drone placement is replaced by a finite candidate
set that loses no achievable coverage set: every switch location, every
intersection point of two radius-r circles centred on failed switches,
and the fleet's starting point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .grid import Dsc, OperationalState, Point

DEFAULT_TOL = 1e-6


def euclidean_distance(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def is_covered(d: float, r: float, tol: float = DEFAULT_TOL) -> bool:
    return d <= r + tol


def circle_intersections(a: Point, b: Point, r: float) -> list[Point]:
    """Intersection points of two radius-``r`` circles centred at ``a`` and ``b``.

    Tangent circles give their single touching point; coincident or
    disjoint circles give none.
    """
    d = euclidean_distance(a, b)
    if d == 0 or d > 2 * r:
        return []
    mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    h = math.sqrt(max(r * r - d * d / 4, 0.0))
    if h == 0:
        return [(mx, my)]
    ux, uy = (b[0] - a[0]) / d, (b[1] - a[1]) / d
    return [(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]


@dataclass(frozen=True)
class CandidateSet:
    """Finite drone positions and the failed switches each one covers.

    ``switches`` fixes the column order of ``coverage``.
    """

    radius: float
    origin: Point
    positions: tuple[Point, ...]
    switches: tuple[str, ...]
    coverage: np.ndarray  # bool [candidate, switch]
    travel_sq: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.positions)

    def covered_by(self, c: int) -> frozenset[str]:
        return frozenset(s for j, s in enumerate(self.switches) if self.coverage[c, j])

    def to_dict(self) -> dict:
        return {
            "radius_m": self.radius,
            "origin": {"x_m": self.origin[0], "y_m": self.origin[1]},
            "switches": list(self.switches),
            "positions": [{"x_m": x, "y_m": y} for x, y in self.positions],
            "coverage": [[bool(v) for v in row] for row in self.coverage],
            "travel_sq": list(self.travel_sq),
        }


def _build(
    positions: list[Point],
    switch_pos: Sequence[tuple[str, Point]],
    radius: float,
    origin: Point,
    tol: float,
) -> CandidateSet:
    cov = np.zeros((len(positions), len(switch_pos)), dtype=bool)
    for c, p in enumerate(positions):
        for j, (_, q) in enumerate(switch_pos):
            cov[c, j] = is_covered(euclidean_distance(p, q), radius, tol)
    travel = tuple(
        (p[0] - origin[0]) ** 2 + (p[1] - origin[1]) ** 2 for p in positions
    )
    return CandidateSet(
        radius=radius,
        origin=origin,
        positions=tuple(positions),
        switches=tuple(a for a, _ in switch_pos),
        coverage=cov,
        travel_sq=travel,
    )


def candidate_positions(points: Iterable[Point], radius: float, origin: Point) -> list[Point]:
    distinct: list[Point] = []
    for p in points:
        if p not in distinct:
            distinct.append(p)
    out = list(distinct)
    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            out.extend(circle_intersections(distinct[i], distinct[j], radius))
    out.append(origin)
    seen: list[Point] = []
    for p in out:
        if p not in seen:
            seen.append(p)
    return seen


def generate_candidates(
    state: OperationalState, fleet: Sequence[Dsc], radius: float | None = None
) -> CandidateSet:
    """Coverage-complete candidate set for a fleet sharing one radius and origin."""
    if not fleet:
        raise ValueError("fleet is empty")
    radii = {d.radius for d in fleet}
    origins = {d.initial_position for d in fleet}
    if radius is None:
        if len(radii) != 1:
            raise ValueError("fleet radii differ; use fleet_candidates for per-radius sets")
        radius = radii.pop()
    if len(origins) != 1:
        raise ValueError("fleet origins differ; use fleet_candidates")
    origin = next(iter(origins))
    tol = state.scenario.options.coverage_tol
    failed = [(sw.address, sw.position) for sw in state.failed_switches()]
    positions = candidate_positions((p for _, p in failed), radius, origin)
    return _build(positions, failed, radius, origin, tol)


def prune_dominated(cands: CandidateSet) -> CandidateSet:
    """Drop candidates whose coverage is a subset of another's at no less travel.

    Among candidates with identical coverage and travel the first is kept.
    The optimal objective over the pruned set equals the unpruned one.
    """
    n = len(cands)
    keep = []
    for c in range(n):
        dominated = False
        for o in range(n):
            if o == c:
                continue
            if np.any(cands.coverage[c] & ~cands.coverage[o]):
                continue
            tc, to = cands.travel_sq[c], cands.travel_sq[o]
            if to > tc:
                continue
            same = np.array_equal(cands.coverage[c], cands.coverage[o])
            if not same or to < tc or o < c:
                dominated = True
                break
        if not dominated:
            keep.append(c)
    return CandidateSet(
        radius=cands.radius,
        origin=cands.origin,
        positions=tuple(cands.positions[c] for c in keep),
        switches=cands.switches,
        coverage=cands.coverage[keep],
        travel_sq=tuple(cands.travel_sq[c] for c in keep),
    )


def fleet_candidates(
    state: OperationalState, fleet: Sequence[Dsc], prune: bool = True
) -> list[CandidateSet]:
    """One candidate set per drone; drones with equal radius and origin share it."""
    cache: dict[tuple[float, Point], CandidateSet] = {}
    out = []
    for d in fleet:
        key = (d.radius, d.initial_position)
        if key not in cache:
            cs = generate_candidates(state, [d])
            cache[key] = prune_dominated(cs) if prune else cs
        out.append(cache[key])
    return out


# --------------------------------------------------------------------------- big-M


@dataclass(frozen=True)
class BoundingBox:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def diagonal(self) -> float:
        return math.hypot(self.xmax - self.xmin, self.ymax - self.ymin)

    def expanded(self, pad: float) -> "BoundingBox":
        return BoundingBox(self.xmin - pad, self.ymin - pad, self.xmax + pad, self.ymax + pad)

    @classmethod
    def around(cls, points: Iterable[Point]) -> "BoundingBox":
        pts = list(points)
        if not pts:
            raise ValueError("empty extent")
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        return cls(min(xs), min(ys), max(xs), max(ys))


@dataclass(frozen=True)
class BigM:
    m_coverage: float
    m_objective: float


def pick_big_m(extent: BoundingBox, r: float, min_load: float, fleet_size: int = 1) -> BigM:
    """Size the coverage big-M and the travel-penalty divisor.

    ``min_load`` is the smallest positive gap between restorable load totals;
    the whole fleet's travel penalty then stays at or below half of it.
    """
    if not min_load > 0:
        raise ValueError("min_load must be positive")
    diag = extent.diagonal
    m_obj = max(fleet_size, 1) * diag**2 / (0.5 * min_load)
    return BigM(m_coverage=r + diag, m_objective=m_obj if m_obj > 0 else 1.0)


def load_quantum(loads: Iterable[float]) -> float:
    """Greatest common divisor of the positive loads, read as exact decimals.

    Every difference of two subset sums is a multiple of it, so it lower-bounds
    the gap between distinct restored totals.
    """
    fracs = [Fraction(repr(float(p))) for p in loads if p > 0]
    if not fracs:
        return 1.0
    num = reduce(math.gcd, (f.numerator for f in fracs))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fracs))
    return float(Fraction(num, den))


def scenario_extent(state: OperationalState, pad: float) -> BoundingBox:
    pts = [n.position for n in state.scenario.nodes]
    pts += [d.initial_position for d in state.scenario.dscs]
    return BoundingBox.around(pts).expanded(pad)


def big_m_for(state: OperationalState, fleet: Sequence[Dsc], quantum: float | None = None) -> BigM:
    """Big-M values for a scenario and fleet.

    ``quantum`` defaults to the load quantum, which keeps load pickup strictly
    ahead of drone travel in the objective.
    """
    r = max((d.radius for d in fleet), default=0.0)
    if quantum is None:
        quantum = load_quantum(n.load_p for n in state.scenario.nodes)
    return pick_big_m(scenario_extent(state, r), r, quantum, len(fleet))
