import random
from dataclasses import replace
from pathlib import Path

import pytest

from gridheal.coverage import candidate_positions, euclidean_distance, is_covered
from gridheal.grid import (
    DG, Branch, DamageScenario, Node, Scenario, SolveOptions, derive_switches, load_scenario,
)

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"


@pytest.fixture
def t1() -> Scenario:
    return load_scenario(SCENARIOS / "t1.json")


@pytest.fixture
def t2() -> Scenario:
    return load_scenario(SCENARIOS / "t2.json")


def make_scenario(nodes, branches, dscs=(), faulted=(), comm_failed=(), regions=(), **opts) -> Scenario:
    nodes, branches = tuple(nodes), tuple(branches)
    return Scenario(
        nodes, branches, derive_switches(nodes, branches), tuple(dscs),
        DamageScenario(frozenset(faulted), frozenset(comm_failed), tuple(regions)),
        SolveOptions(**opts),
    )


def two_node(load=1.0, r=0.01, x=0.0, p_max=2.0, **opts) -> Scenario:
    nodes = [Node("1", (0.0, 0.0), 0.0, 0.0, DG(p_max, p_max)), Node("2", (100.0, 0.0), load, 0.0)]
    return make_scenario(nodes, [Branch("1-2", "1", "2", True, True, r, x, 5.0)], **opts)


def random_tree(rng: random.Random) -> tuple[Scenario, list[str]]:
    """Closed single-DG tree rooted at node 1; returns scenario and branch ids."""
    n = rng.randint(2, 7)
    nodes = [Node("1", (0.0, 0.0), 0.0, 0.0, DG(round(rng.uniform(0.5, 3.0), 3), round(rng.uniform(0.2, 2.0), 3)))]
    for i in range(2, n + 1):
        p = round(rng.uniform(0.05, 1.0), 3)
        nodes.append(Node(str(i), (100.0 * i, 0.0), p, round(p * rng.uniform(0, 0.6), 3)))
    branches = []
    for i in range(2, n + 1):
        parent = str(rng.randint(1, i - 1))
        a, b = (parent, str(i)) if rng.random() < 0.7 else (str(i), parent)
        branches.append(Branch(f"b{i}", a, b, True, True, round(rng.uniform(0.001, 0.03), 4),
                               round(rng.uniform(0.0, 0.03), 4), round(rng.uniform(0.8, 3.0), 2)))
    s = make_scenario(nodes, branches, voltage_min=0.95, voltage_max=1.05, voltage_ref=1.0)
    return s, [b.id for b in branches]


def fix(model, values: dict) -> None:
    """Pin variables to values by collapsing their bounds."""
    for name, v in values.items():
        model.variables[name] = replace(model.variables[name], lb=float(v), ub=float(v))


def completeness_gaps(points, radius, origin, step_frac=0.1, tol=1e-6):
    """Grid disk centres whose covered switch set no candidate covers."""
    cands = candidate_positions(points, radius, origin)
    cand_sets = [frozenset(i for i, p in enumerate(points) if is_covered(euclidean_distance(c, p), radius, tol))
                 for c in cands]
    xs, ys = [p[0] for p in points], [p[1] for p in points]
    step = step_frac * radius
    gaps = []
    nx_ = int((max(xs) - min(xs) + 2 * radius) / step) + 1
    ny_ = int((max(ys) - min(ys) + 2 * radius) / step) + 1
    for i in range(nx_):
        for j in range(ny_):
            c = (min(xs) - radius + i * step, min(ys) - radius + j * step)
            got = frozenset(k for k, p in enumerate(points) if is_covered(euclidean_distance(c, p), radius, tol))
            if got and not any(got <= s for s in cand_sets):
                gaps.append(c)
    return gaps


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
