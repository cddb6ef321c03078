import math

import numpy as np
import pytest

from gridheal.coverage import (
    BoundingBox, candidate_positions, circle_intersections, euclidean_distance,
    fleet_candidates, generate_candidates, is_covered, load_quantum, pick_big_m, prune_dominated,
)
from gridheal.grid import DG, Branch, Dsc, Node, apply_damage

from conftest import make_scenario


@pytest.mark.parametrize("p,q,d", [((0, 0), (3, 4), 5.0), ((7, 2), (7, 2), 0.0), ((1, 1), (4, 5), 5.0)])
def test_distance(p, q, d):
    assert euclidean_distance(p, q) == d


def test_coverage_boundary():
    assert is_covered(10.0, 10.0, tol=0.0)
    assert not is_covered(10.0 + 2e-6, 10.0, tol=1e-6)
    assert is_covered(0.0, 10.0)


def test_circle_intersections():
    assert circle_intersections((0, 0), (0, 0), 1.0) == []
    assert circle_intersections((0, 0), (3, 0), 1.0) == []
    assert circle_intersections((0, 0), (2, 0), 1.0) == [(1.0, 0.0)]
    pts = circle_intersections((0, 0), (6, 0), 5.0)
    assert sorted(pts) == [(3.0, -4.0), (3.0, 4.0)]


def failed_pair(gap, r=100.0, origin=(-500.0, -500.0)):
    nodes = [
        Node("1", (0.0, 0.0), 0.0, 0.0, DG(1.0, 1.0)),
        Node("2", (gap, 0.0), 0.5, 0.0),
    ]
    s = make_scenario(nodes, [Branch("a", "1", "2", False, True, 0.01, 0.01, 2.0)],
                      dscs=[Dsc("d1", r, 2, origin)], comm_failed=["a@1", "a@2"])
    return apply_damage(s)


@pytest.mark.parametrize("gap,count", [(150.0, 5), (300.0, 3)])
def test_candidate_counts(gap, count):
    st = failed_pair(gap)
    assert len(generate_candidates(st, st.scenario.dscs)) == count


def test_single_failed_switch_candidates():
    assert len(candidate_positions([(0.0, 0.0)], 10.0, (50.0, 50.0))) == 2


def test_coverage_matrix_consistent():
    st = failed_pair(150.0)
    cs = generate_candidates(st, st.scenario.dscs)
    pos = {sw.address: sw.position for sw in st.failed_switches()}
    for c, p in enumerate(cs.positions):
        for j, a in enumerate(cs.switches):
            assert cs.coverage[c, j] == is_covered(euclidean_distance(p, pos[a]), cs.radius, 1e-6)


def test_pruning_keeps_best_per_coverage():
    st = failed_pair(150.0)
    full = generate_candidates(st, st.scenario.dscs)
    pruned = prune_dominated(full)
    # both intersection points cover both switches; only the nearer one survives
    assert len(pruned) < len(full)
    both = [c for c in range(len(pruned)) if pruned.coverage[c].all()]
    assert len(both) == 1
    best = min(t for c, t in enumerate(full.travel_sq) if full.coverage[c].all())
    assert pruned.travel_sq[both[0]] == best
    # the empty-coverage origin is dominated by any covering candidate that is no farther
    assert all(pruned.coverage[c].any() or pruned.travel_sq[c] == 0 for c in range(len(pruned)))


def test_fleet_candidates_shared_by_radius():
    st = failed_pair(150.0)
    fleet = [Dsc("a", 100.0, 1, (0.0, 0.0)), Dsc("b", 100.0, 1, (0.0, 0.0)), Dsc("c", 40.0, 1, (0.0, 0.0))]
    sets = fleet_candidates(st, fleet)
    assert sets[0] is sets[1] and sets[2] is not sets[0]
    assert not np.any(sets[2].coverage.all(axis=1))


def test_big_m_examples():
    box = BoundingBox(0.0, 0.0, 60.0, 80.0)
    assert pick_big_m(box, 30.0, 1.0).m_coverage == 130.0
    assert pick_big_m(box, 30.0, 0.5, fleet_size=2).m_objective == pytest.approx(8e4)
    assert pick_big_m(BoundingBox(5.0, 5.0, 5.0, 5.0), 10.0, 1.0).m_coverage == 10.0
    with pytest.raises(ValueError):
        pick_big_m(box, 30.0, 0.0)


def test_coverage_big_m_non_binding_only_inside():
    box = BoundingBox(0.0, 0.0, 60.0, 80.0)
    r = 30.0
    m = pick_big_m(box, r, 1.0).m_coverage
    for d in np.linspace(0.0, box.diagonal, 101):
        eps = (r - d) / m
        assert -1.0 < eps <= 1.0
        assert (eps >= 0) == (d <= r)


def test_load_quantum():
    assert load_quantum([0.3, 0.5, 0.0]) == pytest.approx(0.1)
    assert load_quantum([0.25, 1.0]) == 0.25
    assert load_quantum([]) == 1.0
    assert math.isclose(load_quantum([0.09, 0.42, 0.045]), 0.015)
