"""Seeded random tiny scenarios sized for the enumeration oracle.

Nodes are split into one or two zones, each a random tree around its own
DG; zones are joined only through faulted branches so no energizable
component ever holds two DGs.
"""

from __future__ import annotations

import random

from .coverage import fleet_candidates
from .grid import (
    DG, Branch, DamageScenario, Dsc, Node, Scenario, SolveOptions,
    apply_damage, derive_switches, validate,
)
from .oracle import OracleLimits

ORIGIN = (-100.0, -100.0)


def _tenths(rng: random.Random, lo: int, hi: int) -> float:
    return round(rng.randint(lo, hi) / 10, 1)


def _draw(rng: random.Random) -> Scenario:
    n = rng.randint(3, 6)
    ids = [str(i + 1) for i in range(n)]
    zones = [ids]
    if n >= 4 and rng.random() < 0.5:
        cut = rng.randint(2, n - 2)
        zones = [ids[:cut], ids[cut:]]

    dg_at = {rng.choice(z) for z in zones}
    nodes = []
    for i in ids:
        load = 0.0 if rng.random() < 0.15 else _tenths(rng, 1, 10)
        dg = None
        if i in dg_at:
            p = _tenths(rng, 10, 35)
            dg = DG(p, p)
        nodes.append(Node(i, (float(rng.randint(0, 600)), float(rng.randint(0, 600))),
                          load, round(load * rng.choice([0.0, 0.3, 0.5]), 2), dg))

    branches: list[Branch] = []
    faulted: list[str] = []

    def add(a: str, b: str, closed: bool) -> Branch:
        br = Branch(
            id=f"b{len(branches) + 1}",
            from_node=a,
            to_node=b,
            initial_closed=closed,
            switchable=(not closed) or rng.random() > 0.15,
            r=rng.randint(2, 25) / 1000,
            x=rng.randint(0, 25) / 1000,
            s_max=float(rng.randint(10, 30)) / 10,
        )
        branches.append(br)
        return br

    pairs = set()
    for z in zones:
        order = z[:]
        rng.shuffle(order)
        for k in range(1, len(order)):
            a, b = order[k], rng.choice(order[:k])
            add(a, b, True)
            pairs.add(frozenset((a, b)))
    if len(zones) == 2:
        a, b = rng.choice(zones[0]), rng.choice(zones[1])
        br = add(a, b, rng.random() < 0.5)
        pairs.add(frozenset((a, b)))
        faulted.append(br.id)
    want = rng.randint(1, 3)
    for _ in range(8):
        if len(branches) >= 8 or want == 0:
            break
        z = rng.choice(zones)
        if len(z) < 3:
            continue
        a, b = rng.sample(z, 2)
        if frozenset((a, b)) in pairs:
            continue
        pairs.add(frozenset((a, b)))
        add(a, b, False)
        want -= 1
    internal = [b for b in branches if b.initial_closed and b.id not in faulted]
    if internal and rng.random() < 0.6:
        faulted.append(rng.choice(internal).id)

    switches = derive_switches(nodes, branches)
    sites = rng.sample(ids, rng.randint(1, min(3, n)))
    ties = [b for b in branches if not b.initial_closed and b.id not in faulted]
    if ties and rng.random() < 0.7:
        # comm loss at a tie makes drone dispatch decisive
        sites[0] = rng.choice(rng.choice(ties).ends)
    failed = frozenset(sw.address for sw in switches if sw.end in sites and rng.random() < 0.9)
    n_dsc = rng.choice([0, 1, 1, 2, 2])
    radius = float(rng.choice([150, 250, 400, 600]))
    dscs = tuple(
        Dsc(f"d{k + 1}", radius if rng.random() < 0.8 else radius * 1.5, rng.randint(1, 3), ORIGIN)
        for k in range(n_dsc)
    )
    return Scenario(
        tuple(nodes), tuple(branches), switches, dscs,
        DamageScenario(frozenset(faulted), failed, ()),
        SolveOptions(voltage_min=0.95, voltage_max=1.05, voltage_ref=1.0),
    )


def random_tiny(seed: int, limits: OracleLimits = OracleLimits()) -> Scenario:
    """Deterministic tiny scenario for ``seed`` that the oracle accepts."""
    rng = random.Random(seed)
    while True:
        s = _draw(rng)
        if validate(s):
            continue
        state = apply_damage(s)
        cands = fleet_candidates(state, s.dscs)
        if all(len(c) <= limits.max_candidates for c in cands):
            return s

