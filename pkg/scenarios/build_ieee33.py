"""Write ieee33.json: the 33-bus test feeder with an assumed post-disaster state.

Line and load data are the standard 33-bus values (12.66 kV). Impedances
are converted to per unit on a 1 MVA base so that flows in MW/MVAr are
per-unit quantities. Coordinates, DG sites, faults, communication-loss
regions and the drone fleet are assumptions documented in README.md.

    python3 scenarios/build_ieee33.py [out.json]
"""

import json
import sys
from pathlib import Path

KV = 12.66
Z_BASE = KV**2 / 1.0  # ohm, 1 MVA base

LINES = [
    (1, 2, 0.0922, 0.0470), (2, 3, 0.4930, 0.2511), (3, 4, 0.3660, 0.1864),
    (4, 5, 0.3811, 0.1941), (5, 6, 0.8190, 0.7070), (6, 7, 0.1872, 0.6188),
    (7, 8, 0.7114, 0.2351), (8, 9, 1.0300, 0.7400), (9, 10, 1.0440, 0.7400),
    (10, 11, 0.1966, 0.0650), (11, 12, 0.3744, 0.1238), (12, 13, 1.4680, 1.1550),
    (13, 14, 0.5416, 0.7129), (14, 15, 0.5910, 0.5260), (15, 16, 0.7463, 0.5450),
    (16, 17, 1.2890, 1.7210), (17, 18, 0.7320, 0.5740), (2, 19, 0.1640, 0.1565),
    (19, 20, 1.5042, 1.3554), (20, 21, 0.4095, 0.4784), (21, 22, 0.7089, 0.9373),
    (3, 23, 0.4512, 0.3083), (23, 24, 0.8980, 0.7091), (24, 25, 0.8960, 0.7011),
    (6, 26, 0.2030, 0.1034), (26, 27, 0.2842, 0.1447), (27, 28, 1.0590, 0.9337),
    (28, 29, 0.8042, 0.7006), (29, 30, 0.5075, 0.2585), (30, 31, 0.9744, 0.9630),
    (31, 32, 0.3105, 0.3619), (32, 33, 0.3410, 0.5302),
]
TIES = [(8, 21, 2.0, 2.0), (9, 15, 2.0, 2.0), (12, 22, 2.0, 2.0), (18, 33, 0.5, 0.5), (25, 29, 0.5, 0.5)]

LOADS_KW = {
    2: (100, 60), 3: (90, 40), 4: (120, 80), 5: (60, 30), 6: (60, 20), 7: (200, 100),
    8: (200, 100), 9: (60, 20), 10: (60, 20), 11: (45, 30), 12: (60, 35), 13: (60, 35),
    14: (120, 80), 15: (60, 10), 16: (60, 20), 17: (60, 20), 18: (90, 40), 19: (90, 40),
    20: (90, 40), 21: (90, 40), 22: (90, 40), 23: (90, 50), 24: (420, 200), 25: (420, 200),
    26: (60, 25), 27: (60, 25), 28: (60, 20), 29: (120, 70), 30: (200, 600), 31: (150, 70),
    32: (210, 100), 33: (60, 40),
}


def layout() -> dict[int, tuple[float, float]]:
    """Schematic planar placement, 300 m between neighbouring buses."""
    pos = {k: ((k - 1) * 300.0, 0.0) for k in range(1, 19)}
    pos.update({19 + i: (300.0 * (i + 1), -600.0) for i in range(4)})
    pos.update({23 + i: (900.0 * (i + 1), 900.0) for i in range(3)})
    pos.update({26 + i: (1800.0 + 300.0 * i, 400.0) for i in range(8)})
    return pos


# assumed post-disaster state
DG_MW = {1: 0.45, 7: 0.5, 10: 0.3, 17: 0.45, 29: 1.5, 4: 0.35}
FAULTED = ["2-3", "5-6", "8-9", "12-13", "15-16", "19-20", "23-24", "27-28", "30-31"]
COMM_REGIONS = [(2700.0, 650.0, 300.0), (4800.0, 200.0, 450.0), (2400.0, -300.0, 350.0)]
FLEET = [("d1", 400.0, 3), ("d2", 400.0, 3), ("d3", 400.0, 3)]
FLEET_ORIGIN = (-300.0, -300.0)
S_MAX_MVA = 2.0


def build() -> dict:
    pos = layout()
    nodes = []
    for k in range(1, 34):
        p, q = LOADS_KW.get(k, (0, 0))
        node = {"id": str(k), "x_m": pos[k][0], "y_m": pos[k][1], "p_mw": p / 1000, "q_mvar": q / 1000}
        if k in DG_MW:
            node["dg"] = {"p_max_mw": DG_MW[k], "q_max_mvar": DG_MW[k]}
        nodes.append(node)
    branches = []
    for closed, rows in ((True, LINES), (False, TIES)):
        for a, b, r, x in rows:
            branches.append({
                "id": f"{a}-{b}", "from": str(a), "to": str(b), "closed": closed, "switchable": True,
                "r_pu": round(r / Z_BASE, 9), "x_pu": round(x / Z_BASE, 9), "s_max_mva": S_MAX_MVA,
            })
    return {
        "name": "33-node reconstruction",
        "description": "33-bus feeder islanded after a disaster; DG sites, faults, comm-loss regions and drones assumed.",
        "nodes": nodes,
        "branches": branches,
        "dscs": [
            {"id": i, "radius_m": r, "capacity": c, "x0_m": FLEET_ORIGIN[0], "y0_m": FLEET_ORIGIN[1]}
            for i, r, c in FLEET
        ],
        "damage": {
            "faulted": FAULTED,
            "comm_failed": [],
            "comm_failed_regions": [{"cx_m": x, "cy_m": y, "radius_m": r} for x, y, r in COMM_REGIONS],
        },
        "options": {"voltage_min": 0.95, "voltage_max": 1.05, "voltage_ref": 1.0},
    }


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("ieee33.json")
    out.write_text(json.dumps(build(), indent=1) + "\n", encoding="utf-8")
