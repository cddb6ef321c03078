import json
from dataclasses import replace

import pytest

from gridheal.grid import (
    CommRegion, DamageScenario, DanglingReferenceError, DuplicateIdError, ScenarioError,
    apply_damage, dump_scenario, parse_scenario, scenario_from_dict, scenario_to_dict, validate,
)

from conftest import make_scenario, two_node

MINIMAL = {
    "nodes": [
        {"id": "1", "x_m": 0, "y_m": 0, "dg": {"p_max_mw": 1.0}},
        {"id": "2", "x_m": 10, "y_m": 0, "p_mw": 0.5},
    ],
    "branches": [{"id": "a", "from": "1", "to": "2"}],
}


def test_minimal_document():
    s = scenario_from_dict(MINIMAL)
    assert len(s.nodes) == 2 and len(s.branches) == 1
    assert validate(s) == []
    # reactive capability defaults to the active rating
    assert s.node_map["1"].dg.q_max == 1.0


def test_dangling_branch_endpoint():
    doc = json.loads(json.dumps(MINIMAL))
    doc["branches"][0]["to"] = "99"
    with pytest.raises(DanglingReferenceError) as err:
        scenario_from_dict(doc)
    assert err.value.path == "$.branches[0].to"


def test_dangling_damage_reference():
    doc = json.loads(json.dumps(MINIMAL))
    doc["damage"] = {"comm_failed": ["a@7"]}
    with pytest.raises(DanglingReferenceError):
        scenario_from_dict(doc)


def test_duplicate_ids():
    doc = json.loads(json.dumps(MINIMAL))
    doc["nodes"][1]["id"] = "1"
    with pytest.raises(DuplicateIdError):
        scenario_from_dict(doc)


def test_schema_error_has_path():
    doc = json.loads(json.dumps(MINIMAL))
    doc["nodes"][0]["x_m"] = "east"
    with pytest.raises(ScenarioError) as err:
        scenario_from_dict(doc)
    assert err.value.path.startswith("$.nodes[0]")


def test_t1_counts(t1):
    assert (len(t1.nodes), len(t1.branches), len(t1.switches), len(t1.dscs)) == (4, 4, 8, 1)
    assert validate(t1) == []


def test_round_trip(t1, t2):
    for s in (t1, t2):
        assert parse_scenario(dump_scenario(s)) == s
        assert scenario_from_dict(scenario_to_dict(s)) == s


def test_missing_end_switch(t1):
    s = replace(t1, switches=t1.switches[1:])
    assert any(v.invariant == "missing end switch" for v in validate(s))


def test_zero_capacity(t1):
    s = replace(t1, dscs=(replace(t1.dscs[0], capacity=0),))
    assert [v.invariant for v in validate(s)] == ["capacity ≥ 1"]


def test_disconnected_and_no_dg():
    s = two_node()
    cut = replace(s, branches=(), switches=())
    assert any(v.invariant == "graph is connected pre-damage" for v in validate(cut))
    nodg = replace(s, nodes=tuple(replace(n, dg=None) for n in s.nodes))
    assert any(v.invariant == "at least one DG exists" for v in validate(nodg))


def test_voltage_band_order():
    s = two_node(voltage_min=1.0, voltage_ref=1.0)
    assert any(v.entity == "options" for v in validate(s))


def test_t1_damage(t1):
    st = apply_damage(t1)
    assert st.effective_closed["2-3"] is False
    assert "2-3" not in st.closable
    assert st.comm_failed == frozenset({"1-4@1", "1-4@4"})
    assert [sw.address for sw in st.failed_switches()] == ["1-4@1", "1-4@4"]


def test_empty_damage_is_identity(t1):
    s = replace(t1, damage=DamageScenario(frozenset(), frozenset(), ()))
    st = apply_damage(s)
    assert st.effective_closed == {b.id: b.initial_closed for b in s.branches}
    assert st.comm_failed == frozenset()


def test_all_faulted(t1):
    s = replace(t1, damage=DamageScenario(frozenset(b.id for b in t1.branches), frozenset(), ()))
    st = apply_damage(s)
    assert not any(st.effective_closed.values())
    assert st.closable == frozenset()


def test_region_failure(t1):
    s = replace(t1, damage=DamageScenario(frozenset(), frozenset(), (CommRegion((100.0, 50.0), 60.0),)))
    # nodes 2 and 3 sit 50 m from the centre; switches at 1 and 4 are outside
    assert apply_damage(s).comm_failed == frozenset({"1-2@2", "2-3@2", "2-3@3", "3-4@3"})


def test_non_switchable_has_no_switches():
    s = make_scenario(two_node().nodes, [replace(two_node().branches[0], switchable=False)])
    assert s.switches == () and validate(s) == []
