"""Load resolution onto concrete node and element ids."""

import random

import pytest

from framekit.benchmark import problem_from_signature, table_pattern_problem
from framekit.errors import UnresolvedLocator
from framekit.geometry import ElementKind, build_topology
from framekit.loads import (LoadSet, MemberUDL, NodalLoad, derive_loads,
                            loads_from_json, loads_to_json)
from framekit.problem import ExtraNodalLoad, LoadSpecification, parse_problem
from framekit.validation import ShiftNodeIds, inject_faults

from conftest import random_problem


def test_default_loads_on_3_2_3():
    p = problem_from_signature("3-2-3")  # 3 m stories
    m = build_topology(p)
    loads = derive_loads(p, m)

    by_id = m.node_by_id()
    lateral = {(by_id[l.node_id].x, by_id[l.node_id].y): l.fx for l in loads.nodal}
    assert lateral == {(0.0, 3.0): 50_000.0, (0.0, 6.0): 50_000.0, (0.0, 9.0): 50_000.0}
    assert all(l.fy == 0.0 and l.mz == 0.0 for l in loads.nodal)

    girder_ids = {e.id for e in m.elements if e.kind is ElementKind.GIRDER}
    assert {u.element_id for u in loads.member} == girder_ids
    assert len(loads.member) == 8
    assert all(u.w == -10_000.0 for u in loads.member)


def test_lateral_count_follows_bay_one_stories():
    p = table_pattern_problem()  # bay 1 has 3 stories of 5/4/5 m
    m = build_topology(p)
    loads = derive_loads(p, m)
    ys = sorted(m.node_by_id()[l.node_id].y for l in loads.nodal)
    assert ys == [5.0, 9.0, 14.0]


def test_direction_tokens_flip_signs():
    p = parse_problem(
        "Bay: 1\nStories: 1\n"
        "Lateral_point: 20 kN -x\nGirder_udl: 5 kN/m +y\n")
    m = build_topology(p)
    loads = derive_loads(p, m)
    assert loads.nodal[0].fx == -20_000.0
    assert loads.member[0].w == 5_000.0


def test_zero_magnitudes_produce_no_entries():
    p = problem_from_signature(
        "2-2", loads=LoadSpecification(lateral_point=0.0, girder_udl=0.0))
    m = build_topology(p)
    loads = derive_loads(p, m)
    assert loads == LoadSet()
    assert loads.total_nodal() == (0.0, 0.0, 0.0)


def test_extra_nodal_merges_with_lateral():
    extra = (ExtraNodalLoad(0.0, 3.0, fx=-10_000.0, fy=-4_000.0, mz=2_000.0),)
    p = problem_from_signature(
        "1", loads=LoadSpecification(extra_nodal=extra))
    m = build_topology(p)
    loads = derive_loads(p, m)
    top_left = next(l for l in loads.nodal
                    if m.node_by_id()[l.node_id].y == 3.0
                    and m.node_by_id()[l.node_id].x == 0.0)
    assert top_left.fx == 40_000.0   # 50 kN lateral - 10 kN extra
    assert top_left.fy == -4_000.0
    assert top_left.mz == 2_000.0


def test_unplaceable_extra_load_raises():
    p = problem_from_signature(
        "1", loads=LoadSpecification(extra_nodal=(ExtraNodalLoad(2.5, 2.5, fx=1.0),)))
    m = build_topology(p)
    with pytest.raises(UnresolvedLocator):
        derive_loads(p, m)


def test_loads_follow_renumbered_nodes():
    p = problem_from_signature("2-1")
    clean = build_topology(p)
    shifted = inject_faults(clean, [ShiftNodeIds(3, 10)])
    a = derive_loads(p, clean)
    b = derive_loads(p, shifted)
    assert a != b  # ids moved ...
    coords = clean.node_by_id()
    coords_b = shifted.node_by_id()
    assert {(coords[l.node_id].x, coords[l.node_id].y, l.fx) for l in a.nodal} \
        == {(coords_b[l.node_id].x, coords_b[l.node_id].y, l.fx) for l in b.nodal}


def test_total_nodal_sums_components():
    loads = LoadSet(nodal=(NodalLoad(1, 1.0, 2.0, 3.0), NodalLoad(2, -0.5, 4.0, 0.0)))
    assert loads.total_nodal() == (0.5, 6.0, 3.0)


def test_json_roundtrip():
    rng = random.Random(13)
    for _ in range(25):
        p = random_problem(rng)
        m = build_topology(p)
        loads = derive_loads(p, m)
        assert loads_from_json(loads_to_json(loads)) == loads


def test_json_defaults_missing_components():
    loads = loads_from_json('{"Nodal": [{"Node_ID": 4, "Fx": 1.5}], "Member": []}')
    assert loads == LoadSet(nodal=(NodalLoad(4, 1.5, 0.0, 0.0),))


def test_member_udl_sorted_by_element():
    p = problem_from_signature("3-1-2")
    m = build_topology(p)
    loads = derive_loads(p, m)
    ids = [u.element_id for u in loads.member]
    assert ids == sorted(ids)
    assert all(isinstance(u, MemberUDL) for u in loads.member)
