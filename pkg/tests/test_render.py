"""SVG panels: structure counts, labels, and determinism."""

import pytest

from framekit.benchmark import problem_from_signature
from framekit.errors import MissingResult
from framekit.geometry import ElementKind, TopologyModel, build_topology
from framekit.loads import LoadSet, derive_loads
from framekit.render import FORCE_KINDS, RenderKind, RenderSpec, render
from framekit.solver import solve_static


def rendered(signature, kind, **spec_kw):
    p = problem_from_signature(signature)
    m = build_topology(p)
    loads = derive_loads(p, m)
    result = solve_static(m, loads, p.material)
    return m, render(m, loads, result, RenderSpec(kind=kind, **spec_kw))


def test_geometry_panel_counts_3_2_3():
    m, svg = rendered("3-2-3", RenderKind.GEOMETRY)
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg"')
    assert svg.rstrip().endswith("</svg>")
    assert svg.count("<circle") == 16
    columns = sum(1 for e in m.elements if e.kind is ElementKind.COLUMN)
    girders = len(m.elements) - columns
    assert svg.count('stroke="#444444"') == columns
    assert svg.count('stroke="#222222"') == girders
    # four fully fixed supports: filled triangle, base line, four hatch ticks
    assert svg.count('<path d="M') == 4
    assert svg.count('fill="#555555"') == 4
    assert svg.count('stroke="#555555"') == 4 * 5
    assert ">Geometry: 16 nodes, 20 elements</text>" in svg


def test_geometry_panel_always_labels_ids():
    m, svg = rendered("2-1", RenderKind.GEOMETRY)
    for n in m.nodes:
        assert f">{n.id}</text>" in svg
    for e in m.elements:
        assert f">e{e.id}</text>" in svg


def test_pinned_supports_draw_outline_triangles():
    from framekit.problem import parse_problem
    q = parse_problem("Bay: 1\nStories: 1\nSupports: Pinned\n")
    m = build_topology(q)
    svg = render(m)
    assert svg.count('fill="none" stroke="#555555"') == 2
    assert svg.count('fill="#555555"') == 0


def test_force_panels_need_results():
    p = problem_from_signature("1")
    m = build_topology(p)
    for kind in FORCE_KINDS:
        with pytest.raises(MissingResult):
            render(m, None, None, RenderSpec(kind=kind))


def test_geometry_panel_without_results_is_fine():
    p = problem_from_signature("1")
    m = build_topology(p)
    svg = render(m)
    assert svg.count("<circle") == 4


def test_empty_model_renders():
    svg = render(TopologyModel())
    assert svg.startswith("<svg")
    assert "Geometry: 0 nodes, 0 elements" in svg


def test_render_is_deterministic():
    _, a = rendered("5-3-2-4-1", RenderKind.MOMENT)
    _, b = rendered("5-3-2-4-1", RenderKind.MOMENT)
    assert a == b


def test_force_panels_draw_one_polygon_per_element():
    m, svg = rendered("5-3-2-4-1", RenderKind.AXIAL)
    assert svg.count("<polygon") == len(m.elements) == 37
    _, svg = rendered("5-3-2-4-1", RenderKind.SHEAR)
    assert svg.count("<polygon") == 37
    _, svg = rendered("5-3-2-4-1", RenderKind.MOMENT)
    assert svg.count("<polygon") == 37


def test_moment_polygons_sample_interior_stations():
    # 9 stations plus the two baseline corners
    _, svg = rendered("1", RenderKind.MOMENT)
    first = svg[svg.index("<polygon"):]
    first = first[:first.index("/>")]
    points = first.split('points="')[1].split('"')[0]
    assert len(points.split()) == 11


def test_diagram_titles_and_colors():
    _, svg = rendered("1", RenderKind.AXIAL)
    assert "Axial [kN], peak " in svg
    assert 'fill="#0066cc"' in svg
    _, svg = rendered("1", RenderKind.SHEAR)
    assert "Shear [kN], peak " in svg
    assert 'fill="#008844"' in svg
    _, svg = rendered("1", RenderKind.MOMENT)
    assert "Moment [kN·m], peak " in svg
    assert 'fill="#cc6600"' in svg


def test_loads_panel_labels():
    m, svg = rendered("3-2-3", RenderKind.LOADS)
    assert svg.count(">50 kN</text>") == 3
    assert svg.count(">10 kN/m</text>") == 8
    assert "Loads: 3 nodal, 8 member" in svg
    assert svg.count("<polyline") == 8        # one comb spine per loaded girder


def test_loads_panel_udl_comb_density():
    # a 6 m girder at scale 40 spans 240 px -> eight comb teeth
    m, svg = rendered("1", RenderKind.LOADS)
    assert svg.count('stroke="#cc2222"') >= 8


def test_scale_changes_canvas_size():
    p = problem_from_signature("2-1")
    m = build_topology(p)
    small = render(m, spec=RenderSpec(scale=20.0))
    large = render(m, spec=RenderSpec(scale=60.0))

    def dims(svg):
        head = svg.splitlines()[0]
        w = float(head.split('width="')[1].split('"')[0])
        h = float(head.split('height="')[1].split('"')[0])
        return w, h

    sw, sh = dims(small)
    lw, lh = dims(large)
    assert lw > sw and lh > sh
    # margins aside, the drawing area scales linearly
    assert lw - 2 * 40.0 == pytest.approx(3.0 * (sw - 2 * 40.0))


def test_negative_moment_changes_polygon_side():
    # moment ordinates flip with the sign of the values; compare point sets
    p = problem_from_signature("1")
    m = build_topology(p)
    loads = derive_loads(p, m)
    result = solve_static(m, loads, p.material)
    svg = render(m, loads, result, RenderSpec(kind=RenderKind.MOMENT))
    flipped_loads = LoadSet(
        nodal=loads.nodal,
        member=tuple(type(u)(u.element_id, -u.w) for u in loads.member))
    flipped_result = solve_static(m, flipped_loads, p.material)
    other = render(m, flipped_loads, flipped_result,
                   RenderSpec(kind=RenderKind.MOMENT))
    assert svg != other
