"""Top-level acceptance checks, one per criterion, with timing budgets.

Each test prints a ``criterion N: PASS`` line with the measured numbers once
its assertions hold, so a verbose run reads as a checklist.
"""

import random
import time

import pytest

from framekit.benchmark import (builtin_cases, problem_from_signature,
                                run_benchmark, table_pattern_problem)
from framekit.codegen import AnalysisConfig, emit_script, parse_script
from framekit.errors import ErrorCategory, ScriptSyntaxError
from framekit.geometry import (ConstructionRule, ElementKind, build_topology,
                               grid_oracle, topology_isomorphic)
from framekit.loads import LoadSet, MemberUDL, NodalLoad, derive_loads
from framekit.pipeline import DeterministicBackend
from framekit.problem import LoadSpecification, MaterialSpec
from framekit.render import RenderKind, RenderSpec, render
from framekit.solver import equilibrium_residual, internal_forces, solve_static
from framekit.validation import (DuplicateElement, DuplicateNode,
                                 ReconnectEndpoint, SwapElementIds,
                                 inject_faults, random_fault_recipe,
                                 replay_actions, validate_model)

from conftest import COLUMN, GIRDER, make_model, random_problem


def test_criterion_1_first_construction_step():
    """Single-bay single-story start of the 5/4/5 m reference frame, < 1 ms."""
    problem = table_pattern_problem()
    build_topology(problem)                      # warm caches
    started = time.perf_counter()
    m = build_topology(problem)
    elapsed = time.perf_counter() - started

    step = m.steps[0]
    assert (step.step, step.bay, step.story) == (1, 1, 1)
    assert step.rule is ConstructionRule.RULE_1
    assert step.added_nodes == (1, 2, 3, 4)
    assert step.added_elements == (1, 2, 3)
    assert step.added_supports == (1, 2)
    assert [(n.id, n.x, n.y) for n in m.nodes[:4]] == \
        [(1, 0.0, 0.0), (2, 6.0, 0.0), (3, 0.0, 5.0), (4, 6.0, 5.0)]
    assert [(e.id, e.node_i, e.node_j, e.kind) for e in m.elements[:3]] == \
        [(1, 1, 3, ElementKind.COLUMN), (2, 2, 4, ElementKind.COLUMN),
         (3, 3, 4, ElementKind.GIRDER)]
    assert [(s.node_id, s.fixity) for s in m.supports[:2]] == \
        [(1, (True, True, True)), (2, (True, True, True))]
    assert elapsed < 1e-3
    print(f"criterion 1: PASS — step 1 exact, built in {elapsed * 1e3:.3f} ms")


def test_criterion_2_construction_matches_reference_grid():
    """All built-in cases plus 500 random problems, against the grid model, < 5 s."""
    started = time.perf_counter()

    spot = {"3-2-3": (16, 20, 4), "5-3-2-4-1": (28, 37, 6)}
    for case in builtin_cases():
        m = build_topology(case.problem)
        assert topology_isomorphic(m, grid_oracle(case.problem))
        if case.name in spot:
            assert (len(m.nodes), len(m.elements), len(m.supports)) == spot[case.name]
        if case.name == "3-4-5-4-3":
            cols = sum(1 for e in m.elements if e.kind is ElementKind.COLUMN)
            assert (len(m.nodes), cols, len(m.elements) - cols) == (30, 24, 19)

    rng = random.Random(1601)
    for _ in range(500):
        p = random_problem(rng)
        assert topology_isomorphic(build_topology(p), grid_oracle(p))

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    print(f"criterion 2: PASS — 20 cases + 500 random builds in {elapsed:.2f} s")


def test_criterion_3_exact_corrective_log():
    """The four-fault corruption of the reference frame produces this exact log."""
    clean = build_topology(table_pattern_problem())
    corrupt = inject_faults(clean, [
        DuplicateNode(11, 14),
        DuplicateElement(13, 16),
        SwapElementIds(17, 18),
        ReconnectEndpoint(17, 11, 14),
    ])
    assert (len(corrupt.nodes), len(corrupt.elements)) == (17, 21)

    repaired, actions = validate_model(corrupt)
    assert [a.message for a in actions] == [
        "Remove duplicate node 14; keep node 11.",
        "Remove duplicate element 16; keep element 13.",
        "Renumber node 15 to 14.",
        "Renumber node 16 to 15.",
        "Renumber node 17 to 16.",
        "Reconnect element 17 to retained node 11.",
        "Renumber element 17 to 16.",
        "Renumber element 18 to 17.",
        "Renumber element 19 to 18.",
        "Renumber element 20 to 19.",
        "Renumber element 21 to 20.",
    ]
    assert topology_isomorphic(repaired, clean)
    again, more = validate_model(repaired)
    assert more == () and again == repaired
    assert replay_actions(corrupt, actions) == repaired
    print("criterion 3: PASS — 11-action log exact; repair isomorphic, "
          "idempotent, replayable")


def test_criterion_4_thousand_fault_recoveries():
    """1000 randomly corrupted models repair back to their clean shape, < 10 s."""
    started = time.perf_counter()
    rng = random.Random(424242)
    for i in range(1000):
        clean = build_topology(random_problem(rng, with_loads=False))
        corrupt = inject_faults(clean, random_fault_recipe(clean, rng))
        repaired, actions = validate_model(corrupt)
        assert topology_isomorphic(repaired, clean)
        again, more = validate_model(repaired)
        assert more == () and again == repaired
        assert replay_actions(corrupt, actions) == repaired
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    print(f"criterion 4: PASS — 1000 fault models repaired in {elapsed:.2f} s")


def test_criterion_5_solver_physics():
    """Closed-form benchmarks at 1e-9 relative, equilibrium at 1e-8 relative,
    and displacement mirror symmetry on a symmetric frame."""
    mat = MaterialSpec()

    # cantilever tip deflection
    P, L = 1_000.0, 3.0
    m = make_model(nodes=[(1, 0, 0), (2, 0, L)],
                   elements=[(1, 1, 2, COLUMN)], supports=[1])
    r = solve_static(m, LoadSet(nodal=(NodalLoad(2, fx=P),)), mat)
    tip = r.displacement_of(2).ux
    want = P * L**3 / (3.0 * mat.E * mat.I_col)
    cant_rel = abs(tip - want) / want
    assert cant_rel < 1e-9

    # simply supported girder under UDL: midspan moment |w|L^2/8
    w, Lg = -10_000.0, 6.0
    g = make_model(nodes=[(1, 0, 0), (2, Lg, 0)],
                   elements=[(1, 1, 2, GIRDER)],
                   supports=[(1, (True, True, False)), (2, (False, True, False))])
    loads = LoadSet(member=(MemberUDL(1, w),))
    rg = solve_static(g, loads, mat)
    mid = internal_forces(rg, g, loads)[0].moment_at(Lg / 2.0)
    mid_rel = abs(mid - 45_000.0) / 45_000.0
    assert mid_rel < 1e-9

    # global equilibrium across the benchmark set, relative to applied load
    worst_eq = 0.0
    for case in builtin_cases():
        mm = build_topology(case.problem)
        ll = derive_loads(case.problem, mm)
        rr = solve_static(mm, ll, case.problem.material)
        residual = equilibrium_residual(mm, ll, rr)
        applied = abs(sum(p.fx for p in ll.nodal)) + sum(
            abs(u.w) * 6.0 for u in ll.member)
        worst_eq = max(worst_eq, max(abs(c) for c in residual) / applied)
    assert worst_eq < 1e-8

    # mirror symmetry of a palindromic frame under symmetric loads
    q = problem_from_signature(
        "3-4-3", loads=LoadSpecification(lateral_point=0.0, girder_udl=10_000.0))
    mq = build_topology(q)
    rq = solve_static(mq, derive_loads(q, mq), q.material)
    width = max(n.x for n in mq.nodes)
    pos = {(n.x, n.y): n.id for n in mq.nodes}
    worst_sym = 0.0
    for n in mq.nodes:
        a = rq.displacement_of(n.id)
        b = rq.displacement_of(pos[(width - n.x, n.y)])
        worst_sym = max(worst_sym, abs(a.ux + b.ux), abs(a.uy - b.uy),
                        abs(a.rz + b.rz))
    assert worst_sym < 1e-8
    print(f"criterion 5: PASS — cantilever rel {cant_rel:.1e}, midspan rel "
          f"{mid_rel:.1e}, equilibrium rel {worst_eq:.1e}, symmetry "
          f"{worst_sym:.1e}")


def test_criterion_6_script_roundtrip_determinism():
    """Emit -> parse -> emit is byte-identical on 20 + 200 models."""
    started = time.perf_counter()

    def check(problem):
        m = build_topology(problem)
        loads = derive_loads(problem, m)
        first = emit_script(m, loads, problem.material)
        parsed = parse_script(first.text)
        assert parsed.model == m.stripped()
        assert parsed.loads == loads
        assert parsed.material == problem.material
        assert parsed.config == AnalysisConfig()
        second = emit_script(parsed.model, parsed.loads, parsed.material,
                             parsed.config)
        assert second.text == first.text

    for case in builtin_cases():
        check(case.problem)
    rng = random.Random(8080)
    for _ in range(200):
        check(random_problem(rng))
    elapsed = time.perf_counter() - started
    print(f"criterion 6: PASS — 220 byte-identical roundtrips in {elapsed:.2f} s")


def test_criterion_7_benchmark_accuracy():
    """10 trials x 20 cases through the full pipeline, accuracy 1.00, < 60 s."""
    started = time.perf_counter()
    report = run_benchmark(DeterministicBackend(), trials=10)
    elapsed = time.perf_counter() - started
    assert report.total_trials == 200
    assert report.total_successes == 200
    assert all(c.accuracy == 1.0 for c in report.cases)
    assert elapsed < 60.0
    print(f"criterion 7: PASS — 200/200 trials succeeded in {elapsed:.2f} s")


def test_criterion_8_defect_classification():
    """One seeded defect per category lands in that category."""
    prelude = (
        "import openseespy.opensees as ops\n"
        "ops.wipe()\n"
        "ops.model('basic', '-ndm', 2, '-ndf', 3)\n"
        "E = 200000000000\n"
        "A_col = 0.002\n"
        "I_col = 1.6e-05\n"
        "A_gir = 0.006\n"
        "I_gir = 5.4e-05\n"
        "ops.node(1, 0, 0)\n"
        "ops.node(2, 6, 0)\n"
        "ops.node(3, 0, 3)\n"
        "ops.node(4, 6, 3)\n"
        "ops.fix(1, 1, 1, 1)\n"
        "ops.fix(2, 1, 1, 1)\n"
        "ops.geomTransf('Linear', 1)\n")
    defects = [
        ("ops.element('truss', 1, 1, 3, A_col, E, I_col, 1)",
         ErrorCategory.ELEMENT_DEFINITION),
        ("ops.node(3, 12, 0)", ErrorCategory.NODE_DEFINITION),
        ("ops.fix('one', 1, 1, 1)", ErrorCategory.SUPPORT_CONDITIONS),
        ("ops.element('elasticBeamColumn', 1, 1, 3, A_col, E, I_gir, 1)",
         ErrorCategory.MATERIAL_PROPERTIES),
        ("ops.load(3, 50000, 0, 0)", ErrorCategory.LOAD_APPLICATION),
    ]
    for line, category in defects:
        with pytest.raises(ScriptSyntaxError) as info:
            parse_script(prelude + line + "\n")
        assert info.value.category is category, line
    print("criterion 8: PASS — five defect scripts classified into five categories")


def test_criterion_9_reference_panels_byte_exact(request):
    """The five panels of the 5-3-2-4-1 case match the stored SVGs byte for byte."""
    golden_dir = request.path.parent / "golden"
    p = problem_from_signature("5-3-2-4-1")
    m = build_topology(p)
    loads = derive_loads(p, m)
    result = solve_static(m, loads, p.material)
    for kind in (RenderKind.GEOMETRY, RenderKind.LOADS, RenderKind.AXIAL,
                 RenderKind.SHEAR, RenderKind.MOMENT):
        svg = render(m, loads, result, RenderSpec(kind=kind))
        want = (golden_dir / f"5-3-2-4-1_{kind.value}.svg").read_text(
            encoding="utf-8")
        assert svg == want, f"{kind.value} panel drifted from the stored SVG"
    print("criterion 9: PASS — five stored panels reproduced byte-exactly")
