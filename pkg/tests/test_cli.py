"""End-to-end CLI flows through main()."""

import json

from framekit.benchmark import problem_from_signature, table_pattern_problem
from framekit.cli import main
from framekit.codegen import emit_script, parse_script
from framekit.geometry import build_topology
from framekit.loads import LoadSet
from framekit.problem import parse_problem, problem_to_text
from framekit.validation import DuplicateNode, inject_faults


def write_problem(tmp_path, signature="2-1"):
    path = tmp_path / "problem.txt"
    path.write_text(problem_to_text(problem_from_signature(signature)),
                    encoding="utf-8")
    return path


def test_parse_to_stdout(tmp_path, capsys):
    path = write_problem(tmp_path)
    assert main(["parse", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["Total_bays"] == 2


def test_parse_reads_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("Bay: 1\nStories: 1\n"))
    assert main(["parse", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["Total_bays"] == 1


def test_build_steps_and_flat(tmp_path, capsys):
    path = write_problem(tmp_path)
    out = tmp_path / "steps.json"
    assert main(["build", str(path), "--out", str(out)]) == 0
    assert "Construction_steps" in out.read_text(encoding="utf-8")

    assert main(["build", str(path), "--flat"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "Nodes" in doc and "Construction_steps" not in doc


def test_validate_clean_script(tmp_path, capsys):
    path = write_problem(tmp_path)
    script = tmp_path / "frame.py"
    assert main(["codegen", str(path), "--out", str(script)]) == 0
    capsys.readouterr()
    assert main(["validate", "--script", str(script)]) == 0
    out = capsys.readouterr().out
    assert "model is consistent; no corrective actions" in out


def test_validate_fix_writes_repaired_script(tmp_path, capsys):
    p = table_pattern_problem()
    clean = build_topology(p)
    corrupt = inject_faults(clean, [DuplicateNode(11, 14)])
    script = tmp_path / "broken.py"
    script.write_text(emit_script(corrupt, LoadSet(), p.material).text,
                      encoding="utf-8")
    fixed = tmp_path / "fixed.py"
    assert main(["validate", "--script", str(script), "--fix",
                 "--out", str(fixed)]) == 0
    out = capsys.readouterr().out
    assert "Remove duplicate node 14; keep node 11." in out
    repaired = parse_script(fixed.read_text(encoding="utf-8"))
    assert len(repaired.model.nodes) == 16
    assert repaired.loads == LoadSet()     # repair output carries no loads


def test_validate_model_json(tmp_path, capsys):
    path = write_problem(tmp_path)
    steps = tmp_path / "steps.json"
    assert main(["build", str(path), "--out", str(steps)]) == 0
    assert main(["validate", "--model", str(steps)]) == 0
    assert "no corrective actions" in capsys.readouterr().out


def test_analyze_problem(tmp_path, capsys):
    path = write_problem(tmp_path)
    assert main(["analyze", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["Reactions"]) == 3
    assert len(doc["Displacements"]) == 8


def test_analyze_script(tmp_path, capsys):
    path = write_problem(tmp_path)
    script = tmp_path / "frame.py"
    assert main(["codegen", str(path), "--out", str(script)]) == 0
    out = tmp_path / "results.json"
    assert main(["analyze", "--script", str(script), "--out", str(out)]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert set(doc) == {"Displacements", "Reactions", "Member_end_forces"}


def test_codegen_no_loads(tmp_path, capsys):
    path = write_problem(tmp_path)
    assert main(["codegen", str(path), "--no-loads"]) == 0
    text = capsys.readouterr().out
    assert "# loads" not in text
    assert "# elements" in text


def test_render_selected_kinds(tmp_path, capsys):
    path = write_problem(tmp_path)
    out = tmp_path / "panels"
    assert main(["render", str(path), "--out", str(out),
                 "--kinds", "geometry,moment"]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert len(printed) == 2
    assert (out / "geometry.svg").exists()
    assert (out / "moment.svg").exists()
    assert not (out / "shear.svg").exists()


def test_render_rejects_unknown_kind(tmp_path, capsys):
    path = write_problem(tmp_path)
    assert main(["render", str(path), "--out", str(tmp_path / "x"),
                 "--kinds", "sparkline"]) == 1
    assert "unknown render kind" in capsys.readouterr().err


def test_bench_small(tmp_path, capsys):
    out = tmp_path / "bench"
    assert main(["bench", "--trials", "1", "--out", str(out),
                 "--export-cases"]) == 0
    stdout = capsys.readouterr().out
    assert "overall accuracy 1.0000" in stdout
    assert (out / "report.txt").exists()
    assert (out / "report.csv").exists()
    assert (out / "accuracy.png").exists()
    assert (out / "runtime.png").exists()
    cases = sorted((out / "cases").glob("*.txt"))
    assert len(cases) == 20
    assert parse_problem(cases[0].read_text(encoding="utf-8"))


def test_pipeline_artifacts(tmp_path, capsys):
    path = write_problem(tmp_path, "3-2-3")
    out = tmp_path / "run"
    assert main(["pipeline", "--input", str(path), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    for stage in ("problem:", "geometry:", "translation:", "validation:",
                  "loads:", "solve:", "render:"):
        assert stage in stdout
    assert "corrective actions: 0" in stdout
    for name in ("problem.json", "steps.json", "model.json", "loads.json",
                 "script.py", "results.json", "actions.txt", "geometry.svg",
                 "loads.svg", "axial.svg", "shear.svg", "moment.svg"):
        assert (out / name).exists(), name
    assert (out / "actions.txt").read_text(encoding="utf-8") == ""
    script = parse_script((out / "script.py").read_text(encoding="utf-8"))
    assert len(script.model.nodes) == 16


def test_pipeline_config_file(tmp_path, capsys):
    path = write_problem(tmp_path)
    cfg = tmp_path / "backend.json"
    cfg.write_text('{"backend": "deterministic"}', encoding="utf-8")
    out = tmp_path / "run"
    assert main(["pipeline", "--input", str(path), "--out", str(out),
                 "--config", str(cfg)]) == 0
    assert (out / "model.json").exists()


def test_malformed_input_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("Nonsense: 42\n", encoding="utf-8")
    assert main(["parse", str(bad)]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")


def test_missing_input_file_exits_one(tmp_path, capsys):
    assert main(["build", str(tmp_path / "nope.txt")]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "nope.txt" in err


def test_invalid_config_json_exits_one(tmp_path, capsys):
    path = write_problem(tmp_path)
    cfg = tmp_path / "backend.json"
    cfg.write_text("{oops", encoding="utf-8")
    assert main(["pipeline", "--input", str(path), "--out",
                 str(tmp_path / "run"), "--config", str(cfg)]) == 1
    assert capsys.readouterr().err.startswith("error: invalid JSON:")


def test_unknown_command_exits_two(capsys):
    assert main(["conjure"]) == 2
    assert main([]) == 2


def test_missing_required_argument_exits_two(capsys):
    assert main(["pipeline"]) == 2
    assert main(["validate"]) == 2
