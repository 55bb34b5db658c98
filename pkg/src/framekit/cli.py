"""Command-line interface.

Subcommands cover the individual stages (parse, build, validate, analyze,
codegen, render) plus the end-to-end pipeline and the benchmark harness.
File arguments accept ``-`` for stdin/stdout where a single document is
read or written.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .benchmark import (builtin_cases, export_cases, report_csv, report_text,
                        run_benchmark, write_report_figures)
from .codegen import emit_script, parse_script
from .errors import FrameKitError, SemanticError
from .geometry import build_topology, model_from_json, model_to_json, steps_from_json, steps_to_json
from .loads import LoadSet, derive_loads, loads_to_json
from .pipeline import DeterministicBackend, backend_from_config, run_pipeline
from .problem import parse_problem, problem_to_json
from .render import RenderKind, RenderSpec, render
from .solver import result_to_json, solve_static
from .validation import validate_model


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        target = Path(path)
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")


def _backend(args) -> object:
    if getattr(args, "config", None):
        return backend_from_config(args.config)
    return DeterministicBackend()


def _load_model_argument(args):
    """Model from --script or --model (flat or construction-steps JSON)."""
    if args.script:
        return parse_script(_read_text(args.script)), None
    text = _read_text(args.model)
    if '"Construction_steps"' in text:
        return None, steps_from_json(text)
    return None, model_from_json(text)


# --- subcommand handlers ----------------------------------------------------


def _cmd_parse(args) -> int:
    problem = parse_problem(_read_text(args.input))
    _write_text(args.out, problem_to_json(problem))
    return 0


def _cmd_build(args) -> int:
    problem = parse_problem(_read_text(args.input))
    model = build_topology(problem)
    _write_text(args.out, model_to_json(model) if args.flat else steps_to_json(model))
    return 0


def _cmd_validate(args) -> int:
    parsed, model = _load_model_argument(args)
    if parsed is not None:
        fixed, actions = validate_model(parsed.model)
        for warning in parsed.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        fixed_text = emit_script(fixed, LoadSet(), parsed.material, parsed.config).text
    else:
        fixed, actions = validate_model(model)
        fixed_text = model_to_json(fixed)
    for action in actions:
        print(action.message)
    if not actions:
        print("model is consistent; no corrective actions")
    if args.fix:
        _write_text(args.out, fixed_text)
    return 0


def _cmd_analyze(args) -> int:
    if args.script:
        parsed = parse_script(_read_text(args.script))
        model, loads, material = parsed.model, parsed.loads, parsed.material
    else:
        problem = parse_problem(_read_text(args.input))
        model = build_topology(problem)
        loads = derive_loads(problem, model)
        material = problem.material
    result = solve_static(model, loads, material)
    _write_text(args.out, result_to_json(result))
    return 0


def _cmd_codegen(args) -> int:
    problem = parse_problem(_read_text(args.input))
    model = build_topology(problem)
    loads = LoadSet() if args.no_loads else derive_loads(problem, model)
    _write_text(args.out, emit_script(model, loads, problem.material).text)
    return 0


def _cmd_render(args) -> int:
    try:
        kinds = [RenderKind(token.strip()) for token in args.kinds.split(",") if token.strip()]
    except ValueError as exc:
        raise SemanticError(f"unknown render kind: {exc}") from None
    if args.script:
        parsed = parse_script(_read_text(args.script))
        model, loads, material = parsed.model, parsed.loads, parsed.material
    else:
        problem = parse_problem(_read_text(args.input))
        model = build_topology(problem)
        loads = derive_loads(problem, model)
        material = problem.material
    result = None
    if any(k in (RenderKind.AXIAL, RenderKind.SHEAR, RenderKind.MOMENT) for k in kinds):
        result = solve_static(model, loads, material)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for kind in kinds:
        path = out / f"{kind.value}.svg"
        path.write_text(render(model, loads, result, RenderSpec(kind=kind)),
                        encoding="utf-8")
        print(path)
    return 0


def _cmd_bench(args) -> int:
    backend = _backend(args)
    cases = builtin_cases(args.seed)
    report = run_benchmark(backend, args.trials, cases=cases)
    text = report_text(report)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text, encoding="utf-8")
        (out / "report.csv").write_text(report_csv(report), encoding="utf-8")
        for path in write_report_figures(report, out):
            print(path)
        if args.export_cases:
            export_cases(cases, out / "cases")
    return 0


def _cmd_pipeline(args) -> int:
    backend = _backend(args)
    result = run_pipeline(_read_text(args.input), backend)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "problem.json").write_text(problem_to_json(result.problem), encoding="utf-8")
    (out / "steps.json").write_text(steps_to_json(result.geometry), encoding="utf-8")
    (out / "model.json").write_text(model_to_json(result.model), encoding="utf-8")
    (out / "loads.json").write_text(loads_to_json(result.loads), encoding="utf-8")
    (out / "script.py").write_text(result.script.text, encoding="utf-8")
    (out / "results.json").write_text(result_to_json(result.analysis), encoding="utf-8")
    (out / "actions.txt").write_text(
        "".join(f"{a.message}\n" for a in result.actions), encoding="utf-8")
    for kind, svg in result.panels:
        (out / f"{kind}.svg").write_text(svg, encoding="utf-8")
    for record in result.records:
        print(f"{record.stage}: {record.seconds:.4f}s")
    print(f"corrective actions: {len(result.actions)}")
    print(f"artifacts in {out}")
    return 0


# --- parser -----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framekit",
        description="Frame topology, analysis-script and diagram toolchain.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="description -> canonical problem JSON")
    p.add_argument("input", help="problem description file, or - for stdin")
    p.add_argument("--out", default="-", help="output path (default stdout)")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("build", help="problem -> topology with construction steps")
    p.add_argument("input")
    p.add_argument("--out", default="-")
    p.add_argument("--flat", action="store_true",
                   help="emit the flat model tables instead of construction steps")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("validate", help="check a model or script; list corrective actions")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--script", help="analysis script to check")
    src.add_argument("--model", help="model JSON (flat or construction steps)")
    p.add_argument("--fix", action="store_true", help="write the repaired artifact")
    p.add_argument("--out", default="-", help="destination for --fix output")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("analyze", help="run the static analysis, export results JSON")
    p.add_argument("input", nargs="?", default="-", help="problem description file")
    p.add_argument("--script", help="analyze a script instead of a problem")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("codegen", help="problem -> analysis script")
    p.add_argument("input")
    p.add_argument("--out", default="-")
    p.add_argument("--no-loads", action="store_true", help="omit the loads section")
    p.set_defaults(func=_cmd_codegen)

    p = sub.add_parser("render", help="write SVG panels")
    p.add_argument("input", nargs="?", default="-", help="problem description file")
    p.add_argument("--script", help="render a script instead of a problem")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--kinds", default="geometry,loads,axial,shear,moment")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("bench", help="run the 20-case benchmark")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", help="directory for report.txt/csv and figures")
    p.add_argument("--config", help="backend config JSON file")
    p.add_argument("--export-cases", action="store_true",
                   help="also write each case as a canonical problem file")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("pipeline", help="run all five stages end to end")
    p.add_argument("--input", required=True, help="problem description file")
    p.add_argument("--out", required=True, help="artifact directory")
    p.add_argument("--config", help="backend config JSON file")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except FrameKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = getattr(exc, "filename", None) or ""
        detail = f"{exc.strerror}: {name}" if exc.strerror else str(exc)
        print(f"error: {detail}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
