"""framekit: multi-bay frame topology, analysis scripts, and diagrams.

The toolchain runs in five stages — problem analysis, step-by-step geometry
construction, translation to an executable analysis script, model
validation/repair, and load application — then solves the frame natively
and renders SVG panels.  Each stage is a plain function here; the pipeline
module wires them together behind a pluggable generation backend.
"""

from .benchmark import (AccuracyReport, BenchmarkCase, builtin_cases,
                        problem_from_signature, report_csv, report_text,
                        run_benchmark, table_pattern_problem)
from .codegen import (AnalysisConfig, ParsedScript, ScriptDocument, emit_script,
                      parse_script)
from .errors import (DanglingReference, DegenerateElement, ErrorCategory,
                     FrameKitError, InternalError, MissingResult,
                     ProblemSyntaxError, RemoteError, ScriptSyntaxError,
                     SemanticError, SingularSystem, StageFailure,
                     UnresolvedLocator)
from .geometry import (ConstructionRule, ConstructionStep, Element, ElementKind,
                       Node, SupportConstraint, TopologyModel, build_topology,
                       grid_oracle, model_from_json, model_to_json,
                       steps_from_json, steps_to_json, topology_isomorphic)
from .loads import LoadSet, MemberUDL, NodalLoad, derive_loads, loads_from_json, loads_to_json
from .pipeline import (DeterministicBackend, GenerationBackend, PipelineResult,
                       RemoteBackend, RemoteEndpointConfig, Stage, TrialOutcome,
                       backend_from_config, classify_trial, run_pipeline)
from .problem import (BaySpec, ExtraNodalLoad, FrameProblem, LoadSpecification,
                      MaterialSpec, SupportKind, parse_problem, problem_from_json,
                      problem_to_json, problem_to_text, validate_problem)
from .render import RenderKind, RenderSpec, render
from .solver import (AnalysisResult, InternalForceDiagram, MemberEndForces,
                     NodeDisplacement, Reaction, equilibrium_residual,
                     internal_forces, result_to_json, solve_static)
from .validation import (CorrectiveAction, DuplicateElement, DuplicateNode,
                         ReconnectEndpoint, ShiftElementIds, ShiftNodeIds,
                         SwapElementIds, inject_faults, random_fault_recipe,
                         replay_actions, validate_model)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport", "AnalysisConfig", "AnalysisResult", "BaySpec",
    "BenchmarkCase", "ConstructionRule", "ConstructionStep", "CorrectiveAction",
    "DanglingReference", "DegenerateElement", "DeterministicBackend",
    "DuplicateElement", "DuplicateNode", "Element", "ElementKind",
    "ErrorCategory", "ExtraNodalLoad", "FrameKitError", "FrameProblem",
    "GenerationBackend", "InternalError", "InternalForceDiagram",
    "LoadSet", "LoadSpecification", "MaterialSpec", "MemberEndForces",
    "MemberUDL", "MissingResult", "NodalLoad", "Node", "NodeDisplacement",
    "ParsedScript", "PipelineResult", "ProblemSyntaxError", "Reaction",
    "ReconnectEndpoint", "RemoteBackend", "RemoteEndpointConfig", "RemoteError",
    "RenderKind", "RenderSpec", "ScriptDocument", "ScriptSyntaxError",
    "SemanticError", "ShiftElementIds", "ShiftNodeIds", "SingularSystem",
    "Stage", "StageFailure", "SupportConstraint", "SupportKind",
    "SwapElementIds", "TopologyModel", "TrialOutcome", "UnresolvedLocator",
    "backend_from_config", "build_topology", "builtin_cases", "classify_trial",
    "derive_loads", "emit_script", "equilibrium_residual", "grid_oracle",
    "inject_faults", "internal_forces", "loads_from_json", "loads_to_json",
    "model_from_json", "model_to_json", "parse_problem", "parse_script",
    "problem_from_json", "problem_from_signature", "problem_to_json",
    "problem_to_text", "random_fault_recipe", "render", "replay_actions",
    "report_csv", "report_text", "result_to_json", "run_benchmark",
    "run_pipeline", "solve_static", "steps_from_json", "steps_to_json",
    "table_pattern_problem", "topology_isomorphic", "validate_model",
    "validate_problem",
]
