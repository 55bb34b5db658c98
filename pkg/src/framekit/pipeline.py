"""Five-stage generation pipeline with pluggable backends.

Stages run in a fixed order — problem analysis, geometry construction,
translation to script, validation, load application — then the native solver
produces results and the renderer the standard panels.  A backend maps each
stage's input text to its output text: the deterministic backend is the
rule-based reference implementation (pure, always correct for valid input);
the remote backend sends versioned prompt templates to a chat-completions
HTTP endpoint.  The validation stage never goes through text generation:
both backends run the deterministic parse → validate → re-emit tools.

``classify_trial`` grades one pipeline run against an independently built
topology: success requires the final script to parse, validate, and match
the reference topology (isomorphism, not id equality), supports and loads
included; failures carry a stage name and an error category.
"""

from __future__ import annotations

import json
import os
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .codegen import AnalysisConfig, ScriptDocument, emit_script, parse_script
from .errors import (ErrorCategory, FrameKitError, RemoteError, ScriptSyntaxError,
                     SemanticError, StageFailure)
from .geometry import (TopologyModel, build_topology, coord_key, steps_from_json,
                       steps_to_json, topology_isomorphic)
from .loads import LoadSet, derive_loads
from .problem import (FrameProblem, MaterialSpec, parse_problem, problem_from_json,
                      problem_to_json, validate_problem)
from .render import RenderKind, RenderSpec, render
from .solver import AnalysisResult, InternalForceDiagram, internal_forces, solve_static
from .validation import CorrectiveAction, validate_model


class Stage(str, Enum):
    PROBLEM = "problem"
    GEOMETRY = "geometry"
    TRANSLATION = "translation"
    VALIDATION = "validation"
    LOADS = "loads"


STAGE_ORDER = (Stage.PROBLEM, Stage.GEOMETRY, Stage.TRANSLATION,
               Stage.VALIDATION, Stage.LOADS)

_STAGE_DEFAULT_CATEGORY = {
    Stage.PROBLEM: ErrorCategory.OTHER,
    Stage.GEOMETRY: ErrorCategory.GEOMETRY_TOPOLOGY,
    Stage.TRANSLATION: ErrorCategory.OTHER,
    Stage.VALIDATION: ErrorCategory.GEOMETRY_TOPOLOGY,
    Stage.LOADS: ErrorCategory.LOAD_APPLICATION,
}


@dataclass(frozen=True)
class TrialOutcome:
    """Verdict for one pipeline run; success carries no category."""

    success: bool
    stage: str | None = None
    category: ErrorCategory | None = None
    detail: str | None = None

    def __post_init__(self):
        if self.success and self.category is not None:
            raise ValueError("a successful outcome cannot carry an error category")


@dataclass(frozen=True)
class StageRecord:
    stage: str
    output: str
    seconds: float


@dataclass(frozen=True)
class PipelineResult:
    problem: FrameProblem
    geometry: TopologyModel            # as constructed, with step provenance
    model: TopologyModel               # after validation, as in the final script
    actions: tuple[CorrectiveAction, ...]
    loads: LoadSet
    material: MaterialSpec
    config: AnalysisConfig
    script: ScriptDocument             # canonical form of the final script
    analysis: AnalysisResult
    diagrams: tuple[InternalForceDiagram, ...]
    panels: tuple[tuple[str, str], ...]  # (panel kind, SVG text)
    records: tuple[StageRecord, ...]
    warnings: tuple[str, ...] = ()

    @property
    def timings(self) -> dict[str, float]:
        return {r.stage: r.seconds for r in self.records}


def run_validation(script_text: str) -> tuple[str, tuple[CorrectiveAction, ...], tuple[str, ...]]:
    """The deterministic validation tools: parse, repair, re-emit (no loads).

    Used by every backend — this stage is tool-driven by design.
    """
    parsed = parse_script(script_text)
    model, actions = validate_model(parsed.model)
    doc = emit_script(model, LoadSet(), parsed.material, parsed.config)
    return doc.text, actions, parsed.warnings


class GenerationBackend(ABC):
    """Maps one stage's input text to its output text."""

    name = "backend"

    @abstractmethod
    def run_stage(self, stage: Stage, payload: str) -> str:
        raise NotImplementedError


class DeterministicBackend(GenerationBackend):
    """Rule-engine reference backend; a pure function per stage."""

    name = "deterministic"

    def run_stage(self, stage: Stage, payload: str) -> str:
        if stage is Stage.PROBLEM:
            return problem_to_json(validate_problem(parse_problem(payload)))
        if stage is Stage.GEOMETRY:
            p = validate_problem(problem_from_json(payload))
            return steps_to_json(build_topology(p))
        if stage is Stage.TRANSLATION:
            doc = json.loads(payload)
            model = steps_from_json(payload)
            mat = _material_from_doc(doc.get("Material"))
            return emit_script(model, LoadSet(), mat).text
        if stage is Stage.VALIDATION:
            return run_validation(payload)[0]
        if stage is Stage.LOADS:
            doc = json.loads(payload)
            p = problem_from_json(json.dumps(doc["Problem"]))
            parsed = parse_script(doc["Script"])
            loads = derive_loads(p, parsed.model)
            return emit_script(parsed.model, loads, parsed.material, parsed.config).text
        raise SemanticError(f"unknown stage {stage!r}")


def _material_from_doc(doc) -> MaterialSpec:
    if not isinstance(doc, dict):
        return MaterialSpec()
    defaults = MaterialSpec()
    return MaterialSpec(**{name: float(doc.get(name, getattr(defaults, name)))
                           for name in ("E", "A_col", "A_gir", "I_col", "I_gir")})


@dataclass(frozen=True)
class RemoteEndpointConfig:
    """Where and how to reach a chat-completions endpoint.

    ``credential_env`` names the environment variable holding the API key;
    the key itself is read per request and never stored or serialized.
    """

    base_url: str
    model: str
    credential_env: str = "FRAMEKIT_API_KEY"
    timeout: float = 60.0
    retries: int = 2
    max_concurrent: int = 4
    temperature: float = 0.0


def _http_transport(url: str, body: dict, headers: dict, timeout: float) -> dict:
    import requests

    try:
        response = requests.post(url, json=body, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise RemoteError(f"request failed: {exc}") from exc
    if response.status_code != 200:
        raise RemoteError(f"endpoint returned HTTP {response.status_code}")
    try:
        return response.json()
    except ValueError as exc:
        raise RemoteError("endpoint returned non-JSON body") from exc


class RemoteBackend(GenerationBackend):
    """Chat-completions client driving the generation stages by prompt.

    Prompts come from template files (packaged defaults, or a directory given
    at construction); ``{input}`` in a template is replaced with the stage
    payload.  All raw exchanges are recorded on the instance for audit; the
    credential never appears in them.  A transport callable may be injected
    for testing.
    """

    name = "remote"

    def __init__(self, config: RemoteEndpointConfig, prompt_dir: str | None = None,
                 transport=None):
        self.config = config
        self.prompt_dir = prompt_dir
        self.transport = transport or _http_transport
        self.exchanges: list[dict] = []
        self._templates: dict[Stage, str] = {}
        self._gate = threading.BoundedSemaphore(max(1, config.max_concurrent))
        self._lock = threading.Lock()

    def template(self, stage: Stage) -> str:
        if stage not in self._templates:
            name = f"{stage.value}.txt"
            if self.prompt_dir is not None:
                text = Path(self.prompt_dir, name).read_text(encoding="utf-8")
            else:
                text = (resources.files("framekit") / "prompts" / name).read_text(
                    encoding="utf-8")
            self._templates[stage] = text
        return self._templates[stage]

    def _credential(self) -> str:
        key = os.environ.get(self.config.credential_env, "")
        if not key:
            raise RemoteError(
                f"environment variable {self.config.credential_env} is not set")
        return key

    def run_stage(self, stage: Stage, payload: str) -> str:
        if stage is Stage.VALIDATION:
            return run_validation(payload)[0]
        prompt = self.template(stage).replace("{input}", payload)
        body = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {
            "Authorization": f"Bearer {self._credential()}",
            "Content-Type": "application/json",
        }
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        started = time.perf_counter()
        last: Exception | None = None
        for _ in range(max(1, self.config.retries + 1)):
            try:
                data = self.transport(url, body, headers, self.config.timeout)
                break
            except RemoteError as exc:
                last = exc
        else:
            raise RemoteError(f"{stage.value} stage failed after "
                              f"{self.config.retries + 1} attempts: {last}")
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise RemoteError("malformed chat response: no message content") from None
        reply = _strip_fences(str(content))
        with self._lock:
            self.exchanges.append({
                "stage": stage.value,
                "request": prompt,
                "response": reply,
                "seconds": time.perf_counter() - started,
            })
        return reply


def _strip_fences(text: str) -> str:
    lines = text.strip().splitlines()
    if lines and lines[0].startswith("```"):
        lines = lines[1:]
        if lines and lines[-1].strip() == "```":
            lines = lines[:-1]
    return "\n".join(lines).strip() + "\n"


def backend_from_config(source) -> GenerationBackend:
    """Build a backend from a config mapping or a JSON config file path.

    Schema: ``{"backend": "deterministic"}`` or ``{"backend": "remote",
    "remote": {"base_url": ..., "model": ..., "credential_env": ...,
    "timeout": ..., "retries": ..., "max_concurrent": ...,
    "prompt_dir": ...}}``.
    """
    if isinstance(source, (str, os.PathLike)):
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        doc = dict(source)
    unknown = set(doc) - {"backend", "remote"}
    if unknown:
        raise SemanticError(
            f"unrecognized backend config keys: {', '.join(sorted(unknown))}"
        )
    kind = doc.get("backend", "deterministic")
    if kind == "deterministic":
        return DeterministicBackend()
    if kind == "remote":
        remote = doc.get("remote", {})
        if "base_url" not in remote:
            raise SemanticError("remote backend config needs a base_url")
        defaults = RemoteEndpointConfig(base_url="", model="")
        cfg = RemoteEndpointConfig(
            base_url=str(remote["base_url"]),
            model=str(remote.get("model", "default")),
            credential_env=str(remote.get("credential_env", defaults.credential_env)),
            timeout=float(remote.get("timeout", defaults.timeout)),
            retries=int(remote.get("retries", defaults.retries)),
            max_concurrent=int(remote.get("max_concurrent", defaults.max_concurrent)),
            temperature=float(remote.get("temperature", defaults.temperature)),
        )
        return RemoteBackend(cfg, prompt_dir=remote.get("prompt_dir"))
    raise SemanticError(f"unknown backend kind {kind!r}")


# --- orchestration ---------------------------------------------------------


PANEL_KINDS = (RenderKind.GEOMETRY, RenderKind.LOADS, RenderKind.AXIAL,
               RenderKind.SHEAR, RenderKind.MOMENT)


def _fail(stage: Stage, exc: Exception, records: list[StageRecord]) -> StageFailure:
    category = getattr(exc, "category", None) or _STAGE_DEFAULT_CATEGORY[stage]
    outcome = TrialOutcome(False, stage=stage.value, category=category, detail=str(exc))
    return StageFailure(stage.value, outcome, partial=tuple(records))


def run_pipeline(text: str, backend: GenerationBackend,
                 render_panels: bool = True) -> PipelineResult:
    """Drive all five stages over ``text``, then solve and render natively.

    Raises StageFailure (carrying a TrialOutcome and the records produced so
    far) when a stage's output cannot be used; RemoteError from a remote
    backend propagates as-is.
    """
    records: list[StageRecord] = []
    warnings: list[str] = []

    def step(stage: Stage, payload: str) -> str:
        started = time.perf_counter()
        try:
            if stage is Stage.VALIDATION:
                out, actions, parse_warnings = run_validation(payload)
                warnings.extend(parse_warnings)
                step.actions = actions  # type: ignore[attr-defined]
            else:
                out = backend.run_stage(stage, payload)
        except RemoteError:
            raise
        except FrameKitError as exc:
            raise _fail(stage, exc, records) from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise _fail(stage, exc, records) from exc
        records.append(StageRecord(stage.value, out, time.perf_counter() - started))
        return out

    step.actions = ()  # type: ignore[attr-defined]

    problem_json = step(Stage.PROBLEM, text)
    try:
        problem = validate_problem(problem_from_json(problem_json))
    except FrameKitError as exc:
        raise _fail(Stage.PROBLEM, exc, records) from exc

    steps_json = step(Stage.GEOMETRY, problem_json)
    try:
        geometry = steps_from_json(steps_json)
    except FrameKitError as exc:
        raise _fail(Stage.GEOMETRY, exc, records) from exc

    mat = problem.material
    translation_payload = json.dumps(
        {**json.loads(steps_json),
         "Material": {"E": mat.E, "A_col": mat.A_col, "A_gir": mat.A_gir,
                      "I_col": mat.I_col, "I_gir": mat.I_gir}},
        indent=2)
    bare_script = step(Stage.TRANSLATION, translation_payload)

    validated_script = step(Stage.VALIDATION, bare_script)
    actions: tuple[CorrectiveAction, ...] = step.actions  # type: ignore[attr-defined]

    loads_payload = json.dumps(
        {"Problem": json.loads(problem_json), "Script": validated_script}, indent=2)
    final_text = step(Stage.LOADS, loads_payload)

    try:
        parsed = parse_script(final_text)
        warnings.extend(parsed.warnings)
        document = emit_script(parsed.model, parsed.loads, parsed.material, parsed.config)
        started = time.perf_counter()
        analysis = solve_static(parsed.model, parsed.loads, parsed.material)
        diagrams = tuple(internal_forces(analysis, parsed.model, parsed.loads))
        records.append(StageRecord("solve", "", time.perf_counter() - started))
        panels: tuple[tuple[str, str], ...] = ()
        if render_panels:
            started = time.perf_counter()
            panels = tuple(
                (kind.value, render(parsed.model, parsed.loads, analysis,
                                    RenderSpec(kind=kind)))
                for kind in PANEL_KINDS)
            records.append(StageRecord("render", "", time.perf_counter() - started))
    except FrameKitError as exc:
        raise _fail(Stage.LOADS, exc, records) from exc

    return PipelineResult(
        problem=problem, geometry=geometry, model=parsed.model, actions=actions,
        loads=parsed.loads, material=parsed.material, config=parsed.config,
        script=document, analysis=analysis, diagrams=diagrams, panels=panels,
        records=tuple(records), warnings=tuple(warnings))


# --- trial classification --------------------------------------------------


def _load_maps(m: TopologyModel, loads: LoadSet):
    """Loads keyed by coordinates so differing id schemes compare equal."""
    pos = {n.id: coord_key(n.x, n.y) for n in m.nodes}
    nodal: dict = {}
    for p in loads.nodal:
        key = pos[p.node_id]
        fx, fy, mz = nodal.get(key, (0.0, 0.0, 0.0))
        nodal[key] = (fx + p.fx, fy + p.fy, mz + p.mz)
    member: dict = {}
    elem = {e.id: e for e in m.elements}
    for u in loads.member:
        e = elem[u.element_id]
        key = tuple(sorted((pos[e.node_i], pos[e.node_j])))
        member[key] = member.get(key, 0.0) + u.w
    return nodal, member


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-6 + 1e-9 * max(abs(a), abs(b))


def classify_trial(candidate, oracle: TopologyModel,
                   expected_loads: LoadSet | None = None) -> TrialOutcome:
    """Grade a pipeline result (or the error that ended it) against a
    reference topology; optionally also require matching loads."""
    if isinstance(candidate, TrialOutcome):
        return candidate
    if isinstance(candidate, StageFailure):
        return candidate.outcome
    if isinstance(candidate, ScriptSyntaxError):
        return TrialOutcome(False, stage=None, category=candidate.category,
                            detail=str(candidate))
    if isinstance(candidate, Exception):
        return TrialOutcome(False, stage=None, category=ErrorCategory.OTHER,
                            detail=str(candidate))
    result: PipelineResult = candidate
    if not topology_isomorphic(result.model, oracle):
        return TrialOutcome(
            False, stage=Stage.GEOMETRY.value,
            category=ErrorCategory.GEOMETRY_TOPOLOGY,
            detail=f"topology mismatch: got {len(result.model.nodes)} nodes/"
                   f"{len(result.model.elements)} elements, reference has "
                   f"{len(oracle.nodes)}/{len(oracle.elements)}")
    if expected_loads is not None:
        got_nodal, got_member = _load_maps(result.model, result.loads)
        want_nodal, want_member = _load_maps(oracle, expected_loads)
        nodal_ok = set(got_nodal) == set(want_nodal) and all(
            all(_close(a, b) for a, b in zip(got_nodal[k], want_nodal[k]))
            for k in want_nodal)
        member_ok = set(got_member) == set(want_member) and all(
            _close(got_member[k], want_member[k]) for k in want_member)
        if not (nodal_ok and member_ok):
            return TrialOutcome(False, stage=Stage.LOADS.value,
                                category=ErrorCategory.LOAD_APPLICATION,
                                detail="applied loads differ from the reference")
    return TrialOutcome(True)
