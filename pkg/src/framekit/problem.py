"""Frame problem descriptions.

A problem states, per bay: span and per-story heights, plus support kind,
section/material constants and (optionally) loading.  Two surface forms are
accepted and produced:

* line-oriented ``key: value`` text (see README for the grammar), and
* a JSON document with the same field names (``Total_bays``, ``Geometry[]``,
  ``Supports``, ``Material``, ``Loads``).

All values are SI internally (m, N, Pa).  The text surface additionally
accepts kN / kN/m suffixes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import ProblemSyntaxError, SemanticError

# Benchmark defaults, used whenever a description leaves a field out.
DEFAULT_SPAN = 6.0
DEFAULT_STORY_HEIGHT = 3.0
DEFAULT_E = 2.0e11
DEFAULT_A_COL = 2.0e-3
DEFAULT_A_GIR = 6.0e-3
DEFAULT_I_COL = 1.6e-5
DEFAULT_I_GIR = 5.4e-5
DEFAULT_LATERAL_POINT = 50_000.0  # N, applied toward +x at each floor of bay 1
DEFAULT_GIRDER_UDL = 10_000.0     # N/m, applied toward -y on every girder


class SupportKind(str, Enum):
    FIXED = "Fixed"
    PINNED = "Pinned"


@dataclass(frozen=True)
class BaySpec:
    """One bay: 1-based index, span [m] and the height of each story [m]."""

    index: int
    span: float
    stories: int
    heights: tuple[float, ...]


@dataclass(frozen=True)
class MaterialSpec:
    """Elastic modulus [Pa] plus column/girder section area [m^2] and inertia [m^4]."""

    E: float = DEFAULT_E
    A_col: float = DEFAULT_A_COL
    A_gir: float = DEFAULT_A_GIR
    I_col: float = DEFAULT_I_COL
    I_gir: float = DEFAULT_I_GIR


@dataclass(frozen=True)
class ExtraNodalLoad:
    """Additional nodal load located by coordinates [m]; components in N, N·m."""

    x: float
    y: float
    fx: float = 0.0
    fy: float = 0.0
    mz: float = 0.0


@dataclass(frozen=True)
class LoadSpecification:
    """Load magnitudes (all >= 0) with explicit directions.

    ``lateral_point`` acts at the leftmost column line at every floor level of
    bay 1; ``girder_udl`` acts transversely on every girder.
    """

    lateral_point: float = DEFAULT_LATERAL_POINT
    lateral_direction: str = "+x"
    girder_udl: float = DEFAULT_GIRDER_UDL
    girder_direction: str = "-y"
    extra_nodal: tuple[ExtraNodalLoad, ...] = ()


@dataclass(frozen=True)
class FrameProblem:
    """A complete, unit-normalized frame description."""

    total_bays: int
    bays: tuple[BaySpec, ...]
    support_kind: SupportKind = SupportKind.FIXED
    material: MaterialSpec = field(default_factory=MaterialSpec)
    load_spec: LoadSpecification | None = None

    def resolved_loads(self) -> LoadSpecification:
        """The effective loading: benchmark defaults when none was given."""
        return self.load_spec if self.load_spec is not None else LoadSpecification()

    @property
    def signature(self) -> str:
        return "-".join(str(b.stories) for b in self.bays)


def validate_problem(p: FrameProblem) -> FrameProblem:
    """Check every FrameProblem invariant; raise SemanticError on the first violation."""
    if p.total_bays < 1:
        raise SemanticError("a frame needs at least one bay")
    if p.total_bays != len(p.bays):
        raise SemanticError(
            f"Total_bays is {p.total_bays} but {len(p.bays)} bays are defined")
    for pos, bay in enumerate(p.bays, start=1):
        if bay.index != pos:
            raise SemanticError(f"bay indices must run 1..{p.total_bays}; got {bay.index} at position {pos}")
        if bay.span <= 0.0:
            raise SemanticError(f"bay {bay.index}: span must be positive")
        if bay.stories < 1:
            raise SemanticError(f"bay {bay.index}: needs at least one story")
        if len(bay.heights) != bay.stories:
            raise SemanticError(
                f"bay {bay.index}: {bay.stories} stories but {len(bay.heights)} heights")
        if any(h <= 0.0 for h in bay.heights):
            raise SemanticError(f"bay {bay.index}: story heights must be positive")
    # Shared floor levels must line up between neighbouring bays, otherwise
    # girders between them would have nowhere to land.
    for left, right in zip(p.bays, p.bays[1:]):
        shared = min(left.stories, right.stories)
        for s in range(shared):
            if left.heights[s] != right.heights[s]:
                raise SemanticError(
                    f"bays {left.index} and {right.index} disagree on the height of story {s + 1}")
    m = p.material
    for name, value in (("E", m.E), ("A_col", m.A_col), ("A_gir", m.A_gir),
                        ("I_col", m.I_col), ("I_gir", m.I_gir)):
        if value <= 0.0:
            raise SemanticError(f"material constant {name} must be positive")
    if p.load_spec is not None:
        ls = p.load_spec
        if ls.lateral_point < 0.0 or ls.girder_udl < 0.0:
            raise SemanticError("load magnitudes must be non-negative")
        if ls.lateral_direction not in ("+x", "-x"):
            raise SemanticError(f"bad lateral direction {ls.lateral_direction!r}")
        if ls.girder_direction not in ("+y", "-y"):
            raise SemanticError(f"bad girder load direction {ls.girder_direction!r}")
    return p


# ---------------------------------------------------------------------------
# text surface


_UNIT_SCALE = {"n": 1.0, "kn": 1e3, "n/m": 1.0, "kn/m": 1e3}


def _number(token: str, line: int, fld: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ProblemSyntaxError(f"expected a number, got {token!r}", line, fld) from None


def _int(token: str, line: int, fld: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ProblemSyntaxError(f"expected an integer, got {token!r}", line, fld) from None


def _magnitude(value: str, line: int, fld: str, directions: tuple[str, str]) -> tuple[float, str | None]:
    """Parse '<num> [unit] [direction]' returning (value in SI, direction or None)."""
    tokens = value.replace(",", " ").split()
    if not tokens:
        raise ProblemSyntaxError("empty value", line, fld)
    mag = _number(tokens[0], line, fld)
    direction = None
    for tok in tokens[1:]:
        low = tok.lower()
        if low in _UNIT_SCALE:
            mag *= _UNIT_SCALE[low]
        elif tok in directions:
            direction = tok
        else:
            raise ProblemSyntaxError(f"unrecognized token {tok!r}", line, fld)
    return mag, direction


def _float_list(value: str, line: int, fld: str) -> tuple[float, ...]:
    tokens = value.replace(",", " ").split()
    if not tokens:
        raise ProblemSyntaxError("empty list", line, fld)
    return tuple(_number(t, line, fld) for t in tokens)


class _BayDraft:
    def __init__(self, index: int):
        self.index = index
        self.span: float | None = None
        self.stories: int | None = None
        self.heights: tuple[float, ...] | None = None


def parse_problem(text: str) -> FrameProblem:
    """Parse a problem description (text or JSON) into a validated FrameProblem."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return problem_from_json(text)

    total_bays: int | None = None
    drafts: list[_BayDraft] = []
    support = None
    mat: dict[str, float] = {}
    loads: dict[str, object] = {}
    extra: list[ExtraNodalLoad] = []
    saw_loads = False

    def current_bay(line: int, fld: str) -> _BayDraft:
        if not drafts:
            raise ProblemSyntaxError(f"{fld} given before any 'Bay:' line", line, fld)
        return drafts[-1]

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ProblemSyntaxError("expected 'key: value'", line_no)
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if key == "total_bays":
            total_bays = _int(value, line_no, key)
        elif key == "bay":
            drafts.append(_BayDraft(_int(value, line_no, key)))
        elif key == "span":
            current_bay(line_no, key).span = _number(value, line_no, key)
        elif key in ("total_stories", "stories"):
            current_bay(line_no, key).stories = _int(value, line_no, key)
        elif key == "heights":
            current_bay(line_no, key).heights = _float_list(value, line_no, key)
        elif key == "supports":
            try:
                support = SupportKind(value.capitalize())
            except ValueError:
                raise ProblemSyntaxError(f"unknown support kind {value!r}", line_no, key) from None
        elif key in ("e", "a_col", "a_gir", "i_col", "i_gir"):
            canon = key.capitalize() if key == "e" else key[0].upper() + key[1:]
            mat[canon] = _number(value, line_no, key)
        elif key == "lateral_point":
            mag, direction = _magnitude(value, line_no, key, ("+x", "-x"))
            loads["lateral_point"] = mag
            if direction:
                loads["lateral_direction"] = direction
            saw_loads = True
        elif key == "girder_udl":
            mag, direction = _magnitude(value, line_no, key, ("+y", "-y"))
            loads["girder_udl"] = mag
            if direction:
                loads["girder_direction"] = direction
            saw_loads = True
        elif key == "extra_nodal":
            nums = _float_list(value, line_no, key)
            if len(nums) != 5:
                raise ProblemSyntaxError("extra_nodal needs 'x y Fx Fy Mz'", line_no, key)
            extra.append(ExtraNodalLoad(*nums))
            saw_loads = True
        else:
            raise ProblemSyntaxError(f"unknown key {key!r}", line_no, key)

    bays = tuple(_finish_bay(d) for d in drafts)
    if total_bays is None:
        total_bays = len(bays)
    load_spec = None
    if saw_loads:
        load_spec = LoadSpecification(extra_nodal=tuple(extra), **loads)  # type: ignore[arg-type]
    problem = FrameProblem(
        total_bays=total_bays,
        bays=bays,
        support_kind=support if support is not None else SupportKind.FIXED,
        material=MaterialSpec(**mat),
        load_spec=load_spec,
    )
    return validate_problem(problem)


def _finish_bay(d: _BayDraft) -> BaySpec:
    stories = d.stories
    heights = d.heights
    if stories is None and heights is None:
        raise SemanticError(f"bay {d.index}: give Total_stories or Heights")
    if stories is None:
        stories = len(heights)  # type: ignore[arg-type]
    if heights is None:
        heights = (DEFAULT_STORY_HEIGHT,) * stories
    return BaySpec(
        index=d.index,
        span=d.span if d.span is not None else DEFAULT_SPAN,
        stories=stories,
        heights=heights,
    )


def problem_to_text(p: FrameProblem) -> str:
    """Canonical text form; parse_problem reads it back unchanged."""
    g = lambda v: f"{v:.12g}"  # noqa: E731 - tiny local formatter
    lines = [f"Total_bays: {p.total_bays}"]
    for b in p.bays:
        lines.append(f"Bay: {b.index}")
        lines.append(f"Span: {g(b.span)}")
        lines.append(f"Total_stories: {b.stories}")
        lines.append("Heights: " + " ".join(g(h) for h in b.heights))
    lines.append(f"Supports: {p.support_kind.value}")
    m = p.material
    lines += [f"E: {g(m.E)}", f"A_col: {g(m.A_col)}", f"A_gir: {g(m.A_gir)}",
              f"I_col: {g(m.I_col)}", f"I_gir: {g(m.I_gir)}"]
    if p.load_spec is not None:
        ls = p.load_spec
        lines.append(f"Lateral_point: {g(ls.lateral_point)} {ls.lateral_direction}")
        lines.append(f"Girder_udl: {g(ls.girder_udl)} {ls.girder_direction}")
        for e in ls.extra_nodal:
            lines.append("Extra_nodal: " + " ".join(g(v) for v in (e.x, e.y, e.fx, e.fy, e.mz)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON surface


def problem_to_json(p: FrameProblem) -> str:
    """Serialize with a fixed key order so equal problems give identical bytes."""
    doc: dict = {
        "Total_bays": p.total_bays,
        "Geometry": [
            {
                "Bay": b.index,
                "Span": b.span,
                "Total_stories": b.stories,
                "Heights": list(b.heights),
            }
            for b in p.bays
        ],
        "Supports": p.support_kind.value,
        "Material": {
            "E": p.material.E,
            "A_col": p.material.A_col,
            "A_gir": p.material.A_gir,
            "I_col": p.material.I_col,
            "I_gir": p.material.I_gir,
        },
    }
    if p.load_spec is not None:
        ls = p.load_spec
        doc["Loads"] = {
            "Lateral_point": ls.lateral_point,
            "Lateral_direction": ls.lateral_direction,
            "Girder_udl": ls.girder_udl,
            "Girder_direction": ls.girder_direction,
            "Extra_nodal": [
                {"x": e.x, "y": e.y, "Fx": e.fx, "Fy": e.fy, "Mz": e.mz}
                for e in ls.extra_nodal
            ],
        }
    return json.dumps(doc, indent=2) + "\n"


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ProblemSyntaxError(f"missing {key!r} in {where}", field=key)
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ProblemSyntaxError(f"{where}.{key} must be a number", field=key)
        return float(value)
    if not isinstance(value, kind):
        raise ProblemSyntaxError(f"{where}.{key} has the wrong type", field=key)
    return value


def problem_from_json(text: str) -> FrameProblem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSyntaxError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ProblemSyntaxError("top level must be an object")

    geometry = doc.get("Geometry")
    if geometry is None:
        raise ProblemSyntaxError("missing 'Geometry'", field="Geometry")
    if isinstance(geometry, dict):
        geometry = [geometry]
    if not isinstance(geometry, list):
        raise ProblemSyntaxError("'Geometry' must be a list of bay objects", field="Geometry")

    bays = []
    for i, entry in enumerate(geometry, start=1):
        if not isinstance(entry, dict):
            raise ProblemSyntaxError(f"Geometry[{i - 1}] must be an object", field="Geometry")
        where = f"Geometry[{i - 1}]"
        index = entry.get("Bay", i)
        if not isinstance(index, int) or isinstance(index, bool):
            raise ProblemSyntaxError(f"{where}.Bay must be an integer", field="Bay")
        span = float(entry["Span"]) if "Span" in entry else DEFAULT_SPAN
        if "Heights" in entry:
            heights_raw = entry["Heights"]
            if not isinstance(heights_raw, list):
                raise ProblemSyntaxError(f"{where}.Heights must be a list", field="Heights")
            heights = tuple(float(h) for h in heights_raw)
        else:
            heights = None
        stories = entry.get("Total_stories")
        if stories is None and heights is None:
            raise ProblemSyntaxError(f"{where}: give Total_stories or Heights", field="Total_stories")
        if stories is None:
            stories = len(heights)  # type: ignore[arg-type]
        if heights is None:
            heights = (DEFAULT_STORY_HEIGHT,) * stories
        bays.append(BaySpec(index=index, span=span, stories=stories, heights=heights))

    support = SupportKind.FIXED
    if "Supports" in doc:
        try:
            support = SupportKind(str(doc["Supports"]).capitalize())
        except ValueError:
            raise ProblemSyntaxError(f"unknown support kind {doc['Supports']!r}", field="Supports") from None

    material = MaterialSpec()
    if "Material" in doc:
        mat_doc = _require(doc, "Material", dict, "problem")
        kwargs = {}
        for name in ("E", "A_col", "A_gir", "I_col", "I_gir"):
            if name in mat_doc:
                kwargs[name] = _require(mat_doc, name, float, "Material")
        material = MaterialSpec(**kwargs)

    load_spec = None
    if "Loads" in doc:
        ld = _require(doc, "Loads", dict, "problem")
        extra = tuple(
            ExtraNodalLoad(
                x=_require(e, "x", float, "Extra_nodal"),
                y=_require(e, "y", float, "Extra_nodal"),
                fx=float(e.get("Fx", 0.0)),
                fy=float(e.get("Fy", 0.0)),
                mz=float(e.get("Mz", 0.0)),
            )
            for e in ld.get("Extra_nodal", [])
        )
        load_spec = LoadSpecification(
            lateral_point=float(ld.get("Lateral_point", DEFAULT_LATERAL_POINT)),
            lateral_direction=str(ld.get("Lateral_direction", "+x")),
            girder_udl=float(ld.get("Girder_udl", DEFAULT_GIRDER_UDL)),
            girder_direction=str(ld.get("Girder_direction", "-y")),
            extra_nodal=extra,
        )

    total = doc.get("Total_bays", len(bays))
    if not isinstance(total, int) or isinstance(total, bool):
        raise ProblemSyntaxError("'Total_bays' must be an integer", field="Total_bays")
    problem = FrameProblem(
        total_bays=total,
        bays=tuple(bays),
        support_kind=support,
        material=material,
        load_spec=load_spec,
    )
    return validate_problem(problem)


def with_loads(p: FrameProblem, loads: LoadSpecification | None) -> FrameProblem:
    """Copy of ``p`` with a different load specification."""
    return replace(p, load_spec=loads)
