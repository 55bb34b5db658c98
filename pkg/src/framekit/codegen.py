"""Analysis-script generation and parsing.

The emitted script is plain Python against the ``openseespy.opensees`` API
(2D, 3 DOF per node): ``model``, ``node``, ``fix``, ``geomTransf('Linear')``,
``element('elasticBeamColumn', ...)``, ``timeSeries('Constant')``,
``pattern('Plain')``, ``load``, ``eleLoad('-ele', ..., '-type',
'-beamUniform', w)`` and a static analysis block.  Section constants are
bound to the names E, A_col, I_col, A_gir, I_gir once and referenced from
element definitions; node and element descriptions ride along as trailing
comments.  Floats are printed with 12 significant digits, so the same model
always yields byte-identical text.

``parse_script`` reads that dialect back (tolerantly: unknown commands become
warnings) and reports malformed statements with a line number and a failure
category, e.g. an unknown element type is an *element definition* error and a
support on a non-integer node id a *support conditions* error.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from .errors import ErrorCategory, ScriptSyntaxError
from .geometry import COORD_TOL, Element, ElementKind, Node, SupportConstraint, TopologyModel
from .loads import LoadSet, MemberUDL, NodalLoad
from .problem import MaterialSpec


def fmt(x: float) -> str:
    """Shortest decimal form with 12 significant digits."""
    return f"{x:.12g}"


@dataclass(frozen=True)
class AnalysisConfig:
    constraints: str = "Plain"
    numberer: str = "Plain"
    system: str = "BandGeneral"
    algorithm: str = "Linear"
    integrator: str = "LoadControl"
    steps: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("analysis needs at least one step")


# --- statement types -------------------------------------------------------


@dataclass(frozen=True)
class ModelInit:
    ndm: int = 2
    ndf: int = 3

    def render(self) -> str:
        return f"ops.model('basic', '-ndm', {self.ndm}, '-ndf', {self.ndf})"


@dataclass(frozen=True)
class SectionParam:
    name: str
    value: float

    def render(self) -> str:
        return f"{self.name} = {fmt(self.value)}"


@dataclass(frozen=True)
class NodeDef:
    node_id: int
    x: float
    y: float
    desc: str = ""

    def render(self) -> str:
        line = f"ops.node({self.node_id}, {fmt(self.x)}, {fmt(self.y)})"
        return f"{line}  # {self.desc}" if self.desc else line


@dataclass(frozen=True)
class FixDef:
    node_id: int
    fixity: tuple[bool, bool, bool]

    def render(self) -> str:
        flags = ", ".join("1" if f else "0" for f in self.fixity)
        return f"ops.fix({self.node_id}, {flags})"


@dataclass(frozen=True)
class TransfDef:
    tag: int = 1

    def render(self) -> str:
        return f"ops.geomTransf('Linear', {self.tag})"


@dataclass(frozen=True)
class ElementDef:
    element_id: int
    node_i: int
    node_j: int
    area_ref: str
    inertia_ref: str
    transf_tag: int = 1
    desc: str = ""

    def render(self) -> str:
        line = (f"ops.element('elasticBeamColumn', {self.element_id}, "
                f"{self.node_i}, {self.node_j}, {self.area_ref}, E, "
                f"{self.inertia_ref}, {self.transf_tag})")
        return f"{line}  # {self.desc}" if self.desc else line


@dataclass(frozen=True)
class TimeSeriesDef:
    tag: int = 1

    def render(self) -> str:
        return f"ops.timeSeries('Constant', {self.tag})"


@dataclass(frozen=True)
class PatternDef:
    tag: int = 1
    series: int = 1

    def render(self) -> str:
        return f"ops.pattern('Plain', {self.tag}, {self.series})"


@dataclass(frozen=True)
class NodalLoadCmd:
    node_id: int
    fx: float
    fy: float
    mz: float

    def render(self) -> str:
        return f"ops.load({self.node_id}, {fmt(self.fx)}, {fmt(self.fy)}, {fmt(self.mz)})"


@dataclass(frozen=True)
class EleLoadCmd:
    element_id: int
    w: float

    def render(self) -> str:
        return f"ops.eleLoad('-ele', {self.element_id}, '-type', '-beamUniform', {fmt(self.w)})"


@dataclass(frozen=True)
class AnalysisCmd:
    command: str
    args: tuple

    def render(self) -> str:
        rendered = []
        for a in self.args:
            if isinstance(a, str):
                rendered.append(f"'{a}'")
            elif isinstance(a, bool):
                rendered.append(str(int(a)))
            elif isinstance(a, int):
                rendered.append(str(a))
            else:
                rendered.append(fmt(a))
        return f"ops.{self.command}({', '.join(rendered)})"


Statement = (ModelInit | SectionParam | NodeDef | FixDef | TransfDef | ElementDef
             | TimeSeriesDef | PatternDef | NodalLoadCmd | EleLoadCmd | AnalysisCmd)

_SECTION_NAMES = ("E", "A_col", "I_col", "A_gir", "I_gir")


@dataclass(frozen=True)
class ScriptDocument:
    statements: tuple[Statement, ...]
    text: str


def emit_script(m: TopologyModel, loads: LoadSet, mat: MaterialSpec,
                config: AnalysisConfig | None = None) -> ScriptDocument:
    """Render a model, its loads and material into the script dialect.

    Output is deterministic: same inputs, same bytes.
    """
    config = config or AnalysisConfig()
    statements: list[Statement] = [ModelInit()]
    lines = ["import openseespy.opensees as ops", "", "ops.wipe()",
             statements[0].render()]

    def section(comment: str, stmts: list[Statement]) -> None:
        if not stmts:
            return
        lines.append("")
        lines.append(f"# {comment}")
        for s in stmts:
            statements.append(s)
            lines.append(s.render())

    section("section parameters", [
        SectionParam("E", mat.E),
        SectionParam("A_col", mat.A_col),
        SectionParam("I_col", mat.I_col),
        SectionParam("A_gir", mat.A_gir),
        SectionParam("I_gir", mat.I_gir),
    ])
    section("nodes", [NodeDef(n.id, n.x, n.y, n.desc) for n in m.nodes])
    section("supports", [FixDef(s.node_id, s.fixity) for s in m.supports])
    section("geometric transformation", [TransfDef(1)])
    section("elements", [
        ElementDef(e.id, e.node_i, e.node_j,
                   "A_col" if e.kind is ElementKind.COLUMN else "A_gir",
                   "I_col" if e.kind is ElementKind.COLUMN else "I_gir",
                   1, e.desc)
        for e in m.elements
    ])
    load_stmts: list[Statement] = []
    if loads.nodal or loads.member:
        load_stmts.append(TimeSeriesDef(1))
        load_stmts.append(PatternDef(1, 1))
        load_stmts.extend(NodalLoadCmd(p.node_id, p.fx, p.fy, p.mz) for p in loads.nodal)
        load_stmts.extend(EleLoadCmd(u.element_id, u.w) for u in loads.member)
    section("loads", load_stmts)
    section("analysis", [
        AnalysisCmd("constraints", (config.constraints,)),
        AnalysisCmd("numberer", (config.numberer,)),
        AnalysisCmd("system", (config.system,)),
        AnalysisCmd("algorithm", (config.algorithm,)),
        AnalysisCmd("integrator", (config.integrator, 1.0)),
        AnalysisCmd("analysis", ("Static",)),
        AnalysisCmd("analyze", (config.steps,)),
    ])
    return ScriptDocument(tuple(statements), "\n".join(lines) + "\n")


# --- parsing ---------------------------------------------------------------


@dataclass(frozen=True)
class _Symbol:
    name: str


@dataclass(frozen=True)
class ParsedScript:
    model: TopologyModel
    loads: LoadSet
    material: MaterialSpec
    config: AnalysisConfig
    warnings: tuple[str, ...] = ()


def _literal(node: ast.expr, line: int, category: ErrorCategory):
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub) \
            and isinstance(node.operand, ast.Constant) \
            and isinstance(node.operand.value, (int, float)):
        return -node.operand.value
    if isinstance(node, ast.Name):
        return _Symbol(node.id)
    raise ScriptSyntaxError("unsupported expression in argument", line, category)


def _int_arg(value, line: int, what: str, category: ErrorCategory) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScriptSyntaxError(f"{what} must be an integer, got {value!r}", line, category)
    return value


def _num_arg(value, line: int, what: str, category: ErrorCategory) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScriptSyntaxError(f"{what} must be a number, got {value!r}", line, category)
    return float(value)


_CMD_CATEGORY = {
    "node": ErrorCategory.NODE_DEFINITION,
    "element": ErrorCategory.ELEMENT_DEFINITION,
    "fix": ErrorCategory.SUPPORT_CONDITIONS,
    "load": ErrorCategory.LOAD_APPLICATION,
    "eleLoad": ErrorCategory.LOAD_APPLICATION,
    "timeSeries": ErrorCategory.LOAD_APPLICATION,
    "pattern": ErrorCategory.LOAD_APPLICATION,
}


class _Parser:
    def __init__(self):
        self.symbols: dict[str, float] = {}
        self.nodes: list[Node] = []
        self.node_ids: set[int] = set()
        self.fixes: dict[int, tuple[bool, bool, bool]] = {}
        self.fix_order: list[int] = []
        self.transf_tags: set[int] = set()
        self.elements: list[Element] = []
        self.element_ids: set[int] = set()
        self.have_series = False
        self.have_pattern = False
        self.nodal: dict[int, list[float]] = {}
        self.nodal_order: list[int] = []
        self.member: dict[int, float] = {}
        self.member_order: list[int] = []
        self.analysis: dict[str, object] = {}
        self.warnings: list[str] = []
        self.model_init_seen = False

    # -- statement handlers

    def assign(self, name: str, value, line: int) -> None:
        value = _num_arg(value, line, f"value of {name}", ErrorCategory.MATERIAL_PROPERTIES)
        if name in self.symbols and self.symbols[name] != value:
            raise ScriptSyntaxError(
                f"conflicting section arguments: {name} redefined from "
                f"{fmt(self.symbols[name])} to {fmt(value)}",
                line, ErrorCategory.MATERIAL_PROPERTIES)
        self.symbols[name] = value
        if name not in _SECTION_NAMES:
            self.warnings.append(f"line {line}: assignment to unrecognized name {name!r}")

    def resolve(self, value, line: int, what: str) -> float:
        if isinstance(value, _Symbol):
            if value.name not in self.symbols:
                raise ScriptSyntaxError(
                    f"missing section parameter {value.name!r} used as {what}",
                    line, ErrorCategory.MATERIAL_PROPERTIES)
            return self.symbols[value.name]
        return _num_arg(value, line, what, ErrorCategory.ELEMENT_DEFINITION)

    def cmd_model(self, args, line):
        if len(args) != 5 or args[0] != "basic" or args[1] != "-ndm" or args[3] != "-ndf":
            raise ScriptSyntaxError("model expects ('basic', '-ndm', n, '-ndf', n)",
                                    line, ErrorCategory.OTHER)
        if args[2] != 2 or args[4] != 3:
            raise ScriptSyntaxError("only plane frames with 3 DOF per node are supported",
                                    line, ErrorCategory.OTHER)
        self.model_init_seen = True

    def cmd_node(self, args, line, comment):
        if len(args) != 3:
            raise ScriptSyntaxError("node expects (id, x, y)", line,
                                    ErrorCategory.NODE_DEFINITION)
        nid = _int_arg(args[0], line, "node id", ErrorCategory.NODE_DEFINITION)
        x = _num_arg(args[1], line, "node x", ErrorCategory.NODE_DEFINITION)
        y = _num_arg(args[2], line, "node y", ErrorCategory.NODE_DEFINITION)
        if nid in self.node_ids:
            raise ScriptSyntaxError(f"duplicate node id {nid}", line,
                                    ErrorCategory.NODE_DEFINITION)
        self.node_ids.add(nid)
        self.nodes.append(Node(nid, x, y, comment))

    def cmd_fix(self, args, line):
        if len(args) != 4:
            raise ScriptSyntaxError("fix expects (node, ux, uy, rz)", line,
                                    ErrorCategory.SUPPORT_CONDITIONS)
        nid = _int_arg(args[0], line, "support node id", ErrorCategory.SUPPORT_CONDITIONS)
        if nid not in self.node_ids:
            raise ScriptSyntaxError(f"support on undefined node {nid}", line,
                                    ErrorCategory.SUPPORT_CONDITIONS)
        flags = []
        for a in args[1:]:
            v = _int_arg(a, line, "fixity flag", ErrorCategory.SUPPORT_CONDITIONS)
            if v not in (0, 1):
                raise ScriptSyntaxError(f"fixity flag must be 0 or 1, got {v}", line,
                                        ErrorCategory.SUPPORT_CONDITIONS)
            flags.append(bool(v))
        fixity = tuple(flags)
        if nid in self.fixes:
            self.warnings.append(f"line {line}: node {nid} fixed twice; merging")
            fixity = tuple(a or b for a, b in zip(self.fixes[nid], fixity))
        else:
            self.fix_order.append(nid)
        self.fixes[nid] = fixity  # type: ignore[assignment]

    def cmd_geom_transf(self, args, line):
        if len(args) != 2 or not isinstance(args[0], str):
            raise ScriptSyntaxError("geomTransf expects (kind, tag)", line,
                                    ErrorCategory.OTHER)
        if args[0] != "Linear":
            self.warnings.append(f"line {line}: transformation {args[0]!r} treated as 'Linear'")
        self.transf_tags.add(_int_arg(args[1], line, "transformation tag",
                                      ErrorCategory.OTHER))

    def cmd_element(self, args, line, comment):
        if not args or not isinstance(args[0], str):
            raise ScriptSyntaxError("element expects a type name first", line,
                                    ErrorCategory.ELEMENT_DEFINITION)
        if args[0] != "elasticBeamColumn":
            raise ScriptSyntaxError(f"unknown element type {args[0]!r}", line,
                                    ErrorCategory.ELEMENT_DEFINITION)
        if len(args) != 8:
            raise ScriptSyntaxError(
                "elasticBeamColumn expects (type, tag, i, j, A, E, Iz, transfTag)",
                line, ErrorCategory.ELEMENT_DEFINITION)
        eid = _int_arg(args[1], line, "element id", ErrorCategory.ELEMENT_DEFINITION)
        if eid in self.element_ids:
            raise ScriptSyntaxError(f"duplicate element id {eid}", line,
                                    ErrorCategory.ELEMENT_DEFINITION)
        ni = _int_arg(args[2], line, "element node i", ErrorCategory.ELEMENT_DEFINITION)
        nj = _int_arg(args[3], line, "element node j", ErrorCategory.ELEMENT_DEFINITION)
        for ref in (ni, nj):
            if ref not in self.node_ids:
                raise ScriptSyntaxError(
                    f"element {eid} uses node {ref} before it is defined", line,
                    ErrorCategory.ELEMENT_DEFINITION)
        area_name = args[4].name if isinstance(args[4], _Symbol) else None
        inertia_name = args[6].name if isinstance(args[6], _Symbol) else None
        if {area_name, inertia_name} == {"A_col", "I_gir"} \
                or {area_name, inertia_name} == {"A_gir", "I_col"}:
            raise ScriptSyntaxError(
                f"conflicting section arguments on element {eid}: "
                f"{area_name} with {inertia_name}",
                line, ErrorCategory.MATERIAL_PROPERTIES)
        area = self.resolve(args[4], line, "section area")
        self.resolve(args[5], line, "elastic modulus")
        inertia = self.resolve(args[6], line, "section inertia")
        tag = _int_arg(args[7], line, "transformation tag", ErrorCategory.ELEMENT_DEFINITION)
        if self.transf_tags and tag not in self.transf_tags:
            self.warnings.append(f"line {line}: element {eid} uses undefined transformation {tag}")
        kind = self._element_kind(area_name, inertia_name, area, inertia, ni, nj, eid, line)
        self.element_ids.add(eid)
        self.elements.append(Element(eid, ni, nj, kind, comment))

    def _element_kind(self, area_name, inertia_name, area, inertia, ni, nj, eid, line):
        if area_name == "A_col" or inertia_name == "I_col":
            return ElementKind.COLUMN
        if area_name == "A_gir" or inertia_name == "I_gir":
            return ElementKind.GIRDER
        col = (self.symbols.get("A_col"), self.symbols.get("I_col"))
        gir = (self.symbols.get("A_gir"), self.symbols.get("I_gir"))
        if (area, inertia) == col:
            return ElementKind.COLUMN
        if (area, inertia) == gir:
            return ElementKind.GIRDER
        node = {n.id: n for n in self.nodes}
        dx = abs(node[nj].x - node[ni].x)
        dy = abs(node[nj].y - node[ni].y)
        if dx <= COORD_TOL:
            return ElementKind.COLUMN
        if dy <= COORD_TOL:
            return ElementKind.GIRDER
        self.warnings.append(f"line {line}: element {eid} is neither vertical nor "
                             "horizontal; treating as a column")
        return ElementKind.COLUMN

    def cmd_time_series(self, args, line):
        if not args or args[0] != "Constant":
            self.warnings.append(f"line {line}: non-constant time series treated as 'Constant'")
        self.have_series = True

    def cmd_pattern(self, args, line):
        if not self.have_series:
            raise ScriptSyntaxError("load pattern requires a time series", line,
                                    ErrorCategory.LOAD_APPLICATION)
        if not args or args[0] != "Plain":
            self.warnings.append(f"line {line}: pattern kind {args[:1]!r} treated as 'Plain'")
        self.have_pattern = True

    def cmd_load(self, args, line):
        if not self.have_pattern:
            raise ScriptSyntaxError("load applied without a load pattern", line,
                                    ErrorCategory.LOAD_APPLICATION)
        if len(args) != 4:
            raise ScriptSyntaxError("load expects (node, Fx, Fy, Mz)", line,
                                    ErrorCategory.LOAD_APPLICATION)
        nid = _int_arg(args[0], line, "loaded node id", ErrorCategory.LOAD_APPLICATION)
        if nid not in self.node_ids:
            raise ScriptSyntaxError(f"load on undefined node {nid}", line,
                                    ErrorCategory.LOAD_APPLICATION)
        fx, fy, mz = (self.resolve(a, line, "load component") for a in args[1:])
        if nid not in self.nodal:
            self.nodal_order.append(nid)
            self.nodal[nid] = [0.0, 0.0, 0.0]
        acc = self.nodal[nid]
        acc[0] += fx
        acc[1] += fy
        acc[2] += mz

    def cmd_ele_load(self, args, line):
        if not self.have_pattern:
            raise ScriptSyntaxError("eleLoad applied without a load pattern", line,
                                    ErrorCategory.LOAD_APPLICATION)
        if len(args) < 5 or args[0] != "-ele":
            raise ScriptSyntaxError("eleLoad expects ('-ele', tags..., '-type', "
                                    "'-beamUniform', w)", line, ErrorCategory.LOAD_APPLICATION)
        tags = []
        i = 1
        while i < len(args) and args[i] != "-type":
            tags.append(_int_arg(args[i], line, "loaded element id",
                                 ErrorCategory.LOAD_APPLICATION))
            i += 1
        rest = args[i:]
        if len(rest) != 3 or rest[0] != "-type" or rest[1] != "-beamUniform" or not tags:
            raise ScriptSyntaxError("eleLoad expects ('-ele', tags..., '-type', "
                                    "'-beamUniform', w)", line, ErrorCategory.LOAD_APPLICATION)
        w = self.resolve(rest[2], line, "member load intensity")
        for eid in tags:
            if eid not in self.element_ids:
                raise ScriptSyntaxError(f"eleLoad on undefined element {eid}", line,
                                        ErrorCategory.LOAD_APPLICATION)
            if eid not in self.member:
                self.member_order.append(eid)
                self.member[eid] = 0.0
            self.member[eid] += w

    def cmd_analysis(self, name, args, line):
        if name == "analyze":
            if args and isinstance(args[0], int) and not isinstance(args[0], bool):
                self.analysis["steps"] = args[0]
            else:
                self.warnings.append(f"line {line}: analyze step count missing; assuming 1")
        elif name == "analysis":
            pass  # always 'Static' in this dialect
        elif args and isinstance(args[0], str):
            self.analysis[name] = args[0]
        else:
            self.warnings.append(f"line {line}: could not read {name} setting")

    # -- driver

    def feed(self, code: str, comment: str, line: int) -> None:
        try:
            tree = ast.parse(code, mode="exec")
        except SyntaxError as exc:
            raise ScriptSyntaxError(f"unparsable statement: {exc.msg}", line,
                                    self._guess_category(code)) from None
        if not tree.body:
            return
        if len(tree.body) > 1:
            self.warnings.append(f"line {line}: multiple statements; reading the first")
        stmt = tree.body[0]
        if isinstance(stmt, (ast.Import, ast.ImportFrom)):
            return
        if isinstance(stmt, ast.Assign):
            if len(stmt.targets) == 1 and isinstance(stmt.targets[0], ast.Name):
                value = _literal(stmt.value, line, ErrorCategory.MATERIAL_PROPERTIES)
                self.assign(stmt.targets[0].id, value, line)
            else:
                self.warnings.append(f"line {line}: unsupported assignment skipped")
            return
        if not isinstance(stmt, ast.Expr) or not isinstance(stmt.value, ast.Call):
            self.warnings.append(f"line {line}: statement skipped")
            return
        call = stmt.value
        name = self._call_name(call)
        if name is None:
            self.warnings.append(f"line {line}: call skipped")
            return
        category = _CMD_CATEGORY.get(name, ErrorCategory.OTHER)
        args = [_literal(a, line, category) for a in call.args]
        if name == "wipe":
            return
        if name == "model":
            self.cmd_model(args, line)
        elif name == "node":
            self.cmd_node(args, line, comment)
        elif name == "fix":
            self.cmd_fix(args, line)
        elif name == "geomTransf":
            self.cmd_geom_transf(args, line)
        elif name == "element":
            self.cmd_element(args, line, comment)
        elif name == "timeSeries":
            self.cmd_time_series(args, line)
        elif name == "pattern":
            self.cmd_pattern(args, line)
        elif name == "load":
            self.cmd_load(args, line)
        elif name == "eleLoad":
            self.cmd_ele_load(args, line)
        elif name in ("constraints", "numberer", "system", "algorithm",
                      "integrator", "analysis", "analyze"):
            self.cmd_analysis(name, args, line)
        else:
            self.warnings.append(f"line {line}: unknown command {name!r} skipped")

    @staticmethod
    def _call_name(call: ast.Call) -> str | None:
        func = call.func
        if isinstance(func, ast.Attribute):
            return func.attr
        if isinstance(func, ast.Name):
            return func.id
        return None

    @staticmethod
    def _guess_category(code: str) -> ErrorCategory:
        for token, category in _CMD_CATEGORY.items():
            if token in code:
                return category
        return ErrorCategory.OTHER

    def finish(self) -> ParsedScript:
        if not self.model_init_seen:
            self.warnings.append("model initialization missing")
        material_kwargs = {}
        for name in _SECTION_NAMES:
            if name in self.symbols:
                material_kwargs[name] = self.symbols[name]
            else:
                self.warnings.append(f"section parameter {name} missing; using default")
        material = MaterialSpec(**material_kwargs)

        supports = tuple(SupportConstraint(nid, self.fixes[nid]) for nid in self.fix_order)
        model = TopologyModel(tuple(self.nodes), tuple(self.elements), supports)
        loads = LoadSet(
            nodal=tuple(NodalLoad(nid, *self.nodal[nid]) for nid in self.nodal_order),
            member=tuple(MemberUDL(eid, self.member[eid]) for eid in self.member_order),
        )
        defaults = AnalysisConfig()
        config = AnalysisConfig(
            constraints=str(self.analysis.get("constraints", defaults.constraints)),
            numberer=str(self.analysis.get("numberer", defaults.numberer)),
            system=str(self.analysis.get("system", defaults.system)),
            algorithm=str(self.analysis.get("algorithm", defaults.algorithm)),
            integrator=str(self.analysis.get("integrator", defaults.integrator)),
            steps=int(self.analysis.get("steps", defaults.steps)),  # type: ignore[arg-type]
        )
        return ParsedScript(model, loads, material, config, tuple(self.warnings))


def parse_script(text: str) -> ParsedScript:
    """Parse dialect script text back into model, loads, material and config."""
    parser = _Parser()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        code, _, comment = raw.partition("#")
        code = code.strip()
        comment = comment.strip()
        if not code:
            continue
        parser.feed(code, comment, line_no)
    return parser.finish()
