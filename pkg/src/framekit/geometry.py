"""Incremental construction of 2D frame topology.

A frame is assembled bay by bay (left to right), story by story (bottom up).
Each (bay, story) step applies one of four placement rules:

* ``Rule_1``  — bay 1, story 1: four corner nodes, two columns and the top
  girder, fixed supports under both base nodes.
* ``Rule_2``  — bay 1, story >= 2: two new top nodes, two columns continuing
  the story below, one girder.
* ``Rule_3``  — bay >= 2, story 1: the left column line is already there, so
  only the new base and first-floor nodes on the right line are added, with
  one column, one girder and a support at the new base node.
* ``Rule_4a`` — bay >= 2, story s where s <= stories(previous bay): the
  left node exists at this level; add one node, one column, one girder.
* ``Rule_4b`` — bay >= 2, story s where s > stories(previous bay): the bay
  has outgrown its left neighbour; add both top nodes, two columns and the
  girder between them.

Node ids and element ids are 1-based in creation order.  Within a step nodes
are created bottom-left, bottom-right, top-left, top-right and elements left
column, right column, top girder (skipping whichever a rule does not add).

``grid_oracle`` builds the same frame by direct enumeration of column lines
and is deliberately independent of the rule machinery, so the two can be
checked against each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

from .errors import InternalError, ProblemSyntaxError
from .problem import FrameProblem, SupportKind

COORD_TOL = 1e-9  # [m] two nodes closer than this coincide

FIXITY = {
    SupportKind.FIXED: (True, True, True),
    SupportKind.PINNED: (True, True, False),
}


class ElementKind(str, Enum):
    COLUMN = "Column"
    GIRDER = "Girder"


class ConstructionRule(str, Enum):
    RULE_1 = "Rule_1"
    RULE_2 = "Rule_2"
    RULE_3 = "Rule_3"
    RULE_4A = "Rule_4a"
    RULE_4B = "Rule_4b"


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    desc: str = ""


@dataclass(frozen=True)
class Element:
    id: int
    node_i: int
    node_j: int
    kind: ElementKind
    desc: str = ""


@dataclass(frozen=True)
class SupportConstraint:
    node_id: int
    fixity: tuple[bool, bool, bool]  # (ux, uy, rz) restrained


@dataclass(frozen=True)
class ConstructionStep:
    step: int
    bay: int
    story: int
    rule: ConstructionRule
    added_nodes: tuple[int, ...]
    added_elements: tuple[int, ...]
    added_supports: tuple[int, ...]  # node ids


@dataclass(frozen=True)
class TopologyModel:
    nodes: tuple[Node, ...] = ()
    elements: tuple[Element, ...] = ()
    supports: tuple[SupportConstraint, ...] = ()
    steps: tuple[ConstructionStep, ...] = ()

    def node_by_id(self) -> dict[int, Node]:
        return {n.id: n for n in self.nodes}

    def element_by_id(self) -> dict[int, Element]:
        return {e.id: e for e in self.elements}

    def stripped(self) -> "TopologyModel":
        """Copy without construction provenance (what a script can carry)."""
        return replace(self, steps=())


class PlanStep(NamedTuple):
    bay: int
    story: int
    rule: ConstructionRule


def coord_key(x: float, y: float) -> tuple[int, int]:
    """Quantize coordinates so coincidence tests are exact dict lookups."""
    return (round(x / COORD_TOL), round(y / COORD_TOL))


def _bay_left_x(p: FrameProblem, bay: int) -> float:
    return sum(b.span for b in p.bays[: bay - 1])


def _floor_y(p: FrameProblem, bay: int, story: int) -> float:
    return sum(p.bays[bay - 1].heights[:story])


def plan_construction(p: FrameProblem) -> list[PlanStep]:
    """One step per (bay, story), bays left to right, stories bottom up."""
    plan: list[PlanStep] = []
    for bay in p.bays:
        for story in range(1, bay.stories + 1):
            if bay.index == 1:
                rule = ConstructionRule.RULE_1 if story == 1 else ConstructionRule.RULE_2
            elif story == 1:
                rule = ConstructionRule.RULE_3
            elif story <= p.bays[bay.index - 2].stories:
                rule = ConstructionRule.RULE_4A
            else:
                rule = ConstructionRule.RULE_4B
            plan.append(PlanStep(bay.index, story, rule))
    return plan


def apply_step(state: TopologyModel, p: FrameProblem, step: PlanStep) -> TopologyModel:
    """Apply one placement rule, returning the extended model."""
    bay, story, rule = step
    x_left = _bay_left_x(p, bay)
    x_right = x_left + p.bays[bay - 1].span
    y_top = _floor_y(p, bay, story)
    y_below = _floor_y(p, bay, story - 1)

    lookup = {coord_key(n.x, n.y): n.id for n in state.nodes}
    next_node = max((n.id for n in state.nodes), default=0) + 1
    next_element = max((e.id for e in state.elements), default=0) + 1

    new_nodes: list[Node] = []
    new_elements: list[Element] = []
    new_supports: list[SupportConstraint] = []

    def existing(x: float, y: float) -> int:
        nid = lookup.get(coord_key(x, y))
        if nid is None:
            raise InternalError(
                f"step (bay {bay}, story {story}): expected a node at ({x:g}, {y:g})")
        return nid

    def add_node(x: float, y: float, desc: str) -> int:
        nonlocal next_node
        node = Node(next_node, x, y, desc)
        new_nodes.append(node)
        lookup[coord_key(x, y)] = node.id
        next_node += 1
        return node.id

    def add_element(i: int, j: int, kind: ElementKind, desc: str) -> int:
        nonlocal next_element
        new_elements.append(Element(next_element, i, j, kind, desc))
        next_element += 1
        return new_elements[-1].id

    def add_support(node_id: int) -> None:
        new_supports.append(SupportConstraint(node_id, FIXITY[p.support_kind]))

    if rule is ConstructionRule.RULE_1:
        bl = add_node(x_left, y_below, "Bottom left")
        br = add_node(x_right, y_below, "Bottom right")
        tl = add_node(x_left, y_top, "Top left")
        tr = add_node(x_right, y_top, "Top right")
        add_element(bl, tl, ElementKind.COLUMN, "Left column")
        add_element(br, tr, ElementKind.COLUMN, "Right column")
        add_element(tl, tr, ElementKind.GIRDER, "Top girder")
        add_support(bl)
        add_support(br)
    elif rule is ConstructionRule.RULE_2:
        below_left = existing(x_left, y_below)
        below_right = existing(x_right, y_below)
        tl = add_node(x_left, y_top, "Top left")
        tr = add_node(x_right, y_top, "Top right")
        add_element(below_left, tl, ElementKind.COLUMN, "Left column")
        add_element(below_right, tr, ElementKind.COLUMN, "Right column")
        add_element(tl, tr, ElementKind.GIRDER, "Top girder")
    elif rule is ConstructionRule.RULE_3:
        top_left = existing(x_left, y_top)
        br = add_node(x_right, y_below, "Bottom right")
        tr = add_node(x_right, y_top, "Top right")
        add_element(br, tr, ElementKind.COLUMN, "Right column")
        add_element(top_left, tr, ElementKind.GIRDER, "Top girder")
        add_support(br)
    elif rule is ConstructionRule.RULE_4A:
        top_left = existing(x_left, y_top)
        below_right = existing(x_right, y_below)
        tr = add_node(x_right, y_top, "Top right")
        add_element(below_right, tr, ElementKind.COLUMN, "Right column")
        add_element(top_left, tr, ElementKind.GIRDER, "Top girder")
    elif rule is ConstructionRule.RULE_4B:
        below_left = existing(x_left, y_below)
        below_right = existing(x_right, y_below)
        tl = add_node(x_left, y_top, "Top left")
        tr = add_node(x_right, y_top, "Top right")
        add_element(below_left, tl, ElementKind.COLUMN, "Left column")
        add_element(below_right, tr, ElementKind.COLUMN, "Right column")
        add_element(tl, tr, ElementKind.GIRDER, "Top girder")
    else:  # pragma: no cover
        raise InternalError(f"unknown rule {rule}")

    record = ConstructionStep(
        step=len(state.steps) + 1,
        bay=bay,
        story=story,
        rule=rule,
        added_nodes=tuple(n.id for n in new_nodes),
        added_elements=tuple(e.id for e in new_elements),
        added_supports=tuple(s.node_id for s in new_supports),
    )
    return TopologyModel(
        nodes=state.nodes + tuple(new_nodes),
        elements=state.elements + tuple(new_elements),
        supports=state.supports + tuple(new_supports),
        steps=state.steps + (record,),
    )


def build_topology(p: FrameProblem) -> TopologyModel:
    """Run the full construction plan on an empty model."""
    state = TopologyModel()
    for step in plan_construction(p):
        state = apply_step(state, p, step)
    return state


# ---------------------------------------------------------------------------
# Independent enumeration used to cross-check the construction rules.


def grid_oracle(p: FrameProblem) -> TopologyModel:
    """Enumerate the frame directly from its column lines.

    Column line i (i = 0..n_bays) carries max(stories of the bays touching
    it) stories of nodes plus the base node, a column per story segment and
    one base support; every bay contributes one girder per story.  Numbering
    is line-major bottom-up, which generally differs from construction order:
    compare models with ``topology_isomorphic``, not ``==``.
    """
    n = p.total_bays
    line_x = [0.0]
    for b in p.bays:
        line_x.append(line_x[-1] + b.span)

    def line_stories(i: int) -> int:
        if i == 0:
            return p.bays[0].stories
        if i == n:
            return p.bays[n - 1].stories
        return max(p.bays[i - 1].stories, p.bays[i].stories)

    def level_y(i: int, s: int) -> float:
        # Use whichever adjacent bay actually owns this level.
        if i == 0:
            owner = p.bays[0]
        elif i == n:
            owner = p.bays[n - 1]
        elif s <= p.bays[i - 1].stories:
            owner = p.bays[i - 1]
        else:
            owner = p.bays[i]
        return sum(owner.heights[:s])

    nodes: list[Node] = []
    supports: list[SupportConstraint] = []
    ids: dict[tuple[int, int], int] = {}  # (line, level) -> node id
    for i in range(n + 1):
        for s in range(line_stories(i) + 1):
            nid = len(nodes) + 1
            nodes.append(Node(nid, line_x[i], level_y(i, s), f"Line {i} level {s}"))
            ids[(i, s)] = nid
            if s == 0:
                supports.append(SupportConstraint(nid, FIXITY[p.support_kind]))

    elements: list[Element] = []
    for i in range(n + 1):
        for s in range(1, line_stories(i) + 1):
            elements.append(Element(len(elements) + 1, ids[(i, s - 1)], ids[(i, s)],
                                    ElementKind.COLUMN, f"Line {i} column {s}"))
    for b in p.bays:
        for s in range(1, b.stories + 1):
            elements.append(Element(len(elements) + 1, ids[(b.index - 1, s)], ids[(b.index, s)],
                                    ElementKind.GIRDER, f"Bay {b.index} girder {s}"))

    return TopologyModel(tuple(nodes), tuple(elements), tuple(supports))


def topology_isomorphic(a: TopologyModel, b: TopologyModel) -> bool:
    """Same frame up to renumbering: coordinates, member segments with kinds,
    and supports with fixities all match."""
    from collections import Counter

    def coords(m: TopologyModel) -> Counter:
        return Counter(coord_key(n.x, n.y) for n in m.nodes)

    def segments(m: TopologyModel) -> Counter:
        by_id = m.node_by_id()
        out: list = []
        for e in m.elements:
            if e.node_i not in by_id or e.node_j not in by_id:
                return Counter([("dangling", e.id)])
            ki = coord_key(by_id[e.node_i].x, by_id[e.node_i].y)
            kj = coord_key(by_id[e.node_j].x, by_id[e.node_j].y)
            out.append((min(ki, kj), max(ki, kj), e.kind))
        return Counter(out)

    def fixities(m: TopologyModel) -> Counter:
        by_id = m.node_by_id()
        out = []
        for s in m.supports:
            if s.node_id not in by_id:
                return Counter([("dangling", s.node_id)])
            out.append((coord_key(by_id[s.node_id].x, by_id[s.node_id].y), s.fixity))
        return Counter(out)

    return coords(a) == coords(b) and segments(a) == segments(b) and fixities(a) == fixities(b)


# ---------------------------------------------------------------------------
# Serialization


def _fixity_label(fixity: tuple[bool, bool, bool]) -> str:
    if fixity == (True, True, True):
        return "Fixed"
    if fixity == (True, True, False):
        return "Pinned"
    return ",".join("1" if f else "0" for f in fixity)


def _fixity_from_label(label: str) -> tuple[bool, bool, bool]:
    if label == "Fixed":
        return (True, True, True)
    if label == "Pinned":
        return (True, True, False)
    parts = label.split(",")
    if len(parts) == 3 and all(p in ("0", "1") for p in parts):
        return tuple(p == "1" for p in parts)  # type: ignore[return-value]
    raise ProblemSyntaxError(f"unknown constraint label {label!r}")


def steps_to_json(m: TopologyModel) -> str:
    """Construction history as JSON, one entry per step with full payloads."""
    nodes = m.node_by_id()
    elements = m.element_by_id()
    entries = []
    for st in m.steps:
        entries.append({
            "Step": st.step,
            "Bay": st.bay,
            "Story": st.story,
            "Rule": st.rule.value,
            "Nodes": [
                {"ID": nid, "x": nodes[nid].x, "y": nodes[nid].y, "Desc": nodes[nid].desc}
                for nid in st.added_nodes
            ],
            "Elements": [
                {
                    "ID": eid,
                    "Nodes": [elements[eid].node_i, elements[eid].node_j],
                    "Coord": [
                        [nodes[elements[eid].node_i].x, nodes[elements[eid].node_i].y],
                        [nodes[elements[eid].node_j].x, nodes[elements[eid].node_j].y],
                    ],
                    "Kind": elements[eid].kind.value,
                    "Desc": elements[eid].desc,
                }
                for eid in st.added_elements
            ],
            "Boundary_conditions": [
                {"Node_ID": nid, "Constraints": _fixity_label(
                    next(s.fixity for s in m.supports if s.node_id == nid))}
                for nid in st.added_supports
            ],
        })
    return json.dumps({"Construction_steps": entries}, indent=2) + "\n"


def steps_from_json(text: str) -> TopologyModel:
    """Rebuild a model (with provenance) from a construction-steps document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSyntaxError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    entries = doc.get("Construction_steps")
    if not isinstance(entries, list):
        raise ProblemSyntaxError("missing 'Construction_steps' list")
    nodes: list[Node] = []
    elements: list[Element] = []
    supports: list[SupportConstraint] = []
    steps: list[ConstructionStep] = []
    for entry in entries:
        added_nodes = []
        for nd in entry.get("Nodes", []):
            node = Node(int(nd["ID"]), float(nd["x"]), float(nd["y"]), str(nd.get("Desc", "")))
            nodes.append(node)
            added_nodes.append(node.id)
        added_elements = []
        for ed in entry.get("Elements", []):
            ni, nj = (int(v) for v in ed["Nodes"])
            kind = ElementKind(ed.get("Kind", "Column"))
            elements.append(Element(int(ed["ID"]), ni, nj, kind, str(ed.get("Desc", ""))))
            added_elements.append(int(ed["ID"]))
        added_supports = []
        for bc in entry.get("Boundary_conditions", []):
            supports.append(SupportConstraint(int(bc["Node_ID"]),
                                              _fixity_from_label(str(bc["Constraints"]))))
            added_supports.append(int(bc["Node_ID"]))
        steps.append(ConstructionStep(
            step=int(entry["Step"]),
            bay=int(entry["Bay"]),
            story=int(entry["Story"]),
            rule=ConstructionRule(entry["Rule"]),
            added_nodes=tuple(added_nodes),
            added_elements=tuple(added_elements),
            added_supports=tuple(added_supports),
        ))
    return TopologyModel(tuple(nodes), tuple(elements), tuple(supports), tuple(steps))


def model_to_json(m: TopologyModel) -> str:
    """Flat node/element/support tables (construction history not included)."""
    doc = {
        "Nodes": [{"ID": n.id, "x": n.x, "y": n.y, "Desc": n.desc} for n in m.nodes],
        "Elements": [
            {"ID": e.id, "Node_i": e.node_i, "Node_j": e.node_j,
             "Kind": e.kind.value, "Desc": e.desc}
            for e in m.elements
        ],
        "Supports": [
            {"Node_ID": s.node_id, "Constraints": _fixity_label(s.fixity)}
            for s in m.supports
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def model_from_json(text: str) -> TopologyModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSyntaxError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict) or "Nodes" not in doc:
        raise ProblemSyntaxError("expected an object with 'Nodes'")
    nodes = tuple(
        Node(int(n["ID"]), float(n["x"]), float(n["y"]), str(n.get("Desc", "")))
        for n in doc.get("Nodes", [])
    )
    elements = tuple(
        Element(int(e["ID"]), int(e["Node_i"]), int(e["Node_j"]),
                ElementKind(e.get("Kind", "Column")), str(e.get("Desc", "")))
        for e in doc.get("Elements", [])
    )
    supports = tuple(
        SupportConstraint(int(s["Node_ID"]), _fixity_from_label(str(s["Constraints"])))
        for s in doc.get("Supports", [])
    )
    return TopologyModel(nodes, elements, supports)
