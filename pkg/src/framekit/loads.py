"""Turn a problem's load specification into concrete loads on a model.

Point loads land on the leftmost column line (x = 0) at every floor level of
bay 1; the uniform load goes on every girder.  Nodes are located by
coordinates so the model may have been renumbered arbitrarily.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ProblemSyntaxError, UnresolvedLocator
from .geometry import ElementKind, TopologyModel, coord_key
from .problem import FrameProblem


@dataclass(frozen=True)
class NodalLoad:
    node_id: int
    fx: float = 0.0
    fy: float = 0.0
    mz: float = 0.0


@dataclass(frozen=True)
class MemberUDL:
    """Uniform transverse load over a whole element; w > 0 acts toward local +y."""

    element_id: int
    w: float


@dataclass(frozen=True)
class LoadSet:
    nodal: tuple[NodalLoad, ...] = ()
    member: tuple[MemberUDL, ...] = ()

    def total_nodal(self) -> tuple[float, float, float]:
        return (sum(p.fx for p in self.nodal),
                sum(p.fy for p in self.nodal),
                sum(p.mz for p in self.nodal))


def derive_loads(p: FrameProblem, m: TopologyModel) -> LoadSet:
    """Resolve the problem's load specification onto concrete node/element ids."""
    spec = p.resolved_loads()
    lookup = {coord_key(n.x, n.y): n.id for n in m.nodes}

    def node_at(x: float, y: float) -> int:
        nid = lookup.get(coord_key(x, y))
        if nid is None:
            raise UnresolvedLocator(f"no node at ({x:g}, {y:g})")
        return nid

    nodal: dict[int, list[float]] = {}

    def add_nodal(nid: int, fx: float, fy: float, mz: float) -> None:
        acc = nodal.setdefault(nid, [0.0, 0.0, 0.0])
        acc[0] += fx
        acc[1] += fy
        acc[2] += mz

    if spec.lateral_point != 0.0:
        sign = 1.0 if spec.lateral_direction == "+x" else -1.0
        first_bay = p.bays[0]
        level = 0.0
        for h in first_bay.heights:
            level += h
            add_nodal(node_at(0.0, level), sign * spec.lateral_point, 0.0, 0.0)

    for extra in spec.extra_nodal:
        add_nodal(node_at(extra.x, extra.y), extra.fx, extra.fy, extra.mz)

    member: dict[int, float] = {}
    if spec.girder_udl != 0.0:
        w = spec.girder_udl if spec.girder_direction == "+y" else -spec.girder_udl
        for e in m.elements:
            if e.kind is ElementKind.GIRDER:
                member[e.id] = member.get(e.id, 0.0) + w

    return LoadSet(
        nodal=tuple(NodalLoad(nid, *nodal[nid]) for nid in sorted(nodal)),
        member=tuple(MemberUDL(eid, member[eid]) for eid in sorted(member)),
    )


def loads_to_json(loads: LoadSet) -> str:
    doc = {
        "Nodal": [
            {"Node_ID": p.node_id, "Fx": p.fx, "Fy": p.fy, "Mz": p.mz}
            for p in loads.nodal
        ],
        "Member": [{"Element_ID": u.element_id, "w": u.w} for u in loads.member],
    }
    return json.dumps(doc, indent=2) + "\n"


def loads_from_json(text: str) -> LoadSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSyntaxError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    nodal = tuple(
        NodalLoad(int(p["Node_ID"]), float(p.get("Fx", 0.0)),
                  float(p.get("Fy", 0.0)), float(p.get("Mz", 0.0)))
        for p in doc.get("Nodal", [])
    )
    member = tuple(
        MemberUDL(int(u["Element_ID"]), float(u["w"])) for u in doc.get("Member", [])
    )
    return LoadSet(nodal, member)
