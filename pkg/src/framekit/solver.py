"""Linear-elastic plane-frame solver (direct stiffness method).

Conventions
-----------
Each node carries DOFs (ux, uy, rz); rotations are counterclockwise-positive.
The element's local x axis runs from node_i to node_j; local y is local x
rotated +90 degrees.  The local stiffness of a prismatic member couples the
axial block EA/L with the bending pattern 12EI/L^3, 6EI/L^2, 4EI/L, 2EI/L.
Columns take (A_col, I_col), girders (A_gir, I_gir).

A uniform transverse load w (positive toward local +y) contributes the
equivalent end loads [0, wL/2, wL^2/12, 0, wL/2, -wL^2/12] in local axes.
Member end forces are recovered as q = k_local u_local - f_equivalent.

Internal force diagrams use the beam convention with distributed load counted
positive downward (toward -local y): N(x) constant, V(x) = V_i - w x,
M(x) = -M_i + V_i x - w x^2 / 2, so dM/dx = V and dV/dx = -w, and a sagging
girder has positive midspan moment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateElement, SingularSystem
from .geometry import COORD_TOL, Element, ElementKind, TopologyModel
from .loads import LoadSet
from .problem import MaterialSpec

N_DOF = 3  # per node: ux, uy, rz


@dataclass(frozen=True)
class DofMap:
    """Global DOF layout: ``index[node_id]`` gives the three row numbers of a
    node in the assembled system; ``free`` / ``constrained`` partition them."""

    index: dict[int, tuple[int, int, int]]
    free: tuple[int, ...]
    constrained: tuple[int, ...]

    @property
    def size(self) -> int:
        return N_DOF * len(self.index)


def build_dof_map(m: TopologyModel) -> DofMap:
    fixed: dict[int, tuple[bool, bool, bool]] = {}
    for s in m.supports:
        held = fixed.get(s.node_id, (False, False, False))
        fixed[s.node_id] = tuple(a or b for a, b in zip(held, s.fixity))  # type: ignore[assignment]

    index: dict[int, tuple[int, int, int]] = {}
    constrained: list[int] = []
    for pos, node in enumerate(m.nodes):
        rows = (N_DOF * pos, N_DOF * pos + 1, N_DOF * pos + 2)
        index[node.id] = rows
        held = fixed.get(node.id, (False, False, False))
        constrained.extend(r for r, h in zip(rows, held) if h)
    constrained_set = set(constrained)
    free = tuple(r for r in range(N_DOF * len(m.nodes)) if r not in constrained_set)
    return DofMap(index, free, tuple(sorted(constrained)))


def element_stiffness_local(E: float, A: float, I: float, L: float) -> np.ndarray:
    if L <= COORD_TOL:
        raise DegenerateElement(f"member length {L:g} is not positive")
    ea = E * A / L
    b1 = 12.0 * E * I / L**3
    b2 = 6.0 * E * I / L**2
    b3 = 4.0 * E * I / L
    b4 = 2.0 * E * I / L
    return np.array([
        [ ea, 0.0, 0.0, -ea, 0.0, 0.0],
        [0.0,  b1,  b2, 0.0, -b1,  b2],
        [0.0,  b2,  b3, 0.0, -b2,  b4],
        [-ea, 0.0, 0.0,  ea, 0.0, 0.0],
        [0.0, -b1, -b2, 0.0,  b1, -b2],
        [0.0,  b2,  b4, 0.0, -b2,  b3],
    ])


def transformation_matrix(cx: float, cy: float) -> np.ndarray:
    """Maps global DOFs to local (u_local = T u_global)."""
    t = np.zeros((6, 6))
    block = np.array([[cx, cy, 0.0], [-cy, cx, 0.0], [0.0, 0.0, 1.0]])
    t[:3, :3] = block
    t[3:, 3:] = block
    return t


def transform_to_global(k_local: np.ndarray, cx: float, cy: float) -> np.ndarray:
    t = transformation_matrix(cx, cy)
    return t.T @ k_local @ t


def fixed_end_forces(w: float, L: float) -> np.ndarray:
    """Equivalent local end loads of a uniform transverse load (w toward +local y)."""
    return np.array([0.0, w * L / 2.0, w * L**2 / 12.0,
                     0.0, w * L / 2.0, -w * L**2 / 12.0])


@dataclass(frozen=True)
class NodeDisplacement:
    node_id: int
    ux: float
    uy: float
    rz: float


@dataclass(frozen=True)
class Reaction:
    node_id: int
    rx: float
    ry: float
    mz: float


@dataclass(frozen=True)
class MemberEndForces:
    """Local end forces acting on the member: (N, V, M) at node_i then node_j."""

    element_id: int
    n_i: float
    v_i: float
    m_i: float
    n_j: float
    v_j: float
    m_j: float


@dataclass(frozen=True)
class AnalysisResult:
    displacements: tuple[NodeDisplacement, ...]
    reactions: tuple[Reaction, ...]
    member_end_forces: tuple[MemberEndForces, ...]

    def displacement_of(self, node_id: int) -> NodeDisplacement:
        return next(d for d in self.displacements if d.node_id == node_id)


def _element_geometry(m: TopologyModel, e: Element) -> tuple[float, float, float]:
    nodes = m.node_by_id()
    ni, nj = nodes[e.node_i], nodes[e.node_j]
    dx, dy = nj.x - ni.x, nj.y - ni.y
    L = float(np.hypot(dx, dy))
    if L <= COORD_TOL:
        raise DegenerateElement(f"element {e.id} has zero length")
    return L, dx / L, dy / L


def _section(mat: MaterialSpec, kind: ElementKind) -> tuple[float, float]:
    if kind is ElementKind.COLUMN:
        return mat.A_col, mat.I_col
    return mat.A_gir, mat.I_gir


def solve_static(m: TopologyModel, loads: LoadSet, mat: MaterialSpec) -> AnalysisResult:
    """Assemble, apply supports, solve, and recover reactions and end forces."""
    dofs = build_dof_map(m)
    n = dofs.size
    K = np.zeros((n, n))
    F = np.zeros(n)

    udl = {u.element_id: u.w for u in loads.member}
    cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray, float]] = {}
    for e in m.elements:
        L, cx, cy = _element_geometry(m, e)
        A, I = _section(mat, e.kind)
        k_local = element_stiffness_local(mat.E, A, I, L)
        T = transformation_matrix(cx, cy)
        k_global = T.T @ k_local @ T
        rows = dofs.index[e.node_i] + dofs.index[e.node_j]
        K[np.ix_(rows, rows)] += k_global
        w = udl.get(e.id, 0.0)
        f_eq = fixed_end_forces(w, L)
        if w != 0.0:
            F[list(rows)] += T.T @ f_eq
        cache[e.id] = (k_local, T, f_eq, L)

    for p in loads.nodal:
        rows = dofs.index[p.node_id]
        F[rows[0]] += p.fx
        F[rows[1]] += p.fy
        F[rows[2]] += p.mz

    free = list(dofs.free)
    u = np.zeros(n)
    if free:
        K_ff = K[np.ix_(free, free)]
        try:
            np.linalg.cholesky(K_ff)
        except np.linalg.LinAlgError:
            raise SingularSystem(
                "stiffness matrix is singular: the frame is a mechanism or has "
                "insufficient supports") from None
        u[free] = np.linalg.solve(K_ff, F[free])

    residual = K @ u - F  # zero at free DOFs, reaction at constrained ones

    displacements = []
    for node in m.nodes:
        rows = dofs.index[node.id]
        displacements.append(NodeDisplacement(node.id, u[rows[0]], u[rows[1]], u[rows[2]]))

    held: dict[int, tuple[bool, bool, bool]] = {}
    for s in m.supports:
        prev = held.get(s.node_id, (False, False, False))
        held[s.node_id] = tuple(a or b for a, b in zip(prev, s.fixity))  # type: ignore[assignment]
    reactions = []
    for node_id in sorted(held):
        rows = dofs.index[node_id]
        vals = [residual[r] if h else 0.0 for r, h in zip(rows, held[node_id])]
        reactions.append(Reaction(node_id, *vals))

    end_forces = []
    for e in m.elements:
        k_local, T, f_eq, _ = cache[e.id]
        rows = dofs.index[e.node_i] + dofs.index[e.node_j]
        u_local = T @ u[list(rows)]
        q = k_local @ u_local - f_eq
        end_forces.append(MemberEndForces(e.id, *q))

    return AnalysisResult(tuple(displacements), tuple(reactions), tuple(end_forces))


@dataclass(frozen=True)
class InternalForceDiagram:
    """Per-element polynomials: axial (constant), shear V0 + V1 x, and moment
    M0 + M1 x + M2 x^2, valid for x in [0, length] along the member."""

    element_id: int
    length: float
    axial: float
    shear: tuple[float, float]
    moment: tuple[float, float, float]
    stations: tuple[float, ...]

    def shear_at(self, x: float) -> float:
        return self.shear[0] + self.shear[1] * x

    def moment_at(self, x: float) -> float:
        return self.moment[0] + self.moment[1] * x + self.moment[2] * x * x


def internal_forces(result: AnalysisResult, m: TopologyModel, loads: LoadSet,
                    stations: int = 9) -> list[InternalForceDiagram]:
    """Diagram coefficients for every element, from its end forces and UDL."""
    udl = {u.element_id: u.w for u in loads.member}
    by_id = {q.element_id: q for q in result.member_end_forces}
    out = []
    for e in m.elements:
        L, _, _ = _element_geometry(m, e)
        q = by_id[e.id]
        w_down = -udl.get(e.id, 0.0)  # diagram convention: positive downward
        out.append(InternalForceDiagram(
            element_id=e.id,
            length=L,
            axial=-q.n_i,
            shear=(q.v_i, -w_down),
            moment=(-q.m_i, q.v_i, -w_down / 2.0),
            stations=tuple(i * L / (stations - 1) for i in range(stations)),
        ))
    return out


def equilibrium_residual(m: TopologyModel, loads: LoadSet, result: AnalysisResult,
                         ) -> tuple[float, float, float]:
    """Global (sum Fx, sum Fy, sum Mz about origin) of applied loads plus
    reactions; all three vanish for a correct solution."""
    nodes = m.node_by_id()
    fx = fy = mz = 0.0
    for p in loads.nodal:
        node = nodes[p.node_id]
        fx += p.fx
        fy += p.fy
        mz += p.mz + node.x * p.fy - node.y * p.fx
    elements = m.element_by_id()
    for u in loads.member:
        e = elements[u.element_id]
        ni, nj = nodes[e.node_i], nodes[e.node_j]
        L, cx, cy = _element_geometry(m, e)
        # resultant of the transverse line load, acting at midspan
        rx, ry = -cy * u.w * L, cx * u.w * L
        mx, my = (ni.x + nj.x) / 2.0, (ni.y + nj.y) / 2.0
        fx += rx
        fy += ry
        mz += mx * ry - my * rx
    for r in result.reactions:
        node = nodes[r.node_id]
        fx += r.rx
        fy += r.ry
        mz += r.mz + node.x * r.ry - node.y * r.rx
    return fx, fy, mz


def result_to_json(result: AnalysisResult) -> str:
    """Displacements, reactions and member end forces as a JSON document."""
    import json

    doc = {
        "Displacements": [
            {"Node_ID": d.node_id, "ux": d.ux, "uy": d.uy, "rz": d.rz}
            for d in result.displacements],
        "Reactions": [
            {"Node_ID": r.node_id, "Rx": r.rx, "Ry": r.ry, "Mz": r.mz}
            for r in result.reactions],
        "Member_end_forces": [
            {"Element_ID": q.element_id,
             "N_i": q.n_i, "V_i": q.v_i, "M_i": q.m_i,
             "N_j": q.n_j, "V_j": q.v_j, "M_j": q.m_j}
            for q in result.member_end_forces],
    }
    return json.dumps(doc, indent=2) + "\n"
