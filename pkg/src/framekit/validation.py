"""Model consistency checks and repairs.

``validate_model`` runs four passes in a fixed order and returns the repaired
model together with the ordered list of corrective actions:

1. remove duplicate nodes (coincident coordinates; the smallest id survives,
   supports transfer to the survivor),
2. remove duplicate elements (same unordered endpoint pair once duplicate
   nodes are identified; smallest id survives),
3. renumber surviving nodes to 1..N preserving ascending order,
4. rewrite element endpoints (emitting an explicit reconnect action whenever
   an endpoint cited a deleted node) and renumber elements to 1..M.

The action log is complete: ``replay_actions`` applied to the original model
reproduces the validated model exactly.  Running the pipeline twice yields no
further actions.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import Enum

from .errors import DanglingReference, SemanticError
from .geometry import (
    Element,
    Node,
    SupportConstraint,
    TopologyModel,
    coord_key,
)


class ActionKind(str, Enum):
    REMOVE_DUPLICATE_NODE = "remove_duplicate_node"
    REMOVE_DUPLICATE_ELEMENT = "remove_duplicate_element"
    RENUMBER_NODE = "renumber_node"
    RENUMBER_ELEMENT = "renumber_element"
    RECONNECT_ELEMENT = "reconnect_element"


_MESSAGES = {
    ActionKind.REMOVE_DUPLICATE_NODE: "Remove duplicate node {s}; keep node {r}.",
    ActionKind.REMOVE_DUPLICATE_ELEMENT: "Remove duplicate element {s}; keep element {r}.",
    ActionKind.RENUMBER_NODE: "Renumber node {s} to {r}.",
    ActionKind.RENUMBER_ELEMENT: "Renumber element {s} to {r}.",
    ActionKind.RECONNECT_ELEMENT: "Reconnect element {s} to retained node {r}.",
}


@dataclass(frozen=True)
class CorrectiveAction:
    kind: ActionKind
    subject_id: int
    replacement_id: int

    @property
    def message(self) -> str:
        return _MESSAGES[self.kind].format(s=self.subject_id, r=self.replacement_id)


@dataclass(frozen=True)
class IdMap:
    """Total map old id -> new id; ``removed`` lists ids that were deleted
    (their mapping points at the retained duplicate)."""

    mapping: dict[int, int]
    removed: frozenset[int] = frozenset()

    def resolve(self, old: int) -> int:
        return self.mapping.get(old, old)

    def compose(self, later: "IdMap") -> "IdMap":
        keys = set(self.mapping) | set(later.mapping)
        return IdMap({k: later.resolve(self.resolve(k)) for k in keys},
                     self.removed | later.removed)


def _identity_map(ids) -> IdMap:
    return IdMap({i: i for i in ids})


def dedup_nodes(m: TopologyModel) -> tuple[TopologyModel, list[CorrectiveAction], IdMap]:
    """Drop nodes that coincide with a smaller-id node; merge their supports."""
    groups: dict[tuple[int, int], list[int]] = defaultdict(list)
    for n in m.nodes:
        groups[coord_key(n.x, n.y)].append(n.id)

    mapping = {n.id: n.id for n in m.nodes}
    removed: set[int] = set()
    for ids in groups.values():
        keep = min(ids)
        for nid in ids:
            if nid != keep:
                mapping[nid] = keep
                removed.add(nid)

    actions = [CorrectiveAction(ActionKind.REMOVE_DUPLICATE_NODE, nid, mapping[nid])
               for nid in sorted(removed)]

    fixity: dict[int, tuple[bool, bool, bool]] = {}
    order: list[int] = []
    for s in m.supports:
        target = mapping.get(s.node_id, s.node_id)
        if target in fixity:
            fixity[target] = tuple(a or b for a, b in zip(fixity[target], s.fixity))  # type: ignore[assignment]
        else:
            fixity[target] = s.fixity
            order.append(target)
    supports = tuple(SupportConstraint(nid, fixity[nid]) for nid in sorted(order))

    nodes = tuple(n for n in m.nodes if n.id not in removed)
    out = TopologyModel(nodes, m.elements, supports, m.steps)
    return out, actions, IdMap(mapping, frozenset(removed))


def dedup_elements(m: TopologyModel, node_map: IdMap | None = None,
                   ) -> tuple[TopologyModel, list[CorrectiveAction], IdMap]:
    """Drop elements whose endpoint pair (after node dedup mapping) repeats.

    Endpoints themselves are left untouched here; the rewrite happens in
    ``renumber_elements``.
    """
    if node_map is None:
        node_map = _identity_map(n.id for n in m.nodes)
    known = {n.id for n in m.nodes} | set(node_map.mapping)

    seen: dict[tuple[int, int], int] = {}
    mapping = {e.id: e.id for e in m.elements}
    removed: set[int] = set()
    for e in sorted(m.elements, key=lambda e: e.id):
        for endpoint in (e.node_i, e.node_j):
            if endpoint not in known:
                raise DanglingReference(
                    f"element {e.id} cites node {endpoint}, which does not exist")
        pair = tuple(sorted((node_map.resolve(e.node_i), node_map.resolve(e.node_j))))
        if pair in seen:
            mapping[e.id] = seen[pair]
            removed.add(e.id)
        else:
            seen[pair] = e.id

    actions = [CorrectiveAction(ActionKind.REMOVE_DUPLICATE_ELEMENT, eid, mapping[eid])
               for eid in sorted(removed)]
    elements = tuple(e for e in m.elements if e.id not in removed)
    out = TopologyModel(m.nodes, elements, m.supports, m.steps)
    return out, actions, IdMap(mapping, frozenset(removed))


def renumber_nodes(m: TopologyModel) -> tuple[TopologyModel, list[CorrectiveAction], IdMap]:
    """Compact node ids to 1..N in ascending order.

    Element endpoints are *not* rewritten here; compose the returned map into
    ``renumber_elements``.
    """
    ordered = sorted(m.nodes, key=lambda n: n.id)
    mapping = {n.id: rank for rank, n in enumerate(ordered, start=1)}
    actions = [CorrectiveAction(ActionKind.RENUMBER_NODE, n.id, mapping[n.id])
               for n in ordered if mapping[n.id] != n.id]
    nodes = tuple(replace(n, id=mapping[n.id]) for n in ordered)
    supports = tuple(sorted(
        (replace(s, node_id=mapping.get(s.node_id, s.node_id)) for s in m.supports),
        key=lambda s: s.node_id))
    out = TopologyModel(nodes, m.elements, supports, m.steps)
    return out, actions, IdMap(mapping)


def renumber_elements(m: TopologyModel, node_map: IdMap,
                      ) -> tuple[TopologyModel, list[CorrectiveAction], IdMap]:
    """Rewrite endpoints through ``node_map`` and compact element ids to 1..M.

    ``node_map`` must compose every preceding pass (dedup + renumber); an
    endpoint whose old id was deleted gets an explicit reconnect action.
    """
    final_ids = {n.id for n in m.nodes}
    actions: list[CorrectiveAction] = []
    rewritten: list[Element] = []
    for e in sorted(m.elements, key=lambda e: e.id):
        ends = []
        for endpoint in (e.node_i, e.node_j):
            new = node_map.resolve(endpoint)
            if new not in final_ids:
                raise DanglingReference(
                    f"element {e.id} cites node {endpoint}, which does not exist")
            if endpoint in node_map.removed:
                actions.append(CorrectiveAction(ActionKind.RECONNECT_ELEMENT, e.id, new))
            ends.append(new)
        rewritten.append(replace(e, node_i=ends[0], node_j=ends[1]))

    mapping = {e.id: rank for rank, e in enumerate(rewritten, start=1)}
    actions.extend(CorrectiveAction(ActionKind.RENUMBER_ELEMENT, e.id, mapping[e.id])
                   for e in rewritten if mapping[e.id] != e.id)
    elements = tuple(replace(e, id=mapping[e.id]) for e in rewritten)
    out = TopologyModel(m.nodes, elements, m.supports, m.steps)
    return out, actions, IdMap(mapping)


def validate_model(m: TopologyModel) -> tuple[TopologyModel, tuple[CorrectiveAction, ...]]:
    """Run all four repair passes; see the module docstring for the order."""
    m1, a1, node_dedup = dedup_nodes(m)
    m2, a2, _ = dedup_elements(m1, node_dedup)
    m3, a3, node_renumber = renumber_nodes(m2)
    m4, a4, _ = renumber_elements(m3, node_dedup.compose(node_renumber))
    actions = a1 + a2 + a3 + a4
    if actions and m4.steps:
        # Construction history references the old ids; it no longer applies.
        m4 = m4.stripped()
    return m4, tuple(actions)


def replay_actions(m: TopologyModel, actions: Sequence[CorrectiveAction]) -> TopologyModel:
    """Apply a validation log to the model it was produced from.

    The log fully determines the repair: deletions say which duplicate wins,
    renumber actions give both id maps, and reconnects are implied by the
    node deletions they repeat.
    """
    node_dedup = {a.subject_id: a.replacement_id for a in actions
                  if a.kind is ActionKind.REMOVE_DUPLICATE_NODE}
    dropped_elements = {a.subject_id for a in actions
                        if a.kind is ActionKind.REMOVE_DUPLICATE_ELEMENT}
    node_renum = {a.subject_id: a.replacement_id for a in actions
                  if a.kind is ActionKind.RENUMBER_NODE}
    elem_renum = {a.subject_id: a.replacement_id for a in actions
                  if a.kind is ActionKind.RENUMBER_ELEMENT}

    def node_final(old: int) -> int:
        retained = node_dedup.get(old, old)
        return node_renum.get(retained, retained)

    nodes = tuple(sorted(
        (replace(n, id=node_final(n.id)) for n in m.nodes if n.id not in node_dedup),
        key=lambda n: n.id))

    fixity: dict[int, tuple[bool, bool, bool]] = {}
    for s in m.supports:
        target = node_final(s.node_id)
        if target in fixity:
            fixity[target] = tuple(a or b for a, b in zip(fixity[target], s.fixity))  # type: ignore[assignment]
        else:
            fixity[target] = s.fixity
    supports = tuple(SupportConstraint(nid, fixity[nid]) for nid in sorted(fixity))

    elements = tuple(sorted(
        (replace(e, id=elem_renum.get(e.id, e.id),
                 node_i=node_final(e.node_i), node_j=node_final(e.node_j))
         for e in m.elements if e.id not in dropped_elements),
        key=lambda e: e.id))

    steps = () if actions else m.steps
    return TopologyModel(nodes, elements, supports, steps)


# ---------------------------------------------------------------------------
# Deterministic fault injection for exercising the passes.


@dataclass(frozen=True)
class DuplicateNode:
    """Insert a copy of ``source_id`` as ``new_id``; ids >= new_id shift up."""

    source_id: int
    new_id: int


@dataclass(frozen=True)
class DuplicateElement:
    source_id: int
    new_id: int


@dataclass(frozen=True)
class ShiftNodeIds:
    """Open a numbering gap: every node id >= start grows by offset."""

    start: int
    offset: int


@dataclass(frozen=True)
class ShiftElementIds:
    start: int
    offset: int


@dataclass(frozen=True)
class SwapElementIds:
    a: int
    b: int


@dataclass(frozen=True)
class ReconnectEndpoint:
    """Rewire one endpoint of an element (first matching endpoint wins)."""

    element_id: int
    old_node: int
    new_node: int


FaultOp = (DuplicateNode | DuplicateElement | ShiftNodeIds | ShiftElementIds
           | SwapElementIds | ReconnectEndpoint)


def inject_faults(m: TopologyModel, recipe: list[FaultOp]) -> TopologyModel:
    """Apply fault operations in order; the result drops construction history."""
    nodes = list(m.nodes)
    elements = list(m.elements)
    supports = list(m.supports)

    def shift_nodes(start: int, offset: int) -> None:
        def bump(i: int) -> int:
            return i + offset if i >= start else i
        nodes[:] = [replace(n, id=bump(n.id)) for n in nodes]
        elements[:] = [replace(e, node_i=bump(e.node_i), node_j=bump(e.node_j))
                       for e in elements]
        supports[:] = [replace(s, node_id=bump(s.node_id)) for s in supports]

    def shift_elements(start: int, offset: int) -> None:
        elements[:] = [replace(e, id=e.id + offset if e.id >= start else e.id)
                       for e in elements]

    for op in recipe:
        if isinstance(op, DuplicateNode):
            source = next((n for n in nodes if n.id == op.source_id), None)
            if source is None:
                raise SemanticError(f"no node {op.source_id} to duplicate")
            shift_nodes(op.new_id, 1)
            nodes.append(Node(op.new_id, source.x, source.y, source.desc))
            nodes.sort(key=lambda n: n.id)
        elif isinstance(op, DuplicateElement):
            source = next((e for e in elements if e.id == op.source_id), None)
            if source is None:
                raise SemanticError(f"no element {op.source_id} to duplicate")
            shift_elements(op.new_id, 1)
            elements.append(replace(source, id=op.new_id))
            elements.sort(key=lambda e: e.id)
        elif isinstance(op, ShiftNodeIds):
            shift_nodes(op.start, op.offset)
        elif isinstance(op, ShiftElementIds):
            shift_elements(op.start, op.offset)
        elif isinstance(op, SwapElementIds):
            for i, e in enumerate(elements):
                if e.id == op.a:
                    elements[i] = replace(e, id=op.b)
                elif e.id == op.b:
                    elements[i] = replace(e, id=op.a)
            elements.sort(key=lambda e: e.id)
        elif isinstance(op, ReconnectEndpoint):
            for i, e in enumerate(elements):
                if e.id != op.element_id:
                    continue
                if e.node_i == op.old_node:
                    elements[i] = replace(e, node_i=op.new_node)
                elif e.node_j == op.old_node:
                    elements[i] = replace(e, node_j=op.new_node)
                else:
                    raise SemanticError(
                        f"element {e.id} has no endpoint {op.old_node}")
                break
            else:
                raise SemanticError(f"no element {op.element_id} to reconnect")
        else:  # pragma: no cover
            raise SemanticError(f"unknown fault op {op!r}")

    return TopologyModel(tuple(nodes), tuple(elements), tuple(supports))


def random_fault_recipe(m: TopologyModel, rng, max_ops: int = 4) -> list[FaultOp]:
    """Draw a recoverable fault recipe: duplicates, id gaps and reconnections
    onto coincident duplicates.  Validation of the result is isomorphic to
    ``m``."""
    recipe: list[FaultOp] = []
    work = m.stripped()
    n_ops = rng.randint(1, max_ops)
    for _ in range(n_ops):
        choices = ["dup_node", "dup_element", "gap_node", "gap_element"]
        # A reconnect is only recoverable when a coincident duplicate exists.
        groups = defaultdict(list)
        for n in work.nodes:
            groups[coord_key(n.x, n.y)].append(n.id)
        dup_groups = [ids for ids in groups.values() if len(ids) > 1]
        if dup_groups:
            choices.append("reconnect")
        kind = rng.choice(choices)
        op: FaultOp
        if kind == "dup_node":
            # source_id is interpreted before the insertion shift
            source = rng.choice(work.nodes).id
            new_id = rng.randint(2, max(n.id for n in work.nodes) + 1)
            op = DuplicateNode(source, new_id)
        elif kind == "dup_element":
            source = rng.choice(work.elements).id
            new_id = rng.randint(2, max(e.id for e in work.elements) + 1)
            op = DuplicateElement(source, new_id)
        elif kind == "gap_node":
            op = ShiftNodeIds(rng.randint(1, max(n.id for n in work.nodes)),
                              rng.randint(1, 5))
        elif kind == "gap_element":
            op = ShiftElementIds(rng.randint(1, max(e.id for e in work.elements)),
                                 rng.randint(1, 5))
        else:
            ids = rng.choice(dup_groups)
            target_pool = sorted(ids)
            candidates = [e for e in work.elements
                          if e.node_i in target_pool or e.node_j in target_pool]
            e = rng.choice(candidates)
            old = e.node_i if e.node_i in target_pool else e.node_j
            new = rng.choice([i for i in target_pool if i != old])
            op = ReconnectEndpoint(e.id, old, new)
        recipe.append(op)
        work = inject_faults(work, [op])
    return recipe
