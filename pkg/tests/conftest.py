"""Shared helpers: seeded random problem/model generators.

Dimensions are quantized to 0.5 m steps so every coordinate and span prints
exactly under the 12-significant-digit float format used by the script
emitter; story heights come from one per-level profile shared by all bays,
which satisfies the cross-bay alignment rule by construction.
"""

import random

from framekit.geometry import Element, ElementKind, Node, SupportConstraint, TopologyModel
from framekit.problem import (BaySpec, FrameProblem, LoadSpecification, MaterialSpec,
                              SupportKind, validate_problem)

SPAN_CHOICES = tuple(3.0 + 0.5 * i for i in range(11))      # 3.0 .. 8.0
HEIGHT_CHOICES = tuple(2.5 + 0.5 * i for i in range(6))     # 2.5 .. 5.0


def random_problem(rng: random.Random, max_bays: int = 5, max_stories: int = 5,
                   with_loads: bool = True) -> FrameProblem:
    n_bays = rng.randint(1, max_bays)
    stories = [rng.randint(1, max_stories) for _ in range(n_bays)]
    profile = tuple(rng.choice(HEIGHT_CHOICES) for _ in range(max(stories)))
    bays = tuple(
        BaySpec(index=i + 1, span=rng.choice(SPAN_CHOICES), stories=s,
                heights=profile[:s])
        for i, s in enumerate(stories))
    loads = None
    if with_loads and rng.random() < 0.8:
        loads = LoadSpecification(
            lateral_point=rng.choice((0.0, 20_000.0, 50_000.0)),
            lateral_direction=rng.choice(("+x", "-x")),
            girder_udl=rng.choice((5_000.0, 10_000.0)),
            girder_direction="-y",
        )
    problem = FrameProblem(
        total_bays=n_bays,
        bays=bays,
        support_kind=rng.choice((SupportKind.FIXED, SupportKind.PINNED)),
        material=MaterialSpec(),
        load_spec=loads,
    )
    return validate_problem(problem)


def make_model(nodes, elements, supports=()) -> TopologyModel:
    """Compact literal model builder for unit fixtures.

    nodes: [(id, x, y)], elements: [(id, i, j, kind)], supports: [id] (fixed)
    or [(id, (bx, by, bz))].
    """
    sup = []
    for s in supports:
        if isinstance(s, tuple):
            sup.append(SupportConstraint(s[0], s[1]))
        else:
            sup.append(SupportConstraint(s, (True, True, True)))
    return TopologyModel(
        nodes=tuple(Node(i, x, y) for i, x, y in nodes),
        elements=tuple(Element(i, a, b, kind) for i, a, b, kind in elements),
        supports=tuple(sup),
    )


COLUMN = ElementKind.COLUMN
GIRDER = ElementKind.GIRDER
