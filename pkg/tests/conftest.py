"""Shared fixtures: random latent specs and table-backed feature oracles.

The table oracle is the workhorse of the equivalence suites: each variable's
block content is a lookup into a random table indexed by (own choice, parent
choice), which makes the oracle decomposable by construction and therefore
valid for both inference routes.
"""

from __future__ import annotations

import itertools

import numpy as np

from glvm.core import (
    POSITIVE,
    BlockLayout,
    Example,
    FeatureOracle,
    LatentAssignment,
    LatentSpec,
    LatentVar,
    StageSpec,
)


def make_random_spec(
    rng: np.random.Generator,
    *,
    max_stages: int = 3,
    max_vars_per_side: int = 2,
    max_domain: int = 5,
    edge_policy: str = "within_polarity",
    edge_prob: float = 0.5,
    max_assignments: int | None = 10_000,
) -> LatentSpec:
    """Random spec with parents always bound before children.

    ``edge_policy``: "none" for independent variables, "within_polarity" for
    edges that never cross the positive/negative split (bounds constructed by
    latent fixing are exact bounds for these), "any_forward" for arbitrary
    forward edges.
    """
    if edge_policy not in ("none", "within_polarity", "any_forward"):
        raise ValueError(edge_policy)
    while True:
        n_stages = int(rng.integers(1, max_stages + 1))
        stages = []
        bound: list[tuple[str, int]] = []  # (name, polarity) in binding order
        counter = itertools.count()
        total = 1
        for _ in range(n_stages):
            sides = []
            for polarity in (POSITIVE, -1):
                n_vars = int(rng.integers(0, max_vars_per_side + 1))
                declared: list[LatentVar] = []
                for _ in range(n_vars):
                    name = f"z{next(counter)}"
                    domain = int(rng.integers(1, max_domain + 1))
                    total *= domain
                    parent = None
                    if bound and rng.random() < edge_prob:
                        if edge_policy == "within_polarity":
                            pool = [n for n, p in bound if p == polarity]
                        elif edge_policy == "any_forward":
                            pool = [n for n, _ in bound]
                        else:
                            pool = []
                        if pool:
                            parent = pool[int(rng.integers(len(pool)))]
                    declared.append(LatentVar(name, domain, parent))
                    bound.append((name, polarity))
                sides.append(tuple(declared))
            stages.append(StageSpec(positives=sides[0], negatives=sides[1]))
        if not bound:
            continue
        if max_assignments is not None and total > max_assignments:
            continue
        return LatentSpec(stages=tuple(stages))


def make_table_oracle(
    rng: np.random.Generator,
    spec: LatentSpec,
    *,
    block_width: int = 2,
    scale: float = 1.0,
) -> FeatureOracle:
    """Oracle whose block contents are random per-(choice, parent choice) tables."""
    layout = BlockLayout.build(
        [(v.name, block_width) for v in spec.variables]
    )
    tables: dict[str, np.ndarray] = {}
    for var in spec.variables:
        parent_dom = spec.var(var.parent).domain if var.parent else 1
        tables[var.name] = scale * rng.normal(
            size=(var.domain, parent_dom, block_width)
        )

    def fn(example: Example, assignment: LatentAssignment) -> np.ndarray:
        phi = np.zeros(layout.total_dim)
        chosen = assignment.as_dict()
        for var in spec.variables:
            if var.name not in chosen:
                continue
            parent_choice = 0
            if var.parent is not None and var.parent in chosen:
                parent_choice = chosen[var.parent]
            phi[layout.slice_of(var.name)] = tables[var.name][
                chosen[var.name], parent_choice
            ]
        return phi

    return FeatureOracle(layout=layout, spec=spec, fn=fn)


def make_random_model(rng: np.random.Generator, layout: BlockLayout):
    from glvm.core import Model

    return Model(w=rng.normal(size=layout.total_dim), layout=layout)


def enumerate_assignments(spec: LatentSpec):
    """All full assignments in lexicographic order of the index vector."""
    variables = spec.variables
    for combo in itertools.product(*(range(v.domain) for v in variables)):
        yield LatentAssignment.of(
            {v.name: c for v, c in zip(variables, combo)}
        )
