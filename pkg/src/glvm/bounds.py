"""Convex upper and concave lower bounds of the minimax score.

Both bounds are built from an anchor model: the upper bound substitutes the
negative variables with their anchor-optimal choices (one joint argmin per
conditioning positive assignment), leaving a max of linear functions of the
weights; the lower bound symmetrically fixes the positive variables, leaving
a min of linear functions.  Both touch the score at the anchor.

Fixed choices are materialized lazily per conditioning context and cached;
an AnchorPlan is immutable apart from that internally locked cache, so bound
evaluation over distinct examples is concurrent-safe.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    DEFAULT_BRUTE_BUDGET,
    DEFAULT_STRUCTURED_BUDGET,
    Example,
    FeatureOracle,
    LatentAssignment,
    Model,
    _optimize_free,
    assignment_value,
    signed_features,
    validate_assignment,
)
from .errors import BudgetError, MisuseError


def fix_negatives(
    anchor: Model,
    example: Example,
    oracle: FeatureOracle,
    given_pos: LatentAssignment,
    *,
    budget: int = DEFAULT_STRUCTURED_BUDGET,
) -> LatentAssignment:
    """Anchor-optimal joint choice of all negative variables given the
    positives; lexicographically smallest argmin."""
    spec = oracle.spec
    validate_assignment(spec, given_pos, spec.positive_names)
    negatives = [spec.var(n) for n in spec.negative_names]
    choices = _optimize_free(
        anchor, example, oracle, negatives, given_pos.as_dict(), budget=budget
    )
    return LatentAssignment.of(choices)


def fix_positives(
    anchor: Model,
    example: Example,
    oracle: FeatureOracle,
    given_neg: LatentAssignment,
    *,
    budget: int = DEFAULT_STRUCTURED_BUDGET,
) -> LatentAssignment:
    """Anchor-optimal joint choice of all positive variables given the
    negatives; lexicographically smallest argmax."""
    spec = oracle.spec
    validate_assignment(spec, given_neg, spec.negative_names)
    positives = [spec.var(n) for n in spec.positive_names]
    choices = _optimize_free(
        anchor, example, oracle, positives, given_neg.as_dict(), budget=budget
    )
    return LatentAssignment.of(choices)


def _joint_assignments(spec, names, budget):
    variables = [spec.var(n) for n in names]
    count = 1
    for v in variables:
        count *= v.domain
    if count > budget:
        raise BudgetError(
            f"{count} conditioning assignments exceed the budget of {budget}"
        )
    if not variables:
        return [LatentAssignment.of({})]
    return [
        LatentAssignment.of({v.name: c for v, c in zip(variables, combo)})
        for combo in itertools.product(*(range(v.domain) for v in variables))
    ]


@dataclass
class AnchorPlan:
    """Anchor model plus lazily cached fixed latent choices.

    ``upper_system``/``lower_system`` expose each example's bound as an
    explicit stack of linear functions (signed feature rows in lexicographic
    order of the conditioning assignment), which is what the trainer's
    subgradient steps consume.
    """

    anchor: Model
    oracle: FeatureOracle
    iteration: int = 0
    created_at: float = field(default_factory=time.time)
    enumeration_budget: int = DEFAULT_BRUTE_BUDGET
    fixing_budget: int = DEFAULT_STRUCTURED_BUDGET

    def __post_init__(self):
        if self.anchor.layout != self.oracle.layout:
            raise MisuseError("anchor model does not match the oracle layout")
        self._lock = threading.Lock()
        self._fixed_neg: dict = {}
        self._fixed_pos: dict = {}
        self._upper: dict = {}
        self._lower: dict = {}

    def fixed_negatives(
        self, example: Example, given_pos: LatentAssignment
    ) -> LatentAssignment:
        key = (example.id, given_pos.choices)
        with self._lock:
            if key in self._fixed_neg:
                return self._fixed_neg[key]
        fixed = fix_negatives(
            self.anchor, example, self.oracle, given_pos,
            budget=self.fixing_budget,
        )
        with self._lock:
            self._fixed_neg[key] = fixed
        return fixed

    def fixed_positives(
        self, example: Example, given_neg: LatentAssignment
    ) -> LatentAssignment:
        key = (example.id, given_neg.choices)
        with self._lock:
            if key in self._fixed_pos:
                return self._fixed_pos[key]
        fixed = fix_positives(
            self.anchor, example, self.oracle, given_neg,
            budget=self.fixing_budget,
        )
        with self._lock:
            self._fixed_pos[key] = fixed
        return fixed

    def upper_system(
        self, example: Example
    ) -> tuple[np.ndarray, list[LatentAssignment]]:
        """Rows of signed features, one per positive assignment completed
        with its anchor-fixed negatives."""
        with self._lock:
            if example.id in self._upper:
                return self._upper[example.id]
        spec = self.oracle.spec
        rows = []
        assignments = []
        for pos in _joint_assignments(
            spec, spec.positive_names, self.enumeration_budget
        ):
            full = pos.merged(self.fixed_negatives(example, pos))
            rows.append(signed_features(self.oracle, example, full))
            assignments.append(full)
        system = (np.asarray(rows), assignments)
        with self._lock:
            self._upper[example.id] = system
        return system

    def lower_system(
        self, example: Example
    ) -> tuple[np.ndarray, list[LatentAssignment]]:
        with self._lock:
            if example.id in self._lower:
                return self._lower[example.id]
        spec = self.oracle.spec
        rows = []
        assignments = []
        for neg in _joint_assignments(
            spec, spec.negative_names, self.enumeration_budget
        ):
            full = neg.merged(self.fixed_positives(example, neg))
            rows.append(signed_features(self.oracle, example, full))
            assignments.append(full)
        system = (np.asarray(rows), assignments)
        with self._lock:
            self._lower[example.id] = system
        return system


def _check_plan(model: Model, oracle: FeatureOracle, plan: AnchorPlan) -> None:
    if model.layout != plan.anchor.layout:
        raise MisuseError("model layout does not match the plan's anchor")
    if plan.oracle is not oracle and (
        plan.oracle.layout != oracle.layout or plan.oracle.spec != oracle.spec
    ):
        raise MisuseError("plan was built from a different oracle")


def upper_bound_score(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    plan: AnchorPlan,
) -> float:
    value, _ = upper_bound_active(model, example, oracle, plan)
    return value


def upper_bound_active(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    plan: AnchorPlan,
) -> tuple[float, LatentAssignment]:
    """Upper bound value and its active (arg-maximal) assignment."""
    _check_plan(model, oracle, plan)
    rows, assignments = plan.upper_system(example)
    values = rows @ model.w
    best = int(np.flatnonzero(values == values.max())[0])
    return float(values[best]), assignments[best]


def lower_bound_score(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    plan: AnchorPlan,
) -> float:
    value, _ = lower_bound_active(model, example, oracle, plan)
    return value


def lower_bound_active(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    plan: AnchorPlan,
) -> tuple[float, LatentAssignment]:
    """Lower bound value and its active (arg-minimal) assignment."""
    _check_plan(model, oracle, plan)
    rows, assignments = plan.lower_system(example)
    values = rows @ model.w
    best = int(np.flatnonzero(values == values.min())[0])
    return float(values[best]), assignments[best]
