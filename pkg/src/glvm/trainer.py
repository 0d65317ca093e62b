"""Hinge-loss SVM objective over minimax scores and the alternating
bound-construction / bound-minimization training loop.

The objective is non-convex because negative latent variables make the score
a difference of convex functions.  Training alternates between (1) building
a convex upper bound of the objective by freezing latent variables at their
anchor-optimal values (upper-bounded scores for background examples,
lower-bounded scores for foreground ones) and (2) minimizing that bound with
deterministic-shuffle stochastic subgradient descent.  The bound touches the
objective at the anchor, so the true objective is non-increasing across
outer iterations; a violation is raised as an error because it falsifies the
bound construction rather than being a tuning problem.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .bounds import AnchorPlan, lower_bound_active, upper_bound_active
from .core import (
    Example,
    FeatureOracle,
    LatentSpec,
    Model,
    score_canonical,
)
from .errors import InvariantViolationError, MisuseError, NumericError

OBJECTIVE_INCREASE_TOL = 1e-7


@dataclass(frozen=True)
class TrainConfig:
    """Regularization, margin, and solver schedule knobs.

    ``margin`` is the loss of a label flip in the binary structural-SVM
    reduction (1 recovers the plain hinge).  The inner step size decays
    harmonically, step_size / (1 + step_decay * k / n) at the k-th
    per-example step over n examples, which is the classic rate for the
    unit-strongly-convex regularized objective.
    """

    C: float = 1.0
    margin: float = 1.0
    max_outer_iters: int = 20
    outer_tol: float = 1e-4
    step_size: float = 1.0
    step_decay: float = 1.0
    max_epochs: int = 150
    inner_tol: float = 1e-6
    patience: int = 15
    seed: int = 0

    def __post_init__(self):
        if self.C <= 0:
            raise MisuseError("C must be positive")
        if self.margin < 0:
            raise MisuseError("margin must be non-negative")
        if self.outer_tol <= 0 or self.inner_tol <= 0:
            raise MisuseError("tolerances must be positive")
        if self.step_size <= 0 or self.step_decay < 0:
            raise MisuseError("invalid step schedule")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    objective: float
    bound_value: float
    wall_time: float
    hard_positive: int
    hard_negative: int


@dataclass
class TrainTrace:
    rows: list[TraceRow] = field(default_factory=list)
    skipped_examples: list[str] = field(default_factory=list)

    @property
    def objectives(self) -> list[float]:
        return [r.objective for r in self.rows]

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)


# ---------------------------------------------------------------------------
# Objective and bound evaluation (oracle-backed path)
# ---------------------------------------------------------------------------


def _hinge(x: float) -> float:
    return x if x > 0 else 0.0


def svm_objective(
    model: Model,
    dataset: Sequence[Example],
    oracle: FeatureOracle,
    config: TrainConfig,
) -> float:
    """0.5 ||w||^2 + C * sum of hinge(margin - y * S(x)) with the canonical
    minimax score."""
    if not dataset:
        raise MisuseError("svm_objective needs a non-empty dataset")
    total = 0.5 * float(np.dot(model.w, model.w))
    for example in dataset:
        score, _ = score_canonical(model, example, oracle)
        total += config.C * _hinge(config.margin - example.label * score)
    return total


def bound_objective(
    model: Model,
    dataset: Sequence[Example],
    plan: AnchorPlan,
    config: TrainConfig,
) -> float:
    """Convex upper bound of the objective under the plan's anchor."""
    if not dataset:
        raise MisuseError("bound_objective needs a non-empty dataset")
    total = 0.5 * float(np.dot(model.w, model.w))
    for example in dataset:
        if example.label == -1:
            value, _ = upper_bound_active(model, example, plan.oracle, plan)
            total += config.C * _hinge(config.margin + value)
        else:
            value, _ = lower_bound_active(model, example, plan.oracle, plan)
            total += config.C * _hinge(config.margin - value)
    return total


def bound_subgradient(
    model: Model,
    dataset: Sequence[Example],
    plan: AnchorPlan,
    config: TrainConfig,
) -> np.ndarray:
    """A subgradient of the bound: the regularizer plus the signed feature
    rows of the active assignments of every margin-violating term.

    At hinge boundaries the term is treated as inactive; at argmax/argmin
    ties the lexicographically first assignment is the active one.
    """
    if not dataset:
        raise MisuseError("bound_subgradient needs a non-empty dataset")
    grad = model.w.copy()
    for example in dataset:
        rows, _ = _example_system(plan, example)
        grad += _term_subgradient(rows, example.label, model.w, config)
    return grad


def _example_system(plan, example: Example) -> tuple[np.ndarray, list]:
    if example.label == -1:
        return plan.upper_system(example)
    return plan.lower_system(example)


def _term_subgradient(
    rows: np.ndarray, label: int, w: np.ndarray, config: TrainConfig
) -> np.ndarray:
    values = rows @ w
    if label == -1:
        active = int(np.flatnonzero(values == values.max())[0])
        if config.margin + values[active] > 0:
            return config.C * rows[active]
    else:
        active = int(np.flatnonzero(values == values.min())[0])
        if config.margin - values[active] > 0:
            return -config.C * rows[active]
    return np.zeros_like(w)


# ---------------------------------------------------------------------------
# Inner solver: deterministic-shuffle stochastic subgradient descent
# ---------------------------------------------------------------------------


def _minimize_systems(
    systems: Sequence[tuple[int, np.ndarray]],
    anchor_w: np.ndarray,
    config: TrainConfig,
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    """Minimize 0.5||w||^2 + C sum_i hinge over the precomputed linear pieces.

    Keeps the best iterate by full bound value, so the result never exceeds
    the bound at the anchor.
    """
    n = len(systems)
    if n == 0:
        raise MisuseError("nothing to minimize")

    def bound_value(w: np.ndarray) -> float:
        total = 0.5 * float(np.dot(w, w))
        for label, rows in systems:
            values = rows @ w
            if label == -1:
                total += config.C * _hinge(config.margin + float(values.max()))
            else:
                total += config.C * _hinge(config.margin - float(values.min()))
        return total

    rng = np.random.default_rng(config.seed)
    w = anchor_w.copy()
    if project is not None:
        w = project(w)
    best_w = w.copy()
    best_value = bound_value(w)
    stall = 0
    step_count = 0
    for epoch in range(config.max_epochs):
        epoch_sum = np.zeros_like(w)
        for i in rng.permutation(n):
            # The per-example estimate is the 1/n-scaled full gradient, so
            # the harmonic decay runs on step_count/n to get the classic
            # strongly-convex rate.
            eta = config.step_size / (
                1.0 + config.step_decay * step_count / n
            )
            label, rows = systems[i]
            step = w / n + _term_subgradient(rows, label, w, config)
            w = w - eta * step
            if project is not None:
                w = project(w)
            epoch_sum += w
            step_count += 1
        # The averaged iterate smooths subgradient oscillation; keep the
        # better of the last iterate and the epoch average.
        candidates = [w]
        averaged = epoch_sum / n
        if project is not None:
            averaged = project(averaged)
        candidates.append(averaged)
        improved = False
        for candidate in candidates:
            value = bound_value(candidate)
            if not np.isfinite(value):
                raise NumericError(
                    f"bound value became non-finite at epoch {epoch} "
                    f"(|w| = {np.linalg.norm(candidate):.3e})"
                )
            if value < best_value:
                if value < best_value - config.inner_tol * max(
                    1.0, abs(best_value)
                ):
                    improved = True
                best_value = value
                best_w = candidate.copy()
        if improved:
            stall = 0
        else:
            stall += 1
            if stall >= config.patience:
                break
    return best_w


def minimize_bound(
    anchor: Model,
    dataset: Sequence[Example],
    oracle: FeatureOracle,
    config: TrainConfig,
    *,
    plan: Optional[AnchorPlan] = None,
) -> Model:
    """One bound-minimization step from the given anchor."""
    if not dataset:
        raise MisuseError("minimize_bound needs a non-empty dataset")
    if plan is None:
        plan = AnchorPlan(anchor=anchor, oracle=oracle)
    systems = [
        (example.label, _example_system(plan, example)[0])
        for example in dataset
    ]
    w = _minimize_systems(systems, anchor.w, config)
    return Model(w=w, layout=anchor.layout)


# ---------------------------------------------------------------------------
# Outer loop
# ---------------------------------------------------------------------------


def train(
    dataset: Sequence[Example],
    spec: LatentSpec,
    oracle: FeatureOracle,
    init: Model,
    config: TrainConfig,
) -> tuple[Model, TrainTrace]:
    """Alternate bound construction and minimization until the objective
    stops decreasing."""
    if not dataset:
        raise MisuseError("train needs a non-empty dataset")
    if spec != oracle.spec:
        raise MisuseError("spec does not match the oracle")
    if init.layout != oracle.layout:
        raise MisuseError("init model does not conform to the oracle layout")

    problem = _OracleProblem(dataset, oracle, config)
    w, trace = alternate_bounds(problem, init.w, config)
    return Model(w=w, layout=oracle.layout), trace


class _OracleProblem:
    """Adapter exposing the oracle-backed dataset to the shared loop."""

    def __init__(self, dataset, oracle, config):
        self.dataset = dataset
        self.oracle = oracle
        self.config = config
        self.project = None

    def objective(self, w: np.ndarray) -> tuple[float, int, int]:
        model = Model(w=w, layout=self.oracle.layout)
        total = 0.5 * float(np.dot(w, w))
        hard_pos = hard_neg = 0
        for example in self.dataset:
            score, _ = score_canonical(model, example, self.oracle)
            loss = _hinge(self.config.margin - example.label * score)
            total += self.config.C * loss
            if loss > 0:
                if example.label == +1:
                    hard_pos += 1
                else:
                    hard_neg += 1
        return total, hard_pos, hard_neg

    def build_systems(
        self, anchor_w: np.ndarray, iteration: int
    ) -> list[tuple[int, np.ndarray]]:
        anchor = Model(w=anchor_w, layout=self.oracle.layout)
        plan = AnchorPlan(anchor=anchor, oracle=self.oracle, iteration=iteration)
        return [
            (example.label, _example_system(plan, example)[0])
            for example in self.dataset
        ]


def alternate_bounds(
    problem,
    init_w: np.ndarray,
    config: TrainConfig,
) -> tuple[np.ndarray, TrainTrace]:
    """Shared outer loop: every model family plugs in through ``problem``.

    ``problem`` provides ``objective(w) -> (value, hard_pos, hard_neg)``,
    ``build_systems(anchor_w, iteration) -> [(label, rows), ...]`` and an
    optional ``project`` attribute applied after every inner step.
    """
    w = init_w.copy()
    trace = TrainTrace()
    prev_objective, hard_pos, hard_neg = problem.objective(w)
    if not np.isfinite(prev_objective):
        raise NumericError("objective is non-finite at the initial model")

    for iteration in range(1, config.max_outer_iters + 1):
        start = time.perf_counter()
        systems = problem.build_systems(w, iteration)
        new_w = _minimize_systems(
            systems, w, config, project=getattr(problem, "project", None)
        )
        objective, hard_pos, hard_neg = problem.objective(new_w)
        if not np.isfinite(objective):
            raise NumericError(
                f"objective became non-finite at outer iteration {iteration}"
            )
        if objective > prev_objective + OBJECTIVE_INCREASE_TOL:
            raise InvariantViolationError(
                f"objective increased from {prev_objective:.9f} to "
                f"{objective:.9f} at outer iteration {iteration}; the bound "
                "construction is unsound"
            )
        bound_value = _systems_bound_value(systems, new_w, config)
        trace.append(
            TraceRow(
                iteration=iteration,
                objective=objective,
                bound_value=bound_value,
                wall_time=time.perf_counter() - start,
                hard_positive=hard_pos,
                hard_negative=hard_neg,
            )
        )
        w = new_w
        decrease = prev_objective - objective
        prev_objective = objective
        if decrease < config.outer_tol * max(1.0, abs(objective)):
            break
    return w, trace


def _systems_bound_value(
    systems: Sequence[tuple[int, np.ndarray]],
    w: np.ndarray,
    config: TrainConfig,
) -> float:
    total = 0.5 * float(np.dot(w, w))
    for label, rows in systems:
        values = rows @ w
        if label == -1:
            total += config.C * _hinge(config.margin + float(values.max()))
        else:
            total += config.C * _hinge(config.margin - float(values.min()))
    return total
