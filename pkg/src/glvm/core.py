"""Block-structured minimax latent variable scoring.

A model is a flat weight vector whose coordinates are partitioned into one
block per latent variable.  A latent spec arranges variables into ordered
stages, each holding a set of positive (evidence) and negative
(counter-evidence) variables.  Scoring interleaves maximization over the
positive variables of a stage with minimization over its negative variables,
stage by stage:

    S(x) = max over stage-1 positives, min over stage-1 negatives,
           max over stage-2 positives, ... of  g(x, assignment)

where g is the signed linear score: the dot product of each variable's
weight block with its feature block, negated for negative variables (the
feature oracle always reports raw, positively oriented responses; the
counter-evidence sign is owned by the scoring layer).

Two inference routes are provided.  ``brute_force_saddle`` enumerates every
assignment and exists as an independent oracle for tests.
``score_canonical`` exploits the additive block structure: each variable's
block content may depend only on its own choice and its parent's choice, so
the game value decomposes over the dependency forest and is computed by
per-tree dynamic programming with cost quadratic in a single domain size.

Tie-breaking is deterministic everywhere: at every max/min level the
lexicographically smallest assignment-index vector wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import BudgetError, MisuseError

DEFAULT_BRUTE_BUDGET = 10_000
DEFAULT_STRUCTURED_BUDGET = 1_000_000

POSITIVE = +1
NEGATIVE = -1


@dataclass(frozen=True)
class BlockLayout:
    """Partition of weight coordinates into per-variable index ranges.

    ``blocks`` maps each latent variable name to a half-open ``[start, stop)``
    range.  Ranges must be pairwise disjoint and jointly cover
    ``[0, total_dim)``.
    """

    blocks: tuple[tuple[str, int, int], ...]
    total_dim: int

    def __post_init__(self):
        seen = set()
        covered = 0
        for name, start, stop in self.blocks:
            if name in seen:
                raise MisuseError(f"duplicate block for variable {name!r}")
            seen.add(name)
            if not (0 <= start < stop <= self.total_dim):
                raise MisuseError(
                    f"block {name!r} range [{start}, {stop}) out of "
                    f"[0, {self.total_dim})"
                )
            covered += stop - start
        if covered != self.total_dim:
            raise MisuseError(
                "blocks must be disjoint and cover all coordinates: "
                f"covered {covered} of {self.total_dim}"
            )
        spans = sorted((start, stop) for _, start, stop in self.blocks)
        for (_, prev_stop), (nxt_start, _) in zip(spans, spans[1:]):
            if nxt_start < prev_stop:
                raise MisuseError("block ranges overlap")

    @staticmethod
    def build(widths: Sequence[tuple[str, int]]) -> "BlockLayout":
        """Lay blocks out contiguously in the given order."""
        blocks = []
        offset = 0
        for name, width in widths:
            if width <= 0:
                raise MisuseError(f"block {name!r} must have positive width")
            blocks.append((name, offset, offset + width))
            offset += width
        return BlockLayout(blocks=tuple(blocks), total_dim=offset)

    def slice_of(self, name: str) -> slice:
        for block_name, start, stop in self.blocks:
            if block_name == name:
                return slice(start, stop)
        raise MisuseError(f"no block for variable {name!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _, _ in self.blocks)


@dataclass(frozen=True)
class Model:
    """Flat weight vector together with its block layout."""

    w: np.ndarray
    layout: BlockLayout

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        object.__setattr__(self, "w", w)
        if w.ndim != 1 or w.shape[0] != self.layout.total_dim:
            raise MisuseError(
                f"weight vector has {w.shape} but layout expects "
                f"({self.layout.total_dim},)"
            )


@dataclass(frozen=True)
class LatentVar:
    """One finite-domain latent variable."""

    name: str
    domain: int
    parent: Optional[str] = None

    def __post_init__(self):
        if self.domain < 1:
            raise MisuseError(f"variable {self.name!r} needs domain >= 1")


@dataclass(frozen=True)
class StageSpec:
    """Positive and negative variable sets of one stage."""

    positives: tuple[LatentVar, ...] = ()
    negatives: tuple[LatentVar, ...] = ()


@dataclass(frozen=True)
class LatentSpec:
    """Ordered stages of alternating positive/negative variable groups.

    Dependency edges (``parent`` fields) must form a forest.  Variables are
    bound in canonical order: stage by stage, positives before negatives,
    declaration order within a group.  The index vector of an assignment,
    and all lexicographic tie-breaks, follow this order.
    """

    stages: tuple[StageSpec, ...]

    def __post_init__(self):
        names = {}
        for var, _, _ in self._iter_vars():
            if var.name in names:
                raise MisuseError(f"duplicate variable name {var.name!r}")
            names[var.name] = var
        for var in names.values():
            if var.parent is not None and var.parent not in names:
                raise MisuseError(
                    f"variable {var.name!r} references unknown parent "
                    f"{var.parent!r}"
                )
        # Forest check: walking parent links from any node must terminate.
        for var in names.values():
            slow = var
            seen = set()
            while slow.parent is not None:
                if slow.name in seen:
                    raise MisuseError("dependency edges contain a cycle")
                seen.add(slow.name)
                slow = names[slow.parent]

    def _iter_vars(self) -> Iterator[tuple[LatentVar, int, int]]:
        """Yield (var, stage index, polarity) in canonical binding order."""
        for k, stage in enumerate(self.stages):
            for var in stage.positives:
                yield var, k, POSITIVE
            for var in stage.negatives:
                yield var, k, NEGATIVE

    @property
    def variables(self) -> tuple[LatentVar, ...]:
        return tuple(var for var, _, _ in self._iter_vars())

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def polarity(self, name: str) -> int:
        for var, _, pol in self._iter_vars():
            if var.name == name:
                return pol
        raise MisuseError(f"unknown variable {name!r}")

    def group_index(self, name: str) -> int:
        """Binding-group rank: 2*stage for positives, 2*stage+1 for negatives."""
        for var, k, pol in self._iter_vars():
            if var.name == name:
                return 2 * k + (0 if pol == POSITIVE else 1)
        raise MisuseError(f"unknown variable {name!r}")

    def var(self, name: str) -> LatentVar:
        for v in self.variables:
            if v.name == name:
                return v
        raise MisuseError(f"unknown variable {name!r}")

    @property
    def positive_names(self) -> tuple[str, ...]:
        return tuple(
            var.name for var, _, pol in self._iter_vars() if pol == POSITIVE
        )

    @property
    def negative_names(self) -> tuple[str, ...]:
        return tuple(
            var.name for var, _, pol in self._iter_vars() if pol == NEGATIVE
        )

    def assignment_count(self) -> int:
        count = 1
        for v in self.variables:
            count *= v.domain
        return count


@dataclass(frozen=True)
class LatentAssignment:
    """One concrete choice per (possibly partial set of) latent variable."""

    choices: tuple[tuple[str, int], ...]

    @staticmethod
    def of(mapping: Mapping[str, int]) -> "LatentAssignment":
        return LatentAssignment(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict[str, int]:
        return dict(self.choices)

    def get(self, name: str) -> int:
        for key, value in self.choices:
            if key == name:
                return value
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(key == name for key, _ in self.choices)

    def index_vector(self, spec: LatentSpec) -> tuple[int, ...]:
        """Chosen indices in canonical binding order (assigned variables only)."""
        lookup = self.as_dict()
        return tuple(
            lookup[v.name] for v in spec.variables if v.name in lookup
        )

    def merged(self, other: "LatentAssignment") -> "LatentAssignment":
        combined = self.as_dict()
        combined.update(other.as_dict())
        return LatentAssignment.of(combined)


def validate_assignment(
    spec: LatentSpec, assignment: LatentAssignment, names: Sequence[str]
) -> None:
    """Check that ``assignment`` covers exactly ``names`` with in-range choices."""
    lookup = assignment.as_dict()
    if set(lookup) != set(names):
        raise MisuseError(
            f"assignment covers {sorted(lookup)} but {sorted(names)} expected"
        )
    for name in names:
        domain = spec.var(name).domain
        if not (0 <= lookup[name] < domain):
            raise MisuseError(
                f"choice {lookup[name]} for {name!r} outside domain {domain}"
            )


@dataclass(frozen=True)
class Example:
    """A datum with a binary label; the payload is opaque to this module."""

    id: str
    payload: Any
    label: int = +1

    def __post_init__(self):
        if self.label not in (+1, -1):
            raise MisuseError(f"label must be +1 or -1, got {self.label}")


@dataclass(frozen=True)
class FeatureOracle:
    """Callable contract from (example, assignment) to a feature vector.

    The returned vector has ``layout.total_dim`` coordinates; blocks of
    variables omitted from the assignment are exactly zero.  Blocks hold the
    raw (positively oriented) response features; negation for negative
    variables is applied by the scorers, never by the oracle.

    Structured inference additionally relies on the declared dependency
    structure: the content of a variable's block may depend only on that
    variable's own choice and its parent's choice.  Oracles that couple
    blocks more widely are only safe with ``brute_force_saddle``.
    """

    layout: BlockLayout
    spec: LatentSpec
    fn: Callable[[Example, LatentAssignment], np.ndarray]

    def features(
        self, example: Example, assignment: LatentAssignment
    ) -> np.ndarray:
        phi = np.asarray(self.fn(example, assignment), dtype=np.float64)
        if phi.shape != (self.layout.total_dim,):
            raise MisuseError(
                f"oracle returned shape {phi.shape}, expected "
                f"({self.layout.total_dim},)"
            )
        return phi


def signed_features(
    oracle: FeatureOracle, example: Example, assignment: LatentAssignment
) -> np.ndarray:
    """Feature vector with negative variables' blocks negated.

    This is the gradient of the signed score g with respect to the weights;
    blocks of unassigned variables are forced to zero.
    """
    phi = oracle.features(example, assignment)
    out = np.zeros_like(phi)
    assigned = assignment.as_dict()
    for name in oracle.layout.names:
        if name not in assigned:
            continue
        sl = oracle.layout.slice_of(name)
        sign = 1.0 if oracle.spec.polarity(name) == POSITIVE else -1.0
        out[sl] = sign * phi[sl]
    return out


def assignment_value(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    assignment: LatentAssignment,
) -> float:
    """Signed linear score g at one assignment.

    Block dot products are accumulated in canonical variable order over the
    assigned variables only, so every inference route reports identical
    floats for identical assignments.
    """
    phi = oracle.features(example, assignment)
    assigned = assignment.as_dict()
    total = 0.0
    for var in oracle.spec.variables:
        if var.name not in assigned:
            continue
        sl = oracle.layout.slice_of(var.name)
        sign = 1.0 if oracle.spec.polarity(var.name) == POSITIVE else -1.0
        total += sign * float(np.dot(model.w[sl], phi[sl]))
    return total


def raw_block_value(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    assignment: LatentAssignment,
) -> float:
    """Unsigned sum of block dot products over the assigned variables."""
    phi = oracle.features(example, assignment)
    assigned = assignment.as_dict()
    total = 0.0
    for var in oracle.spec.variables:
        if var.name not in assigned:
            continue
        sl = oracle.layout.slice_of(var.name)
        total += float(np.dot(model.w[sl], phi[sl]))
    return total


# ---------------------------------------------------------------------------
# Brute-force inference (independent oracle for every structured route)
# ---------------------------------------------------------------------------


def brute_force_saddle(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    *,
    max_assignments: int = DEFAULT_BRUTE_BUDGET,
) -> tuple[float, LatentAssignment]:
    """Exhaustive interleaved max/min over every assignment.

    Plain recursion over the variables in canonical binding order with no
    structure exploitation.  Lexicographic tie-break at every level.
    """
    spec = oracle.spec
    if spec.assignment_count() > max_assignments:
        raise BudgetError(
            f"{spec.assignment_count()} assignments exceed the brute-force "
            f"budget of {max_assignments}"
        )
    variables = spec.variables
    polarities = [spec.polarity(v.name) for v in variables]

    def recurse(i: int, partial: dict[str, int]) -> tuple[float, dict[str, int]]:
        if i == len(variables):
            full = LatentAssignment.of(partial)
            return assignment_value(model, example, oracle, full), dict(partial)
        var = variables[i]
        best_val: Optional[float] = None
        best_tail: dict[str, int] = {}
        maximize = polarities[i] == POSITIVE
        for choice in range(var.domain):
            partial[var.name] = choice
            val, tail = recurse(i + 1, partial)
            better = (
                best_val is None
                or (maximize and val > best_val)
                or (not maximize and val < best_val)
            )
            if better:
                best_val, best_tail = val, tail
        del partial[var.name]
        return best_val, best_tail  # type: ignore[return-value]

    value, saddle = recurse(0, {})
    return value, LatentAssignment.of(saddle)


# ---------------------------------------------------------------------------
# Structured inference
# ---------------------------------------------------------------------------


@dataclass
class _ProbeTables:
    """Per-variable signed score tables u_v[choice, parent_choice]."""

    tables: dict[str, np.ndarray]
    parent_in_free: dict[str, bool]


def _build_tables(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    free: Sequence[LatentVar],
    fixed: Mapping[str, int],
    budget: int,
) -> _ProbeTables:
    spec = oracle.spec
    free_names = {v.name for v in free}
    # Fixed variables whose parent is free still contribute a term that
    # varies with the parent's choice; those terms fold into the parent's
    # own table so the joint optimum accounts for them.
    dependents: dict[str, list[LatentVar]] = {}
    for var in spec.variables:
        if var.name in free_names or var.name not in fixed:
            continue
        if var.parent is not None and var.parent in free_names:
            dependents.setdefault(var.parent, []).append(var)

    cost = 0
    for var in free:
        parent_card = 1
        if var.parent is not None and var.parent in free_names:
            parent_card = spec.var(var.parent).domain
        cost += var.domain * parent_card
        cost += var.domain * len(dependents.get(var.name, ()))
    if cost > budget:
        raise BudgetError(
            f"structured inference needs {cost} probe evaluations, over the "
            f"budget of {budget}"
        )

    base = dict(fixed)
    for var in free:
        base[var.name] = 0

    tables: dict[str, np.ndarray] = {}
    parent_in_free: dict[str, bool] = {}
    for var in free:
        sl = oracle.layout.slice_of(var.name)
        sign = 1.0 if spec.polarity(var.name) == POSITIVE else -1.0
        w_block = model.w[sl]
        parent_free = var.parent is not None and var.parent in free_names
        parent_in_free[var.name] = parent_free
        if parent_free:
            parent_dom = spec.var(var.parent).domain
        else:
            parent_dom = 1
        table = np.empty((var.domain, parent_dom))
        for choice in range(var.domain):
            for parent_choice in range(parent_dom):
                probe = dict(base)
                probe[var.name] = choice
                if parent_free:
                    probe[var.parent] = parent_choice
                phi = oracle.features(example, LatentAssignment.of(probe))
                table[choice, parent_choice] = sign * float(
                    np.dot(w_block, phi[sl])
                )
        for dep in dependents.get(var.name, ()):
            dep_sl = oracle.layout.slice_of(dep.name)
            dep_sign = 1.0 if spec.polarity(dep.name) == POSITIVE else -1.0
            dep_w = model.w[dep_sl]
            for choice in range(var.domain):
                probe = dict(base)
                probe[var.name] = choice
                phi = oracle.features(example, LatentAssignment.of(probe))
                table[choice, :] += dep_sign * float(np.dot(dep_w, phi[dep_sl]))
        tables[var.name] = table
    return _ProbeTables(tables=tables, parent_in_free=parent_in_free)


def _optimize_free(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    free: Sequence[LatentVar],
    fixed: Mapping[str, int],
    *,
    budget: int = DEFAULT_STRUCTURED_BUDGET,
    require_binding_order: bool = True,
) -> dict[str, int]:
    """Optimal choices for the free variables, each at its own polarity.

    Positive variables maximize, negative variables minimize, nested in
    canonical binding order.  Exact for oracles honoring the declared
    dependency structure; requires each free variable's parent (when also
    free) to be bound no later than the child.
    """
    spec = oracle.spec
    if not free:
        return {}
    free_names = {v.name for v in free}
    order = {name: i for i, name in enumerate(spec.variable_names)}
    if require_binding_order:
        for var in free:
            if var.parent is None or var.parent not in free_names:
                continue
            if spec.group_index(var.parent) > spec.group_index(var.name):
                raise MisuseError(
                    f"variable {var.name!r} is bound before its parent "
                    f"{var.parent!r}; structured inference requires parents "
                    "to be bound first"
                )
            if order[var.parent] > order[var.name]:
                raise MisuseError(
                    f"variable {var.name!r} is declared before its parent "
                    f"{var.parent!r} within the same group"
                )

    probes = _build_tables(model, example, oracle, free, fixed, budget)

    children: dict[str, list[LatentVar]] = {v.name: [] for v in free}
    roots: list[LatentVar] = []
    for var in free:
        if var.parent is not None and var.parent in free_names:
            children[var.parent].append(var)
        else:
            roots.append(var)

    # Bottom-up value tables: subtree[v][choice, parent_choice].
    subtree: dict[str, np.ndarray] = {}

    def solve(var: LatentVar) -> np.ndarray:
        """Game value of var's subtree as a function of the parent choice."""
        table = probes.tables[var.name].copy()  # (domain, parent_dom)
        for child in children[var.name]:
            child_vals = solve(child)  # (var.domain,)
            table += child_vals[:, np.newaxis]
        maximize = spec.polarity(var.name) == POSITIVE
        cache = table.max(axis=0) if maximize else table.min(axis=0)
        subtree[var.name] = table
        return cache

    for root in roots:
        solve(root)

    # Top-down extraction with lexicographic tie-break per variable.
    choices: dict[str, int] = {}

    def extract(var: LatentVar, parent_choice: int) -> None:
        table = subtree[var.name][:, parent_choice]
        maximize = spec.polarity(var.name) == POSITIVE
        target = table.max() if maximize else table.min()
        choice = int(np.flatnonzero(table == target)[0])
        choices[var.name] = choice
        for child in children[var.name]:
            extract(child, choice)

    for root in roots:
        extract(root, 0)
    return choices


def _check_budget_assignments(spec: LatentSpec, budget: int) -> None:
    if spec.assignment_count() > budget:
        raise BudgetError(
            f"{spec.assignment_count()} assignments exceed the configured "
            f"budget of {budget}"
        )


def score_canonical(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    *,
    budget: int = DEFAULT_STRUCTURED_BUDGET,
) -> tuple[float, LatentAssignment]:
    """Interleaved max/min score in canonical form with one optimal saddle.

    The value is recomputed from the saddle with ``assignment_value`` so that
    both inference routes report identical floats.
    """
    spec = oracle.spec
    choices = _optimize_free(
        model, example, oracle, spec.variables, {}, budget=budget
    )
    saddle = LatentAssignment.of(choices)
    return assignment_value(model, example, oracle, saddle), saddle


def score_lvm(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    *,
    budget: int = DEFAULT_STRUCTURED_BUDGET,
) -> tuple[float, LatentAssignment]:
    """Max-only score over an all-positive spec.

    Any spec with at least one negative variable is a misuse; multi-stage
    all-positive specs are accepted (nested maxima collapse to a joint max).
    """
    spec = oracle.spec
    if spec.negative_names:
        raise MisuseError(
            "score_lvm requires a spec without negative variables; "
            f"found {list(spec.negative_names)}"
        )
    return score_canonical(model, example, oracle, budget=budget)


def score_simple(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    *,
    budget: int = DEFAULT_STRUCTURED_BUDGET,
) -> tuple[float, LatentAssignment, LatentAssignment]:
    """Single-stage two-sided score: max positive raw score minus max
    negative raw score, with both argmaxes.

    Requires one stage with non-empty positive and negative sets and no
    dependency edge crossing between the polarities.
    """
    spec = oracle.spec
    if len(spec.stages) != 1:
        raise MisuseError("score_simple requires exactly one stage")
    stage = spec.stages[0]
    if not stage.positives or not stage.negatives:
        raise MisuseError(
            "score_simple requires non-empty positive and negative sets"
        )
    pos_names = {v.name for v in stage.positives}
    neg_names = {v.name for v in stage.negatives}
    for var in spec.variables:
        if var.parent is None:
            continue
        crosses = (var.name in pos_names) != (var.parent in pos_names)
        if crosses:
            raise MisuseError(
                "dependency crosses between positive and negative variables; "
                "use score_canonical"
            )

    pos_choices = _optimize_free(
        model, example, oracle, stage.positives, {}, budget=budget
    )
    # Negative variables minimize the negated raw score, so the engine's
    # argmin is exactly the raw argmax with the same lexicographic rule.
    neg_choices = _optimize_free(
        model, example, oracle, stage.negatives, {}, budget=budget
    )
    argmax_pos = LatentAssignment.of(pos_choices)
    argmax_neg = LatentAssignment.of(neg_choices)
    pos_value = raw_block_value(model, example, oracle, argmax_pos)
    neg_value = raw_block_value(model, example, oracle, argmax_neg)
    return pos_value - neg_value, argmax_pos, argmax_neg


def score_lssvm_binary(
    model: Model,
    example: Example,
    oracle_pos: FeatureOracle,
    oracle_neg: FeatureOracle,
    *,
    budget: int = DEFAULT_STRUCTURED_BUDGET,
) -> float:
    """Binary structural-SVM score: best foreground-conditional score minus
    best background-conditional score, both over the shared layout."""
    if oracle_pos.layout != oracle_neg.layout:
        raise MisuseError(
            "class-conditional oracles must share one block layout"
        )
    values = []
    for oracle in (oracle_pos, oracle_neg):
        if oracle.spec.negative_names:
            raise MisuseError(
                "class-conditional oracles use all-positive hidden variables"
            )
        choices = _optimize_free(
            model, example, oracle, oracle.spec.variables, {}, budget=budget
        )
        values.append(
            raw_block_value(model, example, oracle, LatentAssignment.of(choices))
        )
    return values[0] - values[1]


def pooled_maxmin(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    *,
    max_assignments: int = DEFAULT_BRUTE_BUDGET,
) -> float:
    """max over all positive assignments of min over all negative assignments."""
    return _pooled(model, example, oracle, max_first=True,
                   max_assignments=max_assignments)


def pooled_minmax(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    *,
    max_assignments: int = DEFAULT_BRUTE_BUDGET,
) -> float:
    """min over all negative assignments of max over all positive assignments."""
    return _pooled(model, example, oracle, max_first=False,
                   max_assignments=max_assignments)


def _pooled(
    model: Model,
    example: Example,
    oracle: FeatureOracle,
    *,
    max_first: bool,
    max_assignments: int,
) -> float:
    spec = oracle.spec
    _check_budget_assignments(spec, max_assignments)
    pos = [spec.var(n) for n in spec.positive_names]
    neg = [spec.var(n) for n in spec.negative_names]
    outer, inner = (pos, neg) if max_first else (neg, pos)

    def enumerate_joint(vars_: Sequence[LatentVar]) -> Iterator[dict[str, int]]:
        if not vars_:
            yield {}
            return
        head, rest = vars_[0], vars_[1:]
        for choice in range(head.domain):
            for tail in enumerate_joint(rest):
                out = {head.name: choice}
                out.update(tail)
                yield out

    best_outer: Optional[float] = None
    for outer_choice in enumerate_joint(outer):
        best_inner: Optional[float] = None
        for inner_choice in enumerate_joint(inner):
            full = dict(outer_choice)
            full.update(inner_choice)
            val = assignment_value(
                model, example, oracle, LatentAssignment.of(full)
            )
            if best_inner is None:
                best_inner = val
            elif max_first:
                best_inner = min(best_inner, val)
            else:
                best_inner = max(best_inner, val)
        assert best_inner is not None
        if best_outer is None:
            best_outer = best_inner
        elif max_first:
            best_outer = max(best_outer, best_inner)
        else:
            best_outer = min(best_outer, best_inner)
    assert best_outer is not None
    return best_outer
