"""Minimax latent variable models with counter-evidence.

Scoring functions that maximize over evidence (positive) latent variables
and minimize over counter-evidence (negative) ones, a bound-alternation
trainer for the resulting non-convex hinge objectives, and three model
families built on top: deformable part models with negative parts, Hough
voting with negative votes, and And-Or-Nor trees.
"""

from .core import (
    BlockLayout,
    Example,
    FeatureOracle,
    LatentAssignment,
    LatentSpec,
    LatentVar,
    Model,
    StageSpec,
    assignment_value,
    brute_force_saddle,
    pooled_maxmin,
    pooled_minmax,
    score_canonical,
    score_lssvm_binary,
    score_lvm,
    score_simple,
    signed_features,
)
from .errors import (
    BudgetError,
    CacheCapacityError,
    InvariantViolationError,
    MisuseError,
    NumericError,
)

__all__ = [
    "BlockLayout",
    "BudgetError",
    "CacheCapacityError",
    "Example",
    "FeatureOracle",
    "InvariantViolationError",
    "LatentAssignment",
    "LatentSpec",
    "LatentVar",
    "MisuseError",
    "Model",
    "NumericError",
    "StageSpec",
    "assignment_value",
    "brute_force_saddle",
    "pooled_maxmin",
    "pooled_minmax",
    "score_canonical",
    "score_lssvm_binary",
    "score_lvm",
    "score_simple",
    "signed_features",
]

__version__ = "0.1.0"
