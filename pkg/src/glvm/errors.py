"""Error taxonomy shared by all modules.

Callers can rely on the split: MisuseError for contract violations in the
inputs, BudgetError for refused work, NumericError for non-finite values,
InvariantViolationError for internal guarantees that failed (these indicate
a bug, not bad input).
"""


class MisuseError(ValueError):
    """An operation was called with inputs that violate its contract."""


class BudgetError(RuntimeError):
    """Requested computation exceeds the configured enumeration budget."""


class CacheCapacityError(BudgetError):
    """Hard-example cache cannot hold the active set.

    ``required`` is the minimal capacity that would have sufficed.
    """

    def __init__(self, required: int, capacity: int):
        super().__init__(
            f"cache capacity {capacity} is below the active set size; "
            f"at least {required} slots are required"
        )
        self.required = required
        self.capacity = capacity


class NumericError(ArithmeticError):
    """A non-finite value appeared where a finite one is guaranteed."""


class InvariantViolationError(RuntimeError):
    """A mathematical invariant of the training procedure was violated."""
