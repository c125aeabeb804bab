"""Exception types shared across the package."""


class MetFatigueError(ValueError):
    """Base class for all input/domain errors raised by this package."""


class InfeasibleLoadError(MetFatigueError):
    """The initial load already exceeds MVC, so no endurance crossing exists."""


class DomainError(MetFatigueError):
    """An empirical MET model was evaluated outside its valid f_MVC domain."""

    def __init__(self, model_id, bound, value):
        self.model_id = model_id
        self.bound = bound
        self.value = value
        super().__init__(
            f"model {model_id!r}: f_MVC={value!r} outside valid domain ({bound})"
        )


class CatalogError(MetFatigueError):
    """Malformed model-catalog document."""


class DegenerateInputError(MetFatigueError):
    """Statistic is undefined for the given series (zero variance, empty sums)."""
