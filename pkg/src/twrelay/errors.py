"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class RankDeficiencyError(InvalidInputError):
    """A matrix that must have full column rank does not.

    Raised, for example, when zero-forcing beamformers are requested for
    parallel (fully correlated) channels, where the pseudo-inverse needed
    by the construction does not exist.
    """


class NumericalFailureError(RuntimeError):
    """An iterative routine failed to converge or lost its invariants."""
