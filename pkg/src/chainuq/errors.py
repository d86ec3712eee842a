"""Exception types shared across the package."""


class ChainUQError(Exception):
    """Base class for all package-specific errors."""


class EmptyChainError(ChainUQError):
    """A chain or visit-count vector contains no observations."""


class InsufficientTransitionsError(ChainUQError):
    """A chain is too short to contain a single transition."""


class EmptyMergeError(ChainUQError):
    """An empty collection of count matrices was merged."""


class ChainFileError(ChainUQError):
    """A chain file could not be parsed."""


class DegenerateRowError(ChainUQError):
    """A transition-matrix row has no strictly positive Dirichlet parameter."""

    def __init__(self, label, message=None):
        self.label = label
        super().__init__(
            message or f"row for model {label!r} has all-zero counts and "
            "all-zero prior weight; its posterior is undefined"
        )


class NonStochasticError(ChainUQError):
    """A matrix violates the row-stochastic contract."""


class NoUniqueStationaryError(ChainUQError):
    """The stationary distribution is not unique (or could not be resolved)."""


class DomainError(ChainUQError):
    """An argument is outside a special function's domain."""


class DegenerateSamplesError(ChainUQError):
    """Simplex samples are unusable for a Dirichlet fit."""


class LabelError(ChainUQError):
    """A requested model label is unknown."""


class ConfigError(ChainUQError):
    """Invalid run configuration."""
