"""Exception types shared across the package."""


class TailTestError(Exception):
    """Base class for all package-specific errors."""


class DomainError(TailTestError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(TailTestError, ValueError):
    """An invalid combination of configuration values."""


class ShapeError(TailTestError, ValueError):
    """Mismatched dimensions between inputs that must agree."""


class DegenerateMarginError(TailTestError, ValueError):
    """A marginal CDF evaluated to 1, making the Pareto transform blow up."""

    def __init__(self, coordinate: int, row: int):
        self.coordinate = coordinate
        self.row = row
        super().__init__(
            f"marginal CDF returned 1 at coordinate {coordinate}, row {row}; "
            "the Pareto transform 1/(1-F) is undefined there"
        )


class InsufficientDataError(TailTestError, ValueError):
    """Too few observations for the requested operation."""


class InsufficientTailError(TailTestError, ValueError):
    """Too few exceedances above the requested threshold."""


class NumericalError(TailTestError, RuntimeError):
    """A numerical routine failed to converge."""


class FormatError(TailTestError, ValueError):
    """An input file does not match the documented format."""
