"""Exceptions raised by the topological Ramsey extraction package."""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .convergence import ConvergenceCertificate


class RamseyError(Exception):
    """Base class of all package errors."""


class FuelExhausted(RamseyError):
    """A materialization or oracle budget ran out before the result existed."""

    def __init__(
        self,
        message: str,
        *,
        prefix: tuple[int, ...] = (),
        live: dict[Any, int] | None = None,
        partial: "ConvergenceCertificate | None" = None,
    ) -> None:
        """Initialize with the progress made so far."""
        super().__init__(message)
        self.prefix: tuple[int, ...] = prefix
        self.live: dict[Any, int] = dict(live or {})
        self.partial: "ConvergenceCertificate | None" = partial


class StreamExhausted(FuelExhausted):
    """A finite stream has no further elements."""


class ChainViolation(RamseyError):
    """A chain passed to pseudo_intersection is not decreasing."""


class SpaceMismatch(RamseyError):
    """A point does not belong to the space it is used with."""


class NotCovered(RamseyError):
    """A point lies in no ball of a cover level."""


class DimensionMismatch(RamseyError):
    """Tuple dimensions do not agree."""


class InsufficientLength(RamseyError):
    """A finite set is too short for the requested construction."""


class UnknownFixture(RamseyError):
    """No fixture is registered under the requested name."""


class ExpressionSyntaxError(RamseyError):
    """Malformed expression source."""

    def __init__(self, message: str, position: int) -> None:
        """Initialize with the 1-based character position of the error."""
        super().__init__(f"{message} at position {position}")
        self.position: int = position


class ExpressionTypeError(RamseyError):
    """Expression is ill-typed or does not match the target space."""


class EvaluationError(RamseyError):
    """Expression evaluation failed on a concrete tuple."""


class ConfigError(RamseyError):
    """Invalid run configuration."""
