from __future__ import annotations


class EntangleError(Exception):
    """Base class for library errors; ``exit_code`` is what the CLI returns."""

    exit_code = 3


class ParseError(EntangleError):
    """A state or graph file could not be read."""

    exit_code = 2


class InvalidStateError(EntangleError):
    """Input is well formed but is not a valid state for the requested operation."""


class DimensionError(EntangleError, ValueError):
    """Shapes, dimension vectors or subsystem indices are inconsistent."""


class NotHermitianError(InvalidStateError):
    pass


class NotPSDError(InvalidStateError):
    pass


class GraphKindError(EntangleError, ValueError):
    """Real and complex weighted graphs were mixed in one operation."""


class GraphEditError(EntangleError, ValueError):
    pass


class ThresholdError(EntangleError):
    """Bisection precondition failed (non-monotone witness)."""
