"""Exception types shared across the simulator."""


class PrinsError(Exception):
    """Base class for all simulator errors."""


class BoundsError(PrinsError, ValueError):
    """A field or row index falls outside the array geometry."""


class EmptySelectionError(PrinsError, ValueError):
    """An operation required at least one tagged row but none was set."""


class HazardError(PrinsError, ValueError):
    """Truth-table input and output columns overlap."""


class LayoutError(PrinsError, ValueError):
    """A row layout does not fit the array or its fields collide."""


class DimensionError(PrinsError, ValueError):
    """Dataset dimensions are inconsistent with the requested kernel."""


class ParseError(PrinsError, ValueError):
    """A dataset file is malformed.

    Carries the 1-based line number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ReportError(PrinsError, ValueError):
    """A performance report cannot be built from the given ledger."""
