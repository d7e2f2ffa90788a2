"""Exception types shared across the package."""

from __future__ import annotations


class CatalignError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(CatalignError):
    """Shapes or dimensions of the inputs are incompatible."""


class NonFiniteDataError(CatalignError):
    """Input contains NaN or infinite values."""


class DegenerateDataError(CatalignError):
    """Data carries no variance, so no subspace can be extracted."""


class InsufficientSamplesError(CatalignError):
    """Too few samples for the requested subspace dimension."""


class UnknownCategoryError(CatalignError):
    """A referenced category does not exist in the dataset."""


class DegenerateEvolutionError(CatalignError):
    """Every remaining candidate category is unscorable."""


class LengthMismatchError(CatalignError):
    """Paired sequences differ in length."""


class EmptyPoolError(CatalignError):
    """A source pool needs at least one domain."""


class UncoverableLabelError(CatalignError):
    """A required target label exists in no source domain."""


class DataFormatError(CatalignError):
    """Base class for on-disk format problems."""


class ParseError(DataFormatError):
    """A text file could not be parsed.

    Carries 1-based ``row`` and ``column`` locations when they are known.
    """

    def __init__(self, message: str, *, row: int | None = None, column: int | None = None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + loc)
        self.row = row
        self.column = column


class RaggedRowsError(ParseError):
    """A row has a different number of cells than the header."""


class NonNumericFeatureError(ParseError):
    """A feature cell could not be read as a number."""


class BadMagicError(DataFormatError):
    """A binary file does not start with the expected magic bytes."""


class UnsupportedVersionError(DataFormatError):
    """A binary file declares a format version this build cannot read."""


class TruncatedFileError(DataFormatError):
    """A binary file ends before its declared contents."""


class InfeasibleGeometryError(CatalignError):
    """Requested cluster geometry cannot be realized in the given dimension."""
