"""Exception hierarchy.

Two families: ``ParseError`` for malformed input documents and
``ValidationError`` for well-formed input that violates a contract.
The CLI maps them to distinct exit codes.
"""


class VirtImuError(Exception):
    """Base class for all package errors."""


class ParseError(VirtImuError, ValueError):
    """Input text could not be decoded into the expected structure."""


class SchemaError(ParseError):
    """A required field is missing or has the wrong type/shape."""


class NonFiniteError(ParseError):
    """A NaN or infinity was found where a finite number is required."""


class ColumnMismatchError(ParseError):
    """CSV header does not match the expected column layout."""


class RaggedRowError(ParseError):
    """A CSV row has the wrong number of fields."""


class EmptyTraceError(ParseError):
    """A CSV file has a header but no data rows."""


class ValidationError(VirtImuError, ValueError):
    """Structurally valid input that breaks a precondition."""


class HierarchyError(ValidationError):
    """Joint parents do not form a topologically sorted tree."""


class InvalidRateError(ValidationError):
    """Sampling rate is not a positive finite number."""


class ShapeError(ValidationError):
    """Array shapes or lengths do not agree."""


class DegenerateInputError(ValidationError):
    """Input is too short or geometrically degenerate for the operation."""
