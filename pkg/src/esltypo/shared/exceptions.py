"""Exceptions raised by esltypo."""

from pathlib import Path


class EslTypoError(Exception):
    """Base error for esltypo."""


class InputError(EslTypoError):
    """Error caused by the data or configuration handed to the pipeline."""


class ParseError(InputError):
    """
    A row of an input file could not be parsed.
    """

    path: Path | None
    line_number: int | None

    def __init__(self, message: str, *, path: Path | str | None = None, line_number: int | None = None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line_number is not None:
                location += f":{line_number}"
            location += ": "
        elif line_number is not None:
            location = f"line {line_number}: "
        super().__init__(f"{location}{message}")
        self.path = Path(path) if path is not None else None
        self.line_number = line_number


class DataError(InputError):
    """Parseable data that violates an invariant (duplicates, unknown codes, ...)."""


class UnknownLanguageError(InputError, KeyError):
    """A language code that is not present in the queried collection."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class UnknownErrorTypeError(InputError, KeyError):
    """An error type that is not present in the queried models."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ConfigurationError(InputError):
    """Inconsistent configuration, e.g. no English typology or no Base records."""


class InsufficientDataError(InputError):
    """Too few rows, languages, documents or folds for the requested operation."""


class EmptyProfileError(InputError):
    """A parsed document without any token."""


class EmptySampleError(EslTypoError):
    """A document without any structural error has no fraction vector."""


class UndefinedSimilarityError(EslTypoError):
    """Cosine similarity with an all-zero encoding."""


class DegeneratePredictionError(EslTypoError):
    """Every raw regression output was non-positive."""


class DomainError(EslTypoError):
    """A metric was evaluated outside of its domain."""


class OptimizationError(EslTypoError):
    """
    The classifier optimizer stopped before reaching the gradient tolerance.
    """

    gradient_norm: float

    def __init__(self, message: str, gradient_norm: float):
        super().__init__(f"{message} (gradient norm {gradient_norm:.3e})")
        self.gradient_norm = gradient_norm
