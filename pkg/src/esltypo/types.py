"""
Shared domain types for the error-distribution pipeline.

Error types follow the rank order of the 20 most frequent structural error types in
the learner corpus; every vector representation of an `ErrorDistribution` uses that
order.
"""

from collections.abc import Iterable, Mapping
from enum import Enum
from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, field_validator, model_validator

DISTRIBUTION_TOLERANCE = 1e-9


class ErrorType(str, Enum):
    TV = "TV"
    RT = "RT"
    MD = "MD"
    FV = "FV"
    W = "W"
    MT = "MT"
    UD = "UD"
    UT = "UT"
    MA = "MA"
    AGV = "AGV"
    FN = "FN"
    RA = "RA"
    AGN = "AGN"
    RD = "RD"
    DJ = "DJ"
    DN = "DN"
    DY = "DY"
    UA = "UA"
    MC = "MC"
    RC = "RC"

    @property
    def display_name(self) -> str:
        return ERROR_TYPE_NAMES[self]

    @classmethod
    def parse(cls, code: str) -> "ErrorType":
        """Look up an error type by its code, raising ValueError naming the code."""
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"Unknown error code: {code!r}") from None


ERROR_TYPES: tuple[ErrorType, ...] = tuple(ErrorType)
ERROR_CODES: frozenset[str] = frozenset(error_type.value for error_type in ErrorType)

ERROR_TYPE_NAMES: dict[ErrorType, str] = {
    ErrorType.TV: "Verb Tense",
    ErrorType.RT: "Replace Preposition",
    ErrorType.MD: "Missing Determiner",
    ErrorType.FV: "Wrong Verb Form",
    ErrorType.W: "Word Order",
    ErrorType.MT: "Missing Preposition",
    ErrorType.UD: "Unnecessary Determiner",
    ErrorType.UT: "Unnecessary Preposition",
    ErrorType.MA: "Missing Pronoun",
    ErrorType.AGV: "Verb Agreement",
    ErrorType.FN: "Wrong Noun Form",
    ErrorType.RA: "Replace Pronoun",
    ErrorType.AGN: "Noun Agreement",
    ErrorType.RD: "Replace Determiner",
    ErrorType.DJ: "Wrongly Derived Adjective",
    ErrorType.DN: "Wrongly Derived Noun",
    ErrorType.DY: "Wrongly Derived Adverb",
    ErrorType.UA: "Unnecessary Pronoun",
    ErrorType.MC: "Missing Conjunction",
    ErrorType.RC: "Replace Conjunction",
}


class FeatureMode(str, Enum):
    """Encoder mode: native typology only, or typology plus divergences from English."""

    REG = "Reg"
    REG_CA = "RegCA"


class System(str, Enum):
    BASE = "Base"
    NN = "NN"
    REG = "Reg"
    REG_CA = "RegCA"

    @property
    def feature_mode(self) -> FeatureMode | None:
        if self is System.REG:
            return FeatureMode.REG
        if self is System.REG_CA:
            return FeatureMode.REG_CA
        return None


SYSTEMS: tuple[System, ...] = tuple(System)


class ErrorDistribution(BaseModel):
    """Relative frequencies over the 20 error types; always sums to one."""

    model_config = ConfigDict(frozen=True)

    fractions: dict[ErrorType, Annotated[float, Field(ge=0.0, le=1.0 + DISTRIBUTION_TOLERANCE)]]

    @field_validator("fractions")
    @classmethod
    def fill_missing_types(cls, fractions: dict[ErrorType, float]) -> dict[ErrorType, float]:
        return {error_type: float(fractions.get(error_type, 0.0)) for error_type in ERROR_TYPES}

    @model_validator(mode="after")
    def check_total(self) -> "ErrorDistribution":
        total = sum(self.fractions.values())
        if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
            raise ValueError(f"Error fractions must sum to 1, got {total!r}")
        return self

    def __getitem__(self, error_type: ErrorType) -> float:
        return self.fractions[error_type]

    def as_array(self) -> np.ndarray:
        return np.array([self.fractions[error_type] for error_type in ERROR_TYPES], dtype=float)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "ErrorDistribution":
        """Build a distribution from non-negative values in ErrorType order, normalizing them."""
        array = np.asarray(list(values), dtype=float)
        if array.shape != (len(ERROR_TYPES),):
            raise ValueError(f"Expected {len(ERROR_TYPES)} values, got shape {array.shape}")
        if np.any(array < 0):
            raise ValueError("Error fractions must be non-negative")
        total = float(array.sum())
        if total <= 0:
            raise ValueError("Cannot normalize an all-zero error vector")
        return cls(fractions=dict(zip(ERROR_TYPES, (array / total).tolist(), strict=True)))

    @classmethod
    def from_counts(cls, counts: Mapping[ErrorType, float]) -> "ErrorDistribution":
        return cls.from_array(counts.get(error_type, 0) for error_type in ERROR_TYPES)


class Document(BaseModel):
    """One error-annotated ESL essay; only the structural error counts are kept."""

    model_config = ConfigDict(frozen=True)

    doc_id: str = Field(min_length=1)
    native_language: str = Field(min_length=1)
    word_count: PositiveInt
    error_counts: dict[ErrorType, NonNegativeInt] = Field(default_factory=dict)

    @property
    def total_errors(self) -> int:
        return sum(self.error_counts.values())


class PredictionRecord(BaseModel):
    """Predicted and true error distribution of one held-out language for one system."""

    model_config = ConfigDict(frozen=True)

    language: str
    system: System
    predicted: ErrorDistribution
    truth: ErrorDistribution
    fallback: bool = False
    """Set when a regression fold produced a degenerate prediction and Base was used."""
