"""Per-error-type regressors mapping typological encodings to error distributions."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from esltypo.corpus.frequencies import Pooling, language_error_distribution
from esltypo.corpus.records import Corpus
from esltypo.regression.least_squares import DEFAULT_RTOL, fit_least_squares
from esltypo.shared.exceptions import DataError, DegeneratePredictionError, InsufficientDataError, UnknownLanguageError
from esltypo.typology.database import TypologyDatabase
from esltypo.typology.encoding import EncodedFeatureVector, Slot, encode, layout_hash
from esltypo.types import ERROR_TYPES, ErrorDistribution, ErrorType, FeatureMode
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

DEFAULT_EPSILON = 1e-6


class RegressorSet(BaseModel):
    """One linear model per error type, all sharing one encoder layout."""

    model_config = ConfigDict(frozen=True)

    mode: FeatureMode
    slots: tuple[Slot, ...]
    weights: dict[ErrorType, tuple[float, ...]]
    intercepts: dict[ErrorType, float]
    training_languages: tuple[str, ...]

    @model_validator(mode="after")
    def check_dimensions(self) -> RegressorSet:
        dimension = len(self.slots)
        for error_type, weights in self.weights.items():
            if len(weights) != dimension:
                raise ValueError(f"{error_type.value}: {len(weights)} weights for a {dimension}-dimensional layout")
        missing = [error_type.value for error_type in ERROR_TYPES if error_type not in self.weights]
        if missing:
            raise ValueError(f"No regressor for error type(s): {', '.join(missing)}")
        if set(self.weights) != set(self.intercepts):
            raise ValueError("Weights and intercepts must cover the same error types")
        return self

    @property
    def dimension(self) -> int:
        return len(self.slots)

    @property
    def layout_hash(self) -> str:
        return layout_hash(self.slots)

    def weight_matrix(self) -> np.ndarray:
        """Weights as an (error types x dimension) array in ErrorType order."""
        return np.array([self.weights[error_type] for error_type in ERROR_TYPES], dtype=float).reshape(
            len(ERROR_TYPES), self.dimension
        )

    def intercept_vector(self) -> np.ndarray:
        return np.array([self.intercepts[error_type] for error_type in ERROR_TYPES], dtype=float)

    def predict_raw(self, encoding: EncodedFeatureVector) -> np.ndarray:
        """Unnormalized per-type outputs, in ErrorType order."""
        if encoding.mode is not self.mode or encoding.dimension != self.dimension:
            raise DataError(
                f"Encoding ({encoding.mode.value}, {encoding.dimension} dims) does not match "
                f"models ({self.mode.value}, {self.dimension} dims)"
            )
        if encoding.layout_hash() != self.layout_hash:
            raise DataError("Encoding layout differs from the layout the models were trained on")
        return self.weight_matrix() @ encoding.as_array() + self.intercept_vector()


def train_on_encodings(
    encodings: Mapping[str, EncodedFeatureVector],
    targets: Mapping[str, ErrorDistribution],
    *,
    ridge: float = 0.0,
    rtol: float = DEFAULT_RTOL,
) -> RegressorSet:
    """Fit one least-squares model per error type on the given training languages."""
    languages = tuple(sorted(encodings))
    if len(languages) < 2:
        raise InsufficientDataError(f"Training needs at least 2 languages, got {len(languages)}")
    missing = sorted(language for language in languages if language not in targets)
    if missing:
        raise DataError(f"No target distribution for: {', '.join(missing)}")
    first = encodings[languages[0]]
    if any(encodings[language].slots != first.slots for language in languages):
        raise DataError("Training encodings do not share one layout")

    x = np.vstack([encodings[language].as_array() for language in languages])
    y = np.vstack([targets[language].as_array() for language in languages])
    weights: dict[ErrorType, tuple[float, ...]] = {}
    intercepts: dict[ErrorType, float] = {}
    for column, error_type in enumerate(ERROR_TYPES):
        fit = fit_least_squares(x, y[:, column], ridge=ridge, rtol=rtol)
        weights[error_type] = tuple(fit.weights.tolist())
        intercepts[error_type] = fit.intercept
    return RegressorSet(
        mode=first.mode,
        slots=first.slots,
        weights=weights,
        intercepts=intercepts,
        training_languages=languages,
    )


def training_languages(corpus: Corpus, typology: TypologyDatabase, held_out: str) -> tuple[str, ...]:
    """Corpus languages other than `held_out`; every one of them must have typology."""
    if held_out not in corpus.languages:
        raise UnknownLanguageError(f"Held-out language {held_out!r} is not in the corpus")
    languages = tuple(language for language in corpus.languages if language != held_out)
    unmatched = sorted(language for language in languages if language not in typology.languages)
    if unmatched:
        raise DataError(f"Corpus languages without typology: {', '.join(unmatched)}")
    return languages


def train_models(
    corpus: Corpus,
    typology: TypologyDatabase,
    mode: FeatureMode,
    held_out: str,
    *,
    ridge: float = 0.0,
    rtol: float = DEFAULT_RTOL,
    pooling: Pooling = "pooled",
) -> RegressorSet:
    """Train the regressors of one leave-one-out fold.

    Neither the target distribution nor the documents of `held_out` are read.
    """
    languages = training_languages(corpus, typology, held_out)
    encodings = {language: encode(typology, language, mode) for language in languages}
    targets = {language: language_error_distribution(corpus, language, pooling) for language in languages}
    models = train_on_encodings(encodings, targets, ridge=ridge, rtol=rtol)
    logger.debug(
        "Trained regressors",
        extra={"mode": mode.value, "held_out": held_out, "languages": len(languages), "dimension": models.dimension},
    )
    return models


def predict_distribution(
    models: RegressorSet,
    encoding: EncodedFeatureVector,
    *,
    epsilon: float = DEFAULT_EPSILON,
) -> ErrorDistribution:
    """Clamp raw outputs below at epsilon and renormalize them into a distribution.

    Raises:
        DegeneratePredictionError: every raw output is non-positive
    """
    raw = models.predict_raw(encoding)
    if np.all(raw <= 0.0):
        raise DegeneratePredictionError(f"All raw outputs are non-positive for {encoding.language}")
    return ErrorDistribution.from_array(np.maximum(raw, epsilon))


def clamp_distribution(distribution: ErrorDistribution, *, epsilon: float = DEFAULT_EPSILON) -> ErrorDistribution:
    """Floor every fraction at epsilon and renormalize, so that no error type has zero mass."""
    return ErrorDistribution.from_array(np.maximum(distribution.as_array(), epsilon))
