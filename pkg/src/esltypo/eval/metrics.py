"""Distances between predicted and true error distributions."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np
from scipy.special import rel_entr

from esltypo.shared.exceptions import DomainError
from esltypo.types import ErrorDistribution, ErrorType, PredictionRecord

PERCENT = 100.0


def absolute_error(predicted: ErrorDistribution, truth: ErrorDistribution, error_type: ErrorType) -> float:
    """|predicted - true| relative frequency of one error type, on the 0-1 scale."""
    return abs(predicted[error_type] - truth[error_type])


def absolute_errors(predicted: ErrorDistribution, truth: ErrorDistribution) -> np.ndarray:
    """Per-type absolute errors in ErrorType order."""
    return np.abs(predicted.as_array() - truth.as_array())


def kl_divergence(truth: ErrorDistribution, predicted: ErrorDistribution) -> float:
    """D_KL(truth || predicted) in nats; zero-probability truth entries contribute nothing.

    Raises:
        DomainError: predicted is zero where truth is positive
    """
    value = float(np.sum(rel_entr(truth.as_array(), predicted.as_array())))
    if not np.isfinite(value):
        raise DomainError("Predicted distribution is zero on the support of the true distribution")
    return max(value, 0.0)


def mean_absolute_error(records: Iterable[PredictionRecord], *, scale: float = PERCENT) -> float:
    """Mean over every (language, error type) cell, multiplied by `scale`."""
    errors = [absolute_errors(record.predicted, record.truth) for record in records]
    if not errors:
        raise ValueError("No records to average")
    return float(np.mean(np.concatenate(errors))) * scale
