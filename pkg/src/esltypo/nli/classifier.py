"""L2-regularized log-linear native language classifier."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

from esltypo.nli.profiles import MorphoSyntacticProfile
from esltypo.shared.exceptions import InsufficientDataError, OptimizationError
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

DEFAULT_MAX_ITERATIONS = 2000
DEFAULT_GRADIENT_TOLERANCE = 1e-5


@dataclass(frozen=True)
class FeatureIndex:
    """Column order of the design matrix; features unseen in training are ignored."""

    names: tuple[str, ...]

    @classmethod
    def from_profiles(cls, profiles: Sequence[MorphoSyntacticProfile]) -> FeatureIndex:
        return cls(names=tuple(sorted({name for profile in profiles for name in profile.feature_values})))

    def matrix(self, profiles: Sequence[MorphoSyntacticProfile]) -> np.ndarray:
        """Design matrix with a trailing constant column for the class biases."""
        columns = {name: index for index, name in enumerate(self.names)}
        x = np.zeros((len(profiles), len(self.names) + 1), dtype=float)
        x[:, -1] = 1.0
        for row, profile in enumerate(profiles):
            for name, value in profile.feature_values.items():
                column = columns.get(name)
                if column is not None:
                    x[row, column] = value
        return x


def objective_and_gradient(
    theta: np.ndarray, x: np.ndarray, y: np.ndarray, n_classes: int, regularization: float
) -> tuple[float, np.ndarray]:
    """Negative regularized conditional log-likelihood and its gradient.

    `theta` is the row-major flattening of the (classes x columns) weight matrix and
    `y` holds class indices.
    """
    weights = theta.reshape(n_classes, x.shape[1])
    logits = x @ weights.T
    log_probabilities = logits - logsumexp(logits, axis=1, keepdims=True)
    rows = np.arange(x.shape[0])
    value = -float(log_probabilities[rows, y].sum()) + 0.5 * regularization * float(theta @ theta)

    residual = np.exp(log_probabilities)
    residual[rows, y] -= 1.0
    gradient = residual.T @ x + regularization * weights
    return value, gradient.reshape(-1)


@dataclass(frozen=True)
class LogLinearModel:
    """p(l | x) proportional to exp(w_l . x + b_l)."""

    classes: tuple[str, ...]
    features: FeatureIndex
    coefficients: np.ndarray
    """(classes x (features + 1)) array; the last column holds the biases."""
    regularization: float
    log_likelihood_trace: tuple[float, ...] = ()
    """Regularized log-likelihood after each optimizer iteration."""
    gradient_norm: float = 0.0

    @property
    def weights(self) -> dict[tuple[str, str], float]:
        return {
            (language, name): float(self.coefficients[row, column])
            for row, language in enumerate(self.classes)
            for column, name in enumerate(self.features.names)
        }

    def predict_proba(self, profiles: Sequence[MorphoSyntacticProfile]) -> np.ndarray:
        """Posterior matrix (documents x classes), columns in `classes` order."""
        return softmax(self.features.matrix(profiles) @ self.coefficients.T, axis=1)

    def predict(self, profiles: Sequence[MorphoSyntacticProfile]) -> list[str]:
        return [self.classes[index] for index in self.predict_proba(profiles).argmax(axis=1)]

    def accuracy(self, profiles: Sequence[MorphoSyntacticProfile]) -> float:
        if not profiles:
            return 0.0
        predicted = self.predict(profiles)
        return sum(label == profile.native_language for label, profile in zip(predicted, profiles)) / len(profiles)


def train_classifier(
    profiles: Sequence[MorphoSyntacticProfile],
    regularization: float = 1.0,
    *,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    gradient_tolerance: float = DEFAULT_GRADIENT_TOLERANCE,
    min_documents_per_class: int = 2,
) -> LogLinearModel:
    """Fit the classifier with L-BFGS starting from all-zero weights.

    Raises:
        InsufficientDataError: fewer than two classes, or a class below `min_documents_per_class`
        OptimizationError: the gradient norm is still above tolerance after the iteration budget
    """
    if regularization < 0:
        raise ValueError("regularization must be non-negative")
    classes = tuple(sorted({profile.native_language for profile in profiles}))
    if len(classes) < 2:
        raise InsufficientDataError(f"The classifier needs at least 2 languages, got {len(classes)}")
    sizes = {language: sum(profile.native_language == language for profile in profiles) for language in classes}
    small = sorted(language for language, size in sizes.items() if size < min_documents_per_class)
    if small:
        raise InsufficientDataError(
            f"Languages with fewer than {min_documents_per_class} documents: {', '.join(small)}"
        )

    features = FeatureIndex.from_profiles(profiles)
    x = features.matrix(profiles)
    class_index = {language: index for index, language in enumerate(classes)}
    y = np.array([class_index[profile.native_language] for profile in profiles], dtype=int)
    n_parameters = len(classes) * x.shape[1]

    trace: list[float] = []

    def record(theta: np.ndarray) -> None:
        trace.append(-objective_and_gradient(theta, x, y, len(classes), regularization)[0])

    result = minimize(
        objective_and_gradient,
        np.zeros(n_parameters),
        args=(x, y, len(classes), regularization),
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={"maxiter": max_iterations, "gtol": gradient_tolerance / np.sqrt(n_parameters), "ftol": 0.0},
    )
    _, gradient = objective_and_gradient(result.x, x, y, len(classes), regularization)
    gradient_norm = float(np.linalg.norm(gradient))
    if gradient_norm > gradient_tolerance:
        raise OptimizationError(
            f"Classifier did not converge in {result.nit} iterations ({result.message})", gradient_norm
        )
    logger.debug(
        "Trained native language classifier",
        extra={"classes": len(classes), "features": len(features.names), "iterations": result.nit},
    )
    return LogLinearModel(
        classes=classes,
        features=features,
        coefficients=result.x.reshape(len(classes), x.shape[1]),
        regularization=regularization,
        log_likelihood_trace=tuple(trace),
        gradient_norm=gradient_norm,
    )
