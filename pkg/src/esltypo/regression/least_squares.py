"""Minimum-norm least squares via the singular value decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from esltypo.shared.exceptions import InsufficientDataError

DEFAULT_RTOL = 1e-10


@dataclass(frozen=True)
class LeastSquaresFit:
    """Weight vector and intercept of one fitted linear model."""

    weights: np.ndarray
    intercept: float

    def predict(self, features: ArrayLike) -> np.ndarray | float:
        return np.asarray(features, dtype=float) @ self.weights + self.intercept


def _solve(x: np.ndarray, y: np.ndarray, ridge: float, rtol: float) -> np.ndarray:
    """Minimum-norm (optionally ridge-shrunk) solution of x @ theta ~= y.

    Singular values below rtol * sigma_max are treated as zero.
    """
    if x.shape[1] == 0:
        return np.zeros(0, dtype=float)
    u, singular, vt = np.linalg.svd(x, full_matrices=False)
    if singular[0] == 0.0:
        return np.zeros(x.shape[1], dtype=float)
    keep = singular > rtol * singular[0]
    scale = np.zeros_like(singular)
    scale[keep] = singular[keep] / (singular[keep] ** 2 + ridge)
    return vt.T @ (scale * (u.T @ y))


def fit_least_squares(
    x: ArrayLike,
    y: ArrayLike,
    *,
    fit_intercept: bool = True,
    ridge: float = 0.0,
    rtol: float = DEFAULT_RTOL,
) -> LeastSquaresFit:
    """Fit y ~= x @ weights + intercept by ordinary least squares.

    Underdetermined systems get the minimum-norm solution. The intercept is fitted
    by centering the columns of x and the targets, so it is never shrunk by the
    optional ridge term.

    Raises:
        InsufficientDataError: fewer than two rows with an intercept, or no rows at all
    """
    design = np.atleast_2d(np.asarray(x, dtype=float))
    targets = np.asarray(y, dtype=float).reshape(-1)
    n_rows = design.shape[0]
    if targets.shape[0] != n_rows:
        raise ValueError(f"x has {n_rows} rows but y has {targets.shape[0]} values")
    minimum = 2 if fit_intercept else 1
    if n_rows < minimum:
        raise InsufficientDataError(f"Least squares needs at least {minimum} rows, got {n_rows}")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")

    if not fit_intercept:
        return LeastSquaresFit(weights=_solve(design, targets, ridge, rtol), intercept=0.0)

    column_means = design.mean(axis=0)
    target_mean = float(targets.mean())
    weights = _solve(design - column_means, targets - target_mean, ridge, rtol)
    return LeastSquaresFit(weights=weights, intercept=target_mean - float(column_means @ weights))
