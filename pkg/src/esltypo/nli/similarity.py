"""Language similarity from the confusion of an out-of-sample native language classifier."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import anyio
import anyio.to_thread
import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from esltypo.nli.classifier import DEFAULT_GRADIENT_TOLERANCE, DEFAULT_MAX_ITERATIONS, train_classifier
from esltypo.nli.profiles import MorphoSyntacticProfile
from esltypo.shared.exceptions import DataError, InsufficientDataError, UnknownLanguageError
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

SIMILARITY_TOLERANCE = 1e-9


class SimilarityMatrix(BaseModel):
    """Square language x language similarities in [0, 1] with a unit diagonal."""

    model_config = ConfigDict(frozen=True)

    languages: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    @model_validator(mode="after")
    def check_matrix(self) -> SimilarityMatrix:
        n = len(self.languages)
        if len(set(self.languages)) != n:
            raise ValueError("Duplicate languages in similarity matrix")
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValueError(f"Similarity matrix must be {n}x{n}")
        array = self.as_array()
        if np.any(array < -SIMILARITY_TOLERANCE) or np.any(array > 1.0 + SIMILARITY_TOLERANCE):
            raise ValueError("Similarities must lie in [0, 1]")
        if n and not np.allclose(np.diag(array), 1.0, rtol=0.0, atol=SIMILARITY_TOLERANCE):
            raise ValueError("Self-similarity must be 1")
        return self

    @classmethod
    def from_array(cls, languages: Sequence[str], array: np.ndarray) -> SimilarityMatrix:
        return cls(languages=tuple(languages), values=tuple(tuple(float(value) for value in row) for row in array))

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float).reshape(len(self.languages), len(self.languages))

    def index(self, language: str) -> int:
        try:
            return self.languages.index(language)
        except ValueError:
            raise UnknownLanguageError(f"Language {language!r} is not in the similarity matrix") from None

    def get(self, first: str, second: str) -> float:
        return self.values[self.index(first)][self.index(second)]

    def is_symmetric(self, tolerance: float = SIMILARITY_TOLERANCE) -> bool:
        array = self.as_array()
        return bool(np.allclose(array, array.T, rtol=0.0, atol=tolerance))

    def write_tsv(self, destination: Path | str, header: str | None = None) -> None:
        """Matrix with language codes as header row and first column."""
        with Path(destination).open("w", encoding="utf-8", newline="") as handle:
            if header:
                handle.write(header + "\n")
            writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
            writer.writerow(["", *self.languages])
            for language, row in zip(self.languages, self.values, strict=True):
                writer.writerow([language, *(f"{value:.6f}" for value in row)])


def fold_assignments(profiles: Sequence[MorphoSyntacticProfile], folds: int, seed: int) -> tuple[int, ...]:
    """Fold index per document: each language's documents are shuffled, then dealt round-robin.

    Every fold therefore holds documents of every language.

    Raises:
        InsufficientDataError: a language has fewer documents than folds
    """
    if folds < 2:
        raise InsufficientDataError(f"Cross-validation needs at least 2 folds, got {folds}")
    by_language: dict[str, list[int]] = {}
    for index, profile in enumerate(profiles):
        by_language.setdefault(profile.native_language, []).append(index)
    small = sorted(language for language, indices in by_language.items() if len(indices) < folds)
    if small:
        raise InsufficientDataError(f"Languages with fewer than {folds} documents: {', '.join(small)}")

    rng = np.random.default_rng(seed)
    assignment = [0] * len(profiles)
    for language in sorted(by_language):
        for position, index in enumerate(rng.permutation(by_language[language])):
            assignment[int(index)] = position % folds
    return tuple(assignment)


@dataclass(frozen=True)
class CrossValidatedPosteriors:
    """Out-of-sample class posteriors plus what each fold model was trained on."""

    classes: tuple[str, ...]
    doc_ids: tuple[str, ...]
    document_languages: tuple[str, ...]
    posteriors: np.ndarray
    fold_of: tuple[int, ...]
    trained_on: tuple[frozenset[str], ...]
    """Document ids in the training split of each fold model."""

    def audit(self) -> bool:
        """True when no posterior comes from a model that saw the document."""
        return all(
            doc_id not in self.trained_on[fold] for doc_id, fold in zip(self.doc_ids, self.fold_of, strict=True)
        )


def cross_validated_posteriors(
    profiles: Sequence[MorphoSyntacticProfile],
    regularization: float = 1.0,
    folds: int = 10,
    seed: int = 42,
    *,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    gradient_tolerance: float = DEFAULT_GRADIENT_TOLERANCE,
    uniform: bool = False,
    jobs: int = 1,
) -> CrossValidatedPosteriors:
    """Posterior of every document from the model of the fold that held it out.

    `uniform` skips training and assigns every document the uniform posterior.
    """
    doc_ids = tuple(profile.doc_id for profile in profiles)
    if len(set(doc_ids)) != len(doc_ids):
        raise DataError("Profiles contain duplicate document ids")
    classes = tuple(sorted({profile.native_language for profile in profiles}))
    if len(classes) < 2:
        raise InsufficientDataError(f"Confusion similarity needs at least 2 languages, got {len(classes)}")
    assignment = fold_assignments(profiles, folds, seed)
    trained_on = tuple(
        frozenset(doc_id for doc_id, fold in zip(doc_ids, assignment, strict=True) if fold != held_out)
        for held_out in range(folds)
    )
    posteriors = np.zeros((len(profiles), len(classes)), dtype=float)

    if uniform:
        logger.warning("Classifier posteriors forced uniform; similarities carry no signal")
        posteriors[:] = 1.0 / len(classes)
    else:
        train = partial(
            _fold_posteriors,
            profiles,
            assignment,
            classes,
            regularization=regularization,
            max_iterations=max_iterations,
            gradient_tolerance=gradient_tolerance,
        )
        if jobs <= 1:
            results = [train(fold) for fold in range(folds)]
        else:
            results = anyio.run(_run_concurrently, train, folds, jobs)
        for rows, fold_posteriors in results:
            posteriors[rows] = fold_posteriors

    return CrossValidatedPosteriors(
        classes=classes,
        doc_ids=doc_ids,
        document_languages=tuple(profile.native_language for profile in profiles),
        posteriors=posteriors,
        fold_of=assignment,
        trained_on=trained_on,
    )


def _fold_posteriors(
    profiles: Sequence[MorphoSyntacticProfile],
    assignment: tuple[int, ...],
    classes: tuple[str, ...],
    fold: int,
    *,
    regularization: float,
    max_iterations: int,
    gradient_tolerance: float,
) -> tuple[list[int], np.ndarray]:
    training = [profile for profile, assigned in zip(profiles, assignment, strict=True) if assigned != fold]
    rows = [index for index, assigned in enumerate(assignment) if assigned == fold]
    model = train_classifier(
        training,
        regularization,
        max_iterations=max_iterations,
        gradient_tolerance=gradient_tolerance,
        min_documents_per_class=1,
    )
    if model.classes != classes:
        raise DataError(f"Fold {fold} is missing languages")
    held_out = [profiles[index] for index in rows]
    logger.debug(f"Fold {fold}: held-out accuracy {model.accuracy(held_out):.3f}")
    return rows, model.predict_proba(held_out)


async def _run_concurrently(
    train: partial[tuple[list[int], np.ndarray]], folds: int, jobs: int
) -> list[tuple[list[int], np.ndarray]]:
    limiter = anyio.CapacityLimiter(jobs)
    results: list[tuple[list[int], np.ndarray] | None] = [None] * folds

    async def run(fold: int) -> None:
        results[fold] = await anyio.to_thread.run_sync(train, fold, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for fold in range(folds):
            tg.start_soon(run, fold)
    return [result for result in results if result is not None]


def confusion_from_posteriors(
    classes: Sequence[str], document_languages: Sequence[str], posteriors: np.ndarray
) -> SimilarityMatrix:
    """Raw similarity: mean posterior of l' over the documents of l, with a unit diagonal."""
    languages = tuple(classes)
    labels = np.asarray(document_languages)
    matrix = np.zeros((len(languages), len(languages)), dtype=float)
    for row, language in enumerate(languages):
        mask = labels == language
        if not mask.any():
            raise InsufficientDataError(f"No documents for {language!r}")
        matrix[row] = posteriors[mask].mean(axis=0)
    np.fill_diagonal(matrix, 1.0)
    return SimilarityMatrix.from_array(languages, np.clip(matrix, 0.0, 1.0))


def confusion_similarity(
    profiles: Sequence[MorphoSyntacticProfile],
    regularization: float = 1.0,
    folds: int = 10,
    seed: int = 42,
    *,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    gradient_tolerance: float = DEFAULT_GRADIENT_TOLERANCE,
    uniform: bool = False,
    jobs: int = 1,
) -> SimilarityMatrix:
    """Raw, generally asymmetric, confusion similarity over the profiled languages."""
    cv = cross_validated_posteriors(
        profiles,
        regularization,
        folds,
        seed,
        max_iterations=max_iterations,
        gradient_tolerance=gradient_tolerance,
        uniform=uniform,
        jobs=jobs,
    )
    return confusion_from_posteriors(cv.classes, cv.document_languages, cv.posteriors)


def symmetrize(raw: SimilarityMatrix) -> SimilarityMatrix:
    """Average each pair of directed similarities."""
    array = raw.as_array()
    return SimilarityMatrix.from_array(raw.languages, (array + array.T) / 2.0)
