"""Leave-one-language-out evaluation of the prediction systems."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import partial

import anyio
import anyio.to_thread

from esltypo.corpus.frequencies import Pooling, language_error_distribution
from esltypo.corpus.records import Corpus
from esltypo.regression.baselines import baseline_base, baseline_nn
from esltypo.regression.least_squares import DEFAULT_RTOL
from esltypo.regression.models import (
    DEFAULT_EPSILON,
    RegressorSet,
    clamp_distribution,
    predict_distribution,
    train_models,
)
from esltypo.settings import Settings
from esltypo.shared.exceptions import DataError, DegeneratePredictionError, InsufficientDataError
from esltypo.typology.database import TypologyDatabase
from esltypo.typology.encoding import encode
from esltypo.types import SYSTEMS, ErrorDistribution, FeatureMode, PredictionRecord, System
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

MIN_LANGUAGES = 3


@dataclass(frozen=True)
class FoldParameters:
    ridge: float = 0.0
    rtol: float = DEFAULT_RTOL
    epsilon: float = DEFAULT_EPSILON
    pooling: Pooling = "pooled"

    @classmethod
    def from_settings(cls, settings: Settings) -> FoldParameters:
        return cls(
            ridge=settings.ridge_lambda,
            rtol=settings.svd_rtol,
            epsilon=settings.clamp_epsilon,
            pooling=settings.pooling,
        )


@dataclass
class FoldResult:
    """Records and trained regressors of one held-out language."""

    held_out: str
    records: list[PredictionRecord] = field(default_factory=list)
    models: dict[FeatureMode, RegressorSet] = field(default_factory=dict)


def _ordered(systems: Iterable[System]) -> tuple[System, ...]:
    requested = set(systems)
    return tuple(system for system in SYSTEMS if system in requested)


def run_fold(
    corpus: Corpus,
    typology: TypologyDatabase,
    held_out: str,
    systems: Iterable[System],
    params: FoldParameters | None = None,
    *,
    test_typology: TypologyDatabase | None = None,
) -> FoldResult:
    """Predict the error distribution of `held_out` with every requested system.

    Training only sees the other languages. `test_typology`, when given, replaces
    `typology` for encoding the held-out language and nothing else. Every prediction
    is floored at `params.epsilon`, Base and NN included, so its divergence from the
    truth is finite.
    """
    params = params or FoldParameters()
    target_db = test_typology if test_typology is not None else typology
    result = FoldResult(held_out=held_out)
    base: ErrorDistribution | None = None

    def base_prediction() -> ErrorDistribution:
        nonlocal base
        if base is None:
            base = clamp_distribution(baseline_base(corpus, held_out, pooling=params.pooling), epsilon=params.epsilon)
        return base

    predictions: list[tuple[System, ErrorDistribution, bool]] = []

    for system in _ordered(systems):
        mode = system.feature_mode
        if system is System.BASE:
            predictions.append((system, base_prediction(), False))
        elif system is System.NN:
            predicted = baseline_nn(
                corpus, typology, held_out, pooling=params.pooling, target_typology=test_typology
            )
            predictions.append((system, clamp_distribution(predicted, epsilon=params.epsilon), False))
        elif mode is not None:
            models = train_models(
                corpus, typology, mode, held_out, ridge=params.ridge, rtol=params.rtol, pooling=params.pooling
            )
            result.models[mode] = models
            try:
                predicted = predict_distribution(models, encode(target_db, held_out, mode), epsilon=params.epsilon)
                predictions.append((system, predicted, False))
            except DegeneratePredictionError as e:
                logger.warning(f"{system.value} fold for {held_out} fell back to Base: {e}")
                predictions.append((system, base_prediction(), True))

    # the held-out target is read only once every system has been trained
    truth = language_error_distribution(corpus, held_out, params.pooling)
    result.records = [
        PredictionRecord(language=held_out, system=system, predicted=predicted, truth=truth, fallback=fallback)
        for system, predicted, fallback in predictions
    ]
    return result


def check_languages(corpus: Corpus, typology: TypologyDatabase, systems: Iterable[System]) -> None:
    if len(corpus.languages) < MIN_LANGUAGES:
        raise InsufficientDataError(
            f"Leave-one-out needs at least {MIN_LANGUAGES} languages, got {len(corpus.languages)}"
        )
    if any(system is not System.BASE for system in systems):
        unmatched = sorted(language for language in corpus.languages if language not in typology.languages)
        if unmatched:
            raise DataError(f"Corpus languages without typology: {', '.join(unmatched)}")


async def _run_folds_concurrently(
    corpus: Corpus,
    typology: TypologyDatabase,
    systems: tuple[System, ...],
    params: FoldParameters,
    test_typologies: Mapping[str, TypologyDatabase],
    jobs: int,
) -> dict[str, FoldResult]:
    limiter = anyio.CapacityLimiter(jobs)
    results: dict[str, FoldResult] = {}

    async def run(language: str) -> None:
        fold = partial(
            run_fold, corpus, typology, language, systems, params, test_typology=test_typologies.get(language)
        )
        results[language] = await anyio.to_thread.run_sync(fold, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for language in corpus.languages:
            tg.start_soon(run, language)
    return results


def leave_one_out_folds(
    corpus: Corpus,
    typology: TypologyDatabase,
    systems: Iterable[System] = SYSTEMS,
    params: FoldParameters | None = None,
    *,
    jobs: int = 1,
    test_typologies: Mapping[str, TypologyDatabase] | None = None,
) -> list[FoldResult]:
    """One fold per corpus language, in language order regardless of `jobs`."""
    systems = _ordered(systems)
    params = params or FoldParameters()
    test_typologies = test_typologies or {}
    check_languages(corpus, typology, systems)

    if jobs <= 1:
        folds = [
            run_fold(corpus, typology, language, systems, params, test_typology=test_typologies.get(language))
            for language in corpus.languages
        ]
    else:
        by_language = anyio.run(_run_folds_concurrently, corpus, typology, systems, params, test_typologies, jobs)
        folds = [by_language[language] for language in corpus.languages]

    fallbacks = sum(record.fallback for fold in folds for record in fold.records)
    logger.info(
        f"Ran {len(folds)} leave-one-out folds",
        extra={"systems": [system.value for system in systems], "fallbacks": fallbacks},
    )
    return folds


def leave_one_out(
    corpus: Corpus,
    typology: TypologyDatabase,
    systems: Iterable[System] = SYSTEMS,
    params: FoldParameters | None = None,
    *,
    jobs: int = 1,
) -> list[PredictionRecord]:
    """Prediction records for every (language, system) pair."""
    folds = leave_one_out_folds(corpus, typology, systems, params, jobs=jobs)
    return [record for fold in folds for record in fold.records]
