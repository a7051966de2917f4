"""Error prediction for languages whose typology is approximated from ESL texts."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from esltypo.corpus.records import Corpus
from esltypo.nli.classifier import DEFAULT_GRADIENT_TOLERANCE, DEFAULT_MAX_ITERATIONS
from esltypo.nli.profiles import MorphoSyntacticProfile
from esltypo.nli.projection import (
    ProjectedTypology,
    ProjectionAccuracy,
    project_typology,
    projected_database,
    projection_accuracy,
)
from esltypo.nli.similarity import SimilarityMatrix, confusion_similarity, symmetrize
from esltypo.regression.protocol import FoldParameters, FoldResult, check_languages, leave_one_out_folds
from esltypo.settings import Settings
from esltypo.shared.exceptions import DataError
from esltypo.typology.database import TypologyDatabase
from esltypo.types import SYSTEMS, PredictionRecord, System
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class BootstrapParameters:
    regularization: float = 1.0
    folds: int = 10
    seed: int = 42
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    gradient_tolerance: float = DEFAULT_GRADIENT_TOLERANCE
    uniform_posteriors: bool = False
    fold: FoldParameters = field(default_factory=FoldParameters)

    @classmethod
    def from_settings(cls, settings: Settings, *, uniform_posteriors: bool = False) -> BootstrapParameters:
        return cls(
            regularization=settings.nli_lambda,
            folds=settings.folds,
            seed=settings.seed,
            max_iterations=settings.max_iterations,
            gradient_tolerance=settings.gradient_tolerance,
            uniform_posteriors=uniform_posteriors,
            fold=FoldParameters.from_settings(settings),
        )


@dataclass
class BootstrapResult:
    raw_similarity: SimilarityMatrix
    similarity: SimilarityMatrix
    projections: dict[str, ProjectedTypology]
    accuracy: ProjectionAccuracy
    folds: list[FoldResult]

    @property
    def records(self) -> list[PredictionRecord]:
        return [record for fold in self.folds for record in fold.records]


def run_bootstrap(
    corpus: Corpus,
    typology: TypologyDatabase,
    profiles: Sequence[MorphoSyntacticProfile],
    params: BootstrapParameters | None = None,
    systems: Iterable[System] = SYSTEMS,
    *,
    jobs: int = 1,
) -> BootstrapResult:
    """Leave-one-out prediction where each held-out language is encoded from projected typology.

    The classifier and the similarity matrix are computed once over all profiled
    languages. Regressors are still trained on the true typology of the remaining
    languages.
    """
    params = params or BootstrapParameters()
    systems = tuple(systems)
    check_languages(corpus, typology, systems)
    profiled = {profile.native_language for profile in profiles}
    unprofiled = sorted(language for language in corpus.languages if language not in profiled)
    if unprofiled:
        raise DataError(f"Corpus languages without parsed documents: {', '.join(unprofiled)}")

    raw = confusion_similarity(
        profiles,
        params.regularization,
        params.folds,
        params.seed,
        max_iterations=params.max_iterations,
        gradient_tolerance=params.gradient_tolerance,
        uniform=params.uniform_posteriors,
        jobs=jobs,
    )
    similarity = symmetrize(raw)

    projections: dict[str, ProjectedTypology] = {}
    for language in corpus.languages:
        candidates = [other for other in corpus.languages if other != language]
        projections[language] = project_typology(language, similarity, typology, candidates)
    accuracy = projection_accuracy(projections, typology)
    logger.info(
        f"Projected typology for {len(projections)} languages, accuracy {accuracy.overall:.3f}",
        extra={"tied": sorted(language for language, projection in projections.items() if projection.tied)},
    )

    folds = leave_one_out_folds(
        corpus,
        typology,
        systems,
        params.fold,
        jobs=jobs,
        test_typologies={
            language: projected_database(typology, projection) for language, projection in projections.items()
        },
    )
    return BootstrapResult(
        raw_similarity=raw, similarity=similarity, projections=projections, accuracy=accuracy, folds=folds
    )


def bootstrap_predict(
    corpus: Corpus,
    typology: TypologyDatabase,
    profiles: Sequence[MorphoSyntacticProfile],
    params: BootstrapParameters | None = None,
    systems: Iterable[System] = SYSTEMS,
) -> list[PredictionRecord]:
    return run_bootstrap(corpus, typology, profiles, params, systems).records
