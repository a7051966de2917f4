"""Nearest-language typology projection and its accuracy against known typology."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from pydantic import BaseModel, ConfigDict

from esltypo.nli.similarity import SimilarityMatrix
from esltypo.shared.exceptions import InsufficientDataError, UnknownLanguageError
from esltypo.typology.database import TypologyDatabase
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)


class ProjectedTypology(BaseModel):
    model_config = ConfigDict(frozen=True)

    target: str
    source: str
    similarity: float
    assignments: dict[str, str]
    tied: bool = False
    """Several candidates shared the maximum similarity; the smallest code was taken."""


class ProjectionAccuracy(BaseModel):
    model_config = ConfigDict(frozen=True)

    matches: dict[str, int]
    compared: dict[str, int]

    def language_accuracy(self, language: str) -> float:
        compared = self.compared[language]
        return self.matches[language] / compared if compared else 0.0

    @property
    def overall(self) -> float:
        compared = sum(self.compared.values())
        return sum(self.matches.values()) / compared if compared else 0.0


def project_typology(
    target: str,
    similarity: SimilarityMatrix,
    typology: TypologyDatabase,
    candidates: Iterable[str] | None = None,
) -> ProjectedTypology:
    """Copy the documented typology of the language most similar to `target`.

    Only languages other than the target that document at least one feature are
    candidates; `candidates` narrows the set further. The target's own typology is
    never read.
    """
    row = similarity.index(target)
    pool = set(candidates) if candidates is not None else set(similarity.languages)
    eligible = sorted(
        language
        for language in pool
        if language != target
        and language in similarity.languages
        and language in typology.languages
        and typology.assignments.get(language)
    )
    if not eligible:
        raise InsufficientDataError(f"No documented language to project typology onto {target!r}")

    scores = {language: similarity.values[row][similarity.index(language)] for language in eligible}
    best = max(scores.values())
    winners = [language for language in eligible if scores[language] == best]
    source = winners[0]
    if len(winners) > 1:
        logger.warning(
            f"Similarity tie for {target} between {', '.join(winners)}; projecting from {source}",
            extra={"target": target, "similarity": best},
        )
    return ProjectedTypology(
        target=target,
        source=source,
        similarity=best,
        assignments=typology.documented(source),
        tied=len(winners) > 1,
    )


def projected_database(typology: TypologyDatabase, projection: ProjectedTypology) -> TypologyDatabase:
    """The database with the target's documentation replaced by the projection."""
    return typology.with_language(projection.target, projection.assignments)


def projection_accuracy(
    projections: Mapping[str, ProjectedTypology] | Iterable[ProjectedTypology],
    typology: TypologyDatabase,
) -> ProjectionAccuracy:
    """Share of projected values equal to the true value, over features documented on both sides."""
    items = projections.values() if isinstance(projections, Mapping) else projections
    matches: dict[str, int] = {}
    compared: dict[str, int] = {}
    for projection in items:
        if projection.target not in typology.languages:
            raise UnknownLanguageError(f"No true typology for {projection.target!r}")
        truth = typology.documented(projection.target)
        shared = [feature_id for feature_id in projection.assignments if feature_id in truth]
        compared[projection.target] = len(shared)
        matches[projection.target] = sum(
            projection.assignments[feature_id] == truth[feature_id] for feature_id in shared
        )
    return ProjectionAccuracy(matches=matches, compared=compared)
