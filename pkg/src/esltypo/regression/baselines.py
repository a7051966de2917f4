"""Reference predictors: training-set average and typologically nearest language."""

from __future__ import annotations

import numpy as np

from esltypo.corpus.frequencies import Pooling, language_error_distribution
from esltypo.corpus.records import Corpus
from esltypo.regression.models import training_languages
from esltypo.shared.exceptions import InsufficientDataError, UndefinedSimilarityError, UnknownLanguageError
from esltypo.typology.database import TypologyDatabase
from esltypo.typology.encoding import binarize, cosine
from esltypo.types import ErrorDistribution
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)


def baseline_base(corpus: Corpus, held_out: str, *, pooling: Pooling = "pooled") -> ErrorDistribution:
    """Unweighted mean of the training languages' distributions, renormalized."""
    if held_out not in corpus.languages:
        raise UnknownLanguageError(f"Held-out language {held_out!r} is not in the corpus")
    languages = [language for language in corpus.languages if language != held_out]
    if not languages:
        raise InsufficientDataError("The Base system needs at least one training language")
    stacked = np.vstack([language_error_distribution(corpus, language, pooling).as_array() for language in languages])
    return ErrorDistribution.from_array(stacked.mean(axis=0))


def nearest_language(
    typology: TypologyDatabase,
    held_out: str,
    candidates: tuple[str, ...],
    *,
    target_typology: TypologyDatabase | None = None,
) -> tuple[str, float]:
    """Candidate with the highest typological cosine to `held_out`; ties go to the smallest code.

    `target_typology` supplies the encoding of `held_out` when it differs from the
    training typology (projected typology during bootstrapping). Candidates without any
    documented feature are skipped.
    """
    source = target_typology if target_typology is not None else typology
    target = binarize(source, held_out).as_array()
    best: tuple[str, float] | None = None
    for candidate in sorted(candidates):
        try:
            similarity = cosine(target, binarize(typology, candidate).as_array())
        except UndefinedSimilarityError:
            if not target.any():
                raise UndefinedSimilarityError(f"{held_out!r} has no documented features") from None
            logger.debug("Skipping candidate without documented features", extra={"language": candidate})
            continue
        if best is None or similarity > best[1]:
            best = (candidate, similarity)
    if best is None:
        raise UndefinedSimilarityError(f"No encodable training language for {held_out!r}")
    return best


def baseline_nn(
    corpus: Corpus,
    typology: TypologyDatabase,
    held_out: str,
    *,
    pooling: Pooling = "pooled",
    target_typology: TypologyDatabase | None = None,
) -> ErrorDistribution:
    """Error distribution of the typologically closest training language."""
    languages = training_languages(corpus, typology, held_out)
    neighbor, similarity = nearest_language(typology, held_out, languages, target_typology=target_typology)
    logger.debug("Nearest neighbor", extra={"held_out": held_out, "neighbor": neighbor, "cosine": similarity})
    return language_error_distribution(corpus, neighbor, pooling)
