"""Relative error frequencies per document and per native language."""

from collections import Counter
from typing import Literal

import numpy as np

from esltypo.corpus.records import Corpus
from esltypo.shared.exceptions import EmptySampleError, InsufficientDataError
from esltypo.types import Document, ErrorDistribution, ErrorType

Pooling = Literal["pooled", "mean"]


def doc_error_fractions(document: Document) -> ErrorDistribution:
    """Share of each error type among the document's structural errors.

    Raises:
        EmptySampleError: the document has no structural error
    """
    if document.total_errors == 0:
        raise EmptySampleError(f"Document {document.doc_id} has no structural errors")
    return ErrorDistribution.from_counts(document.error_counts)


def language_error_distribution(corpus: Corpus, language: str, pooling: Pooling = "pooled") -> ErrorDistribution:
    """Error distribution of a native language.

    With `pooling="pooled"` the counts of all documents are summed before
    normalizing; with `pooling="mean"` the per-document fractions are averaged.
    Documents without errors contribute nothing either way.
    """
    documents = corpus.documents_for(language)
    if pooling == "pooled":
        totals: Counter[ErrorType] = Counter()
        for document in documents:
            totals.update(document.error_counts)
        if sum(totals.values()) == 0:
            raise InsufficientDataError(f"No structural errors annotated for {language}")
        return ErrorDistribution.from_counts(totals)

    fractions = [doc_error_fractions(document).as_array() for document in documents if document.total_errors > 0]
    if not fractions:
        raise InsufficientDataError(f"No structural errors annotated for {language}")
    return ErrorDistribution.from_array(np.mean(fractions, axis=0))


def language_error_distributions(corpus: Corpus, pooling: Pooling = "pooled") -> dict[str, ErrorDistribution]:
    return {language: language_error_distribution(corpus, language, pooling) for language in corpus.languages}
