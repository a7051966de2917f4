"""Variance analysis of error fractions across native languages."""

from __future__ import annotations

import csv
from itertools import combinations
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict

from esltypo.corpus.frequencies import doc_error_fractions
from esltypo.corpus.records import Corpus, corpus_summary
from esltypo.shared.exceptions import InsufficientDataError
from esltypo.stats.rank_tests import GroupedSamples, kruskal_wallis, mann_whitney
from esltypo.types import ERROR_TYPES, ErrorType
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

SIGNIFICANT = 0.01
HIGHLY_SIGNIFICANT = 0.001

Band = Literal["", "*", "**"]

VARIANCE_COLUMNS = ("rank", "code", "name", "count", "kw_h", "kw_p", "kw_band", "mw_pairs", "mw_total_pairs")


class VarianceRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: int
    error_type: ErrorType
    count: int
    kw_statistic: float
    kw_p_value: float
    band: Band
    mw_significant_pairs: int
    mw_total_pairs: int


def significance_band(p_value: float) -> Band:
    """Band of a p-value: "**" below 0.001, "*" below 0.01, empty otherwise.

    The Kruskal-Wallis p-value reported by `variance_report` is the chi-square
    approximation, except when an error type has at most 8 documents in total; there it
    is the exact permutation p-value.
    """
    if p_value < HIGHLY_SIGNIFICANT:
        return "**"
    if p_value < SIGNIFICANT:
        return "*"
    return ""


def error_type_samples(corpus: Corpus, error_type: ErrorType) -> dict[str, tuple[float, ...]]:
    """Per-language samples of one error type; documents without errors are left out."""
    samples: dict[str, tuple[float, ...]] = {}
    for language, documents in corpus.by_language().items():
        values = tuple(doc_error_fractions(document)[error_type] for document in documents if document.total_errors > 0)
        if values:
            samples[language] = values
    return samples


def variance_report(corpus: Corpus, *, alpha: float = SIGNIFICANT) -> list[VarianceRow]:
    """Kruskal-Wallis test per error type plus the count of pairwise Mann-Whitney rejections.

    Raises:
        InsufficientDataError: fewer than two languages have error-bearing documents
    """
    counts = corpus_summary(corpus).error_type_counts
    rows: list[VarianceRow] = []
    for rank, error_type in enumerate(ERROR_TYPES, start=1):
        samples = error_type_samples(corpus, error_type)
        if len(samples) < 2:
            raise InsufficientDataError(
                f"Variance analysis needs at least two languages with annotated errors, got {len(samples)}"
            )
        kw = kruskal_wallis(GroupedSamples(groups=samples))
        pairs = list(combinations(sorted(samples), 2))
        significant = sum(1 for first, second in pairs if mann_whitney(samples[first], samples[second]).p_value < alpha)
        rows.append(
            VarianceRow(
                rank=rank,
                error_type=error_type,
                count=counts[error_type],
                kw_statistic=kw.statistic,
                kw_p_value=kw.p_value,
                band=significance_band(kw.p_value),
                mw_significant_pairs=significant,
                mw_total_pairs=len(pairs),
            )
        )
        logger.debug(f"{error_type.value}: H={kw.statistic:.3f} p={kw.p_value:.3g} MW={significant}/{len(pairs)}")
    return rows


def write_variance_tsv(rows: list[VarianceRow], destination: Path | str, header: str | None = None) -> None:
    with Path(destination).open("w", encoding="utf-8", newline="") as handle:
        if header:
            handle.write(header + "\n")
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(VARIANCE_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.rank,
                    row.error_type.value,
                    row.error_type.display_name,
                    row.count,
                    f"{row.kw_statistic:.4f}",
                    f"{row.kw_p_value:.3g}",
                    row.band,
                    row.mw_significant_pairs,
                    row.mw_total_pairs,
                ]
            )
