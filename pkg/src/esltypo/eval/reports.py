"""TSV and aligned-text renderings of evaluation results."""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict
from rich import box
from rich.console import Console
from rich.table import Table

from esltypo.eval.summary import MISTAKES_ASSUMPTION, EvaluationSummary
from esltypo.shared.exceptions import UnknownLanguageError
from esltypo.types import ERROR_TYPES, ErrorDistribution, ErrorType, PredictionRecord, System
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

TRUTH = "True"
SUMMARY_COLUMNS = ("system", "mae", "error_reduction", "languages", "mistakes", "avg_kl", "kl_languages", "fallbacks")
RECORD_COLUMNS = ("language", "system", "code", "predicted", "truth", "fallback")
TOPK_COLUMNS = ("language", "column", "rank", "code", "name", "fraction")


class TopKTable(BaseModel):
    """Top-ranked error types of one language per system, plus the true ranking."""

    model_config = ConfigDict(frozen=True)

    language: str
    k: int
    columns: dict[str, tuple[tuple[ErrorType, float], ...]]


def top_error_types(distribution: ErrorDistribution, k: int) -> tuple[tuple[ErrorType, float], ...]:
    """Largest fractions first; equal fractions ordered by error code."""
    ranked = sorted(ERROR_TYPES, key=lambda error_type: (-distribution[error_type], error_type.value))
    return tuple((error_type, distribution[error_type]) for error_type in ranked[:k])


def topk_comparison(
    records: Iterable[PredictionRecord],
    language: str,
    systems: Sequence[System] | None = None,
    k: int = 10,
) -> TopKTable:
    if k > len(ERROR_TYPES):
        logger.debug(f"Capping top-k at {len(ERROR_TYPES)} (requested {k})")
        k = len(ERROR_TYPES)
    if k < 1:
        raise ValueError("k must be positive")
    matching = {record.system: record for record in records if record.language == language}
    if not matching:
        raise UnknownLanguageError(f"No prediction records for {language!r}")
    wanted = [system for system in (systems or list(matching)) if system in matching]
    columns = {system.value: top_error_types(matching[system].predicted, k) for system in wanted}
    columns[TRUTH] = top_error_types(next(iter(matching.values())).truth, k)
    return TopKTable(language=language, k=k, columns=columns)


@contextmanager
def _tsv_writer(destination: Path | str, header: str | None, *comments: str) -> Iterator[Any]:
    with Path(destination).open("w", encoding="utf-8", newline="") as handle:
        for line in (header, *comments):
            if line:
                handle.write(line + "\n")
        yield csv.writer(handle, delimiter="\t", lineterminator="\n")


def _summary_cells(summary: EvaluationSummary) -> list[list[str]]:
    return [
        [
            row.system.value,
            f"{row.mae:.3f}",
            f"{row.error_reduction:.1f}",
            f"{row.languages_improved}/{row.n_languages}",
            f"{row.error_types_improved}/{row.n_error_types}",
            f"{row.mean_kl:.4f}",
            f"{row.kl_languages_improved}/{row.n_languages}",
            str(row.fallbacks),
        ]
        for row in summary.rows
    ]


def write_summary_tsv(summary: EvaluationSummary, destination: Path | str, header: str | None = None) -> None:
    with _tsv_writer(destination, header, f"# {MISTAKES_ASSUMPTION}") as writer:
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerows(_summary_cells(summary))


def write_records_tsv(
    records: Iterable[PredictionRecord], destination: Path | str, header: str | None = None
) -> None:
    with _tsv_writer(destination, header) as writer:
        writer.writerow(RECORD_COLUMNS)
        for record in records:
            for error_type in ERROR_TYPES:
                writer.writerow(
                    [
                        record.language,
                        record.system.value,
                        error_type.value,
                        f"{record.predicted[error_type]:.6f}",
                        f"{record.truth[error_type]:.6f}",
                        int(record.fallback),
                    ]
                )


def write_topk_tsv(tables: Iterable[TopKTable], destination: Path | str, header: str | None = None) -> None:
    with _tsv_writer(destination, header) as writer:
        writer.writerow(TOPK_COLUMNS)
        for table in tables:
            for column, ranked in table.columns.items():
                for rank, (error_type, fraction) in enumerate(ranked, start=1):
                    writer.writerow(
                        [table.language, column, rank, error_type.value, error_type.display_name, f"{fraction:.2f}"]
                    )


def _render(table: Table) -> str:
    buffer = io.StringIO()
    Console(file=buffer, width=160, color_system=None, force_terminal=False).print(table)
    return buffer.getvalue()


def render_summary(summary: EvaluationSummary, title: str | None = None) -> str:
    table = Table(title=title, box=box.SIMPLE, caption=MISTAKES_ASSUMPTION)
    for column in ("System", "MAE", "Reduction %", "#Languages", "#Mistakes", "AVG D_KL", "#Languages D_KL"):
        table.add_column(column, justify="left" if column == "System" else "right")
    for cells in _summary_cells(summary):
        table.add_row(*cells[:-1])
    return _render(table)


def render_topk(table: TopKTable) -> str:
    rendered = Table(title=f"{table.language}: top {table.k} error types", box=box.SIMPLE)
    rendered.add_column("#", justify="right")
    for column in table.columns:
        rendered.add_column(column)
        rendered.add_column("", justify="right")
    for rank in range(table.k):
        cells = [str(rank + 1)]
        for ranked in table.columns.values():
            error_type, fraction = ranked[rank]
            cells.extend([error_type.display_name, f"{fraction:.2f}"])
        rendered.add_row(*cells)
    return _render(rendered)


def write_text_report(sections: Iterable[str], destination: Path | str, header: str | None = None) -> None:
    text = "\n".join(sections)
    Path(destination).write_text((header + "\n" if header else "") + text, encoding="utf-8")
