"""Per-system summaries of leave-one-out prediction records."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict

from esltypo.eval.metrics import PERCENT, absolute_errors, kl_divergence
from esltypo.shared.exceptions import ConfigurationError, DataError
from esltypo.types import ERROR_TYPES, SYSTEMS, PredictionRecord, System

MISTAKES_ASSUMPTION = "#Mistakes compares per-error-type MAE averaged over all languages"


class SystemSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    system: System
    mae: float
    """Mean absolute error over all (language, error type) cells, x100."""
    error_reduction: float
    """Percentage MAE reduction relative to Base."""
    languages_improved: int
    n_languages: int
    error_types_improved: int
    n_error_types: int
    mean_kl: float
    kl_languages_improved: int
    fallbacks: int = 0


class EvaluationSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: tuple[SystemSummary, ...]
    languages: tuple[str, ...]

    def get(self, system: System) -> SystemSummary:
        for row in self.rows:
            if row.system is system:
                return row
        raise KeyError(system.value)

    @property
    def systems(self) -> tuple[System, ...]:
        return tuple(row.system for row in self.rows)


def _by_system(records: Iterable[PredictionRecord]) -> dict[System, dict[str, PredictionRecord]]:
    grouped: dict[System, dict[str, PredictionRecord]] = defaultdict(dict)
    for record in records:
        if record.language in grouped[record.system]:
            raise DataError(f"Duplicate {record.system.value} record for {record.language}")
        grouped[record.system][record.language] = record
    return grouped


def summarize(records: Iterable[PredictionRecord]) -> EvaluationSummary:
    """Table-style summary of every system present, compared with Base.

    Improvement counts are strict: a language (or error type) counts only when the
    system's mean absolute error on it is lower than Base's.

    Raises:
        ConfigurationError: no Base records
        DataError: a system does not cover the same languages as Base
        DomainError: a prediction has zero mass on an observed error type; records
            from `run_fold` are floored at epsilon and never do
    """
    grouped = _by_system(records)
    if System.BASE not in grouped:
        raise ConfigurationError("Summaries need Base records to compare against")
    languages = tuple(sorted(grouped[System.BASE]))

    def errors(system: System) -> np.ndarray:
        by_language = grouped[system]
        if tuple(sorted(by_language)) != languages:
            raise DataError(f"{system.value} records do not cover the same languages as Base")
        return np.vstack([absolute_errors(by_language[lang].predicted, by_language[lang].truth) for lang in languages])

    def divergences(system: System) -> np.ndarray:
        by_language = grouped[system]
        return np.array([kl_divergence(by_language[lang].truth, by_language[lang].predicted) for lang in languages])

    base_errors = errors(System.BASE)
    base_mae = float(base_errors.mean()) * PERCENT
    base_kl = divergences(System.BASE)

    rows: list[SystemSummary] = []
    for system in SYSTEMS:
        if system not in grouped:
            continue
        system_errors = errors(system)
        system_kl = divergences(system)
        mae = float(system_errors.mean()) * PERCENT
        rows.append(
            SystemSummary(
                system=system,
                mae=mae,
                error_reduction=(base_mae - mae) / base_mae * 100.0 if base_mae > 0 else 0.0,
                languages_improved=int(np.sum(system_errors.mean(axis=1) < base_errors.mean(axis=1))),
                n_languages=len(languages),
                error_types_improved=int(np.sum(system_errors.mean(axis=0) < base_errors.mean(axis=0))),
                n_error_types=len(ERROR_TYPES),
                mean_kl=float(system_kl.mean()),
                kl_languages_improved=int(np.sum(system_kl < base_kl)),
                fallbacks=sum(record.fallback for record in grouped[system].values()),
            )
        )
    return EvaluationSummary(rows=tuple(rows), languages=languages)
