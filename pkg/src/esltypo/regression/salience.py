"""Feature salience: regression weights averaged over the leave-one-out folds."""

from __future__ import annotations

import csv
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from esltypo.regression.models import RegressorSet
from esltypo.shared.exceptions import DataError, InsufficientDataError, UnknownErrorTypeError
from esltypo.types import ERROR_TYPES, ErrorType

SALIENCE_COLUMNS = ("code", "rank", "slot", "description", "mean_weight")


class SalienceEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: int
    slot_index: int
    description: str
    mean_weight: float


def feature_salience(fold_models: Sequence[RegressorSet], error_type: ErrorType | str) -> list[SalienceEntry]:
    """All slots ranked by mean weight, largest first; equal weights keep slot order.

    Positive contributors come first, the strongest negative contributors last.
    """
    if not fold_models:
        raise InsufficientDataError("Salience needs at least one trained model set")
    try:
        error_type = ErrorType.parse(error_type) if isinstance(error_type, str) else error_type
    except ValueError as e:
        raise UnknownErrorTypeError(str(e)) from None
    first = fold_models[0]
    if any(models.layout_hash != first.layout_hash for models in fold_models):
        raise DataError("Salience requires model sets that share one encoder layout")
    if any(error_type not in models.weights for models in fold_models):
        raise UnknownErrorTypeError(f"No regressor for error type {error_type.value}")

    mean = np.mean([models.weights[error_type] for models in fold_models], axis=0).reshape(first.dimension)
    order = sorted(range(first.dimension), key=lambda index: (-mean[index], index))
    return [
        SalienceEntry(
            rank=rank,
            slot_index=index,
            description=first.slots[index].describe(),
            mean_weight=float(mean[index]),
        )
        for rank, index in enumerate(order, start=1)
    ]


def salience_by_type(fold_models: Sequence[RegressorSet]) -> dict[ErrorType, list[SalienceEntry]]:
    return {error_type: feature_salience(fold_models, error_type) for error_type in ERROR_TYPES}


def top_positive(entries: Sequence[SalienceEntry], k: int) -> list[SalienceEntry]:
    return [entry for entry in entries if entry.mean_weight > 0][:k]


def top_negative(entries: Sequence[SalienceEntry], k: int) -> list[SalienceEntry]:
    """Most negative weights first."""
    negative = [entry for entry in entries if entry.mean_weight < 0]
    return sorted(negative, key=lambda entry: (entry.mean_weight, entry.slot_index))[:k]


def write_salience_tsv(
    by_type: Mapping[ErrorType, Sequence[SalienceEntry]], destination: Path | str, header: str | None = None
) -> None:
    """One block of ranked slots per error type, in ErrorType order."""
    with Path(destination).open("w", encoding="utf-8", newline="") as handle:
        if header:
            handle.write(header + "\n")
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(SALIENCE_COLUMNS)
        for error_type in ERROR_TYPES:
            for entry in by_type.get(error_type, ()):
                writer.writerow(
                    [error_type.value, entry.rank, entry.slot_index, entry.description, f"{entry.mean_weight:.6f}"]
                )
