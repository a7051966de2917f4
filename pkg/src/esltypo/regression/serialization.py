"""Versioned flat text format for trained regressor sets.

Layout, one tab-separated record per line:

    # esltypo-regressors v1
    mode            RegCA
    layout_hash     <sha256 of the slot layout>
    dimension       <number of slots>
    training_languages  <comma-separated codes>
    slot            <index> <feature id> <feature name> <value label>
    weights         <error code> <intercept> <weight 0> ... <weight d-1>

Floats are written with `repr` so a dump-load cycle is lossless.
"""

from __future__ import annotations

from pathlib import Path

from pydantic import ValidationError

from esltypo.regression.models import RegressorSet
from esltypo.shared.exceptions import DataError, ParseError
from esltypo.shared.version import REGRESSOR_FORMAT_HEADER
from esltypo.typology.encoding import Slot, layout_hash
from esltypo.types import ERROR_TYPES, ErrorType, FeatureMode


def dumps_regressors(models: RegressorSet) -> str:
    lines = [
        REGRESSOR_FORMAT_HEADER,
        f"mode\t{models.mode.value}",
        f"layout_hash\t{models.layout_hash}",
        f"dimension\t{models.dimension}",
        f"training_languages\t{','.join(models.training_languages)}",
    ]
    for index, slot in enumerate(models.slots):
        lines.append(f"slot\t{index}\t{slot.feature_id}\t{slot.feature_name}\t{slot.value}")
    for error_type in ERROR_TYPES:
        row = [repr(models.intercepts[error_type]), *(repr(weight) for weight in models.weights[error_type])]
        lines.append("\t".join(["weights", error_type.value, *row]))
    return "\n".join(lines) + "\n"


def dump_regressors(models: RegressorSet, destination: Path | str) -> None:
    Path(destination).write_text(dumps_regressors(models), encoding="utf-8")


def load_regressors(source: Path | str, *, expected_layout_hash: str | None = None) -> RegressorSet:
    """Read a regressor set written by `dump_regressors`.

    Raises:
        ParseError: wrong header or a malformed line
        DataError: the recorded layout hash does not match the slots (or `expected_layout_hash`)
    """
    path = Path(source)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != REGRESSOR_FORMAT_HEADER:
        raise ParseError(f"Expected header {REGRESSOR_FORMAT_HEADER!r}", path=path, line_number=1)

    fields: dict[str, str] = {}
    slots: list[Slot] = []
    weights: dict[ErrorType, tuple[float, ...]] = {}
    intercepts: dict[ErrorType, float] = {}
    for line_number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        key, *values = line.split("\t")
        try:
            if key == "slot":
                index, feature_id, feature_name, value = values
                if int(index) != len(slots):
                    raise ValueError(f"slot {index} out of order")
                slots.append(Slot(feature_id=feature_id, feature_name=feature_name, value=value))
            elif key == "weights":
                error_type = ErrorType.parse(values[0])
                intercepts[error_type] = float(values[1])
                weights[error_type] = tuple(float(weight) for weight in values[2:])
            elif key in ("mode", "layout_hash", "dimension", "training_languages") and len(values) == 1:
                fields[key] = values[0]
            else:
                raise ValueError(f"unexpected record {key!r}")
        except (ValueError, IndexError, ValidationError) as e:
            raise ParseError(str(e), path=path, line_number=line_number) from e

    missing = sorted({"mode", "layout_hash", "dimension", "training_languages"} - set(fields))
    if missing:
        raise ParseError(f"Missing record(s): {', '.join(missing)}", path=path)
    if int(fields["dimension"]) != len(slots):
        raise DataError(f"{path}: dimension {fields['dimension']} but {len(slots)} slots")
    slot_tuple = tuple(slots)
    if layout_hash(slot_tuple) != fields["layout_hash"]:
        raise DataError(f"{path}: layout hash does not match the recorded slots")
    if expected_layout_hash is not None and fields["layout_hash"] != expected_layout_hash:
        raise DataError(f"{path}: models were trained on a different encoder layout")

    try:
        return RegressorSet(
            mode=FeatureMode(fields["mode"]),
            slots=slot_tuple,
            weights=weights,
            intercepts=intercepts,
            training_languages=tuple(code for code in fields["training_languages"].split(",") if code),
        )
    except (ValueError, ValidationError) as e:
        raise DataError(f"{path}: {e}") from e
