"""Binary encodings of typological profiles."""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from esltypo.shared.exceptions import UndefinedSimilarityError
from esltypo.typology.database import TypologyDatabase
from esltypo.types import FeatureMode

DIVERGENCE_LABEL = "≠eng"


class Slot(BaseModel):
    """One coordinate of an encoding: a (feature, value) indicator or a divergence indicator."""

    model_config = ConfigDict(frozen=True)

    feature_id: str
    feature_name: str
    value: str
    """The value label, or `DIVERGENCE_LABEL` for a divergence slot."""

    @property
    def kind(self) -> Literal["value", "divergence"]:
        return "divergence" if self.value == DIVERGENCE_LABEL else "value"

    def describe(self) -> str:
        if self.kind == "divergence":
            return f"{self.feature_id} {self.feature_name}: Different from English"
        return f"{self.feature_id} {self.feature_name}: {self.value}"


class FeatureBlock(BaseModel):
    model_config = ConfigDict(frozen=True)

    slots: tuple[Slot, ...]
    values: tuple[int, ...]

    @model_validator(mode="after")
    def check_shape(self) -> FeatureBlock:
        if len(self.slots) != len(self.values):
            raise ValueError("Slots and values must have the same length")
        if any(value not in (0, 1) for value in self.values):
            raise ValueError("Encoded values must be 0 or 1")
        return self


class EncodedFeatureVector(BaseModel):
    """Binary feature vector of one language together with its layout manifest."""

    model_config = ConfigDict(frozen=True)

    language: str
    mode: FeatureMode
    slots: tuple[Slot, ...]
    values: tuple[int, ...]

    @model_validator(mode="after")
    def check_layout(self) -> EncodedFeatureVector:
        if len(self.slots) != len(self.values):
            raise ValueError("Slots and values must have the same length")
        if any(value not in (0, 1) for value in self.values):
            raise ValueError("Encoded values must be 0 or 1")
        if self.mode is FeatureMode.REG and any(slot.kind == "divergence" for slot in self.slots):
            raise ValueError("Divergence slots only exist in RegCA mode")
        return self

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def layout_hash(self) -> str:
        return layout_hash(self.slots)


def layout_hash(slots: tuple[Slot, ...]) -> str:
    digest = hashlib.sha256()
    for slot in slots:
        digest.update(f"{slot.feature_id}\t{slot.value}\n".encode())
    return digest.hexdigest()


def value_slots(db: TypologyDatabase) -> tuple[Slot, ...]:
    return tuple(
        Slot(feature_id=feature.id, feature_name=feature.name, value=value)
        for feature in db.features
        for value in feature.value_names
    )


def divergence_slots(db: TypologyDatabase) -> tuple[Slot, ...]:
    english = db.require_english()
    return tuple(
        Slot(feature_id=feature.id, feature_name=feature.name, value=DIVERGENCE_LABEL)
        for feature in db.features
        if feature.id in english
    )


def build_layout(db: TypologyDatabase, mode: FeatureMode) -> tuple[Slot, ...]:
    if mode is FeatureMode.REG:
        return value_slots(db)
    return value_slots(db) + divergence_slots(db)


def binarize(db: TypologyDatabase, language: str) -> EncodedFeatureVector:
    """One-hot block per feature; undocumented features stay all zero."""
    documented = db.documented(language)
    values = [
        int(documented.get(feature.id) == value) for feature in db.features for value in feature.value_names
    ]
    return EncodedFeatureVector(language=language, mode=FeatureMode.REG, slots=value_slots(db), values=tuple(values))


def divergence_encode(db: TypologyDatabase, language: str) -> FeatureBlock:
    """One slot per English-documented feature, set when the language documents a different value."""
    english = db.require_english()
    documented = db.documented(language)
    values = [
        int(feature.id in documented and documented[feature.id] != english[feature.id])
        for feature in db.features
        if feature.id in english
    ]
    return FeatureBlock(slots=divergence_slots(db), values=tuple(values))


def encode(db: TypologyDatabase, language: str, mode: FeatureMode) -> EncodedFeatureVector:
    typology = binarize(db, language)
    if mode is FeatureMode.REG:
        return typology
    divergence = divergence_encode(db, language)
    return EncodedFeatureVector(
        language=language,
        mode=FeatureMode.REG_CA,
        slots=typology.slots + divergence.slots,
        values=typology.values + divergence.values,
    )


def cosine(left: np.ndarray, right: np.ndarray) -> float:
    left_norm = float(np.linalg.norm(left))
    right_norm = float(np.linalg.norm(right))
    if left_norm == 0.0 or right_norm == 0.0:
        raise UndefinedSimilarityError("Cosine similarity is undefined for an all-zero encoding")
    return float(np.clip(np.dot(left, right) / (left_norm * right_norm), 0.0, 1.0))


def typological_cosine(db: TypologyDatabase, first: str, second: str) -> float:
    """Cosine similarity of the binarized (Reg mode) encodings of two languages."""
    try:
        return cosine(binarize(db, first).as_array(), binarize(db, second).as_array())
    except UndefinedSimilarityError:
        raise UndefinedSimilarityError(f"No documented features for {first!r} or {second!r}") from None


def export_layout(slots: tuple[Slot, ...], destination: Path | str) -> None:
    """Write the two-column (index, slot description) layout manifest."""
    lines = [f"{index}\t{slot.describe()}" for index, slot in enumerate(slots)]
    Path(destination).write_text("index\tslot\n" + "\n".join(lines) + "\n", encoding="utf-8")
