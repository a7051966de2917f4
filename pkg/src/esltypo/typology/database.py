"""Typological database ingestion and feature filtering."""

from __future__ import annotations

import csv
from collections import defaultdict
from collections.abc import Iterable, Mapping
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from esltypo.shared.exceptions import ConfigurationError, DataError, ParseError, UnknownLanguageError
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

WALS_CATEGORIES: tuple[str, ...] = (
    "Phonology",
    "Morphology",
    "Nominal Categories",
    "Nominal Syntax",
    "Verbal Categories",
    "Word Order",
    "Simple Clauses",
    "Complex Sentences",
    "Lexicon",
    "Sign Languages",
    "Other",
)

DISCARDED_CATEGORIES: frozenset[str] = frozenset({"Phonology", "Lexicon", "Sign Languages", "Other"})

TYPOLOGY_COLUMNS: tuple[str, ...] = ("language_code", "feature_id", "feature_name", "category", "value_label")

_CATEGORY_LOOKUP = {category.casefold(): category for category in WALS_CATEGORIES}


class WalsFeature(BaseModel):
    """A categorical typological feature such as 87A, Order of Adjective and Noun."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    name: str
    category: str
    value_names: tuple[str, ...]

    @model_validator(mode="after")
    def check_values(self) -> WalsFeature:
        if self.category not in WALS_CATEGORIES:
            raise ValueError(f"Unknown category {self.category!r} for feature {self.id}")
        if len(set(self.value_names)) != len(self.value_names):
            raise ValueError(f"Duplicate value names for feature {self.id}")
        return self


class TypologyDatabase(BaseModel):
    """Languages x categorical features, with missing values left out of `assignments`."""

    model_config = ConfigDict(frozen=True)

    features: tuple[WalsFeature, ...]
    languages: tuple[str, ...]
    assignments: dict[str, dict[str, str]]
    """language code -> feature id -> value label (documented values only)."""
    english_code: str = "eng"

    @model_validator(mode="after")
    def check_assignments(self) -> TypologyDatabase:
        known = {feature.id: set(feature.value_names) for feature in self.features}
        if len(known) != len(self.features):
            raise ValueError("Feature ids must be unique")
        for language, values in self.assignments.items():
            if language not in self.languages:
                raise ValueError(f"Assignments reference undeclared language {language!r}")
            for feature_id, value in values.items():
                if feature_id not in known:
                    raise ValueError(f"Unknown feature {feature_id!r} assigned for {language!r}")
                if value not in known[feature_id]:
                    raise ValueError(f"Value {value!r} is not a value of feature {feature_id} ({language!r})")
        return self

    def feature(self, feature_id: str) -> WalsFeature:
        for feature in self.features:
            if feature.id == feature_id:
                return feature
        raise KeyError(feature_id)

    def documented(self, language: str) -> dict[str, str]:
        """Documented feature values of a language."""
        if language not in self.languages:
            raise UnknownLanguageError(f"Unknown language: {language}")
        return dict(self.assignments.get(language, {}))

    def value(self, language: str, feature_id: str) -> str | None:
        return self.documented(language).get(feature_id)

    def require_english(self) -> dict[str, str]:
        """English documented values; a configuration error if English is absent or empty."""
        if self.english_code not in self.languages or not self.assignments.get(self.english_code):
            raise ConfigurationError(f"English ({self.english_code!r}) has no documented typology")
        return dict(self.assignments[self.english_code])

    def with_language(self, language: str, values: Mapping[str, str]) -> TypologyDatabase:
        """Copy of the database where `language` documents exactly `values`."""
        assignments = {code: dict(documented) for code, documented in self.assignments.items()}
        assignments[language] = dict(values)
        languages = self.languages if language in self.languages else (*self.languages, language)
        return self.model_copy(update={"assignments": assignments, "languages": tuple(sorted(languages))})


class TypologySummary(BaseModel):
    n_languages: int
    n_features: int
    mean_values_per_feature: float
    mean_documented_per_language: float


def build_database(
    rows: Iterable[tuple[str, str, str, str, str]],
    english_code: str,
    languages: Iterable[str] = (),
) -> TypologyDatabase:
    """Infer value sets from rows; features sorted by id, values by label."""
    names: dict[str, tuple[str, str]] = {}
    values: dict[str, set[str]] = defaultdict(set)
    assignments: dict[str, dict[str, str]] = defaultdict(dict)
    declared = set(languages)
    for language, feature_id, feature_name, category, value in rows:
        names.setdefault(feature_id, (feature_name, category))
        values[feature_id].add(value)
        assignments[language][feature_id] = value
        declared.add(language)
    features = tuple(
        WalsFeature(
            id=feature_id,
            name=names[feature_id][0],
            category=names[feature_id][1],
            value_names=tuple(sorted(values[feature_id])),
        )
        for feature_id in sorted(names)
    )
    return TypologyDatabase(
        features=features,
        languages=tuple(sorted(declared)),
        assignments={language: dict(documented) for language, documented in assignments.items()},
        english_code=english_code,
    )


def _rows(db: TypologyDatabase) -> list[tuple[str, str, str, str, str]]:
    by_id = {feature.id: feature for feature in db.features}
    return [
        (language, feature_id, by_id[feature_id].name, by_id[feature_id].category, value)
        for language in sorted(db.assignments)
        for feature_id, value in sorted(db.assignments[language].items())
    ]


def load_typology(source: Path | str, *, english_code: str = "eng", require_english: bool = True) -> TypologyDatabase:
    """Load a tab-separated typology export.

    The file has a header row naming the columns language_code, feature_id,
    feature_name, category and value_label; each further row documents one value.

    Raises:
        ParseError: a row is malformed (the line number is reported)
        DataError: a (language, feature) pair is documented twice, or a feature's
            name or category is inconsistent across rows
    """
    path = Path(source)
    rows: list[tuple[str, str, str, str, str]] = []
    seen: dict[tuple[str, str], int] = {}
    metadata: dict[str, tuple[str, str]] = {}
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter="\t", quoting=csv.QUOTE_NONE)
        header = next(reader, None)
        if header is None or tuple(column.strip() for column in header) != TYPOLOGY_COLUMNS:
            raise ParseError(f"Expected header {'/'.join(TYPOLOGY_COLUMNS)}", path=path, line_number=1)
        for line_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(TYPOLOGY_COLUMNS):
                raise ParseError(
                    f"Expected {len(TYPOLOGY_COLUMNS)} columns, got {len(row)}", path=path, line_number=line_number
                )
            language, feature_id, feature_name, category, value = (cell.strip() for cell in row)
            if not language or not feature_id or not value:
                raise ParseError("Empty language, feature or value", path=path, line_number=line_number)
            canonical = _CATEGORY_LOOKUP.get(category.casefold())
            if canonical is None:
                raise ParseError(f"Unknown category {category!r}", path=path, line_number=line_number)
            key = (language, feature_id)
            if key in seen:
                raise DataError(
                    f"Duplicate assignment for ({language}, {feature_id}) on lines {seen[key]} and {line_number}"
                )
            seen[key] = line_number
            if metadata.setdefault(feature_id, (feature_name, canonical)) != (feature_name, canonical):
                raise DataError(f"Feature {feature_id} has inconsistent name or category on line {line_number}")
            rows.append((language, feature_id, feature_name, canonical, value))

    db = build_database(rows, english_code)
    logger.debug(
        "Loaded typology",
        extra={"path": str(path), "languages": len(db.languages), "features": len(db.features)},
    )
    if require_english:
        db.require_english()
    return db


def write_typology(db: TypologyDatabase, destination: Path | str) -> None:
    """Write a database in the format read by `load_typology`."""
    with Path(destination).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE)
        writer.writerow(TYPOLOGY_COLUMNS)
        writer.writerows(_rows(db))


def restrict_languages(db: TypologyDatabase, languages: Iterable[str]) -> TypologyDatabase:
    """Keep only the given languages (plus English); value sets are re-inferred from what remains."""
    keep = set(languages) | {db.english_code}
    missing = sorted(language for language in keep if language not in db.languages and language != db.english_code)
    if missing:
        raise UnknownLanguageError(f"Languages without typology: {', '.join(missing)}")
    rows = [row for row in _rows(db) if row[0] in keep]
    return build_database(rows, db.english_code, languages=(language for language in db.languages if language in keep))


def filter_features(db: TypologyDatabase) -> TypologyDatabase:
    """Drop discarded categories and uninformative features.

    A feature is uninformative when it is documented for at most one language of the
    database, or when every documented language shares the same value. Missing values
    never count as a distinct value.
    """
    kept: list[str] = []
    for feature in db.features:
        if feature.category in DISCARDED_CATEGORIES:
            continue
        documented = [
            db.assignments[language][feature.id]
            for language in db.languages
            if feature.id in db.assignments.get(language, {})
        ]
        if len(documented) <= 1 or len(set(documented)) == 1:
            continue
        kept.append(feature.id)

    keep = set(kept)
    rows = [row for row in _rows(db) if row[1] in keep]
    filtered = build_database(rows, db.english_code, languages=db.languages)
    logger.debug("Filtered typology features", extra={"kept": len(kept), "dropped": len(db.features) - len(kept)})
    return filtered


def typology_summary(db: TypologyDatabase, languages: Iterable[str] | None = None) -> TypologySummary:
    """Feature count, mean value-set size and mean documented features per language."""
    selected = list(languages) if languages is not None else [code for code in db.languages if code != db.english_code]
    n_features = len(db.features)
    return TypologySummary(
        n_languages=len(selected),
        n_features=n_features,
        mean_values_per_feature=(sum(len(f.value_names) for f in db.features) / n_features) if n_features else 0.0,
        mean_documented_per_language=(
            sum(len(db.assignments.get(language, {})) for language in selected) / len(selected) if selected else 0.0
        ),
    )
