"""Synthetic typology databases and learner corpora with a planted typology-to-error map.

Typology is drawn per language family: each family has a prototype, and member
languages copy it with per-feature mutations and missing values. The planted error
distribution of a language is

    normalize(link(W . f(t_l, t_eng) + b + noise))

where f is the filtered encoding the pipeline itself uses. Documents draw their error
counts multinomially from their language's planted distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from esltypo.corpus.records import Corpus, write_corpus
from esltypo.shared.exceptions import ConfigurationError
from esltypo.typology.database import (
    DISCARDED_CATEGORIES,
    WALS_CATEGORIES,
    TypologyDatabase,
    build_database,
    filter_features,
    write_typology,
)
from esltypo.typology.encoding import Slot, build_layout, encode
from esltypo.types import ERROR_TYPES, Document, ErrorDistribution, ErrorType, FeatureMode
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

Link = Literal["softplus", "linear"]

UPOS_TAGS = ("ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "NOUN", "NUM", "PRON", "PROPN", "SCONJ", "VERB")
DEPRELS = ("advmod", "amod", "aux", "case", "cc", "conj", "det", "nmod", "nsubj", "obj", "obl")

TYPOLOGY_FILE = "typology.tsv"
CORPUS_FILE = "corpus.jsonl"
PLANTED_FILE = "planted.tsv"
CONLLU_DIR = "conllu"


class SynthConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_languages: int = Field(default=14, ge=4)
    n_features: int = Field(default=30, ge=5)
    values_per_feature: int = Field(default=3, ge=2)
    docs_per_language: int = Field(default=100, ge=10)
    words_per_doc: float = Field(default=379.0, gt=0)
    error_rate: float = Field(default=0.05, gt=0, le=1)
    """Expected structural errors per word."""
    planted_weights: dict[ErrorType, tuple[float, ...]] | None = None
    """Explicit W over the filtered encoding; drawn at random when omitted."""
    weight_scale: float = Field(default=0.3, ge=0)
    noise_scale: float = Field(default=0.05, ge=0)
    missing_rate: float = Field(default=0.1, ge=0, lt=1)
    n_families: int = Field(default=3, ge=1)
    mutation_rate: float = Field(default=0.2, ge=0, le=1)
    link: Link = "softplus"
    mode: FeatureMode = FeatureMode.REG_CA
    row_space_holdout: bool = False
    """Generate languages in identical-typology pairs and keep W inside the span of
    encoding differences, so every leave-one-out fold can recover it exactly."""
    seed: int = 42
    english_code: str = "eng"

    @model_validator(mode="after")
    def check_consistency(self) -> SynthConfig:
        if self.n_families > self.n_languages:
            raise ValueError("n_families cannot exceed n_languages")
        if self.row_space_holdout and self.n_languages % 2:
            raise ValueError("row_space_holdout needs an even number of languages")
        if self.planted_weights is not None and set(self.planted_weights) != set(ERROR_TYPES):
            raise ValueError("planted_weights must cover all 20 error types")
        return self


@dataclass(frozen=True)
class SyntheticDataset:
    config: SynthConfig
    typology: TypologyDatabase
    """Unfiltered database, as written to disk."""
    corpus: Corpus
    planted: dict[str, ErrorDistribution]
    slots: tuple[Slot, ...]
    weights: np.ndarray
    """(error types x slots) planted map, ErrorType order."""
    intercepts: np.ndarray


def language_codes(config: SynthConfig) -> tuple[str, ...]:
    return tuple(f"l{index + 1:02d}" for index in range(config.n_languages))


def _feature_metadata(config: SynthConfig) -> list[tuple[str, str, str]]:
    categories = [category for category in WALS_CATEGORIES if category not in DISCARDED_CATEGORIES]
    return [
        (f"{index + 1:03d}A", f"Synthetic Feature {index + 1}", categories[index % len(categories)])
        for index in range(config.n_features)
    ]


def _draw_typology(config: SynthConfig, rng: np.random.Generator) -> TypologyDatabase:
    features = _feature_metadata(config)
    k = config.values_per_feature
    languages = language_codes(config)
    n_draws = config.n_languages // 2 if config.row_space_holdout else config.n_languages

    english = rng.integers(0, k, size=config.n_features)
    prototypes = rng.integers(0, k, size=(config.n_families, config.n_features))
    drawn: list[dict[int, int]] = []
    for index in range(n_draws):
        values = prototypes[index % config.n_families].copy()
        mutate = rng.random(config.n_features) < config.mutation_rate
        values[mutate] = rng.integers(0, k, size=int(mutate.sum()))
        missing = rng.random(config.n_features) < config.missing_rate
        if missing.all():
            missing[int(rng.integers(0, config.n_features))] = False
        drawn.append({feature: int(values[feature]) for feature in range(config.n_features) if not missing[feature]})

    if config.row_space_holdout:
        drawn = [values for values in drawn for _ in range(2)]

    rows: list[tuple[str, str, str, str, str]] = []
    for feature, (feature_id, name, category) in enumerate(features):
        rows.append((config.english_code, feature_id, name, category, f"v{int(english[feature]) + 1}"))
    for language, values in zip(languages, drawn, strict=True):
        for feature, value in values.items():
            feature_id, name, category = features[feature]
            rows.append((language, feature_id, name, category, f"v{value + 1}"))
    return build_database(rows, config.english_code, languages=(*languages, config.english_code))


def _base_intercepts() -> np.ndarray:
    """Decreasing intercepts in ErrorType (frequency rank) order."""
    ranks = np.arange(1, len(ERROR_TYPES) + 1, dtype=float)
    base = (1.0 / ranks) / np.sum(1.0 / ranks)
    return 1.0 + 20.0 * base


def _project_to_difference_span(weights: np.ndarray, encodings: np.ndarray) -> np.ndarray:
    """Project every row of `weights` onto the span of the centered encodings."""
    centered = encodings - encodings.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    if singular.size == 0 or singular[0] == 0.0:
        return np.zeros_like(weights)
    basis = vt[singular > 1e-10 * singular[0]]
    return weights @ basis.T @ basis


def _planted_map(
    config: SynthConfig, encodings: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    n_types, dimension = len(ERROR_TYPES), encodings.shape[1]
    intercepts = _base_intercepts()
    if config.planted_weights is not None:
        weights = np.array([config.planted_weights[error_type] for error_type in ERROR_TYPES], dtype=float)
        if weights.shape != (n_types, dimension):
            raise ConfigurationError(
                f"planted_weights must have {dimension} entries per error type, the filtered encoding size"
            )
    else:
        weights = rng.normal(0.0, config.weight_scale, size=(n_types, dimension))
    if config.link == "linear":
        weights = weights - weights.mean(axis=0)
    if config.row_space_holdout:
        weights = _project_to_difference_span(weights, encodings)
    if config.link == "linear":
        shift = encodings @ weights.T
        room = np.broadcast_to(intercepts - 0.1 * float(intercepts.min()), shift.shape)
        negative = shift < 0
        if negative.any():
            weights = weights * min(1.0, float(np.min(room[negative] / -shift[negative])))
    return weights, intercepts


def _apply_link(link: Link, z: np.ndarray) -> np.ndarray:
    if link == "softplus":
        return np.logaddexp(0.0, z)
    if np.any(z <= 0):
        raise ConfigurationError("Linear link produced a non-positive error rate")
    return z


def _draw_documents(
    config: SynthConfig, language: str, distribution: ErrorDistribution, rng: np.random.Generator
) -> list[Document]:
    probabilities = distribution.as_array()
    probabilities = probabilities / probabilities.sum()
    documents: list[Document] = []
    for index in range(config.docs_per_language):
        word_count = max(1, int(rng.poisson(config.words_per_doc)))
        n_errors = max(1, int(round(word_count * config.error_rate)))
        counts = dict(zip(ERROR_TYPES, rng.multinomial(n_errors, probabilities).tolist(), strict=True))
        documents.append(
            Document(
                doc_id=f"{language}-{index + 1:05d}",
                native_language=language,
                word_count=word_count,
                error_counts={error_type: count for error_type, count in counts.items() if count},
            )
        )
    return documents


def generate(config: SynthConfig | None = None) -> SyntheticDataset:
    """Draw a typology database, a corpus and the planted per-language distributions.

    The seed in `config` determines the output completely.
    """
    config = config or SynthConfig()
    rng = np.random.default_rng(config.seed)
    typology = _draw_typology(config, rng)
    filtered = filter_features(typology)
    if not filtered.features:
        raise ConfigurationError("Every synthetic feature was filtered out; raise n_features or lower missing_rate")

    languages = language_codes(config)
    slots = build_layout(filtered, config.mode)
    encodings = np.vstack([encode(filtered, language, config.mode).as_array() for language in languages])
    weights, intercepts = _planted_map(config, encodings, rng)
    noise = rng.normal(0.0, config.noise_scale, size=(len(languages), len(ERROR_TYPES)))
    rates = _apply_link(config.link, encodings @ weights.T + intercepts + noise)
    planted = {language: ErrorDistribution.from_array(row) for language, row in zip(languages, rates, strict=True)}

    documents = [
        document
        for language in languages
        for document in _draw_documents(config, language, planted[language], rng)
    ]
    logger.debug(
        "Generated synthetic dataset",
        extra={"languages": len(languages), "documents": len(documents), "dimension": len(slots)},
    )
    return SyntheticDataset(
        config=config,
        typology=typology,
        corpus=Corpus(documents=tuple(documents)),
        planted=planted,
        slots=slots,
        weights=weights,
        intercepts=intercepts,
    )


def _language_preferences(
    languages: tuple[str, ...], rng: np.random.Generator
) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    return {
        language: (rng.dirichlet(np.full(len(UPOS_TAGS), 0.5)), rng.dirichlet(np.full(len(DEPRELS), 0.5)))
        for language in languages
    }


def conllu_document(
    upos_preference: np.ndarray,
    deprel_preference: np.ndarray,
    rng: np.random.Generator,
    *,
    sentences: int = 3,
) -> str:
    """Random CoNLL-U sentences: token 1 is the root and every other token attaches to an earlier one."""
    blocks: list[str] = []
    for _ in range(sentences):
        length = int(rng.integers(4, 12))
        lines: list[str] = []
        for token in range(1, length + 1):
            upos = UPOS_TAGS[int(rng.choice(len(UPOS_TAGS), p=upos_preference))]
            if token == 1:
                head, deprel = 0, "root"
            else:
                head = int(rng.integers(1, token))
                deprel = DEPRELS[int(rng.choice(len(DEPRELS), p=deprel_preference))]
            lines.append("\t".join([str(token), f"w{token}", "_", upos, "_", "_", str(head), deprel, "_", "_"]))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n\n"


def conllu_documents(dataset: SyntheticDataset) -> dict[str, str]:
    """Parse template per corpus document, each language with its own POS and relation preferences."""
    rng = np.random.default_rng([dataset.config.seed, 1])
    preferences = _language_preferences(dataset.corpus.languages, rng)
    return {
        document.doc_id: conllu_document(*preferences[document.native_language], rng)
        for document in dataset.corpus.documents
    }


def write_planted(dataset: SyntheticDataset, destination: Path | str) -> None:
    lines = ["language\t" + "\t".join(error_type.value for error_type in ERROR_TYPES)]
    for language, distribution in sorted(dataset.planted.items()):
        lines.append(language + "\t" + "\t".join(repr(value) for value in distribution.as_array().tolist()))
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_dataset(dataset: SyntheticDataset, directory: Path | str, *, conllu: bool = True) -> list[Path]:
    """Write the typology TSV, corpus JSONL, planted distributions and optionally the parses."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    written = [root / TYPOLOGY_FILE, root / CORPUS_FILE, root / PLANTED_FILE]
    write_typology(dataset.typology, written[0])
    write_corpus(dataset.corpus, written[1])
    write_planted(dataset, written[2])
    if conllu:
        parses = root / CONLLU_DIR
        parses.mkdir(exist_ok=True)
        for doc_id, text in conllu_documents(dataset).items():
            (parses / f"{doc_id}.conllu").write_text(text, encoding="utf-8")
        written.append(parses)
    return written
