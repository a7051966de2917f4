"""Line-delimited corpus records.

Each line of a corpus file is one JSON object describing one document:

    {"doc_id": "doc-0001", "native_language": "jpn", "word_count": 379,
     "error_counts": {"MD": 2, "TV": 1}, "annotations": [...]}

Only the counts matter; `annotations` and any other extra keys are accepted and
ignored.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from esltypo.shared.exceptions import DataError, ParseError, UnknownLanguageError
from esltypo.types import ERROR_CODES, ERROR_TYPES, Document, ErrorType
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)


class CorpusRecord(BaseModel):
    """Wire format of one document."""

    model_config = ConfigDict(extra="ignore")

    doc_id: str = Field(min_length=1)
    native_language: str = Field(min_length=1)
    word_count: int = Field(ge=1)
    error_counts: dict[str, int] = Field(default_factory=dict)

    @field_validator("error_counts")
    @classmethod
    def check_counts(cls, counts: dict[str, int]) -> dict[str, int]:
        for code, count in counts.items():
            if count < 0:
                raise ValueError(f"Negative count for {code}")
        return counts

    def to_document(self) -> Document:
        unknown = sorted(code for code in self.error_counts if code not in ERROR_CODES)
        if unknown:
            raise DataError(f"Unknown error code(s) {', '.join(unknown)} in document {self.doc_id}")
        return Document(
            doc_id=self.doc_id,
            native_language=self.native_language,
            word_count=self.word_count,
            error_counts={ErrorType(code): count for code, count in self.error_counts.items()},
        )


class Corpus(BaseModel):
    """Documents grouped by the native language of their authors."""

    model_config = ConfigDict(frozen=True)

    documents: tuple[Document, ...]

    @field_validator("documents")
    @classmethod
    def check_unique_ids(cls, documents: tuple[Document, ...]) -> tuple[Document, ...]:
        counts = Counter(document.doc_id for document in documents)
        duplicates = sorted(doc_id for doc_id, count in counts.items() if count > 1)
        if duplicates:
            raise ValueError(f"Duplicate doc_id(s): {', '.join(duplicates)}")
        return documents

    @property
    def languages(self) -> tuple[str, ...]:
        return tuple(sorted({document.native_language for document in self.documents}))

    def documents_for(self, language: str) -> tuple[Document, ...]:
        selected = tuple(document for document in self.documents if document.native_language == language)
        if not selected:
            raise UnknownLanguageError(f"Unknown language: {language}")
        return selected

    def by_language(self) -> dict[str, tuple[Document, ...]]:
        grouped: dict[str, list[Document]] = defaultdict(list)
        for document in self.documents:
            grouped[document.native_language].append(document)
        return {language: tuple(grouped[language]) for language in sorted(grouped)}

    def document(self, doc_id: str) -> Document:
        for document in self.documents:
            if document.doc_id == doc_id:
                return document
        raise KeyError(doc_id)

    def restrict(self, *, min_documents: int = 1, languages: Iterable[str] | None = None) -> Corpus:
        """Drop languages with fewer than `min_documents` documents, or outside `languages`."""
        allowed = set(languages) if languages is not None else None
        kept: list[Document] = []
        for language, documents in self.by_language().items():
            if allowed is not None and language not in allowed:
                continue
            if len(documents) < min_documents:
                logger.warning(
                    f"Dropping {language}: {len(documents)} document(s) is below the minimum of {min_documents}"
                )
                continue
            kept.extend(documents)
        return Corpus(documents=tuple(kept))


class CorpusSummary(BaseModel):
    languages: dict[str, int]
    """Documents per language."""
    n_documents: int
    mean_words_per_document: float
    error_type_counts: dict[ErrorType, int]


def _parse_line(line: str, path: Path, line_number: int) -> Document:
    try:
        payload: Any = json.loads(line)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON: {e.msg}", path=path, line_number=line_number) from e
    try:
        record = CorpusRecord.model_validate(payload)
    except ValidationError as e:
        raise ParseError(f"Invalid record: {e.errors()[0]['msg']}", path=path, line_number=line_number) from e
    try:
        return record.to_document()
    except DataError as e:
        raise DataError(f"{path}:{line_number}: {e}") from e


def load_corpus(source: Path | str) -> Corpus:
    """Load a line-delimited corpus file.

    Raises:
        ParseError: a line is not a valid record
        DataError: an error code is outside the 20 structural types, or a doc_id repeats
    """
    path = Path(source)
    documents: list[Document] = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            document = _parse_line(line, path, line_number)
            if document.doc_id in seen:
                raise DataError(
                    f"Duplicate doc_id {document.doc_id!r} on lines {seen[document.doc_id]} and {line_number}"
                )
            seen[document.doc_id] = line_number
            documents.append(document)

    corpus = Corpus(documents=tuple(documents))
    logger.debug("Loaded corpus", extra={"path": str(path), "documents": len(documents)})
    return corpus


def write_corpus(corpus: Corpus, destination: Path | str) -> None:
    """Write a corpus in the format read by `load_corpus`."""
    with Path(destination).open("w", encoding="utf-8") as handle:
        for document in corpus.documents:
            record = {
                "doc_id": document.doc_id,
                "native_language": document.native_language,
                "word_count": document.word_count,
                "error_counts": {
                    error_type.value: document.error_counts[error_type]
                    for error_type in ERROR_TYPES
                    if document.error_counts.get(error_type)
                },
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")


def corpus_summary(corpus: Corpus) -> CorpusSummary:
    totals: Counter[ErrorType] = Counter()
    for document in corpus.documents:
        totals.update(document.error_counts)
    n_documents = len(corpus.documents)
    return CorpusSummary(
        languages={language: len(documents) for language, documents in corpus.by_language().items()},
        n_documents=n_documents,
        mean_words_per_document=(
            sum(document.word_count for document in corpus.documents) / n_documents if n_documents else 0.0
        ),
        error_type_counts={error_type: totals.get(error_type, 0) for error_type in ERROR_TYPES},
    )
