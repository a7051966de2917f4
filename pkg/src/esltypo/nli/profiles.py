"""Morpho-syntactic profiles of parsed ESL documents."""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable, Sequence
from pathlib import Path

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from esltypo.corpus.records import Corpus
from esltypo.nli.conllu import ROOT, Sentence, read_conllu
from esltypo.shared.exceptions import DataError, EmptyProfileError, ParseError
from esltypo.shared.version import PROFILE_CACHE_VERSION
from esltypo.utilities.logging import get_logger

logger = get_logger(__name__)

POS_PREFIX = "pos:"
DEPREL_PREFIX = "dep:"
ARC_PREFIX = "arc:"
FAMILIES = (POS_PREFIX, DEPREL_PREFIX, ARC_PREFIX)
FAMILY_TOLERANCE = 1e-6

PROFILE_CACHE_HEADER = {"format": "esltypo-profiles", "version": PROFILE_CACHE_VERSION}


def arc_feature(head_upos: str, dependent_upos: str, deprel: str) -> str:
    return f"{ARC_PREFIX}{head_upos}>{dependent_upos}:{deprel}"


class MorphoSyntacticProfile(BaseModel):
    """Relative frequencies of UPOS tags, relation labels and (head, dependent, relation) arcs.

    Each family is normalized on its own. A family can be empty, e.g. the arc family
    of a document made only of root tokens.
    """

    model_config = ConfigDict(frozen=True)

    doc_id: str
    native_language: str
    feature_values: dict[str, float]

    @field_validator("feature_values")
    @classmethod
    def check_families(cls, values: dict[str, float]) -> dict[str, float]:
        if any(value < 0 for value in values.values()):
            raise ValueError("Profile frequencies must be non-negative")
        for prefix in FAMILIES:
            family = [value for name, value in values.items() if name.startswith(prefix)]
            if family and abs(sum(family) - 1.0) > FAMILY_TOLERANCE:
                raise ValueError(f"{prefix} frequencies sum to {sum(family)!r}")
        unknown = sorted(name for name in values if not name.startswith(FAMILIES))
        if unknown:
            raise ValueError(f"Unknown profile features: {', '.join(unknown[:5])}")
        return dict(sorted(values.items()))


def _normalized(counts: Counter[str]) -> dict[str, float]:
    total = sum(counts.values())
    return {name: count / total for name, count in counts.items()} if total else {}


def profile_from_sentences(
    sentences: Sequence[Sentence],
    *,
    doc_id: str,
    native_language: str,
    path: Path | None = None,
) -> MorphoSyntacticProfile:
    pos: Counter[str] = Counter()
    relations: Counter[str] = Counter()
    arcs: Counter[str] = Counter()
    for sentence in sentences:
        by_id = {token.id: token for token in sentence}
        for token in sentence:
            pos[POS_PREFIX + token.upos] += 1
            relations[DEPREL_PREFIX + token.deprel] += 1
            if token.head == ROOT:
                continue
            head = by_id.get(token.head)
            if head is None:
                raise ParseError(f"Token {token.id} points to missing head {token.head}", path=path)
            arcs[arc_feature(head.upos, token.upos, token.deprel)] += 1
    if not pos:
        raise EmptyProfileError(f"Document {doc_id!r} has no tokens")
    return MorphoSyntacticProfile(
        doc_id=doc_id,
        native_language=native_language,
        feature_values=_normalized(pos) | _normalized(relations) | _normalized(arcs),
    )


def extract_profile(source: Path | str, native_language: str, *, doc_id: str | None = None) -> MorphoSyntacticProfile:
    """Profile of one CoNLL-U document; the document id defaults to the file stem."""
    path = Path(source)
    return profile_from_sentences(
        read_conllu(path),
        doc_id=doc_id if doc_id is not None else path.stem,
        native_language=native_language,
        path=path,
    )


def extract_profiles(directory: Path | str, corpus: Corpus) -> list[MorphoSyntacticProfile]:
    """One profile per corpus document, read from `<doc_id>.conllu` below `directory`.

    Raises:
        DataError: a corpus document has no parse
    """
    root = Path(directory)
    missing = sorted(
        document.doc_id for document in corpus.documents if not (root / f"{document.doc_id}.conllu").is_file()
    )
    if missing:
        preview = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
        raise DataError(f"{len(missing)} document(s) have no CoNLL-U parse in {root}: {preview}")
    profiles = [
        extract_profile(root / f"{document.doc_id}.conllu", document.native_language, doc_id=document.doc_id)
        for document in corpus.documents
    ]
    logger.info(f"Extracted {len(profiles)} morpho-syntactic profiles", extra={"directory": str(root)})
    return profiles


def write_profiles(profiles: Iterable[MorphoSyntacticProfile], destination: Path | str) -> None:
    lines = [json.dumps(PROFILE_CACHE_HEADER, sort_keys=True)]
    lines.extend(profile.model_dump_json() for profile in profiles)
    Path(destination).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_profiles(source: Path | str) -> list[MorphoSyntacticProfile]:
    path = Path(source)
    lines = path.read_text(encoding="utf-8").splitlines()
    try:
        header = json.loads(lines[0]) if lines else None
    except json.JSONDecodeError:
        header = None
    if header != PROFILE_CACHE_HEADER:
        raise ParseError(f"Not a version {PROFILE_CACHE_VERSION} profile cache", path=path, line_number=1)
    profiles: list[MorphoSyntacticProfile] = []
    for line_number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            profiles.append(MorphoSyntacticProfile.model_validate_json(line))
        except ValidationError as e:
            raise ParseError(e.errors()[0]["msg"], path=path, line_number=line_number) from e
    return profiles
