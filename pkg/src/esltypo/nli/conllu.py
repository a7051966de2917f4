"""Minimal reader for dependency-parsed CoNLL-U files.

Only the columns the profile extractor needs are kept. Comment lines, multiword
token ranges (`3-4`) and empty nodes (`5.1`) are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from esltypo.shared.exceptions import ParseError

CONLLU_COLUMNS = 10
ROOT = 0


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    upos: str
    head: int
    deprel: str


Sentence = tuple[Token, ...]


def _parse_token(columns: list[str], path: Path | None, line_number: int) -> Token | None:
    if len(columns) != CONLLU_COLUMNS:
        raise ParseError(f"Expected {CONLLU_COLUMNS} columns, got {len(columns)}", path=path, line_number=line_number)
    token_id, form, _lemma, upos, _xpos, _feats, head, deprel, _deps, _misc = columns
    if "-" in token_id or "." in token_id:
        return None
    try:
        index = int(token_id)
        head_index = int(head)
    except ValueError:
        message = f"Non-integer ID or HEAD: {token_id!r}, {head!r}"
        raise ParseError(message, path=path, line_number=line_number) from None
    if upos in ("", "_") or deprel in ("", "_"):
        raise ParseError("UPOS and DEPREL must be populated", path=path, line_number=line_number)
    if index < 1 or head_index < 0:
        raise ParseError(f"Invalid token index {index} or head {head_index}", path=path, line_number=line_number)
    return Token(id=index, form=form, upos=upos, head=head_index, deprel=deprel)


def parse_conllu(text: str, *, path: Path | None = None) -> list[Sentence]:
    """Split CoNLL-U text into sentences of syntactic word tokens."""
    sentences: list[Sentence] = []
    current: list[Token] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if current:
                sentences.append(tuple(current))
                current = []
            continue
        if line.startswith("#"):
            continue
        token = _parse_token(line.split("\t"), path, line_number)
        if token is None:
            continue
        if token.head > 0 and token.head == token.id:
            raise ParseError(f"Token {token.id} is its own head", path=path, line_number=line_number)
        current.append(token)
    if current:
        sentences.append(tuple(current))
    return sentences


def read_conllu(source: Path | str) -> list[Sentence]:
    path = Path(source)
    return parse_conllu(path.read_text(encoding="utf-8"), path=path)
