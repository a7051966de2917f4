from pathlib import Path

import pytest

from esltypo.corpus.records import Corpus
from esltypo.synth.generator import SynthConfig, SyntheticDataset, generate
from esltypo.typology.database import TypologyDatabase, filter_features, load_typology
from esltypo.types import ERROR_TYPES, Document, ErrorType

TOY_LANGUAGES = ("aaa", "bbb", "ccc", "ddd")

TOY_TYPOLOGY = """\
language_code\tfeature_id\tfeature_name\tcategory\tvalue_label
eng\t81A\tOrder of Subject, Object and Verb\tWord Order\tSVO
eng\t87A\tOrder of Adjective and Noun\tWord Order\tAN
eng\t37A\tDefinite Articles\tNominal Categories\tDefinite word
eng\t1A\tConsonant Inventories\tPhonology\tAverage
eng\t85A\tOrder of Adposition and Noun Phrase\tWord Order\tPrepositions
aaa\t81A\tOrder of Subject, Object and Verb\tWord Order\tSOV
aaa\t87A\tOrder of Adjective and Noun\tWord Order\tAN
aaa\t37A\tDefinite Articles\tNominal Categories\tNo definite article
aaa\t1A\tConsonant Inventories\tPhonology\tSmall
aaa\t85A\tOrder of Adposition and Noun Phrase\tWord Order\tPrepositions
bbb\t81A\tOrder of Subject, Object and Verb\tWord Order\tSVO
bbb\t87A\tOrder of Adjective and Noun\tWord Order\tNA
bbb\t37A\tDefinite Articles\tNominal Categories\tDefinite word
bbb\t200A\tSingleton Feature\tSimple Clauses\tPresent
ccc\t81A\tOrder of Subject, Object and Verb\tWord Order\tVSO
ccc\t87A\tOrder of Adjective and Noun\tWord Order\tNA
ccc\t37A\tDefinite Articles\tNominal Categories\tNo definite article
ddd\t81A\tOrder of Subject, Object and Verb\tWord Order\tSOV
ddd\t37A\tDefinite Articles\tNominal Categories\tNo definite article
"""


def make_document(doc_id: str, language: str, counts: dict[ErrorType, int], word_count: int = 300) -> Document:
    return Document(doc_id=doc_id, native_language=language, word_count=word_count, error_counts=counts)


def toy_counts(language_index: int, document_index: int) -> dict[ErrorType, int]:
    """Counts with every error type present, different for every language."""
    return {
        error_type: 1 + (position * (language_index + 1) + document_index + language_index) % 5
        for position, error_type in enumerate(ERROR_TYPES)
    }


@pytest.fixture
def typology_path(tmp_path: Path) -> Path:
    path = tmp_path / "typology.tsv"
    path.write_text(TOY_TYPOLOGY, encoding="utf-8")
    return path


@pytest.fixture
def raw_typology(typology_path: Path) -> TypologyDatabase:
    return load_typology(typology_path)


@pytest.fixture
def toy_typology(raw_typology: TypologyDatabase) -> TypologyDatabase:
    """Filtered toy database: 81A, 87A and 37A survive."""
    return filter_features(raw_typology)


@pytest.fixture
def toy_corpus() -> Corpus:
    documents = [
        make_document(f"{language}-{index}", language, toy_counts(language_index, index))
        for language_index, language in enumerate(TOY_LANGUAGES)
        for index in range(3)
    ]
    return Corpus(documents=tuple(documents))


@pytest.fixture(scope="session")
def synthetic() -> SyntheticDataset:
    return generate(SynthConfig(n_languages=6, n_features=15, docs_per_language=20, seed=3))


@pytest.fixture(scope="session")
def synthetic_typology(synthetic: SyntheticDataset) -> TypologyDatabase:
    return filter_features(synthetic.typology)
