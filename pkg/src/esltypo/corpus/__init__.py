from .frequencies import Pooling, doc_error_fractions, language_error_distribution, language_error_distributions
from .records import Corpus, CorpusRecord, CorpusSummary, corpus_summary, load_corpus, write_corpus

__all__ = [
    "Corpus",
    "CorpusRecord",
    "CorpusSummary",
    "Pooling",
    "corpus_summary",
    "doc_error_fractions",
    "language_error_distribution",
    "language_error_distributions",
    "load_corpus",
    "write_corpus",
]
