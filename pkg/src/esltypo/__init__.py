from .corpus import Corpus, corpus_summary, load_corpus
from .eval import EvaluationSummary, kl_divergence, mean_absolute_error, summarize
from .nli import run_bootstrap
from .regression import RegressorSet, leave_one_out, run_fold, train_models
from .settings import Settings
from .shared.exceptions import EslTypoError, InputError
from .stats import kruskal_wallis, mann_whitney, variance_report
from .synth import SynthConfig, generate
from .typology import TypologyDatabase, encode, filter_features, load_typology
from .types import (
    ERROR_TYPES,
    SYSTEMS,
    Document,
    ErrorDistribution,
    ErrorType,
    FeatureMode,
    PredictionRecord,
    System,
)

__all__ = [
    "ERROR_TYPES",
    "SYSTEMS",
    "Corpus",
    "Document",
    "ErrorDistribution",
    "ErrorType",
    "EslTypoError",
    "EvaluationSummary",
    "FeatureMode",
    "InputError",
    "PredictionRecord",
    "RegressorSet",
    "Settings",
    "SynthConfig",
    "System",
    "TypologyDatabase",
    "corpus_summary",
    "encode",
    "filter_features",
    "generate",
    "kl_divergence",
    "kruskal_wallis",
    "leave_one_out",
    "load_corpus",
    "load_typology",
    "mean_absolute_error",
    "run_bootstrap",
    "run_fold",
    "summarize",
    "train_models",
    "variance_report",
]
