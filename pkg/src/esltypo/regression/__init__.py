from .baselines import baseline_base, baseline_nn, nearest_language
from .least_squares import LeastSquaresFit, fit_least_squares
from .models import RegressorSet, clamp_distribution, predict_distribution, train_models, train_on_encodings
from .protocol import FoldParameters, FoldResult, leave_one_out, leave_one_out_folds, run_fold
from .salience import (
    SalienceEntry,
    feature_salience,
    salience_by_type,
    top_negative,
    top_positive,
    write_salience_tsv,
)
from .serialization import dump_regressors, dumps_regressors, load_regressors

__all__ = [
    "FoldParameters",
    "FoldResult",
    "LeastSquaresFit",
    "RegressorSet",
    "SalienceEntry",
    "baseline_base",
    "baseline_nn",
    "clamp_distribution",
    "dump_regressors",
    "dumps_regressors",
    "feature_salience",
    "fit_least_squares",
    "leave_one_out",
    "leave_one_out_folds",
    "load_regressors",
    "nearest_language",
    "predict_distribution",
    "run_fold",
    "salience_by_type",
    "top_negative",
    "top_positive",
    "train_models",
    "train_on_encodings",
    "write_salience_tsv",
]
