from .bootstrap import BootstrapParameters, BootstrapResult, bootstrap_predict, run_bootstrap
from .classifier import FeatureIndex, LogLinearModel, objective_and_gradient, train_classifier
from .conllu import Token, parse_conllu, read_conllu
from .profiles import MorphoSyntacticProfile, extract_profile, extract_profiles, load_profiles, write_profiles
from .projection import ProjectedTypology, ProjectionAccuracy, project_typology, projection_accuracy
from .similarity import (
    CrossValidatedPosteriors,
    SimilarityMatrix,
    confusion_from_posteriors,
    confusion_similarity,
    cross_validated_posteriors,
    fold_assignments,
    symmetrize,
)

__all__ = [
    "BootstrapParameters",
    "BootstrapResult",
    "CrossValidatedPosteriors",
    "FeatureIndex",
    "LogLinearModel",
    "MorphoSyntacticProfile",
    "ProjectedTypology",
    "ProjectionAccuracy",
    "SimilarityMatrix",
    "Token",
    "bootstrap_predict",
    "confusion_from_posteriors",
    "confusion_similarity",
    "cross_validated_posteriors",
    "extract_profile",
    "extract_profiles",
    "fold_assignments",
    "load_profiles",
    "objective_and_gradient",
    "parse_conllu",
    "project_typology",
    "projection_accuracy",
    "read_conllu",
    "run_bootstrap",
    "symmetrize",
    "train_classifier",
    "write_profiles",
]
