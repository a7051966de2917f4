from .database import (
    DISCARDED_CATEGORIES,
    WALS_CATEGORIES,
    TypologyDatabase,
    TypologySummary,
    WalsFeature,
    build_database,
    filter_features,
    load_typology,
    restrict_languages,
    typology_summary,
    write_typology,
)
from .encoding import (
    EncodedFeatureVector,
    FeatureBlock,
    Slot,
    binarize,
    build_layout,
    divergence_encode,
    encode,
    export_layout,
    typological_cosine,
)

__all__ = [
    "DISCARDED_CATEGORIES",
    "WALS_CATEGORIES",
    "TypologyDatabase",
    "TypologySummary",
    "WalsFeature",
    "build_database",
    "filter_features",
    "load_typology",
    "restrict_languages",
    "typology_summary",
    "write_typology",
    "EncodedFeatureVector",
    "FeatureBlock",
    "Slot",
    "binarize",
    "build_layout",
    "divergence_encode",
    "encode",
    "export_layout",
    "typological_cosine",
]
