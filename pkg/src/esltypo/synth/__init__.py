from .generator import (
    SynthConfig,
    SyntheticDataset,
    conllu_document,
    conllu_documents,
    generate,
    write_dataset,
    write_planted,
)

__all__ = [
    "SynthConfig",
    "SyntheticDataset",
    "conllu_document",
    "conllu_documents",
    "generate",
    "write_dataset",
    "write_planted",
]
