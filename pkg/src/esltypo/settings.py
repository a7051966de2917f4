"""Configuration for esltypo runs."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from esltypo.corpus.frequencies import Pooling
from esltypo.types import FeatureMode, System
from esltypo.utilities.hashing import canonical_sha256, file_sha256
from esltypo.utilities.logging import LogLevel

Subcommand = Literal["variance", "predict", "bootstrap", "synth", "encode"]


class Settings(BaseSettings):
    """Pipeline settings.

    All settings can be configured via environment variables with the prefix ESLTYPO_.
    For example, ESLTYPO_RIDGE_LAMBDA=0.5 will set ridge_lambda=0.5.
    """

    model_config = SettingsConfigDict(
        env_prefix="ESLTYPO_",
        env_file=".env",
        extra="ignore",
    )

    seed: int = 42
    """Single source of randomness for fold assignment and synthetic data."""

    mode: FeatureMode = FeatureMode.REG_CA
    systems: list[System] = Field(default_factory=lambda: list(System))

    # regression
    ridge_lambda: float = Field(default=0.0, ge=0.0)
    svd_rtol: float = Field(default=1e-10, gt=0.0)
    clamp_epsilon: float = Field(default=1e-6, gt=0.0)
    pooling: Pooling = "pooled"

    # corpus
    min_documents: int = Field(default=1, ge=1)

    # native language classifier
    nli_lambda: float = Field(default=1.0, ge=0.0)
    folds: int = Field(default=10, ge=2)
    max_iterations: int = Field(default=2000, ge=1)
    gradient_tolerance: float = Field(default=1e-5, gt=0.0)

    # typology
    english_code: str = "eng"

    # reporting
    top_k: int = Field(default=10, ge=1)
    jobs: int = Field(default=1, ge=1)
    log_level: LogLevel = "INFO"


class RunConfig(BaseModel):
    """Everything a single CLI run depends on; hashed into the run manifest."""

    subcommand: Subcommand
    typology_path: Path | None = None
    corpus_path: Path | None = None
    conllu_dir: Path | None = None
    profiles_path: Path | None = None
    output_dir: Path
    settings: Settings

    @field_validator("typology_path", "corpus_path", "conllu_dir", "profiles_path")
    @classmethod
    def check_exists(cls, path: Path | None) -> Path | None:
        if path is not None and not path.exists():
            raise ValueError(f"Path does not exist: {path}")
        return path

    def input_paths(self) -> dict[str, Path]:
        paths = {
            "typology": self.typology_path,
            "corpus": self.corpus_path,
            "conllu": self.conllu_dir,
            "profiles": self.profiles_path,
        }
        return {name: path for name, path in paths.items() if path is not None}

    def input_hashes(self) -> dict[str, str]:
        return {name: file_sha256(path) for name, path in self.input_paths().items()}

    def parameters(self) -> dict[str, object]:
        """Settings that influence results; paths and output location are excluded.

        The feature mode only selects the encoding printed by `encode`; the other
        subcommands evaluate every mode and leave it out.
        """
        excluded = {"jobs", "log_level"} if self.subcommand == "encode" else {"jobs", "log_level", "mode"}
        return self.settings.model_dump(mode="json", exclude=excluded)

    def fingerprint(self) -> str:
        return canonical_sha256(
            {
                "subcommand": self.subcommand,
                "parameters": self.parameters(),
                "inputs": self.input_hashes(),
            }
        )

    def header_line(self) -> str:
        """One-line description carried at the top of every emitted report."""
        settings = self.settings
        inputs = " ".join(f"{name}={digest[:12]}" for name, digest in sorted(self.input_hashes().items()))
        return (
            f"# fingerprint={self.fingerprint()[:16]} ridge={settings.ridge_lambda:g} "
            f"nli_lambda={settings.nli_lambda:g} folds={settings.folds} seed={settings.seed} "
            f"pooling={settings.pooling} {inputs}".rstrip()
        )
