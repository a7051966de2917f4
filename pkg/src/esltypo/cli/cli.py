"""esltypo command line interface."""

import importlib.metadata
import json
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Annotated, Any

from pydantic import ValidationError

try:
    import typer
except ImportError:
    print("Error: typer is required. Install with 'pip install esltypo[cli]'")
    sys.exit(1)

from esltypo.corpus.records import Corpus, corpus_summary, load_corpus
from esltypo.eval.reports import (
    render_summary,
    render_topk,
    topk_comparison,
    write_records_tsv,
    write_summary_tsv,
    write_text_report,
    write_topk_tsv,
)
from esltypo.eval.summary import summarize
from esltypo.nli.bootstrap import BootstrapParameters, run_bootstrap
from esltypo.nli.profiles import MorphoSyntacticProfile, extract_profiles, load_profiles, write_profiles
from esltypo.regression.protocol import FoldParameters, leave_one_out_folds
from esltypo.regression.salience import salience_by_type, write_salience_tsv
from esltypo.regression.serialization import dump_regressors
from esltypo.settings import RunConfig, Settings, Subcommand
from esltypo.shared.exceptions import ConfigurationError, InputError
from esltypo.shared.version import MANIFEST_VERSION, PROFILE_CACHE_VERSION, REGRESSOR_FORMAT_VERSION
from esltypo.stats.variance import variance_report, write_variance_tsv
from esltypo.synth.generator import SynthConfig, generate, write_dataset
from esltypo.typology.database import TypologyDatabase, filter_features, load_typology, restrict_languages
from esltypo.typology.encoding import encode, export_layout
from esltypo.types import FeatureMode, PredictionRecord, System
from esltypo.utilities.hashing import file_sha256
from esltypo.utilities.logging import configure_logging, get_logger

logger = get_logger("cli")

EXIT_INTERNAL_ERROR = 1
EXIT_INPUT_ERROR = 2
MANIFEST_FILE = "manifest.json"

app = typer.Typer(
    name="esltypo",
    help="Predict native-language-specific ESL error distributions from linguistic typology",
    add_completion=False,
    no_args_is_help=True,
)

TypologyOption = Annotated[Path | None, typer.Option("--typology", "-t", help="Typology TSV export")]
CorpusOption = Annotated[Path | None, typer.Option("--corpus", "-c", help="Line-delimited corpus records")]
OutputOption = Annotated[Path, typer.Option("--output", "-o", help="Directory for reports and the run manifest")]
ModeOption = Annotated[FeatureMode | None, typer.Option("--mode", help="Feature mode of the encoder")]
SeedOption = Annotated[int | None, typer.Option("--seed", help="Seed for every random choice")]
JobsOption = Annotated[int | None, typer.Option("--jobs", "-j", help="Maximum number of concurrent folds")]
MinDocumentsOption = Annotated[
    int | None, typer.Option("--min-documents", help="Drop languages with fewer documents")
]
LogLevelOption = Annotated[str | None, typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR")]
EnvFileOption = Annotated[
    Path | None,
    typer.Option(
        "--env-file",
        "-f",
        help="Load ESLTYPO_* settings from a .env file",
        exists=True,
        file_okay=True,
        dir_okay=False,
        resolve_path=True,
    ),
]


def _settings(env_file: Path | None, **overrides: Any) -> Settings:
    """Flags override the environment, which overrides the .env file and the defaults."""
    values = {name: value for name, value in overrides.items() if value is not None}
    if env_file is not None:
        return Settings(_env_file=env_file, **values)  # type: ignore[call-arg]
    return Settings(**values)


def _execute(body: Callable[[], None]) -> None:
    """Run a command body, mapping input problems to exit code 2 and anything else to 1."""
    try:
        body()
    except (InputError, ValidationError) as e:
        logger.error(str(e))
        raise typer.Exit(EXIT_INPUT_ERROR) from None
    except typer.Exit:
        raise
    except Exception:
        logger.exception("Internal error")
        raise typer.Exit(EXIT_INTERNAL_ERROR) from None


def _run_config(subcommand: Subcommand, output: Path, settings: Settings, **paths: Path | None) -> RunConfig:
    configure_logging(settings.log_level)
    config = RunConfig(subcommand=subcommand, output_dir=output, settings=settings, **paths)
    output.mkdir(parents=True, exist_ok=True)
    return config


def _package_version() -> str:
    try:
        return importlib.metadata.version("esltypo")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def write_manifest(config: RunConfig, artifacts: list[Path]) -> Path:
    """Run manifest: configuration, input and artifact hashes, format versions; no timestamps."""
    root = config.output_dir
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "esltypo_version": _package_version(),
        "subcommand": config.subcommand,
        "fingerprint": config.fingerprint(),
        "parameters": config.parameters(),
        "inputs": {
            name: {"path": str(config.input_paths()[name]), "sha256": digest}
            for name, digest in sorted(config.input_hashes().items())
        },
        "formats": {"regressors": REGRESSOR_FORMAT_VERSION, "profile_cache": PROFILE_CACHE_VERSION},
        "artifacts": {
            path.relative_to(root).as_posix(): file_sha256(path) for path in sorted(artifacts) if path.exists()
        },
    }
    destination = root / MANIFEST_FILE
    destination.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return destination


def _load_corpus(config: RunConfig) -> Corpus:
    if config.corpus_path is None:
        raise ConfigurationError("--corpus is required")
    corpus = load_corpus(config.corpus_path).restrict(min_documents=config.settings.min_documents)
    summary = corpus_summary(corpus)
    logger.info(
        f"Loaded {summary.n_documents} documents in {len(summary.languages)} languages",
        extra={"mean_words": summary.mean_words_per_document},
    )
    return corpus


def _load_typology(config: RunConfig, corpus: Corpus | None) -> TypologyDatabase:
    """Typology restricted to the corpus languages (plus English), then filtered."""
    if config.typology_path is None:
        raise ConfigurationError("--typology is required")
    typology = load_typology(config.typology_path, english_code=config.settings.english_code)
    if corpus is not None:
        typology = restrict_languages(typology, corpus.languages)
    return filter_features(typology)


def _write_evaluation(
    config: RunConfig, records: list[PredictionRecord], languages: tuple[str, ...], title: str
) -> list[Path]:
    root, header, settings = config.output_dir, config.header_line(), config.settings
    summary = summarize(records)
    tables = [topk_comparison(records, language, k=settings.top_k) for language in languages]
    paths = [root / "summary.tsv", root / "report.txt", root / "records.tsv", root / "topk.tsv"]
    write_summary_tsv(summary, paths[0], header)
    write_text_report([render_summary(summary, title), *(render_topk(table) for table in tables)], paths[1], header)
    write_records_tsv(records, paths[2], header)
    write_topk_tsv(tables, paths[3], header)
    for row in summary.rows:
        logger.info(f"{row.system.value}: MAE {row.mae:.3f}, reduction {row.error_reduction:.1f}%")
    return paths


def _systems(settings: Settings) -> list[System]:
    """Requested systems; Base is always run since summaries compare against it."""
    return [System.BASE, *(system for system in settings.systems if system is not System.BASE)]


@app.command()
def version() -> None:
    """Show the esltypo version."""
    print(f"esltypo version {_package_version()}")


@app.command()
def variance(
    corpus: CorpusOption = None,
    output: OutputOption = Path("out"),
    min_documents: MinDocumentsOption = None,
    log_level: LogLevelOption = None,
    env_file: EnvFileOption = None,
) -> None:
    """Kruskal-Wallis and pairwise Mann-Whitney tests per error type."""

    def body() -> None:
        settings = _settings(env_file, min_documents=min_documents, log_level=log_level)
        config = _run_config("variance", output, settings, corpus_path=corpus)
        rows = variance_report(_load_corpus(config))
        destination = config.output_dir / "variance.tsv"
        write_variance_tsv(rows, destination, config.header_line())
        significant = sum(1 for row in rows if row.band)
        logger.info(f"{significant} of {len(rows)} error types depend on the native language (p < 0.01)")
        write_manifest(config, [destination])

    _execute(body)


@app.command()
def predict(
    typology: TypologyOption = None,
    corpus: CorpusOption = None,
    output: OutputOption = Path("out"),
    systems: Annotated[list[System], typer.Option("--system", "-s", help="Systems to evaluate")] = [],
    ridge: Annotated[float | None, typer.Option("--ridge", help="Ridge penalty of the regressors")] = None,
    pooling: Annotated[str | None, typer.Option("--pooling", help="pooled or mean")] = None,
    min_documents: MinDocumentsOption = None,
    top_k: Annotated[int | None, typer.Option("--top-k", help="Rows of the per-language tables")] = None,
    seed: SeedOption = None,
    jobs: JobsOption = None,
    log_level: LogLevelOption = None,
    env_file: EnvFileOption = None,
) -> None:
    """Leave-one-language-out prediction with the Base, NN, Reg and RegCA systems."""

    def body() -> None:
        settings = _settings(
            env_file,
            systems=systems or None,
            ridge_lambda=ridge,
            pooling=pooling,
            min_documents=min_documents,
            top_k=top_k,
            seed=seed,
            jobs=jobs,
            log_level=log_level,
        )
        config = _run_config("predict", output, settings, typology_path=typology, corpus_path=corpus)
        corpus_data = _load_corpus(config)
        typology_db = _load_typology(config, corpus_data)
        folds = leave_one_out_folds(
            corpus_data, typology_db, _systems(settings), FoldParameters.from_settings(settings), jobs=settings.jobs
        )
        records = [record for fold in folds for record in fold.records]
        artifacts = _write_evaluation(config, records, corpus_data.languages, "Leave-one-out prediction")

        header = config.header_line()
        models_dir = config.output_dir / "models"
        for feature_mode in FeatureMode:
            fold_models = [fold.models[feature_mode] for fold in folds if feature_mode in fold.models]
            if not fold_models:
                continue
            salience = config.output_dir / f"salience-{feature_mode.value}.tsv"
            write_salience_tsv(salience_by_type(fold_models), salience, header)
            layout = config.output_dir / f"layout-{feature_mode.value}.tsv"
            export_layout(fold_models[0].slots, layout)
            models_dir.mkdir(exist_ok=True)
            for fold in folds:
                path = models_dir / f"{feature_mode.value}-{fold.held_out}.txt"
                dump_regressors(fold.models[feature_mode], path)
                artifacts.append(path)
            artifacts.extend([salience, layout])
        write_manifest(config, artifacts)

    _execute(body)


@app.command()
def bootstrap(
    typology: TypologyOption = None,
    corpus: CorpusOption = None,
    conllu: Annotated[
        Path | None, typer.Option("--conllu", help="Directory holding one <doc_id>.conllu parse per document")
    ] = None,
    profiles: Annotated[
        Path | None, typer.Option("--profiles", help="Profile cache written by an earlier bootstrap run")
    ] = None,
    output: OutputOption = Path("out"),
    systems: Annotated[list[System], typer.Option("--system", "-s", help="Systems to evaluate")] = [],
    nli_lambda: Annotated[float | None, typer.Option("--nli-lambda", help="L2 penalty of the classifier")] = None,
    folds: Annotated[int | None, typer.Option("--folds", "-k", help="Cross-validation folds")] = None,
    ridge: Annotated[float | None, typer.Option("--ridge", help="Ridge penalty of the regressors")] = None,
    uniform_posteriors: Annotated[
        bool, typer.Option("--uniform-posteriors", help="Debug: replace classifier posteriors by uniform ones")
    ] = False,
    min_documents: MinDocumentsOption = None,
    seed: SeedOption = None,
    jobs: JobsOption = None,
    log_level: LogLevelOption = None,
    env_file: EnvFileOption = None,
) -> None:
    """Predict errors from typology projected through native language identification."""

    def body() -> None:
        settings = _settings(
            env_file,
            systems=systems or None,
            nli_lambda=nli_lambda,
            folds=folds,
            ridge_lambda=ridge,
            min_documents=min_documents,
            seed=seed,
            jobs=jobs,
            log_level=log_level,
        )
        config = _run_config(
            "bootstrap",
            output,
            settings,
            typology_path=typology,
            corpus_path=corpus,
            conllu_dir=conllu,
            profiles_path=profiles,
        )
        corpus_data = _load_corpus(config)
        typology_db = _load_typology(config, corpus_data)
        root, header = config.output_dir, config.header_line()

        document_ids = {document.doc_id for document in corpus_data.documents}
        profile_data: list[MorphoSyntacticProfile]
        if config.profiles_path is not None:
            cached = load_profiles(config.profiles_path)
            profile_data = [profile for profile in cached if profile.doc_id in document_ids]
        elif config.conllu_dir is not None:
            profile_data = extract_profiles(config.conllu_dir, corpus_data)
        else:
            raise ConfigurationError("bootstrap needs --conllu or --profiles")
        cache = root / "profiles.jsonl"
        write_profiles(profile_data, cache)

        result = run_bootstrap(
            corpus_data,
            typology_db,
            profile_data,
            BootstrapParameters.from_settings(settings, uniform_posteriors=uniform_posteriors),
            _systems(settings),
            jobs=settings.jobs,
        )
        artifacts = _write_evaluation(config, result.records, corpus_data.languages, "Bootstrapped typology")
        raw_path, similarity_path, projection_path = (
            root / "similarity-raw.tsv",
            root / "similarity.tsv",
            root / "projection.tsv",
        )
        result.raw_similarity.write_tsv(raw_path, header)
        result.similarity.write_tsv(similarity_path, header)
        lines = [header, "language\tsource\tsimilarity\ttied\tmatches\tcompared\taccuracy"]
        for language, projection in sorted(result.projections.items()):
            lines.append(
                f"{language}\t{projection.source}\t{projection.similarity:.6f}\t{int(projection.tied)}\t"
                f"{result.accuracy.matches[language]}\t{result.accuracy.compared[language]}\t"
                f"{result.accuracy.language_accuracy(language):.4f}"
            )
        lines.append(f"# overall accuracy {result.accuracy.overall:.4f}")
        projection_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"Typology projection accuracy {result.accuracy.overall:.1%}")
        write_manifest(config, [*artifacts, cache, raw_path, similarity_path, projection_path])

    _execute(body)


@app.command()
def synth(
    output: OutputOption = Path("synthetic"),
    languages: Annotated[int, typer.Option("--languages", help="Number of native languages")] = 14,
    features: Annotated[int, typer.Option("--features", help="Number of typological features")] = 30,
    documents: Annotated[int, typer.Option("--documents", help="Documents per language")] = 100,
    noise: Annotated[float, typer.Option("--noise", help="Standard deviation of the planted noise")] = 0.05,
    link: Annotated[str, typer.Option("--link", help="softplus or linear")] = "softplus",
    no_conllu: Annotated[bool, typer.Option("--no-conllu", help="Skip the CoNLL-U parse templates")] = False,
    seed: SeedOption = None,
    log_level: LogLevelOption = None,
    env_file: EnvFileOption = None,
) -> None:
    """Write a synthetic typology, corpus and parse set with a planted typology-error map."""

    def body() -> None:
        settings = _settings(env_file, seed=seed, log_level=log_level)
        config = _run_config("synth", output, settings)
        synth_config = SynthConfig.model_validate(
            {
                "n_languages": languages,
                "n_features": features,
                "docs_per_language": documents,
                "noise_scale": noise,
                "link": link,
                "seed": settings.seed,
                "english_code": settings.english_code,
            }
        )
        written = write_dataset(generate(synth_config), config.output_dir, conllu=not no_conllu)
        logger.info(f"Wrote synthetic dataset to {config.output_dir}")
        write_manifest(config, written)

    _execute(body)


@app.command(name="encode")
def encode_language(
    language: Annotated[str, typer.Argument(help="Language code to encode")],
    typology: TypologyOption = None,
    corpus: CorpusOption = None,
    output: OutputOption = Path("out"),
    mode: ModeOption = None,
    log_level: LogLevelOption = None,
    env_file: EnvFileOption = None,
) -> None:
    """Dump the feature vector of one language, slot by slot."""

    def body() -> None:
        settings = _settings(env_file, mode=mode, log_level=log_level)
        config = _run_config("encode", output, settings, typology_path=typology, corpus_path=corpus)
        corpus_data = _load_corpus(config) if corpus is not None else None
        vector = encode(_load_typology(config, corpus_data), language, settings.mode)
        destination = config.output_dir / f"encode-{language}-{settings.mode.value}.tsv"
        lines = ["index\tslot\tvalue"]
        lines.extend(
            f"{index}\t{slot.describe()}\t{value}"
            for index, (slot, value) in enumerate(zip(vector.slots, vector.values))
        )
        destination.write_text("\n".join(lines) + "\n", encoding="utf-8")
        typer.echo(f"{language} ({settings.mode.value}): {sum(vector.values)} of {len(vector.values)} slots active")
        for slot, value in zip(vector.slots, vector.values):
            if value:
                typer.echo(f"  {slot.describe()}")
        write_manifest(config, [destination])

    _execute(body)
