import json
from pathlib import Path

import pytest
from dirty_equals import IsPartialDict, IsStr
from typer.testing import CliRunner

from esltypo.cli.cli import EXIT_INPUT_ERROR, MANIFEST_FILE, app
from esltypo.synth.generator import SynthConfig, generate, write_dataset

runner = CliRunner()


@pytest.fixture(scope="module")
def dataset(tmp_path_factory: pytest.TempPathFactory) -> Path:
    root = tmp_path_factory.mktemp("dataset")
    write_dataset(generate(SynthConfig(n_languages=4, n_features=10, docs_per_language=12, seed=8)), root)
    return root


def read_manifest(output: Path) -> dict[str, object]:
    return json.loads((output / MANIFEST_FILE).read_text(encoding="utf-8"))


def test_version():
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert "esltypo version" in result.output


def test_predict(dataset: Path, tmp_path: Path):
    output = tmp_path / "predict"
    result = runner.invoke(
        app,
        ["predict", "-t", str(dataset / "typology.tsv"), "-c", str(dataset / "corpus.jsonl"), "-o", str(output)],
    )
    assert result.exit_code == 0, result.output
    for name in ("summary.tsv", "report.txt", "records.tsv", "topk.tsv", "salience-RegCA.tsv", "layout-Reg.tsv"):
        assert (output / name).is_file()
    assert len(list((output / "models").glob("RegCA-*.txt"))) == 4

    summary = (output / "summary.tsv").read_text(encoding="utf-8").splitlines()
    assert summary[0].startswith("# fingerprint=")
    assert "mode=" not in summary[0]
    assert [line.split("\t")[0] for line in summary[3:]] == ["Base", "NN", "Reg", "RegCA"]

    manifest = read_manifest(output)
    assert manifest == IsPartialDict(
        manifest_version=1,
        subcommand="predict",
        fingerprint=IsStr(regex=r"[0-9a-f]{64}"),
        formats={"regressors": 1, "profile_cache": 1},
    )
    assert set(manifest["inputs"]) == {"typology", "corpus"}  # type: ignore[arg-type]
    assert "summary.tsv" in manifest["artifacts"]  # type: ignore[operator]


def test_predict_is_reproducible(dataset: Path, tmp_path: Path):
    """Identical inputs and settings give identical artifact hashes."""
    arguments = ["predict", "-t", str(dataset / "typology.tsv"), "-c", str(dataset / "corpus.jsonl"), "-s", "Reg"]
    first = runner.invoke(app, [*arguments, "-o", str(tmp_path / "first")])
    second = runner.invoke(app, [*arguments, "-o", str(tmp_path / "second"), "--jobs", "2"])
    assert first.exit_code == second.exit_code == 0
    assert read_manifest(tmp_path / "first") == read_manifest(tmp_path / "second")


def test_predict_has_no_mode_option(dataset: Path, tmp_path: Path):
    """predict evaluates every feature mode; only encode selects one."""
    arguments = ["predict", "-t", str(dataset / "typology.tsv"), "-c", str(dataset / "corpus.jsonl"), "--mode", "Reg"]
    result = runner.invoke(app, [*arguments, "-o", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert not (tmp_path / "out").exists()

def test_predict_without_typology(dataset: Path, tmp_path: Path):
    result = runner.invoke(app, ["predict", "-c", str(dataset / "corpus.jsonl"), "-o", str(tmp_path / "out")])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_predict_invalid_setting(dataset: Path, tmp_path: Path):
    result = runner.invoke(
        app,
        [
            "predict",
            "-t",
            str(dataset / "typology.tsv"),
            "-c",
            str(dataset / "corpus.jsonl"),
            "-o",
            str(tmp_path / "out"),
            "--pooling",
            "median",
        ],
    )
    assert result.exit_code == EXIT_INPUT_ERROR


def test_variance(dataset: Path, tmp_path: Path):
    output = tmp_path / "variance"
    result = runner.invoke(app, ["variance", "-c", str(dataset / "corpus.jsonl"), "-o", str(output)])
    assert result.exit_code == 0, result.output
    lines = (output / "variance.tsv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + 1 + 20
    assert read_manifest(output)["subcommand"] == "variance"


def test_variance_single_language(tmp_path: Path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(
        '{"doc_id": "d1", "native_language": "jpn", "word_count": 100, "error_counts": {"MD": 2}}\n', encoding="utf-8"
    )
    result = runner.invoke(app, ["variance", "-c", str(corpus), "-o", str(tmp_path / "out")])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_missing_corpus_file(tmp_path: Path):
    result = runner.invoke(app, ["variance", "-c", str(tmp_path / "absent.jsonl"), "-o", str(tmp_path / "out")])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_bootstrap(dataset: Path, tmp_path: Path):
    output = tmp_path / "bootstrap"
    arguments = ["bootstrap", "-t", str(dataset / "typology.tsv"), "-c", str(dataset / "corpus.jsonl")]
    result = runner.invoke(
        app, [*arguments, "--conllu", str(dataset / "conllu"), "-o", str(output), "-k", "2", "--uniform-posteriors"]
    )
    assert result.exit_code == 0, result.output
    projection = (output / "projection.tsv").read_text(encoding="utf-8").splitlines()
    assert projection[1] == "language\tsource\tsimilarity\ttied\tmatches\tcompared\taccuracy"
    assert projection[2].startswith("l01\tl02\t")
    assert projection[-1].startswith("# overall accuracy")

    cached = tmp_path / "cached"
    cache = str(output / "profiles.jsonl")
    result = runner.invoke(app, [*arguments, "--profiles", cache, "-o", str(cached), "-k", "2", "--uniform-posteriors"])
    assert result.exit_code == 0, result.output
    # the header line carries input hashes, which differ between the two runs
    cached_records = (cached / "records.tsv").read_text(encoding="utf-8").splitlines()
    assert cached_records[1:] == (output / "records.tsv").read_text(encoding="utf-8").splitlines()[1:]
    assert set(read_manifest(output)["inputs"]) == {"typology", "corpus", "conllu"}  # type: ignore[arg-type]
    assert set(read_manifest(cached)["inputs"]) == {"typology", "corpus", "profiles"}  # type: ignore[arg-type]


def test_bootstrap_needs_parses(dataset: Path, tmp_path: Path):
    arguments = ["bootstrap", "-t", str(dataset / "typology.tsv"), "-c", str(dataset / "corpus.jsonl")]
    result = runner.invoke(app, [*arguments, "-o", str(tmp_path / "out")])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_synth(tmp_path: Path):
    output = tmp_path / "synthetic"
    result = runner.invoke(
        app, ["synth", "-o", str(output), "--languages", "4", "--features", "8", "--documents", "10", "--no-conllu"]
    )
    assert result.exit_code == 0, result.output
    assert sorted(path.name for path in output.iterdir()) == [
        "corpus.jsonl",
        "manifest.json",
        "planted.tsv",
        "typology.tsv",
    ]


def test_synth_invalid_link(tmp_path: Path):
    result = runner.invoke(app, ["synth", "-o", str(tmp_path / "out"), "--link", "cubic"])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_encode(dataset: Path, tmp_path: Path):
    output = tmp_path / "encode"
    result = runner.invoke(
        app, ["encode", "l01", "-t", str(dataset / "typology.tsv"), "-o", str(output), "--mode", "Reg"]
    )
    assert result.exit_code == 0, result.output
    assert "l01 (Reg): " in result.output
    lines = (output / "encode-l01-Reg.tsv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "index\tslot\tvalue"
    assert all(line.split("\t")[2] in ("0", "1") for line in lines[1:])


def test_encode_unknown_language(dataset: Path, tmp_path: Path):
    result = runner.invoke(app, ["encode", "zzz", "-t", str(dataset / "typology.tsv"), "-o", str(tmp_path / "out")])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_env_file(dataset: Path, tmp_path: Path):
    env_file = tmp_path / "settings.env"
    env_file.write_text("ESLTYPO_RIDGE_LAMBDA=0.5\nESLTYPO_TOP_K=3\n", encoding="utf-8")
    output = tmp_path / "predict"
    arguments = ["predict", "-t", str(dataset / "typology.tsv"), "-c", str(dataset / "corpus.jsonl"), "-s", "Reg"]
    result = runner.invoke(app, [*arguments, "-o", str(output), "-f", str(env_file)])
    assert result.exit_code == 0, result.output
    assert read_manifest(output)["parameters"] == IsPartialDict(ridge_lambda=0.5, top_k=3)


@pytest.mark.slow
def test_predict_on_default_synthetic_data(tmp_path: Path):
    data = tmp_path / "data"
    assert runner.invoke(app, ["synth", "-o", str(data), "--no-conllu"]).exit_code == 0
    output = tmp_path / "out"
    arguments = ["predict", "-t", str(data / "typology.tsv"), "-c", str(data / "corpus.jsonl"), "-o", str(output)]
    result = runner.invoke(app, [*arguments, "--jobs", "2"])
    assert result.exit_code == 0, result.output

    rows = {
        line.split("\t")[0]: line.split("\t")
        for line in (output / "summary.tsv").read_text(encoding="utf-8").splitlines()[3:]
    }
    assert float(rows["RegCA"][2]) >= 15.0
    assert rows["RegCA"][7] == "0"
