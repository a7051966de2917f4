import math

import pytest

from esltypo.corpus.frequencies import language_error_distribution
from esltypo.corpus.records import Corpus
from esltypo.eval.metrics import kl_divergence
from esltypo.eval.summary import summarize
from esltypo.regression.protocol import FoldParameters, leave_one_out, leave_one_out_folds, run_fold
from esltypo.settings import Settings
from esltypo.shared.exceptions import DataError, InsufficientDataError
from esltypo.synth.generator import SynthConfig, SyntheticDataset, generate
from esltypo.typology.database import TypologyDatabase, filter_features
from esltypo.types import SYSTEMS, ErrorType, FeatureMode, System
from tests.conftest import TOY_LANGUAGES, make_document


class TestLeaveOneOut:
    def test_one_record_per_language_and_system(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        records = leave_one_out(toy_corpus, toy_typology)
        assert [(record.language, record.system) for record in records] == [
            (language, system) for language in TOY_LANGUAGES for system in SYSTEMS
        ]

    def test_truth_is_the_held_out_distribution(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        for record in leave_one_out(toy_corpus, toy_typology, [System.BASE, System.REG]):
            assert record.truth == language_error_distribution(toy_corpus, record.language)
            assert sum(record.predicted.as_array()) == pytest.approx(1.0)

    def test_system_order_is_canonical(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        records = leave_one_out(toy_corpus, toy_typology, [System.REG_CA, System.BASE])
        assert [record.system for record in records[:2]] == [System.BASE, System.REG_CA]

    def test_concurrent_folds_match_sequential(self, synthetic: SyntheticDataset, synthetic_typology: TypologyDatabase):
        sequential = leave_one_out(synthetic.corpus, synthetic_typology, jobs=1)
        concurrent = leave_one_out(synthetic.corpus, synthetic_typology, jobs=3)
        assert concurrent == sequential

    def test_needs_three_languages(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        with pytest.raises(InsufficientDataError):
            leave_one_out(toy_corpus.restrict(languages=["aaa", "bbb"]), toy_typology)

    def test_language_without_typology(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        corpus = Corpus(documents=(*toy_corpus.documents, make_document("z1", "zzz", {ErrorType.MD: 1})))
        with pytest.raises(DataError, match="zzz"):
            leave_one_out(corpus, toy_typology, [System.REG])
        assert len(leave_one_out(corpus, toy_typology, [System.BASE])) == 5

    def test_folds_keep_trained_models(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        folds = leave_one_out_folds(toy_corpus, toy_typology, [System.BASE, System.REG_CA])
        assert [fold.held_out for fold in folds] == list(TOY_LANGUAGES)
        assert all(set(fold.models) == {FeatureMode.REG_CA} for fold in folds)
        assert all(fold.held_out not in fold.models[FeatureMode.REG_CA].training_languages for fold in folds)


class TestRunFold:
    def test_identity_test_typology(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        """Encoding the held-out language from an identical copy changes nothing."""
        copy = toy_typology.with_language("bbb", toy_typology.documented("bbb"))
        plain = run_fold(toy_corpus, toy_typology, "bbb", SYSTEMS)
        projected = run_fold(toy_corpus, toy_typology, "bbb", SYSTEMS, test_typology=copy)
        assert projected.records == plain.records

    def test_test_typology_only_changes_the_held_out_encoding(
        self, toy_corpus: Corpus, toy_typology: TypologyDatabase
    ):
        swapped = toy_typology.with_language("aaa", toy_typology.documented("bbb"))
        plain = run_fold(toy_corpus, toy_typology, "aaa", [System.REG])
        projected = run_fold(toy_corpus, toy_typology, "aaa", [System.REG], test_typology=swapped)
        assert projected.models == plain.models
        assert projected.records[0].truth == plain.records[0].truth

    def test_base_is_shared(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        result = run_fold(toy_corpus, toy_typology, "ccc", [System.BASE])
        assert [record.system for record in result.records] == [System.BASE]
        assert not result.records[0].fallback
        assert result.models == {}

    def test_baselines_are_floored(self, toy_corpus: Corpus, toy_typology: TypologyDatabase):
        """ddd, the nearest neighbour of aaa, never makes the TV error that aaa makes."""
        documents = [document for document in toy_corpus.documents if document.native_language != "ddd"]
        documents.append(make_document("ddd-0", "ddd", {ErrorType.MD: 4, ErrorType.RT: 1}))
        corpus = Corpus(documents=tuple(documents))

        result = run_fold(corpus, toy_typology, "aaa", [System.BASE, System.NN], FoldParameters(epsilon=1e-4))
        nn = result.records[1]
        assert nn.system is System.NN
        assert nn.predicted.as_array().min() > 0.0
        assert math.isfinite(kl_divergence(nn.truth, nn.predicted))

        summary = summarize(leave_one_out(corpus, toy_typology, [System.BASE, System.NN]))
        assert all(math.isfinite(row.mean_kl) for row in summary.rows)


def test_fold_parameters_from_settings():
    settings = Settings(ridge_lambda=0.5, clamp_epsilon=1e-4, pooling="mean")
    params = FoldParameters.from_settings(settings)
    assert params == FoldParameters(ridge=0.5, rtol=1e-10, epsilon=1e-4, pooling="mean")


@pytest.mark.slow
def test_planted_relation_is_recovered():
    """Default synthetic data: RegCA cuts Base's error by at least 15% without falling back."""
    dataset = generate(SynthConfig())
    summary = summarize(leave_one_out(dataset.corpus, filter_features(dataset.typology), jobs=2))
    assert summary.get(System.REG_CA).error_reduction >= 15.0
    assert all(row.fallbacks == 0 for row in summary.rows)
    assert all(math.isfinite(row.mean_kl) for row in summary.rows)
