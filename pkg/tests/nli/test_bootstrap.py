import pytest

from esltypo.corpus.records import Corpus
from esltypo.nli.bootstrap import BootstrapParameters, bootstrap_predict, run_bootstrap
from esltypo.nli.conllu import parse_conllu
from esltypo.nli.profiles import MorphoSyntacticProfile, profile_from_sentences
from esltypo.settings import Settings
from esltypo.shared.exceptions import DataError
from esltypo.synth.generator import SyntheticDataset, conllu_documents
from esltypo.typology.database import TypologyDatabase
from esltypo.types import SYSTEMS, FeatureMode, System


@pytest.fixture(scope="module")
def profiles(synthetic: SyntheticDataset) -> list[MorphoSyntacticProfile]:
    languages = {document.doc_id: document.native_language for document in synthetic.corpus.documents}
    return [
        profile_from_sentences(parse_conllu(text), doc_id=doc_id, native_language=languages[doc_id])
        for doc_id, text in conllu_documents(synthetic).items()
    ]


def test_parameters_from_settings():
    params = BootstrapParameters.from_settings(Settings(nli_lambda=0.5, folds=4, seed=9), uniform_posteriors=True)
    assert (params.regularization, params.folds, params.seed, params.uniform_posteriors) == (0.5, 4, 9, True)


def test_uniform_posteriors_tie_everywhere(
    synthetic: SyntheticDataset, synthetic_typology: TypologyDatabase, profiles: list[MorphoSyntacticProfile]
):
    """With no classifier signal every projection is a tie broken towards the smallest code."""
    result = run_bootstrap(
        synthetic.corpus, synthetic_typology, profiles, BootstrapParameters(folds=2, uniform_posteriors=True)
    )
    assert result.projections["l01"].source == "l02"
    others = [projection for language, projection in result.projections.items() if language != "l01"]
    assert all(projection.source == "l01" for projection in others)
    assert all(projection.tied for projection in result.projections.values())


@pytest.mark.slow
def test_end_to_end(
    synthetic: SyntheticDataset, synthetic_typology: TypologyDatabase, profiles: list[MorphoSyntacticProfile]
):
    result = run_bootstrap(synthetic.corpus, synthetic_typology, profiles, BootstrapParameters(folds=2))
    assert result.similarity.is_symmetric()
    assert result.raw_similarity.languages == synthetic.corpus.languages
    assert all(projection.source != language for language, projection in result.projections.items())
    assert 0.0 <= result.accuracy.overall <= 1.0
    assert [(record.language, record.system) for record in result.records] == [
        (language, system) for language in synthetic.corpus.languages for system in SYSTEMS
    ]
    assert all(set(fold.models) == {FeatureMode.REG, FeatureMode.REG_CA} for fold in result.folds)


def test_unprofiled_language(
    synthetic: SyntheticDataset, synthetic_typology: TypologyDatabase, profiles: list[MorphoSyntacticProfile]
):
    partial = [profile for profile in profiles if profile.native_language != "l03"]
    with pytest.raises(DataError, match="l03"):
        bootstrap_predict(synthetic.corpus, synthetic_typology, partial, BootstrapParameters(folds=2))


def test_base_only_needs_no_regressors(
    synthetic: SyntheticDataset, synthetic_typology: TypologyDatabase, profiles: list[MorphoSyntacticProfile]
):
    corpus: Corpus = synthetic.corpus
    records = bootstrap_predict(
        corpus, synthetic_typology, profiles, BootstrapParameters(folds=2, uniform_posteriors=True), [System.BASE]
    )
    assert len(records) == len(corpus.languages)
