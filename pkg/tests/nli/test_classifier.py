import numpy as np
import pytest
from scipy.optimize import check_grad

from esltypo.nli.classifier import FeatureIndex, objective_and_gradient, train_classifier
from esltypo.nli.profiles import MorphoSyntacticProfile
from esltypo.shared.exceptions import InsufficientDataError


def profile(doc_id: str, language: str, **pos: float) -> MorphoSyntacticProfile:
    return MorphoSyntacticProfile(
        doc_id=doc_id,
        native_language=language,
        feature_values={f"pos:{tag}": value for tag, value in pos.items()},
    )


def separable_profiles() -> list[MorphoSyntacticProfile]:
    return [
        *(profile(f"a{index}", "aaa", NOUN=1.0) for index in range(3)),
        *(profile(f"b{index}", "bbb", VERB=1.0) for index in range(3)),
    ]


@pytest.mark.parametrize("regularization", [0.0, 0.1, 2.0])
def test_gradient_matches_finite_differences(regularization: float):
    rng = np.random.default_rng(0)
    x = np.hstack([rng.random((8, 4)), np.ones((8, 1))])
    y = rng.integers(0, 3, size=8)
    theta = rng.normal(size=3 * 5)

    def value(t: np.ndarray) -> float:
        return objective_and_gradient(t, x, y, 3, regularization)[0]

    def gradient(t: np.ndarray) -> np.ndarray:
        return objective_and_gradient(t, x, y, 3, regularization)[1]

    assert check_grad(value, gradient, theta) < 1e-5


def test_feature_index_ignores_unseen_features():
    index = FeatureIndex.from_profiles([profile("a", "aaa", NOUN=0.5, VERB=0.5)])
    assert index.names == ("pos:NOUN", "pos:VERB")
    matrix = index.matrix([profile("b", "bbb", ADJ=0.5, NOUN=0.5)])
    assert matrix.tolist() == [[0.5, 0.0, 1.0]]


class TestTrainClassifier:
    def test_separable_classes(self):
        profiles = separable_profiles()
        model = train_classifier(profiles, 0.1)
        assert model.classes == ("aaa", "bbb")
        assert model.accuracy(profiles) == 1.0
        assert model.gradient_norm <= 1e-5

    def test_posteriors_are_distributions(self):
        model = train_classifier(separable_profiles(), 1.0)
        posteriors = model.predict_proba([profile("x", "aaa", NOUN=0.5, VERB=0.5)])
        assert posteriors.shape == (1, 2)
        assert posteriors.sum() == pytest.approx(1.0)

    def test_indistinguishable_classes(self):
        """Identical profiles in two balanced classes keep the all-zero start as the optimum."""
        profiles = [
            profile(f"{language}{index}", language, NOUN=1.0) for language in ("aaa", "bbb") for index in range(2)
        ]
        model = train_classifier(profiles, 1.0)
        assert model.predict_proba(profiles[:1]).tolist() == [[0.5, 0.5]]

    def test_log_likelihood_never_decreases(self):
        model = train_classifier(separable_profiles(), 0.1)
        trace = np.array(model.log_likelihood_trace)
        assert trace.size > 0
        assert np.all(np.diff(trace) >= -1e-9)

    def test_weights_are_keyed_by_language_and_feature(self):
        model = train_classifier(separable_profiles(), 0.1)
        assert set(model.weights) == {
            ("aaa", "pos:NOUN"),
            ("aaa", "pos:VERB"),
            ("bbb", "pos:NOUN"),
            ("bbb", "pos:VERB"),
        }
        assert model.weights[("aaa", "pos:NOUN")] > model.weights[("bbb", "pos:NOUN")]

    def test_single_class(self):
        with pytest.raises(InsufficientDataError):
            train_classifier([profile("a0", "aaa", NOUN=1.0), profile("a1", "aaa", NOUN=1.0)])

    def test_small_class(self):
        profiles = [*separable_profiles(), profile("c0", "ccc", ADJ=1.0)]
        with pytest.raises(InsufficientDataError, match="ccc"):
            train_classifier(profiles)

    def test_negative_regularization(self):
        with pytest.raises(ValueError):
            train_classifier(separable_profiles(), -1.0)
