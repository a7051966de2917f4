import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from esltypo.eval.metrics import absolute_error, kl_divergence, mean_absolute_error
from esltypo.shared.exceptions import DomainError
from esltypo.types import ERROR_TYPES, ErrorDistribution, ErrorType, PredictionRecord, System

HALF_HALF = ErrorDistribution(fractions={ErrorType.TV: 0.5, ErrorType.RT: 0.5})
QUARTER = ErrorDistribution(fractions={ErrorType.TV: 0.25, ErrorType.RT: 0.75})


def test_kl_hand_value():
    """0.5 ln 2 + 0.5 ln(2/3)"""
    assert kl_divergence(HALF_HALF, QUARTER) == pytest.approx(0.143841, abs=1e-6)


def test_kl_of_identical_distributions():
    assert kl_divergence(QUARTER, QUARTER) == 0.0


def test_kl_ignores_types_absent_from_truth():
    predicted = ErrorDistribution(fractions={ErrorType.TV: 0.25, ErrorType.RT: 0.25, ErrorType.MD: 0.5})
    assert kl_divergence(HALF_HALF, predicted) == pytest.approx(np.log(2))


def test_kl_outside_support():
    with pytest.raises(DomainError):
        kl_divergence(HALF_HALF, ErrorDistribution(fractions={ErrorType.TV: 1.0}))


positive = st.lists(st.floats(min_value=1e-3, max_value=10.0), min_size=20, max_size=20)
non_negative = st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=20, max_size=20).filter(
    lambda values: sum(values) > 1e-3
)


@given(non_negative, positive)
def test_kl_is_non_negative(truth: list[float], predicted: list[float]):
    assert kl_divergence(ErrorDistribution.from_array(truth), ErrorDistribution.from_array(predicted)) >= 0.0


def test_absolute_error():
    assert absolute_error(QUARTER, HALF_HALF, ErrorType.RT) == pytest.approx(0.25)
    assert absolute_error(QUARTER, HALF_HALF, ErrorType.MD) == 0.0


def test_mean_absolute_error():
    """Two cells off by 0.25, eighteen exact: 0.5 / 20 on the percent scale."""
    record = PredictionRecord(language="aaa", system=System.BASE, predicted=QUARTER, truth=HALF_HALF)
    assert mean_absolute_error([record]) == pytest.approx(2.5)
    assert mean_absolute_error([record], scale=1.0) == pytest.approx(0.5 / len(ERROR_TYPES))


def test_mean_absolute_error_without_records():
    with pytest.raises(ValueError):
        mean_absolute_error([])
