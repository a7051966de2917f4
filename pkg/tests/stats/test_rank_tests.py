from collections.abc import Iterator
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from esltypo.shared.exceptions import InsufficientDataError
from esltypo.stats.rank_tests import GroupedSamples, kruskal_wallis, mann_whitney


def permutation_pvalue(groups: list[list[float]]) -> float:
    """Brute-force oracle: share of all relabelings with a statistic at least the observed one."""
    pooled = [value for group in groups for value in group]
    sizes = [len(group) for group in groups]
    observed = stats.kruskal(*groups).statistic
    at_least = 0
    total = 0
    for order in permutations(pooled):
        relabeled, start = [], 0
        for size in sizes:
            relabeled.append(list(order[start : start + size]))
            start += size
        total += 1
        if stats.kruskal(*relabeled).statistic >= observed - 1e-9:
            at_least += 1
    return at_least / total


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Group sizes summing to n, in non-increasing order."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for size in range(min(n, largest), 0, -1):
        for rest in partitions(n - size, size):
            yield (size, *rest)


SMALL_CONFIGURATIONS = [sizes for n in range(3, 9) for sizes in partitions(n) if len(sizes) >= 2]


def labelling_pvalue(values: np.ndarray, sizes: tuple[int, ...]) -> float:
    """Exact p-value over every distinct group labelling, with H in its variance form."""
    ranks = stats.rankdata(values)
    spread = float(((ranks - ranks.mean()) ** 2).sum())

    def statistic(labels: tuple[int, ...]) -> float:
        label_array = np.asarray(labels)
        counts = np.bincount(label_array, minlength=len(sizes))
        means = np.bincount(label_array, weights=ranks, minlength=len(sizes)) / counts
        return (len(ranks) - 1) * float((counts * (means - ranks.mean()) ** 2).sum()) / spread

    observed = statistic(tuple(label for label, size in enumerate(sizes) for _ in range(size)))
    labellings = set(permutations(label for label, size in enumerate(sizes) for _ in range(size)))
    return sum(statistic(labels) >= observed - 1e-9 for labels in labellings) / len(labellings)


class TestKruskalWallis:
    def test_equal_rank_sums(self):
        """{1,4} against {2,3} has H = 0."""
        assert kruskal_wallis({"a": [1, 4], "b": [2, 3]}).statistic == pytest.approx(0.0)

    def test_separated_groups(self):
        """{1,2,3} against {4,5,6}: H = 12/42 * (12 + 75) - 21."""
        result = kruskal_wallis({"a": [1, 2, 3], "b": [4, 5, 6]})
        assert result.statistic == pytest.approx(3.857, abs=1e-3)
        assert result.p_value == pytest.approx(0.1)
        assert result.n == 6

    @pytest.mark.parametrize(
        "groups",
        [
            [[0.1, 0.4], [0.2, 0.3, 0.9]],
            [[0.0, 0.0, 0.5], [0.0, 0.2], [0.7]],
            [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]],
            [[0.0, 0.1, 0.1], [0.1, 0.3, 0.5, 0.5]],
            [[2.0], [1.0], [3.0, 4.0]],
        ],
    )
    def test_small_samples_match_permutation_oracle(self, groups: list[list[float]]):
        samples = {f"g{index}": group for index, group in enumerate(groups)}
        assert kruskal_wallis(samples).p_value == pytest.approx(permutation_pvalue(groups), abs=1e-9)

    @pytest.mark.parametrize("sizes", SMALL_CONFIGURATIONS, ids=lambda sizes: "-".join(map(str, sizes)))
    def test_every_small_configuration_matches_enumeration(self, sizes: tuple[int, ...]):
        """Every group-size configuration with total n <= 8, with and without ties."""
        rng = np.random.default_rng(sum(size * 10**index for index, size in enumerate(sizes)))
        n = sum(sizes)
        for values in (rng.permutation(n).astype(float), rng.integers(0, 3, size=n).astype(float)):
            if np.all(values == values[0]):
                continue
            groups: dict[str, list[float]] = {}
            start = 0
            for index, size in enumerate(sizes):
                groups[f"g{index}"] = values[start : start + size].tolist()
                start += size
            assert kruskal_wallis(groups).p_value == pytest.approx(labelling_pvalue(values, sizes), abs=1e-9)

    def test_large_samples_match_chi_square(self):
        rng = np.random.default_rng(0)
        groups = [rng.integers(0, 6, size=size).astype(float).tolist() for size in (12, 9, 15)]
        expected = stats.kruskal(*groups)
        result = kruskal_wallis({f"g{index}": group for index, group in enumerate(groups)})
        assert result.statistic == pytest.approx(expected.statistic, rel=1e-9)
        assert result.p_value == pytest.approx(expected.pvalue, rel=1e-9)

    def test_all_tied(self):
        assert kruskal_wallis({"a": [0.0, 0.0], "b": [0.0, 0.0]}).p_value == 1.0

    def test_needs_two_groups(self):
        with pytest.raises(InsufficientDataError):
            kruskal_wallis({"a": [1.0, 2.0, 3.0]})

    def test_empty_group(self):
        with pytest.raises(InsufficientDataError, match="Empty"):
            kruskal_wallis({"a": [1.0, 2.0, 3.0], "b": []})

    def test_grouped_samples_input(self):
        grouped = GroupedSamples(groups={"a": (1.0, 2.0, 3.0), "b": (4.0, 5.0, 6.0)})
        assert grouped.n == 6
        assert kruskal_wallis(grouped) == kruskal_wallis({"a": [1, 2, 3], "b": [4, 5, 6]})

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=20), min_size=5, max_size=5),
        st.lists(st.integers(min_value=0, max_value=20), min_size=6, max_size=6),
    )
    def test_monotone_invariance(self, first: list[int], second: list[int]):
        """Only ranks matter: a strictly increasing transform leaves H unchanged."""
        original = kruskal_wallis({"a": first, "b": second})
        transformed = kruskal_wallis({"a": [v**3 + 7 * v for v in first], "b": [v**3 + 7 * v for v in second]})
        assert transformed.statistic == pytest.approx(original.statistic, abs=1e-9)


class TestMannWhitney:
    def test_complete_separation(self):
        assert mann_whitney([1, 2], [3, 4]).statistic == 0.0

    def test_one_inversion(self):
        """a={1,3}, b={2,4}: only 3 > 2."""
        assert mann_whitney([1, 3], [2, 4]).statistic == 1.0

    def test_matches_scipy(self):
        rng = np.random.default_rng(1)
        first = rng.integers(0, 5, size=14).astype(float)
        second = rng.integers(1, 7, size=11).astype(float)
        expected = stats.mannwhitneyu(first, second, alternative="two-sided", use_continuity=True, method="asymptotic")
        result = mann_whitney(first.tolist(), second.tolist())
        assert result.statistic == pytest.approx(expected.statistic)
        assert result.p_value == pytest.approx(expected.pvalue, rel=1e-9)

    def test_all_tied(self):
        assert mann_whitney([0.0, 0.0], [0.0]).p_value == 1.0

    def test_empty_sample(self):
        with pytest.raises(InsufficientDataError):
            mann_whitney([], [1.0])


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=15, max_value=30), st.integers(min_value=15, max_value=30), st.data())
def test_two_group_kruskal_wallis_agrees_with_mann_whitney(n_a: int, n_b: int, data: st.DataObject):
    """Without ties the two tests differ only by the continuity correction, at most 0.4 / sd(U)."""
    values = data.draw(st.permutations(list(range(n_a + n_b))))
    first, second = [float(v) for v in values[:n_a]], [float(v) for v in values[n_a:]]
    kw = kruskal_wallis({"a": first, "b": second})
    mw = mann_whitney(first, second)
    assert abs(kw.p_value - mw.p_value) <= 0.02
