import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrwalk import AttributeMatrix, BinningConfig, log_bin, transform_attributes
from attrwalk.binning import equal_width_bin, identity_bin


def test_worked_example():
    # sorted {1,2,3,4} -> 0, {5,6} -> 1, {7} -> 2, {8} -> 3
    assert log_bin([5, 1, 3, 2, 8, 7, 6, 4], 0.5).tolist() == [1, 0, 0, 0, 3, 2, 1, 0]


def test_all_equal_collapses():
    assert log_bin([7, 7, 7, 7], 0.5).tolist() == [0, 0, 0, 0]


def test_single_value():
    assert log_bin([42], 0.3).tolist() == [0]


def test_tie_extends_round_boundary():
    # round of size 2 lands inside the run of 2s, which all go to bin 0
    assert log_bin([1, 2, 2, 2, 3], 0.5).tolist() == [0, 0, 0, 0, 1]


def test_alpha_validated():
    with pytest.raises(ValueError):
        log_bin([1, 2], 0.0)
    with pytest.raises(ValueError):
        log_bin([1, 2], 1.0)
    with pytest.raises(ValueError):
        BinningConfig(alpha=1.5)


def test_empty_column_rejected():
    with pytest.raises(ValueError):
        log_bin([], 0.5)


values_strategy = st.lists(st.integers(-1000, 1000), min_size=1, max_size=120)


@settings(max_examples=100, deadline=None)
@given(values_strategy, st.floats(0.05, 0.95))
def test_monotone_and_tie_consistent(values, alpha):
    bins = log_bin(values, alpha)
    order = np.argsort(values, kind="stable")
    for a, b in zip(order[:-1], order[1:]):
        assert bins[a] <= bins[b]
    for i in range(len(values)):
        for j in range(len(values)):
            if values[i] == values[j]:
                assert bins[i] == bins[j]


@settings(max_examples=60, deadline=None)
@given(values_strategy, st.floats(0.05, 0.95))
def test_bins_contiguous_from_zero(values, alpha):
    bins = log_bin(values, alpha)
    assert sorted(set(bins.tolist())) == list(range(bins.max() + 1))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 10_000), min_size=1, max_size=200, unique=True),
       st.floats(0.1, 0.9))
def test_bin_count_bound_distinct_values(values, alpha):
    bins = log_bin(values, alpha)
    n = len(values)
    bound = math.ceil(math.log(n, 1.0 / (1.0 - alpha))) + 1 if n > 1 else 1
    assert bins.max() + 1 <= bound + 1


@settings(max_examples=50, deadline=None)
@given(values_strategy, st.integers(0, 2**31 - 1))
def test_permutation_equivariance(values, seed):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(values))
    base = log_bin(values, 0.5)
    permuted = log_bin(np.asarray(values)[perm], 0.5)
    assert np.array_equal(base[perm], permuted)


def test_equal_width_two_bins():
    bins = equal_width_bin([0.0, 1.0, 9.0, 10.0], 0.5)
    assert bins.tolist() == [0, 0, 1, 1]


def test_identity_bin_dense_ranks():
    assert identity_bin([5, 3, 5, 10]).tolist() == [1, 0, 1, 2]


def test_transform_replaces_each_column():
    attrs = AttributeMatrix(np.array([[1.0, 10.0], [2.0, 20.0], [3.0, 30.0]]), ["a", "b"])
    out = transform_attributes(attrs, BinningConfig(alpha=0.5))
    assert out.col_names == ["a", "b"]
    assert out.values[:, 0].tolist() == log_bin([1, 2, 3], 0.5).tolist()
    assert out.values[:, 1].tolist() == log_bin([10, 20, 30], 0.5).tolist()
