from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrwalk import (AttributeMatrix, FactorizationModel, argmax_types, factorize,
                      identity_types, inductive_assign, kmeans_types, load_model,
                      load_typemap, map_concat, save_model, save_typemap,
                      save_vocabulary)


def test_identical_rows_share_type():
    attrs = AttributeMatrix(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 1.0]]))
    tm = map_concat(attrs)
    assert tm.node_types.tolist() == [0, 0, 1]
    assert tm.m == 2


def test_first_occurrence_order_and_signatures():
    attrs = AttributeMatrix(np.array([[3.0, 1.0], [0.0, 0.0], [3.0, 1.0]]))
    tm = map_concat(attrs)
    assert tm.signatures == ["3-1", "0-0"]
    assert tm.node_types.tolist() == [0, 1, 0]


def test_separator_disambiguates_multidigit():
    a = AttributeMatrix(np.array([[1.0, 23.0]]))
    b = AttributeMatrix(np.array([[12.0, 3.0]]))
    assert map_concat(a).signatures != map_concat(b).signatures


def test_m_equals_distinct_rows_property():
    rng = np.random.default_rng(0)
    vals = rng.integers(0, 3, size=(40, 3)).astype(float)
    tm = map_concat(AttributeMatrix(vals))
    distinct = len({tuple(r) for r in vals.tolist()})
    assert tm.m == distinct


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=60))
def test_strict_equivalence(rows):
    attrs = AttributeMatrix(np.array(rows, dtype=float).reshape(len(rows), 2))
    tm = map_concat(attrs)
    for i in range(len(rows)):
        for j in range(len(rows)):
            same_row = rows[i] == rows[j]
            assert (tm.node_types[i] == tm.node_types[j]) == same_row


def test_identity_types_bijective():
    tm = identity_types(5)
    assert tm.m == 5
    assert tm.node_types.tolist() == [0, 1, 2, 3, 4]
    assert len(set(tm.signatures)) == 5


def test_typemap_persistence(tmp_path, triangle):
    attrs = AttributeMatrix(np.array([[1.0], [1.0], [2.0]]))
    tm = map_concat(attrs)
    f = tmp_path / "types.tsv"
    save_typemap(f, tm, triangle)
    save_vocabulary(tmp_path / "vocab.tsv", tm)
    back = load_typemap(f, triangle)
    assert back.node_types.tolist() == tm.node_types.tolist()
    assert back.signatures == tm.signatures


# ---------------------------------------------------------------- factorization

def test_rank1_exact_recovery():
    rng = np.random.default_rng(1)
    u = rng.normal(size=10)
    v = rng.normal(size=4)
    attrs = AttributeMatrix(np.outer(u, v))
    model = factorize(attrs, rank=1, iters=50, seed=0, l2=0.0)
    assert model.loss_history[-1] <= 1e-8


def test_loss_history_non_increasing():
    rng = np.random.default_rng(2)
    attrs = AttributeMatrix(rng.normal(size=(25, 6)))
    model = factorize(attrs, rank=3, iters=40, seed=0)
    hist = np.array(model.loss_history)
    assert np.all(np.diff(hist) <= 1e-9)


def test_deterministic_given_seed():
    rng = np.random.default_rng(3)
    attrs = AttributeMatrix(rng.normal(size=(15, 5)))
    m1 = factorize(attrs, rank=2, iters=10, seed=42)
    m2 = factorize(attrs, rank=2, iters=10, seed=42)
    assert np.array_equal(m1.U, m2.U) and np.array_equal(m1.V, m2.V)


def _top_rank_approx_error(X, rank, iters=2000, seed=0):
    """Truncated spectral approximation error via subspace (power) iteration."""
    rng = np.random.default_rng(seed)
    Q = rng.normal(size=(X.shape[1], rank))
    G = X.T @ X
    for _ in range(iters):
        Q, _ = np.linalg.qr(G @ Q)
    B = X @ Q  # best approx in the iterated right-singular subspace
    return float(((X - B @ Q.T) ** 2).sum())


def test_reaches_best_rank3_error():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(20, 9))
    attrs = AttributeMatrix(X)
    model = factorize(attrs, rank=3, iters=500, seed=0, l2=0.0)
    als_err = float(((X - model.U @ model.V.T) ** 2).sum())
    oracle_err = _top_rank_approx_error(X, 3)
    assert als_err <= oracle_err + 1e-6


def test_rank_validation():
    attrs = AttributeMatrix(np.ones((4, 2)))
    with pytest.raises(ValueError):
        factorize(attrs, rank=3)
    with pytest.raises(ValueError):
        factorize(attrs, rank=0)


def test_all_zero_matrix_rejected():
    with pytest.raises(ValueError, match="zero"):
        factorize(AttributeMatrix(np.zeros((4, 2))), rank=1)


# ---------------------------------------------------------------- k-means types

def _two_clouds(n_per=4, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 0.1, size=(n_per, 2))
    b = rng.normal(10.0, 0.1, size=(n_per, 2))
    return np.vstack([a, b])


def _brute_force_two_partition(U):
    """Optimal 2-partition by exhaustive search (oracle for small n)."""
    n = len(U)
    best, best_obj = None, np.inf
    for size in range(1, n // 2 + 1):
        for left in combinations(range(n), size):
            mask = np.zeros(n, dtype=bool)
            mask[list(left)] = True
            obj = 0.0
            for sel in (mask, ~mask):
                c = U[sel].mean(axis=0)
                obj += float(((U[sel] - c) ** 2).sum())
            if obj < best_obj:
                best_obj, best = obj, mask.copy()
    return best, best_obj


def _model_with_U(U):
    return FactorizationModel(U=U, V=np.zeros((2, U.shape[1])), rank=U.shape[1],
                              l2=0.1, loss_history=[0.0])


def test_kmeans_finds_optimal_two_clusters():
    U = _two_clouds()
    model = _model_with_U(U)
    tm = kmeans_types(model, m=2, seed=0)
    opt_mask, opt_obj = _brute_force_two_partition(U)
    got = tm.node_types == tm.node_types[0]
    assert np.array_equal(got, opt_mask) or np.array_equal(got, ~opt_mask)
    assert model.kmeans_objective_history[-1] == pytest.approx(opt_obj)


def test_kmeans_extremes():
    U = _two_clouds(n_per=3, seed=1)
    tm_n = kmeans_types(_model_with_U(U), m=len(U), seed=0)
    assert tm_n.m == len(U)
    assert len(set(tm_n.node_types.tolist())) == len(U)

    model1 = _model_with_U(U)
    tm_1 = kmeans_types(model1, m=1, seed=0)
    assert tm_1.m == 1
    total_var = float(((U - U.mean(axis=0)) ** 2).sum())
    assert model1.kmeans_objective_history[-1] == pytest.approx(total_var)


def test_kmeans_objective_non_increasing():
    rng = np.random.default_rng(5)
    model = _model_with_U(rng.normal(size=(40, 3)))
    kmeans_types(model, m=5, seed=0)
    hist = np.array(model.kmeans_objective_history)
    assert np.all(np.diff(hist) <= 1e-9)


def test_kmeans_m_validated():
    model = _model_with_U(_two_clouds(n_per=2))
    with pytest.raises(ValueError):
        kmeans_types(model, m=5)


# ---------------------------------------------------------------- argmax types

def test_argmax_identity_matrix():
    model = _model_with_U(np.eye(3))
    assert argmax_types(model).node_types.tolist() == [0, 1, 2]


def test_argmax_single_rows():
    assert argmax_types(_model_with_U(np.array([[0.2, 0.9, 0.1]]))).node_types[0] == 1
    assert argmax_types(_model_with_U(np.array([[0.5, 0.5]]))).node_types[0] == 0


def test_argmax_invariant_to_row_rescaling():
    rng = np.random.default_rng(6)
    U = rng.normal(size=(10, 4))
    base = argmax_types(_model_with_U(U)).node_types
    U2 = U.copy()
    U2[3] *= 7.5  # positive rescaling of one row
    again = argmax_types(_model_with_U(U2)).node_types
    assert np.array_equal(base, again)


# ---------------------------------------------------------------- inductive

def test_inductive_reproduces_training_types():
    rng = np.random.default_rng(7)
    attrs = AttributeMatrix(rng.normal(size=(20, 5)))
    model = factorize(attrs, rank=3, iters=60, seed=0, l2=0.0)
    tm_train = kmeans_types(model, m=4, seed=0)
    tm_new = inductive_assign(attrs, model)
    assert np.array_equal(tm_new.node_types, tm_train.node_types)


def test_inductive_identical_row_gets_same_type():
    rng = np.random.default_rng(8)
    attrs = AttributeMatrix(rng.normal(size=(15, 4)))
    model = factorize(attrs, rank=2, iters=60, seed=0)
    tm_train = kmeans_types(model, m=3, seed=0)
    one = AttributeMatrix(attrs.values[[4], :], list(attrs.col_names))
    tm_one = inductive_assign(one, model)
    assert tm_one.node_types[0] == tm_train.node_types[4]


def test_inductive_matches_closed_form_ridge():
    rng = np.random.default_rng(9)
    attrs = AttributeMatrix(rng.normal(size=(12, 4)))
    model = factorize(attrs, rank=2, iters=40, seed=1, l2=0.1)
    kmeans_types(model, m=3, seed=0)
    x_new = rng.normal(size=(1, 4))
    new = AttributeMatrix(x_new, list(attrs.col_names))
    tm = inductive_assign(new, model)
    # closed-form ridge oracle
    V, lam = model.V, model.l2
    u = x_new @ V @ np.linalg.inv(V.T @ V + lam * np.eye(V.shape[1]))
    d2 = ((model.centroids - u) ** 2).sum(axis=1)
    assert tm.node_types[0] == int(np.argmin(d2))


def test_inductive_order_independent():
    rng = np.random.default_rng(10)
    attrs = AttributeMatrix(rng.normal(size=(10, 3)))
    model = factorize(attrs, rank=2, iters=30, seed=0)
    argmax_types(model)
    perm = rng.permutation(10)
    shuffled = AttributeMatrix(attrs.values[perm], list(attrs.col_names))
    tm_a = inductive_assign(attrs, model)
    tm_b = inductive_assign(shuffled, model)
    assert np.array_equal(tm_a.node_types[perm], tm_b.node_types)


def test_inductive_errors():
    rng = np.random.default_rng(11)
    attrs = AttributeMatrix(rng.normal(size=(10, 3)))
    model = factorize(attrs, rank=2, iters=5, seed=0)
    with pytest.raises(ValueError, match="no type rule"):
        inductive_assign(attrs, model)
    argmax_types(model)
    with pytest.raises(ValueError, match="column count"):
        inductive_assign(AttributeMatrix(np.ones((2, 5))), model)


def test_model_persistence(tmp_path):
    rng = np.random.default_rng(12)
    attrs = AttributeMatrix(rng.normal(size=(10, 3)))
    model = factorize(attrs, rank=2, iters=5, seed=0)
    kmeans_types(model, m=2, seed=0)
    f = tmp_path / "model.npz"
    save_model(f, model)
    back = load_model(f)
    assert np.array_equal(back.U, model.U)
    assert np.array_equal(back.V, model.V)
    assert back.assign_mode == "kmeans"
    assert np.array_equal(back.centroids, model.centroids)
    tm_a = inductive_assign(attrs, model)
    tm_b = inductive_assign(attrs, back)
    assert np.array_equal(tm_a.node_types, tm_b.node_types)
