import numpy as np
import pytest

from attrwalk import (AliasTable, Graph, TypeMap, WalkConfig, attributed_walk,
                      generate_corpus, identity_types, load_corpus,
                      precompute_transitions, save_corpus)

from conftest import random_graph


def uniform_typemap(n):
    return TypeMap(np.zeros(n, dtype=np.int64), ["Y"])


# ----------------------------------------------------------------- alias table

def test_alias_exact_distribution():
    rng = np.random.default_rng(0)
    for _ in range(50):
        k = int(rng.integers(1, 12))
        w = rng.random(k) + 0.01
        table = AliasTable(w)
        assert np.allclose(table.exact_probabilities(), w / w.sum(), atol=1e-12)


def test_alias_rejects_bad_weights():
    with pytest.raises(ValueError):
        AliasTable([])
    with pytest.raises(ValueError):
        AliasTable([0.0, 0.0])
    with pytest.raises(ValueError):
        AliasTable([1.0, -0.5])


def test_alias_empirical_sampling():
    w = np.array([1.0, 2.0, 7.0])
    table = AliasTable(w)
    rng = np.random.default_rng(1)
    draws = np.array([table.sample(rng.random(), rng.random()) for _ in range(40_000)])
    freq = np.bincount(draws, minlength=3) / len(draws)
    assert np.allclose(freq, w / w.sum(), atol=0.01)


# ----------------------------------------------------------- transition tables

def test_uniform_when_p_q_one(triangle):
    table = precompute_transitions(triangle, p=1.0, q=1.0)
    for v in range(3):
        for t in triangle.neighbors(v):
            dist = table.exact_step_distribution(int(t), v)
            assert np.allclose(dist, 1.0 / len(triangle.neighbors(v)))


def test_triangle_bias_weights(triangle):
    # previous=t, current=v: returning to t has weight 1/p = 2, the common
    # neighbor has weight 1 -> probabilities (2/3, 1/3)
    table = precompute_transitions(triangle, p=0.5, q=2.0)
    dist = table.exact_step_distribution(0, 1)  # came 0 -> 1; neighbors of 1: [0, 2]
    assert np.allclose(dist, [2.0 / 3.0, 1.0 / 3.0])


def test_distant_neighbor_gets_inout_weight():
    # path 0-1-2-3: from 1 -> 2, node 3 is not adjacent to 1 -> weight 1/q
    g = Graph.from_edges([(0, 1), (1, 2), (2, 3)], num_nodes=4)
    table = precompute_transitions(g, p=4.0, q=0.25)
    dist = table.exact_step_distribution(1, 2)  # neighbors of 2: [1, 3]
    w = np.array([1.0 / 4.0, 1.0 / 0.25])
    assert np.allclose(dist, w / w.sum())


def test_leaf_probability_one_regardless_of_bias():
    g = Graph.from_edges([(0, 1)], num_nodes=2)
    table = precompute_transitions(g, p=0.1, q=9.0)
    assert np.allclose(table.exact_step_distribution(0, 1), [1.0])


def test_alias_matches_bias_formula_exactly():
    for seed in range(8):
        g = random_graph(int(np.random.default_rng(seed).integers(3, 11)), 0.5, seed)
        table = precompute_transitions(g, p=0.5, q=2.0)
        for v in range(g.num_nodes):
            for t in g.neighbors(v):
                tbl = table.step_table(int(t), v)
                expected = table.exact_step_distribution(int(t), v)
                assert np.allclose(tbl.exact_probabilities(), expected, atol=1e-12)


def test_lazy_lru_mode_same_distributions():
    g = random_graph(20, 0.3, seed=3)
    eager = precompute_transitions(g, p=0.5, q=2.0)
    lazy = precompute_transitions(g, p=0.5, q=2.0, max_edge_entries=10)
    assert lazy._lazy and not eager._lazy
    rng = np.random.default_rng(0)
    tm = identity_types(g.num_nodes)
    for v in range(g.num_nodes):
        for t in g.neighbors(v):
            a = lazy.step_table(int(t), v).exact_probabilities()
            b = eager.step_table(int(t), v).exact_probabilities()
            assert np.allclose(a, b, atol=1e-15)
    # cache stays within budget while still usable for walks
    walk = attributed_walk(lazy, tm, 0, 30, rng)
    assert len(walk) == 31


# ------------------------------------------------------------------ walk shape

def test_forced_trajectory_on_edge():
    g = Graph.from_edges([(0, 1)], num_nodes=2)
    tm = TypeMap(np.array([0, 1]), ["A", "B"])
    table = precompute_transitions(g)
    walk = attributed_walk(table, tm, 0, 3, np.random.default_rng(0))
    assert walk.tolist() == [0, 1, 0, 1]


def test_identity_typemap_recovers_node_walk():
    g = random_graph(12, 0.4, seed=4)
    tm = identity_types(g.num_nodes)
    table = precompute_transitions(g)
    walk, nodes = attributed_walk(table, tm, 5, 20, np.random.default_rng(1),
                                  return_nodes=True)
    assert np.array_equal(walk, nodes)


def test_uniform_types_constant_walk(triangle):
    tm = uniform_typemap(3)
    table = precompute_transitions(triangle)
    walk = attributed_walk(table, tm, 0, 5, np.random.default_rng(2))
    assert walk.tolist() == [0] * 6


def test_isolated_start_terminates_early():
    g = Graph.from_edges([(0, 1)], num_nodes=3)
    tm = identity_types(3)
    table = precompute_transitions(g)
    walk = attributed_walk(table, tm, 2, 10, np.random.default_rng(0))
    assert walk.tolist() == [2]


def test_walk_traces_are_adjacent():
    g = random_graph(15, 0.3, seed=6)
    tm = identity_types(g.num_nodes)
    table = precompute_transitions(g, p=0.5, q=2.0)
    config = WalkConfig(walks_per_node=2, walk_length=15, p=0.5, q=2.0, seed=0)
    corpus = generate_corpus(g, table, tm, config, keep_nodes=True)
    for trace in corpus.node_walks:
        for a, b in zip(trace[:-1], trace[1:]):
            assert g.has_edge(int(a), int(b))


# ---------------------------------------------------------------------- corpus

def test_corpus_counts():
    g = random_graph(6, 0.6, seed=7)
    tm = identity_types(6)
    table = precompute_transitions(g)
    corpus = generate_corpus(g, table, tm, WalkConfig(walks_per_node=10, walk_length=5))
    assert len(corpus) == 60


def test_r1_l1_walks_have_two_tokens(triangle):
    tm = identity_types(3)
    table = precompute_transitions(triangle)
    corpus = generate_corpus(triangle, table, tm,
                             WalkConfig(walks_per_node=1, walk_length=1))
    assert len(corpus) == 3
    assert all(len(w) == 2 for w in corpus.walks)


def test_seed_determinism_byte_identical(tmp_path):
    g = random_graph(10, 0.4, seed=8)
    tm = identity_types(10)
    table = precompute_transitions(g)
    config = WalkConfig(walks_per_node=3, walk_length=10, seed=99)
    f1, f2 = tmp_path / "c1.txt", tmp_path / "c2.txt"
    save_corpus(f1, generate_corpus(g, table, tm, config))
    save_corpus(f2, generate_corpus(g, table, tm, config))
    assert f1.read_bytes() == f2.read_bytes()


def test_stream_mode_worker_count_invariant():
    g = random_graph(10, 0.4, seed=9)
    tm = identity_types(10)
    table = precompute_transitions(g)
    config = WalkConfig(walks_per_node=2, walk_length=8, seed=5)
    c2 = generate_corpus(g, table, tm, config, workers=2)
    c4 = generate_corpus(g, table, tm, config, workers=4)
    assert len(c2) == len(c4)
    for a, b in zip(c2.walks, c4.walks):
        assert np.array_equal(a, b)


def test_corpus_round_trip(tmp_path):
    g = random_graph(8, 0.5, seed=10)
    tm = identity_types(8)
    table = precompute_transitions(g)
    corpus = generate_corpus(g, table, tm, WalkConfig(walks_per_node=2, walk_length=4))
    f = tmp_path / "corpus.txt"
    save_corpus(f, corpus)
    back = load_corpus(f)
    assert len(back) == len(corpus)
    for a, b in zip(back.walks, corpus.walks):
        assert np.array_equal(a, b)


def test_first_step_uniform_statistics():
    g = random_graph(20, 0.3, seed=11)
    tm = identity_types(20)
    table = precompute_transitions(g, p=1.0, q=1.0)
    rng = np.random.default_rng(123)
    start = int(np.argmax(g.degrees))
    deg = g.degree(start)
    n_samples = 20_000
    firsts = np.array([
        attributed_walk(table, tm, start, 1, rng)[1] for _ in range(n_samples)
    ])
    counts = np.bincount(firsts, minlength=20)[g.neighbors(start)]
    p_hat = counts / n_samples
    p_exp = 1.0 / deg
    se = np.sqrt(p_exp * (1 - p_exp) / n_samples)
    assert np.all(np.abs(p_hat - p_exp) <= 3 * se + 1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(walks_per_node=0)
    with pytest.raises(ValueError):
        WalkConfig(walk_length=0)
    with pytest.raises(ValueError):
        WalkConfig(p=0.0)
    with pytest.raises(ValueError):
        WalkConfig(q=-1.0)
