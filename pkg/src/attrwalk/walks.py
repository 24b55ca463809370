"""Second-order biased random walks recorded as type sequences.

Transition structure follows the return/in-out biasing of node2vec-style
walks: from node v with predecessor t, a neighbor x is drawn with
unnormalized weight 1/p if x == t, 1 if x is adjacent to t, else 1/q.
Sampling is O(1) through alias tables; the first step of each walk is a
uniform neighbor choice (there is no predecessor yet).
"""

from __future__ import annotations

from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .typemap import TypeMap

# full per-edge precomputation needs sum(deg^2) table entries; above this
# budget tables are built on demand and kept in an LRU cache
DEFAULT_MAX_EDGE_ENTRIES = 50_000_000


@dataclass
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    p: float = 1.0
    q: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.walk_length < 1:
            raise ValueError("walk_length must be >= 1")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be > 0")


class AliasTable:
    """Vose alias structure for O(1) sampling from fixed nonnegative weights."""

    __slots__ = ("prob", "alias", "size")

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        total = w.sum()
        if len(w) == 0 or w.min() < 0 or total <= 0:
            raise ValueError("weights must be nonnegative with positive sum")
        k = len(w)
        self.size = k
        self.prob = np.empty(k, dtype=np.float64)
        self.alias = np.zeros(k, dtype=np.int64)
        scaled = w * (k / total)
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        while small and large:
            s, l = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] += scaled[s] - 1.0
            (small if scaled[l] < 1.0 else large).append(l)
        for i in large + small:
            self.prob[i] = 1.0
            self.alias[i] = i

    def sample(self, u_slot: float, u_coin: float) -> int:
        """Draw one index from two uniforms in [0, 1)."""
        slot = min(int(u_slot * self.size), self.size - 1)
        return slot if u_coin < self.prob[slot] else int(self.alias[slot])

    def exact_probabilities(self) -> np.ndarray:
        """Closed-form sampling distribution implied by the alias structure."""
        contrib = np.bincount(self.alias, weights=1.0 - self.prob, minlength=self.size)
        return (self.prob + contrib) / self.size


class TransitionTable:
    """Alias tables for every walk step: uniform first step + per-edge biased steps."""

    def __init__(self, graph: Graph, p: float = 1.0, q: float = 1.0,
                 max_edge_entries: int = DEFAULT_MAX_EDGE_ENTRIES):
        if p <= 0 or q <= 0:
            raise ValueError("p and q must be > 0")
        self.graph = graph
        self.p = p
        self.q = q
        self._nbr = [graph.neighbors(i) for i in range(graph.num_nodes)]
        self.node_tables = [
            AliasTable(np.ones(len(nb))) if len(nb) else None for nb in self._nbr
        ]
        deg = graph.degrees.astype(np.int64)
        total_entries = int((deg * deg).sum())
        self._lazy = total_entries > max_edge_entries
        self._capacity = max_edge_entries
        self._entries = 0
        self._edge_tables: OrderedDict[tuple[int, int], AliasTable] = OrderedDict()
        if not self._lazy:
            for v in range(graph.num_nodes):
                for t in self._nbr[v]:
                    self._edge_tables[(int(t), v)] = AliasTable(self._step_weights(int(t), v))

    def _step_weights(self, t: int, v: int) -> np.ndarray:
        nb = self._nbr[v]
        w = np.full(len(nb), 1.0 / self.q)
        nbt = self._nbr[t]
        pos = np.searchsorted(nbt, nb)
        ok = pos < len(nbt)
        common = np.zeros(len(nb), dtype=bool)
        common[ok] = nbt[pos[ok]] == nb[ok]
        w[common] = 1.0
        w[nb == t] = 1.0 / self.p
        return w

    def step_table(self, t: int, v: int) -> AliasTable:
        key = (t, v)
        tbl = self._edge_tables.get(key)
        if tbl is not None:
            if self._lazy:
                self._edge_tables.move_to_end(key)
            return tbl
        tbl = AliasTable(self._step_weights(t, v))
        self._edge_tables[key] = tbl
        if self._lazy:
            self._entries += tbl.size
            while self._entries > self._capacity and len(self._edge_tables) > 1:
                _, old = self._edge_tables.popitem(last=False)
                self._entries -= old.size
        return tbl

    def exact_step_distribution(self, t: int, v: int) -> np.ndarray:
        """Normalized bias weights over neighbors(v) given predecessor t."""
        w = self._step_weights(t, v)
        return w / w.sum()


def precompute_transitions(graph: Graph, p: float = 1.0, q: float = 1.0,
                           max_edge_entries: int = DEFAULT_MAX_EDGE_ENTRIES) -> TransitionTable:
    return TransitionTable(graph, p, q, max_edge_entries=max_edge_entries)


def attributed_walk(table: TransitionTable, typemap: TypeMap, start: int, length: int,
                    rng: np.random.Generator, return_nodes: bool = False):
    """One biased walk from ``start``, recorded as l+1 type ids.

    A walk that reaches a node with no neighbors (an isolated start, for
    undirected graphs) terminates early with the sequence built so far.
    """
    if length < 1:
        raise ValueError("walk length must be >= 1")
    types = typemap.node_types
    walk = np.empty(length + 1, dtype=np.int64)
    nodes = np.empty(length + 1, dtype=np.int64)
    walk[0] = types[start]
    nodes[0] = start
    cur = start
    prev = -1
    u = rng.random(2 * length)
    steps = 0
    for step in range(length):
        nb = table._nbr[cur]
        if len(nb) == 0:
            break
        tbl = table.node_tables[cur] if prev < 0 else table.step_table(prev, cur)
        nxt = int(nb[tbl.sample(u[2 * step], u[2 * step + 1])])
        walk[step + 1] = types[nxt]
        nodes[step + 1] = nxt
        prev, cur = cur, nxt
        steps += 1
    walk = walk[:steps + 1]
    if return_nodes:
        return walk, nodes[:steps + 1]
    return walk


@dataclass
class WalkCorpus:
    """Ordered collection of attributed walks (type-id sequences)."""

    walks: list
    num_types: int
    node_walks: list | None = None

    def __len__(self):
        return len(self.walks)

    @property
    def total_tokens(self) -> int:
        return int(sum(len(w) for w in self.walks))


def generate_corpus(graph: Graph, table: TransitionTable, typemap: TypeMap,
                    config: WalkConfig, workers: int = 1, keep_nodes: bool = False) -> WalkCorpus:
    """r passes over a shuffled node order, one walk per node per pass.

    With ``workers == 1`` this is the literal sequential loop driven by a
    single seeded generator. With ``workers > 1`` each (pass, start node)
    pair gets its own counter-derived stream, so output is identical for any
    worker count (but differs from the sequential stream).
    """
    n = graph.num_nodes
    r, l = config.walks_per_node, config.walk_length
    walks: list = [None] * (r * n)
    node_walks: list | None = [None] * (r * n) if keep_nodes else None

    if workers <= 1:
        rng = np.random.default_rng(config.seed)
        idx = 0
        for _ in range(r):
            perm = rng.permutation(n)
            for v in perm:
                res = attributed_walk(table, typemap, int(v), l, rng, return_nodes=keep_nodes)
                if keep_nodes:
                    walks[idx], node_walks[idx] = res
                else:
                    walks[idx] = res
                idx += 1
    else:
        jobs = []
        for j in range(r):
            perm = np.random.default_rng([config.seed, j]).permutation(n)
            for slot, v in enumerate(perm):
                jobs.append((j * n + slot, j, int(v)))

        def run(job):
            idx, j, v = job
            rng = np.random.default_rng([config.seed, j, v])
            return idx, attributed_walk(table, typemap, v, l, rng, return_nodes=keep_nodes)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, res in pool.map(run, jobs):
                if keep_nodes:
                    walks[idx], node_walks[idx] = res
                else:
                    walks[idx] = res

    return WalkCorpus(walks, num_types=typemap.m, node_walks=node_walks)


def save_corpus(path, corpus: WalkCorpus, nodes_path=None, graph: Graph | None = None) -> None:
    """One walk per line, space-separated type ids; optional node-id sidecar."""
    with open(path, "w", encoding="utf-8") as fh:
        for w in corpus.walks:
            fh.write(" ".join(str(int(t)) for t in w) + "\n")
    if nodes_path is not None:
        if corpus.node_walks is None:
            raise ValueError("corpus was generated without node traces")
        with open(nodes_path, "w", encoding="utf-8") as fh:
            for trace in corpus.node_walks:
                ids = (graph.to_external(int(v)) if graph else int(v) for v in trace)
                fh.write(" ".join(str(v) for v in ids) + "\n")


def load_corpus(path, num_types: int | None = None) -> WalkCorpus:
    walks = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            toks = line.split()
            if toks:
                walks.append(np.array([int(t) for t in toks], dtype=np.int64))
    if not walks:
        raise ValueError(f"{path}: empty corpus")
    if num_types is None:
        num_types = int(max(w.max() for w in walks)) + 1
    return WalkCorpus(walks, num_types=num_types)
