"""Exact per-node participation counts of the 9 connected graphlets on 2-4 nodes.

A node's count for a graphlet is the number of induced subgraphs isomorphic
to it that contain the node in any position. Column order is fixed:

    x1  edges (= degree)          x6  4-cycles
    x2  2-stars (paths on 3)      x7  tailed triangles
    x3  triangles                 x8  diamonds (chordal 4-cycles)
    x4  4-paths                   x9  4-cliques
    x5  3-stars
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .graph import AttributeMatrix, Graph

GRAPHLET_COLUMNS = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"]

_ORACLE_MAX_NODES = 100


def count_graphlets(graph: Graph) -> AttributeMatrix:
    """Per-node graphlet participation counts as an n x 9 attribute matrix.

    Triangle-based counts come from sorted-neighbor intersections per edge.
    The 4-node counts are assembled from non-induced participation counts
    (degree, wedge, and per-edge triangle statistics, plus enumerated cliques)
    and converted to induced counts through the fixed overlap relations
    between 4-node subgraph patterns.
    """
    n = graph.num_nodes
    deg = graph.degrees.astype(np.int64)
    nbr = [graph.neighbors(i) for i in range(n)]
    edges = graph.edges()
    n_edges = len(edges)

    tri = np.zeros(n, dtype=np.int64)       # triangles containing v
    nk4 = np.zeros(n, dtype=np.int64)       # 4-cliques containing v (induced == non-induced)
    nd = np.zeros(n, dtype=np.int64)        # non-induced diamonds
    paw_tri = np.zeros(n, dtype=np.int64)   # non-induced paws, triangle side
    edge_tri = np.zeros(n_edges, dtype=np.int64)  # common-neighbor count per edge

    for e in range(n_edges):
        u, v = int(edges[e, 0]), int(edges[e, 1])
        common = np.intersect1d(nbr[u], nbr[v], assume_unique=True)
        t_e = len(common)
        edge_tri[e] = t_e
        if t_e == 0:
            continue
        np.add.at(tri, common, 1)
        # diamonds with hub edge (u, v): any pair of common neighbors
        hub_pairs = t_e * (t_e - 1) // 2
        nd[u] += hub_pairs
        nd[v] += hub_pairs
        nd[common] += t_e - 1
        # each triangle {u < v < w} is owned by its lexicographically first edge
        owned = common[common > v]
        if len(owned):
            s = deg[u] + deg[v] + deg[owned] - 6
            paw_tri[u] += s.sum()
            paw_tri[v] += s.sum()
            np.add.at(paw_tri, owned, s)
            for w in owned:
                ext = np.intersect1d(common, nbr[w], assume_unique=True)
                ext = ext[ext > w]
                if len(ext):
                    nk4[u] += len(ext)
                    nk4[v] += len(ext)
                    nk4[w] += len(ext)
                    np.add.at(nk4, ext, 1)

    # edge-indexed accumulations (both directions)
    src, dst = edges[:, 0], edges[:, 1]

    def acc(weights_fwd, weights_bwd):
        out = np.bincount(src, weights=weights_fwd, minlength=n)
        out += np.bincount(dst, weights=weights_bwd, minlength=n)
        return np.rint(out).astype(np.int64)

    if n_edges:
        dd_u, dd_v = deg[src].astype(np.float64), deg[dst].astype(np.float64)
        et = edge_tri.astype(np.float64)
        # paw pendant side: triangles at the other endpoint avoiding this node
        pend = acc(tri[dst] - et, tri[src] - et)
        # wedge endpoints and 3-star leaves
        wend = acc(dd_v - 1, dd_u - 1)
        leaf = acc((dd_v - 1) * (dd_v - 2) / 2, (dd_u - 1) * (dd_u - 2) / 2)
        # path interior: middle edge (v, u) with free ends on either side
        inner = (dd_u - 1) * (dd_v - 1) - et
        interior = acc(inner, inner)
    else:
        pend = wend = leaf = interior = np.zeros(n, dtype=np.int64)

    # two-hop pass: non-induced 4-cycles and path endpoints
    nc4 = np.zeros(n, dtype=np.int64)
    endpoint = np.zeros(n, dtype=np.int64)
    for v in range(n):
        if deg[v] == 0:
            continue
        two_hop = np.concatenate([nbr[a] for a in nbr[v]])
        u_ids, cts = np.unique(two_hop, return_counts=True)
        keep = u_ids != v
        u_ids, cts = u_ids[keep], cts[keep]
        nc4[v] = (cts * (cts - 1) // 2).sum()
        pos = np.searchsorted(nbr[v], u_ids)
        pos_ok = pos < deg[v]
        adj = np.zeros(len(u_ids), dtype=np.int64)
        adj[pos_ok] = nbr[v][pos[pos_ok]] == u_ids[pos_ok]
        endpoint[v] = (cts * (deg[u_ids] - 1 - adj)).sum()

    # non-induced -> induced via the 4-node overlap relations
    i_k4 = nk4
    i_dia = nd - 6 * i_k4
    i_paw = (paw_tri + pend) - 4 * i_dia - 12 * i_k4
    i_c4 = nc4 - i_dia - 3 * i_k4
    i_k13 = (deg * (deg - 1) * (deg - 2) // 6 + leaf) - i_paw - 2 * i_dia - 4 * i_k4
    i_p4 = (interior + endpoint) - 4 * i_c4 - 2 * i_paw - 6 * i_dia - 12 * i_k4

    wedge = deg * (deg - 1) // 2 + wend - 3 * tri

    counts = np.column_stack([deg, wedge, tri, i_p4, i_k13, i_c4, i_paw, i_dia, i_k4])
    return AttributeMatrix(counts.astype(np.float64), list(GRAPHLET_COLUMNS))


def brute_force_graphlet_oracle(graph: Graph) -> AttributeMatrix:
    """Reference implementation: classify every induced subgraph on 2-4 nodes.

    Same contract as count_graphlets; usable only on small graphs.
    """
    n = graph.num_nodes
    if n > _ORACLE_MAX_NODES:
        raise ValueError(f"oracle limited to {_ORACLE_MAX_NODES} nodes, got {n}")
    adj = [set(graph.neighbors(i).tolist()) for i in range(n)]
    counts = np.zeros((n, 9), dtype=np.int64)

    for i, j in combinations(range(n), 2):
        if j in adj[i]:
            counts[i, 0] += 1
            counts[j, 0] += 1

    for s in combinations(range(n), 3):
        e = sum(1 for a, b in combinations(s, 2) if b in adj[a])
        if e == 2:
            counts[list(s), 1] += 1
        elif e == 3:
            counts[list(s), 2] += 1

    # induced 4-node patterns keyed by (edge count, sorted degree sequence)
    patterns = {
        (3, (1, 1, 2, 2)): 3,  # x4 path
        (3, (1, 1, 1, 3)): 4,  # x5 star
        (4, (2, 2, 2, 2)): 5,  # x6 cycle
        (4, (1, 2, 2, 3)): 6,  # x7 tailed triangle
        (5, (2, 2, 3, 3)): 7,  # x8 diamond
        (6, (3, 3, 3, 3)): 8,  # x9 clique
    }
    for s in combinations(range(n), 4):
        degs = [0, 0, 0, 0]
        e = 0
        for (ai, a), (bi, b) in combinations(enumerate(s), 2):
            if b in adj[a]:
                e += 1
                degs[ai] += 1
                degs[bi] += 1
        col = patterns.get((e, tuple(sorted(degs))))
        if col is not None:
            counts[list(s), col] += 1

    return AttributeMatrix(counts.astype(np.float64), list(GRAPHLET_COLUMNS))
