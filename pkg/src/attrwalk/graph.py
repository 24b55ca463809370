"""Undirected simple graph in compressed adjacency form, plus attribute I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EdgeListParseError(ValueError):
    """Raised when an edge-list or attribute file cannot be parsed."""


class Graph:
    """Immutable undirected simple graph.

    Adjacency is stored CSR-style (offset array + flat neighbor array) with
    each neighbor list strictly sorted. External node ids are remapped to
    contiguous internal indices [0, n) in first-seen order.
    """

    __slots__ = ("num_nodes", "indptr", "indices", "ext_ids", "_ext_to_int")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, ext_ids: np.ndarray):
        self.num_nodes = len(indptr) - 1
        self.indptr = indptr
        self.indices = indices
        self.ext_ids = ext_ids
        self._ext_to_int = {int(e): i for i, e in enumerate(ext_ids)}

    @classmethod
    def from_edges(cls, edges, num_nodes: int, ext_ids=None) -> "Graph":
        """Build a graph from an iterable of internal-index pairs.

        Symmetrizes, drops self-loops, merges duplicates. Nodes without edges
        are kept (they get empty neighbor lists).
        """
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if len(edges):
            if edges.min() < 0 or edges.max() >= num_nodes:
                raise ValueError("edge endpoint outside [0, num_nodes)")
            keep = edges[:, 0] != edges[:, 1]
            edges = edges[keep]
        if len(edges):
            both = np.concatenate([edges, edges[:, ::-1]])
            both = np.unique(both, axis=0)
            src, dst = both[:, 0], both[:, 1]
        else:
            src = dst = np.empty(0, dtype=np.int64)
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        # unique(axis=0) sorts lexicographically, so each list is sorted
        indices = dst.copy()
        if ext_ids is None:
            ext_ids = np.arange(num_nodes, dtype=np.int64)
        else:
            ext_ids = np.asarray(ext_ids, dtype=np.int64)
        return cls(indptr, indices, ext_ids)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted internal indices adjacent to node i (O(1) offset lookup)."""
        if not 0 <= i < self.num_nodes:
            raise IndexError(f"node index {i} out of range [0, {self.num_nodes})")
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        if not 0 <= i < self.num_nodes:
            raise IndexError(f"node index {i} out of range [0, {self.num_nodes})")
        return int(self.indptr[i + 1] - self.indptr[i])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def has_edge(self, i: int, j: int) -> bool:
        nbrs = self.neighbors(i)
        pos = np.searchsorted(nbrs, j)
        return pos < len(nbrs) and nbrs[pos] == j

    def edges(self) -> np.ndarray:
        """All edges as an (E, 2) array of internal pairs with i < j."""
        src = np.repeat(np.arange(self.num_nodes), np.diff(self.indptr))
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def to_internal(self, ext: int) -> int:
        return self._ext_to_int[int(ext)]

    def to_external(self, i: int) -> int:
        return int(self.ext_ids[i])


@dataclass
class AttributeMatrix:
    """Dense n x k matrix of per-node attribute values; row i is internal node i."""

    values: np.ndarray
    col_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("attribute values must be a 2-D matrix")
        if not self.col_names:
            self.col_names = [f"a{j + 1}" for j in range(self.values.shape[1])]
        if len(self.col_names) != self.values.shape[1]:
            raise ValueError("column label count does not match matrix width")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("attribute values must all be finite")

    @property
    def num_rows(self) -> int:
        return self.values.shape[0]

    @property
    def num_cols(self) -> int:
        return self.values.shape[1]

    def select(self, names) -> "AttributeMatrix":
        """Column subset by name, preserving the given order."""
        idx = [self.col_names.index(c) for c in names]
        return AttributeMatrix(self.values[:, idx].copy(), list(names))


_COMMENT_PREFIXES = ("#", "%")


def load_edge_list(path, directed_hint: bool = False) -> Graph:
    """Read a whitespace-separated edge list into a Graph.

    Lines starting with '#' or '%' are comments. The first two tokens of each
    line are external node ids (non-negative integers); extra tokens are
    treated as weights and ignored. Edges are symmetrized regardless of
    ``directed_hint``, self-loops dropped, duplicates merged.
    """
    ext_order: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith(_COMMENT_PREFIXES):
                continue
            toks = line.split()
            if len(toks) < 2:
                raise EdgeListParseError(f"{path}: line {lineno}: expected at least 2 tokens")
            try:
                u, v = int(toks[0]), int(toks[1])
            except ValueError as exc:
                raise EdgeListParseError(f"{path}: line {lineno}: non-integer node id") from exc
            if u < 0 or v < 0:
                raise EdgeListParseError(f"{path}: line {lineno}: negative node id")
            for ext in (u, v):
                if ext not in ext_order:
                    ext_order[ext] = len(ext_order)
            if u != v:
                edges.append((ext_order[u], ext_order[v]))
    if not ext_order:
        raise EdgeListParseError(f"{path}: empty graph (no nodes)")
    ext_ids = np.fromiter(ext_order.keys(), dtype=np.int64, count=len(ext_order))
    return Graph.from_edges(edges, num_nodes=len(ext_order), ext_ids=ext_ids)


def write_edge_list(path, graph: Graph) -> None:
    """Write one edge per line using external ids (each edge once)."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in graph.edges():
            fh.write(f"{graph.to_external(i)} {graph.to_external(j)}\n")


def load_attributes(path, graph: Graph) -> AttributeMatrix:
    """Read a TSV attribute file aligned to the graph's internal order.

    Format: header row of column names (an optional leading id-column label
    is accepted), then one row per node: external id followed by k numeric
    values. Every graph node must be present; values must be finite.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith(_COMMENT_PREFIXES)]
    if not lines:
        raise EdgeListParseError(f"{path}: empty attribute file")
    header = lines[0].split("\t") if "\t" in lines[0] else lines[0].split()
    rows: dict[int, list[float]] = {}
    k = None
    for lineno, line in enumerate(lines[1:], start=2):
        toks = line.split("\t") if "\t" in line else line.split()
        if k is None:
            k = len(toks) - 1
            if k < 1:
                raise EdgeListParseError(f"{path}: line {lineno}: no attribute values")
        elif len(toks) - 1 != k:
            raise EdgeListParseError(f"{path}: line {lineno}: expected {k} values")
        try:
            ext = int(toks[0])
        except ValueError as exc:
            raise EdgeListParseError(f"{path}: line {lineno}: non-integer node id") from exc
        if ext not in graph._ext_to_int:
            raise EdgeListParseError(f"{path}: line {lineno}: unknown node id {ext}")
        if graph.to_internal(ext) in rows:
            raise EdgeListParseError(f"{path}: line {lineno}: duplicate row for node {ext}")
        try:
            vals = [float(t) for t in toks[1:]]
        except ValueError as exc:
            raise EdgeListParseError(f"{path}: line {lineno}: non-numeric value") from exc
        if not all(np.isfinite(vals)):
            raise EdgeListParseError(f"{path}: line {lineno}: non-finite value")
        rows[graph.to_internal(ext)] = vals
    if len(rows) != graph.num_nodes:
        missing = sorted(set(range(graph.num_nodes)) - set(rows))
        ext = graph.to_external(missing[0])
        raise EdgeListParseError(f"{path}: missing attributes for node {ext}")
    values = np.array([rows[i] for i in range(graph.num_nodes)], dtype=np.float64)
    if len(header) == k + 1:
        header = header[1:]
    if len(header) != k:
        raise EdgeListParseError(f"{path}: header has {len(header)} labels for {k} columns")
    return AttributeMatrix(values, header)


def _format_value(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_attributes(path, attrs: AttributeMatrix, graph: Graph) -> None:
    """Write the standard attribute TSV (header row, external id + values)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node\t" + "\t".join(attrs.col_names) + "\n")
        for i in range(attrs.num_rows):
            vals = "\t".join(_format_value(v) for v in attrs.values[i])
            fh.write(f"{graph.to_external(i)}\t{vals}\n")
