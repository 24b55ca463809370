"""Materialize the node -> type mapping.

Two families: a simple concatenation of (discretized) attribute values, and a
learned mapping through a low-rank factorization of the attribute matrix with
types obtained by k-means over the latent node factors or directly by argmax.
The factorization side also supports inductive assignment for nodes or graphs
unseen at fit time, reusing the attribute-side factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import AttributeMatrix, Graph, _format_value

SIGNATURE_SEPARATOR = "-"


@dataclass
class TypeMap:
    """Per-node type ids plus the type vocabulary (signature <-> id)."""

    node_types: np.ndarray
    signatures: list[str]

    def __post_init__(self):
        self.node_types = np.asarray(self.node_types, dtype=np.int64)
        if len(self.signatures) == 0:
            raise ValueError("empty type vocabulary")
        if len(self.node_types) and (self.node_types.min() < 0 or self.node_types.max() >= self.m):
            raise ValueError("node type id outside vocabulary range")

    @property
    def m(self) -> int:
        return len(self.signatures)

    @property
    def num_nodes(self) -> int:
        return len(self.node_types)

    def type_of(self, v: int) -> int:
        return int(self.node_types[v])

    def signature_to_id(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.signatures)}


def map_concat(attrs: AttributeMatrix, separator: str = SIGNATURE_SEPARATOR) -> TypeMap:
    """Concatenate each row's attribute values into a type signature.

    Type ids are assigned in first-occurrence order; identical rows share a
    type. Values are expected to be discrete (typically post-binning).
    """
    if attrs.num_cols < 1:
        raise ValueError("need at least one attribute column")
    if not np.all(np.isfinite(attrs.values)):
        raise ValueError("attribute values must be finite")
    vocab: dict[str, int] = {}
    node_types = np.empty(attrs.num_rows, dtype=np.int64)
    for i in range(attrs.num_rows):
        sig = separator.join(_format_value(v) for v in attrs.values[i])
        node_types[i] = vocab.setdefault(sig, len(vocab))
    return TypeMap(node_types, list(vocab.keys()))


def identity_types(n: int) -> TypeMap:
    """Each node its own type (recovers identity-walk methods, m = n)."""
    if n < 1:
        raise ValueError("need at least one node")
    return TypeMap(np.arange(n, dtype=np.int64), [str(i) for i in range(n)])


@dataclass
class FactorizationModel:
    """Low-rank factors X ~ U V^T with ridge penalty, plus the type rule."""

    U: np.ndarray
    V: np.ndarray
    rank: int
    l2: float
    loss_history: list[float]
    col_names: list[str] = field(default_factory=list)
    centroids: np.ndarray | None = None
    assign_mode: str | None = None  # "kmeans" or "argmax" once a rule is fit
    kmeans_objective_history: list[float] = field(default_factory=list)


def _als_loss(X, U, V, l2):
    resid = X - U @ V.T
    return float((resid * resid).sum() + l2 * ((U * U).sum() + (V * V).sum()))


def _ridge_solve(X, V, l2):
    # argmin_U ||X - U V^T||_F^2 + l2 ||U||_F^2, closed form per row
    if l2 > 0:
        gram = V.T @ V + l2 * np.eye(V.shape[1])
        return np.linalg.solve(gram, V.T @ X.T).T
    return np.linalg.lstsq(V, X.T, rcond=None)[0].T


def factorize(attrs: AttributeMatrix, rank: int, iters: int = 50, seed: int = 0,
              l2: float = 0.1) -> FactorizationModel:
    """Alternating least squares for X ~ U V^T with L2 regularization.

    Deterministic given the seed. The loss (squared Frobenius error plus the
    penalty) is recorded once per iteration and is non-increasing; a final U
    refit against the finished V makes stored U the exact ridge solution, so
    inductive assignment of the training rows reproduces U.
    """
    X = attrs.values
    n, k = X.shape
    if rank < 1 or rank > min(n, k):
        raise ValueError(f"rank must be in [1, min(n, k)] = [1, {min(n, k)}]")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if not np.any(X):
        raise ValueError("attribute matrix is all zeros")
    rng = np.random.default_rng(seed)
    scale = np.sqrt(np.abs(X).mean() / max(rank, 1)) or 1.0
    U = rng.normal(0.0, scale, size=(n, rank))
    V = rng.normal(0.0, scale, size=(k, rank))
    history = [_als_loss(X, U, V, l2)]
    for _ in range(iters):
        U = _ridge_solve(X, V, l2)
        V = _ridge_solve(X.T, U, l2)
        history.append(_als_loss(X, U, V, l2))
    U = _ridge_solve(X, V, l2)
    history.append(_als_loss(X, U, V, l2))
    return FactorizationModel(U=U, V=V, rank=rank, l2=l2, loss_history=history,
                              col_names=list(attrs.col_names))


def _kmeans_objective(U, centroids, labels):
    d = U - centroids[labels]
    return float((d * d).sum())


def _farthest_point_init(U, m, rng):
    n = len(U)
    chosen = [int(rng.integers(n))]
    taken = {chosen[0]}
    dist = ((U - U[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < m:
        nxt = int(np.argmax(dist))
        if nxt in taken:  # duplicate points: fall back to any unchosen index
            nxt = next(i for i in range(n) if i not in taken)
        chosen.append(nxt)
        taken.add(nxt)
        dist = np.minimum(dist, ((U - U[nxt]) ** 2).sum(axis=1))
    return U[chosen].copy()


def kmeans_types(model: FactorizationModel, m: int, iters: int = 100, seed: int = 0) -> TypeMap:
    """Partition latent node factors into m types by Lloyd's algorithm.

    Farthest-point initialization from a seeded start; empty clusters are
    re-seeded from the point farthest from its assigned centroid. Stops when
    assignments stop changing. Stores the centroids on the model so new nodes
    can be typed inductively.
    """
    U = model.U
    n = len(U)
    if not 1 <= m <= n:
        raise ValueError(f"m must be in [1, {n}], got {m}")
    rng = np.random.default_rng(seed)
    centroids = _farthest_point_init(U, m, rng)
    labels = np.full(n, -1, dtype=np.int64)
    history = []
    for _ in range(max(1, iters)):
        d2 = ((U[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        sizes = np.bincount(new_labels, minlength=m)
        empties = np.flatnonzero(sizes == 0)
        if len(empties):
            # re-seed each empty cluster from the point farthest from its centroid,
            # never stealing the last member of another cluster
            order = np.argsort(-d2[np.arange(n), new_labels], kind="stable")
            picks = iter(int(i) for i in order)
            for j in empties:
                far = next(i for i in picks if sizes[new_labels[i]] > 1)
                sizes[new_labels[far]] -= 1
                new_labels[far] = j
                sizes[j] = 1
        for j in range(m):
            centroids[j] = U[new_labels == j].mean(axis=0)
        history.append(_kmeans_objective(U, centroids, new_labels))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    model.centroids = centroids
    model.assign_mode = "kmeans"
    model.kmeans_objective_history = history
    return TypeMap(labels, [f"c{j}" for j in range(m)])


def argmax_types(model: FactorizationModel) -> TypeMap:
    """Type each node by its largest latent factor (rank chosen as m).

    Ties break toward the lowest factor index. The vocabulary covers all
    rank columns, so m equals the factorization rank.
    """
    labels = np.argmax(model.U, axis=1).astype(np.int64)
    model.assign_mode = "argmax"
    return TypeMap(labels, [f"c{j}" for j in range(model.rank)])


def inductive_assign(new_attrs: AttributeMatrix, model: FactorizationModel) -> TypeMap:
    """Type unseen nodes: ridge-solve U' against the frozen V, reuse the rule.

    The attribute-side factors V are never refit; new attributes must use the
    same k columns (same definitions and transform parameters) as training.
    """
    if new_attrs.num_cols != model.V.shape[0]:
        raise ValueError(
            f"column count mismatch: model expects {model.V.shape[0]}, got {new_attrs.num_cols}")
    if model.col_names and list(new_attrs.col_names) != list(model.col_names):
        raise ValueError("attribute columns differ from the ones used at fit time")
    if model.assign_mode is None:
        raise ValueError("model has no type rule; run kmeans_types or argmax_types first")
    U_new = _ridge_solve(new_attrs.values, model.V, model.l2)
    if model.assign_mode == "kmeans":
        d2 = ((U_new[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1).astype(np.int64)
        m = len(model.centroids)
    else:
        labels = np.argmax(U_new, axis=1).astype(np.int64)
        m = model.rank
    return TypeMap(labels, [f"c{j}" for j in range(m)])


def save_typemap(path, typemap: TypeMap, graph: Graph) -> None:
    """TSV: external node id, type id, type signature."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node\ttype\tsignature\n")
        for i in range(typemap.num_nodes):
            t = typemap.node_types[i]
            fh.write(f"{graph.to_external(i)}\t{t}\t{typemap.signatures[t]}\n")


def save_vocabulary(path, typemap: TypeMap) -> None:
    """TSV: type id, signature."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("type\tsignature\n")
        for t, sig in enumerate(typemap.signatures):
            fh.write(f"{t}\t{sig}\n")


def load_typemap(path, graph: Graph) -> TypeMap:
    node_types = np.full(graph.num_nodes, -1, dtype=np.int64)
    sigs: dict[int, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            ext, t, sig = line.rstrip("\n").split("\t")
            node_types[graph.to_internal(int(ext))] = int(t)
            sigs[int(t)] = sig
    if (node_types < 0).any():
        raise ValueError(f"{path}: missing type assignments for some nodes")
    return TypeMap(node_types, [sigs[t] for t in range(len(sigs))])


def save_model(path, model: FactorizationModel) -> None:
    np.savez(path, U=model.U, V=model.V, rank=model.rank, l2=model.l2,
             loss_history=np.asarray(model.loss_history),
             col_names=np.asarray(model.col_names),
             centroids=model.centroids if model.centroids is not None else np.empty((0, 0)),
             assign_mode=model.assign_mode or "")


def load_model(path) -> FactorizationModel:
    data = np.load(path, allow_pickle=False)
    centroids = data["centroids"]
    mode = str(data["assign_mode"])
    return FactorizationModel(
        U=data["U"], V=data["V"], rank=int(data["rank"]), l2=float(data["l2"]),
        loss_history=data["loss_history"].tolist(),
        col_names=[str(c) for c in data["col_names"]],
        centroids=centroids if centroids.size else None,
        assign_mode=mode or None)
