"""Link-prediction benchmark: edge splitting, edge-feature operators,
L2-regularized logistic regression with CV model selection, and rank AUC."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .skipgram import EmbeddingMatrix
from .typemap import TypeMap

L2_GRID = (1e-3, 1e-2, 0.1, 1.0, 10.0)

EDGE_OPERATORS = {
    "mean": lambda zi, zj: (zi + zj) / 2.0,
    "hadamard": lambda zi, zj: zi * zj,
    "weighted-l1": lambda zi, zj: np.abs(zi - zj),
    "weighted-l2": lambda zi, zj: (zi - zj) ** 2,
}


@dataclass
class LinkSplit:
    """Residual training graph plus removed-edge positives and non-edge negatives."""

    train_graph: Graph
    positives: np.ndarray  # (P, 2) internal pairs
    negatives: np.ndarray  # (P, 2) internal pairs
    seed: int


def split_edges(graph: Graph, fraction: float = 0.5, preserve_degree: bool = False,
                seed: int = 0, max_attempts_factor: int = 100) -> LinkSplit:
    """Remove floor(fraction * E) edges uniformly as positives; sample an equal
    number of uniformly random non-adjacent pairs as negatives.

    ``preserve_degree`` skips removals that would isolate a node (parity mode
    for methods that cannot embed zero-degree nodes), which can leave fewer
    positives than requested.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    edges = graph.edges()
    n_edges = len(edges)
    if n_edges < 2:
        raise ValueError("graph needs at least 2 edges to split")
    n = graph.num_nodes
    rng = np.random.default_rng(seed)
    target = int(fraction * n_edges)

    order = rng.permutation(n_edges)
    if preserve_degree:
        deg = graph.degrees.copy()
        removed = []
        for e in order:
            if len(removed) == target:
                break
            u, v = edges[e]
            if deg[u] > 1 and deg[v] > 1:
                removed.append(e)
                deg[u] -= 1
                deg[v] -= 1
        removed = np.array(removed, dtype=np.int64)
    else:
        removed = order[:target]

    keep_mask = np.ones(n_edges, dtype=bool)
    keep_mask[removed] = False
    positives = edges[~keep_mask]
    residual = edges[keep_mask]

    n_pos = len(positives)
    non_edges_available = n * (n - 1) // 2 - n_edges
    if non_edges_available < n_pos:
        raise ValueError(
            f"cannot sample {n_pos} negatives: only {non_edges_available} non-edges exist")

    edge_set = {(int(u), int(v)) for u, v in edges}
    chosen: set[tuple[int, int]] = set()
    negatives = []
    attempts_left = max_attempts_factor * max(n_pos, 1)
    while len(negatives) < n_pos:
        if attempts_left <= 0:
            raise ValueError("negative sampling exhausted its attempt budget")
        attempts_left -= 1
        u, v = int(rng.integers(n)), int(rng.integers(n))
        if u == v:
            continue
        pair = (min(u, v), max(u, v))
        if pair in edge_set or pair in chosen:
            continue
        chosen.add(pair)
        negatives.append(pair)
    negatives = np.array(negatives, dtype=np.int64).reshape(-1, 2)

    train_graph = Graph.from_edges(residual, num_nodes=n, ext_ids=graph.ext_ids)
    return LinkSplit(train_graph=train_graph, positives=positives,
                     negatives=negatives, seed=seed)


def edge_features(emb: EmbeddingMatrix, typemap: TypeMap, pairs: np.ndarray,
                  op: str) -> np.ndarray:
    """Row per pair: operator applied to the two node embeddings (symmetric)."""
    if op not in EDGE_OPERATORS:
        raise ValueError(f"unknown edge operator {op!r}")
    fn = EDGE_OPERATORS[op]
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    zi = emb.Z[typemap.node_types[pairs[:, 0]]]
    zj = emb.Z[typemap.node_types[pairs[:, 1]]]
    return fn(zi.astype(np.float64), zj.astype(np.float64))


class LogisticRegressionL2:
    """Binary logistic regression, L2 penalty on weights (not the intercept),
    fitted by full-batch gradient descent with an exact Lipschitz step size."""

    def __init__(self, l2: float = 1.0, max_iters: int = 5000, tol: float = 1e-6):
        self.l2 = float(l2)
        self.max_iters = max_iters
        self.tol = tol
        self.w: np.ndarray | None = None
        self.b: float = 0.0
        self.n_iters: int = 0

    @staticmethod
    def loss_and_grad(w, b, X, y, l2):
        """Mean regularized log-loss and its gradient (weights + intercept)."""
        z = X @ w + b
        p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
        eps = 1e-12
        loss = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
        loss += 0.5 * l2 * (w @ w)
        resid = p - y
        grad_w = X.T @ resid / len(y) + l2 * w
        grad_b = resid.mean()
        return loss, grad_w, grad_b

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if len(np.unique(y)) < 2:
            raise ValueError("training labels contain a single class")
        aug = np.column_stack([X, np.ones(len(y))])
        gram = aug.T @ aug / len(y)
        lip = float(np.linalg.eigvalsh(gram).max()) / 4.0 + self.l2
        step = 1.0 / lip
        w = np.zeros(X.shape[1])
        b = 0.0
        for it in range(self.max_iters):
            _, gw, gb = self.loss_and_grad(w, b, X, y, self.l2)
            gnorm = math.sqrt(float(gw @ gw) + gb * gb)
            if gnorm < self.tol:
                break
            w -= step * gw
            b -= step * gb
        self.w, self.b, self.n_iters = w, b, it + 1
        return self

    def predict_proba(self, X):
        z = np.asarray(X, dtype=np.float64) @ self.w + self.b
        return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def train_logreg(features, labels, l2_grid=L2_GRID, folds: int = 10,
                 label_fraction: float = 0.1, seed: int = 0) -> LogisticRegressionL2:
    """Select the L2 strength by k-fold CV on a small labeled subsample, then
    fit on everything that was passed in.

    The selection subsample is ``label_fraction`` of the data; it must hold at
    least two examples of each class and at least ``folds`` rows.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    rng = np.random.default_rng(seed)
    n = len(y)
    sub = rng.permutation(n)[:max(int(math.ceil(label_fraction * n)), folds)]
    ys = y[sub]
    if (ys == 1).sum() < 2 or (ys == 0).sum() < 2:
        raise ValueError("selection subsample needs >= 2 examples of each class")
    if len(sub) < folds:
        raise ValueError(f"selection subsample smaller than {folds} folds")
    Xs = X[sub]

    fold_ids = np.arange(len(sub)) % folds
    fold_ids = fold_ids[rng.permutation(len(sub))]
    best_l2, best_score = None, -np.inf
    for l2 in l2_grid:
        scores = []
        for f in range(folds):
            tr, te = fold_ids != f, fold_ids == f
            if len(np.unique(ys[tr])) < 2 or len(np.unique(ys[te])) < 2:
                continue
            clf = LogisticRegressionL2(l2=l2).fit(Xs[tr], ys[tr])
            scores.append(auc(clf.predict_proba(Xs[te]), ys[te]))
        mean_score = float(np.mean(scores)) if scores else -np.inf
        if mean_score > best_score:
            best_l2, best_score = l2, mean_score
    if best_l2 is None:
        raise ValueError("cross-validation produced no usable folds")
    return LogisticRegressionL2(l2=best_l2).fit(X, y)


def auc(scores, labels) -> float:
    """Rank-based (Mann-Whitney) AUC; tied scores contribute 1/2."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0  # average rank, 1-based
        i = j + 1
    rank_sum_pos = ranks[labels == 1].sum()
    return float((rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def paired_sign_test(a, b) -> float:
    """Two-sided sign test p-value for paired samples (ties dropped)."""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    wins = int((a > b).sum())
    losses = int((a < b).sum())
    k = wins + losses
    if k == 0:
        return 1.0
    lo = min(wins, losses)
    tail = sum(math.comb(k, i) for i in range(lo + 1)) / 2.0 ** k
    return float(min(1.0, 2.0 * tail))


@dataclass
class LinkPredRow:
    operator: str
    auc_mean: float
    auc_std: float
    aucs: list
    m_mean: float
    sigma_bytes_mean: float
    p: float
    q: float
    control: bool = False  # permuted-label run


def _train_test_split(n_pos, n_neg, rng):
    pos = rng.permutation(n_pos)
    neg = n_pos + rng.permutation(n_neg)
    tr = np.concatenate([pos[: n_pos // 2], neg[: n_neg // 2]])
    te = np.concatenate([pos[n_pos // 2:], neg[n_neg // 2:]])
    return tr, te


def _single_run(graph, operators, seed, fraction, preserve_degree, type_options,
                walk_config, embed_config, workers, permute_labels):
    """One seeded split -> residual-graph embedding -> per-operator test AUC."""
    from .pipeline import build_types, embed_graph
    from .skipgram import embedding_size_bytes
    from dataclasses import replace

    split = split_edges(graph, fraction=fraction, preserve_degree=preserve_degree, seed=seed)
    typemap, _ = build_types(split.train_graph, options=type_options)
    emb, _ = embed_graph(split.train_graph, typemap,
                         replace(walk_config, seed=seed),
                         replace(embed_config, seed=seed), workers=workers)
    pairs = np.vstack([split.positives, split.negatives])
    y = np.concatenate([np.ones(len(split.positives)), np.zeros(len(split.negatives))])
    rng = np.random.default_rng(seed)
    if permute_labels:
        y = rng.permutation(y)
    tr, te = _train_test_split(len(split.positives), len(split.negatives), rng)
    out = {}
    for op in operators:
        feats = edge_features(emb, typemap, pairs, op)
        clf = train_logreg(feats[tr], y[tr], seed=seed)
        out[op] = auc(clf.predict_proba(feats[te]), y[te])
    sigma = embedding_size_bytes(emb, typemap)
    return out, typemap.m, sigma


def run_link_prediction(graph, operators=("mean", "hadamard"), n_seeds: int = 10,
                        base_seed: int = 0, fraction: float = 0.5,
                        preserve_degree: bool = False, type_options=None,
                        walk_config=None, embed_config=None, workers: int = 1,
                        permute_labels: bool = False) -> list[LinkPredRow]:
    """Full benchmark: repeat the split/embed/score protocol over seeds.

    Features are always learned on the residual graph only; the removed edges
    plus sampled non-edges are split half/half into classifier train and test
    sets, and the reported AUC is on the test half.
    """
    from .pipeline import TypeOptions
    from .walks import WalkConfig
    from .skipgram import EmbeddingConfig

    type_options = type_options or TypeOptions()
    walk_config = walk_config or WalkConfig()
    embed_config = embed_config or EmbeddingConfig()
    per_op = {op: [] for op in operators}
    ms, sigmas = [], []
    for s in range(n_seeds):
        aucs, m, sigma = _single_run(
            graph, operators, base_seed + s, fraction, preserve_degree,
            type_options, walk_config, embed_config, workers, permute_labels)
        for op in operators:
            per_op[op].append(aucs[op])
        ms.append(m)
        sigmas.append(sigma)
    rows = []
    for op in operators:
        vals = per_op[op]
        rows.append(LinkPredRow(
            operator=op, auc_mean=float(np.mean(vals)), auc_std=float(np.std(vals)),
            aucs=vals, m_mean=float(np.mean(ms)), sigma_bytes_mean=float(np.mean(sigmas)),
            p=walk_config.p, q=walk_config.q, control=permute_labels))
    return rows


def render_linkpred_report(rows: list[LinkPredRow], dataset: str = "-") -> str:
    lines = ["dataset\toperator\tauc_mean\tauc_std\tp\tq\tm_mean\tsigma_bytes\tcontrol"]
    for r in rows:
        lines.append(
            f"{dataset}\t{r.operator}\t{r.auc_mean:.4f}\t{r.auc_std:.4f}"
            f"\t{r.p}\t{r.q}\t{r.m_mean:.1f}\t{r.sigma_bytes_mean:.0f}"
            f"\t{int(r.control)}")
    return "\n".join(lines) + "\n"
