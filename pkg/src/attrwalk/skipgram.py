"""Skip-gram with negative sampling over type-sequence walks.

Trains an m x d matrix of type embeddings from a walk corpus. Pairs are
emitted with a dynamic window (uniform in [1, window] per center token),
negatives are drawn proportional to type frequency^(3/4), and the learning
rate decays linearly to initial_lr / 1e4 over the scheduled pair count.
Updates run in vectorized minibatches; gradients for colliding rows within a
batch accumulate, and the whole procedure is deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .typemap import TypeMap
from .walks import WalkCorpus


@dataclass
class EmbeddingConfig:
    dims: int = 128
    window: int = 10
    negatives: int = 5
    epochs: int = 1
    initial_lr: float = 0.025
    seed: int = 0
    batch_pairs: int = 100_000

    def __post_init__(self):
        if self.dims < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("dims, window, negatives and epochs must all be >= 1")
        if self.initial_lr <= 0:
            raise ValueError("initial_lr must be > 0")


@dataclass
class EmbeddingMatrix:
    """Input vectors Z (the embedding), context vectors C, and the type map."""

    Z: np.ndarray
    C: np.ndarray
    typemap: TypeMap | None = None
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.Z.shape[0]

    @property
    def dims(self) -> int:
        return self.Z.shape[1]


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def pair_loss_and_grad(z: np.ndarray, c_pos: np.ndarray, c_negs: np.ndarray):
    """Loss and exact gradients for one (center, context, negatives) triple.

    loss = -log sigmoid(z . c_pos) - sum_i log sigmoid(-z . n_i)

    Returns (loss, grad_z, grad_c_pos, grad_c_negs) in float64; used both by
    tests (finite-difference check) and as the reference for the batched
    trainer's update rule.
    """
    z = np.asarray(z, dtype=np.float64)
    c_pos = np.asarray(c_pos, dtype=np.float64)
    c_negs = np.asarray(c_negs, dtype=np.float64).reshape(-1, len(z))
    s_pos = 1.0 / (1.0 + np.exp(-z @ c_pos))
    s_negs = 1.0 / (1.0 + np.exp(-c_negs @ z))
    loss = -np.log(s_pos) - np.log1p(-s_negs).sum()
    grad_z = (s_pos - 1.0) * c_pos + s_negs @ c_negs
    grad_c_pos = (s_pos - 1.0) * z
    grad_c_negs = s_negs[:, None] * z[None, :]
    return float(loss), grad_z, grad_c_pos, grad_c_negs


def _scatter_sub(M: np.ndarray, idx: np.ndarray, grads: np.ndarray) -> None:
    """M[idx] -= grads, averaging duplicates (sort + segment mean).

    Averaging rather than summing keeps the per-row step size independent of
    how many pairs in a batch touch the row; with few collisions it matches
    plain per-pair SGD, and with a tiny vocabulary it stays stable.
    """
    order = np.argsort(idx, kind="stable")
    si = idx[order]
    sg = grads[order]
    starts = np.flatnonzero(np.r_[True, si[1:] != si[:-1]])
    sums = np.add.reduceat(sg, starts, axis=0)
    counts = np.diff(np.r_[starts, len(si)]).astype(sg.dtype)
    M[si[starts]] -= sums / counts[:, None]


class _VectorAlias:
    """Alias sampler over the noise distribution, vectorized over draw shape."""

    def __init__(self, weights: np.ndarray):
        k = len(weights)
        scaled = weights * (k / weights.sum())
        self.prob = np.empty(k)
        self.alias = np.zeros(k, dtype=np.int64)
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
        self.size = k

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        slot = np.minimum((rng.random(shape) * self.size).astype(np.int64), self.size - 1)
        keep = rng.random(shape) < self.prob[slot]
        return np.where(keep, slot, self.alias[slot])


def _pair_masks(flat, wid, b, offset):
    same = wid[offset:] == wid[:-offset]
    left = same & (b[offset:] >= offset)     # center at t, context at t - offset
    right = same & (b[:-offset] >= offset)   # center at t, context at t + offset
    return left, right


def train_skipgram(corpus: WalkCorpus, num_types: int, config: EmbeddingConfig) -> EmbeddingMatrix:
    """Fit type embeddings on a walk corpus; returns Z, C and per-epoch loss."""
    if len(corpus.walks) == 0:
        raise ValueError("empty corpus")
    flat = np.concatenate([np.asarray(w, dtype=np.int64) for w in corpus.walks])
    if flat.min() < 0 or flat.max() >= num_types:
        raise ValueError("corpus contains type ids outside the vocabulary")
    wid = np.repeat(np.arange(len(corpus.walks)), [len(w) for w in corpus.walks])

    freq = np.bincount(flat, minlength=num_types).astype(np.float64)
    noise = _VectorAlias(freq ** 0.75)

    rng = np.random.default_rng(config.seed)
    d = config.dims
    Z = rng.uniform(-0.5 / d, 0.5 / d, size=(num_types, d)).astype(np.float32)
    C = np.zeros((num_types, d), dtype=np.float32)

    # draw per-epoch dynamic windows up front so the pair schedule is known
    windows = [rng.integers(1, config.window + 1, size=len(flat)) for _ in range(config.epochs)]
    total_pairs = 0
    for b in windows:
        for off in range(1, config.window + 1):
            left, right = _pair_masks(flat, wid, b, off)
            total_pairs += int(left.sum()) + int(right.sum())
    if total_pairs == 0:
        raise ValueError("corpus produced no training pairs")

    lr0 = config.initial_lr
    lr_floor = lr0 * 1e-4
    done = 0
    epoch_losses = []
    for b in windows:
        epoch_loss = 0.0
        epoch_pairs = 0
        for off in range(1, config.window + 1):
            left, right = _pair_masks(flat, wid, b, off)
            centers = np.concatenate([flat[off:][left], flat[:-off][right]])
            contexts = np.concatenate([flat[:-off][left], flat[off:][right]])
            for s in range(0, len(centers), config.batch_pairs):
                ci = centers[s:s + config.batch_pairs]
                ti = contexts[s:s + config.batch_pairs]
                n_b = len(ci)
                lr_b = np.maximum(
                    lr0 * (1.0 - (done + np.arange(n_b)) / total_pairs), lr_floor
                ).astype(np.float32)
                done += n_b

                ni = noise.draw(rng, (n_b, config.negatives))
                zc = Z[ci]
                cp = C[ti]
                cn = C[ni]
                s_pos = _sigmoid((zc * cp).sum(axis=1))
                s_neg = _sigmoid(np.einsum("bd,bkd->bk", zc, cn))
                eps = np.float32(1e-7)
                epoch_loss -= float(np.log(s_pos + eps).sum())
                epoch_loss -= float(np.log1p(-(s_neg - eps)).sum())
                epoch_pairs += n_b

                g_pos = (s_pos - 1.0) * lr_b
                g_neg = s_neg * lr_b[:, None]
                dz = g_pos[:, None] * cp + np.einsum("bk,bkd->bd", g_neg, cn)
                dcp = g_pos[:, None] * zc
                dcn = g_neg[:, :, None] * zc[:, None, :]
                _scatter_sub(Z, ci, dz)
                _scatter_sub(C, np.concatenate([ti, ni.ravel()]),
                             np.concatenate([dcp, dcn.reshape(-1, d)]))
        epoch_losses.append(epoch_loss / max(epoch_pairs, 1))

    if not np.all(np.isfinite(Z)) or not np.all(np.isfinite(C)):
        raise FloatingPointError("embedding diverged to non-finite values")
    return EmbeddingMatrix(Z=Z, C=C, epoch_losses=epoch_losses)


def node_embedding(emb: EmbeddingMatrix, typemap: TypeMap, v: int) -> np.ndarray:
    """Embedding of node v = row of Z for v's type (same type, same vector)."""
    if not 0 <= v < typemap.num_nodes:
        raise IndexError(f"node index {v} out of range [0, {typemap.num_nodes})")
    return emb.Z[typemap.node_types[v]]


def embedding_size_bytes(emb: EmbeddingMatrix, typemap: TypeMap | None = None,
                         value_bytes: int = 4) -> int:
    """Storage cost: m * d * value_bytes plus the vocabulary string overhead."""
    tm = typemap or emb.typemap
    vocab = sum(len(s.encode("utf-8")) for s in tm.signatures) if tm is not None else 0
    return emb.m * emb.dims * value_bytes + vocab


def save_embedding(path, emb: EmbeddingMatrix, typemap: TypeMap,
                   node_level: bool = False, graph: Graph | None = None) -> None:
    """Text format: header "m d", then one row per type (signature + floats).

    With ``node_level`` the lookup is expanded to one row per node keyed by
    external id (requires the graph for the id mapping).
    """
    with open(path, "w", encoding="utf-8") as fh:
        if node_level:
            if graph is None:
                raise ValueError("node-level export needs the graph for external ids")
            fh.write(f"{typemap.num_nodes} {emb.dims}\n")
            for v in range(typemap.num_nodes):
                row = emb.Z[typemap.node_types[v]]
                fh.write(str(graph.to_external(v)) + " "
                         + " ".join(f"{x:.8g}" for x in row) + "\n")
        else:
            fh.write(f"{emb.m} {emb.dims}\n")
            for t in range(emb.m):
                fh.write(typemap.signatures[t] + " "
                         + " ".join(f"{x:.8g}" for x in emb.Z[t]) + "\n")


def load_embedding(path):
    """Read the type-level text format; returns (signatures, Z)."""
    with open(path, "r", encoding="utf-8") as fh:
        m, d = (int(t) for t in fh.readline().split())
        sigs = []
        Z = np.empty((m, d), dtype=np.float32)
        for i in range(m):
            toks = fh.readline().split()
            sigs.append(toks[0])
            Z[i] = [float(x) for x in toks[1:]]
    return sigs, Z
