"""Per-column quantization of attribute vectors into small discrete alphabets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import AttributeMatrix

SCHEMES = ("logarithmic", "equal-width", "identity")


@dataclass
class BinningConfig:
    alpha: float = 0.5
    scheme: str = "logarithmic"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown binning scheme {self.scheme!r}")


def log_bin(column, alpha: float) -> np.ndarray:
    """Iterative shrinking-fraction quantization of one attribute column.

    Sort values ascending, assign floor(alpha * remaining) of the smallest
    unassigned entries (at least 1 per round) to the current bin, then repeat
    with the next bin id. Equal values always land in the same bin: a round
    boundary that falls inside a run of ties extends through the run.

    Returns bin ids aligned to the input order, contiguous from 0.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    column = np.asarray(column, dtype=np.float64)
    n = len(column)
    if n == 0:
        raise ValueError("cannot bin an empty column")
    if not np.all(np.isfinite(column)):
        raise ValueError("column contains non-finite values")
    order = np.argsort(column, kind="stable")
    svals = column[order]
    bins = np.empty(n, dtype=np.int64)
    b = 0
    i = 0
    while i < n:
        remaining = n - i
        j = i + max(1, int(alpha * remaining))
        while j < n and svals[j] == svals[j - 1]:
            j += 1
        bins[order[i:j]] = b
        i = j
        b += 1
    return bins


def equal_width_bin(column, alpha: float) -> np.ndarray:
    """Quantize into ceil(1/alpha) equal-width value intervals.

    Empty intervals are compressed away so ids stay contiguous from 0.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    column = np.asarray(column, dtype=np.float64)
    if len(column) == 0:
        raise ValueError("cannot bin an empty column")
    if not np.all(np.isfinite(column)):
        raise ValueError("column contains non-finite values")
    lo, hi = column.min(), column.max()
    if lo == hi:
        return np.zeros(len(column), dtype=np.int64)
    nbins = math.ceil(1.0 / alpha)
    raw = np.minimum((column - lo) / (hi - lo) * nbins, nbins - 1).astype(np.int64)
    return _densify(raw)


def identity_bin(column) -> np.ndarray:
    """Dense rank of distinct values (no quantization, just discrete ids)."""
    column = np.asarray(column, dtype=np.float64)
    if len(column) == 0:
        raise ValueError("cannot bin an empty column")
    if not np.all(np.isfinite(column)):
        raise ValueError("column contains non-finite values")
    _, inv = np.unique(column, return_inverse=True)
    return inv.astype(np.int64)


def _densify(ids: np.ndarray) -> np.ndarray:
    _, inv = np.unique(ids, return_inverse=True)
    return inv.astype(np.int64)


def transform_attributes(attrs: AttributeMatrix, config: BinningConfig | None = None) -> AttributeMatrix:
    """Replace each column by its binned version (columns are independent)."""
    config = config or BinningConfig()
    out = np.empty_like(attrs.values)
    for j in range(attrs.num_cols):
        col = attrs.values[:, j]
        if config.scheme == "logarithmic":
            out[:, j] = log_bin(col, config.alpha)
        elif config.scheme == "equal-width":
            out[:, j] = equal_width_bin(col, config.alpha)
        else:
            out[:, j] = identity_bin(col)
    return AttributeMatrix(out, list(attrs.col_names))
