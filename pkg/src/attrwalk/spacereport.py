"""Space-efficiency reporting: embedding byte sizes, the log-relative space
metric against a baseline, and type counts for nested graphlet-attribute sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binning import BinningConfig, transform_attributes
from .graph import AttributeMatrix, Graph
from .graphlets import count_graphlets
from .skipgram import EmbeddingMatrix, embedding_size_bytes
from .typemap import TypeMap, map_concat

# nested attribute subsets used for the type-count table; refining the set
# (adding concatenated columns) can only split types, never merge them
ATTRIBUTE_SUBSETS = [
    ("x2", "x3"),
    ("x2", "x3", "x4", "x6", "x9"),
    ("x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"),
    ("x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"),
]


def type_count_table(graph: Graph, alpha: float = 0.5,
                     attrs: AttributeMatrix | None = None) -> list[tuple[str, int]]:
    """Number of distinct types per nested attribute subset (log-binned)."""
    if attrs is None:
        attrs = count_graphlets(graph)
    binned = transform_attributes(attrs, BinningConfig(alpha=alpha))
    out = []
    for subset in ATTRIBUTE_SUBSETS:
        tm = map_concat(binned.select(subset))
        out.append(("[" + " ".join(subset) + "]", tm.m))
    return out


@dataclass
class SpaceRow:
    name: str
    m: int
    dims: int
    size_bytes: int
    log_space_metric: float  # log10(sigma_min_baseline / sigma)


def space_report(entries, baseline: str | None = None,
                 value_bytes: int = 4) -> list[SpaceRow]:
    """Compare embedding storage sizes against the smallest baseline.

    ``entries`` is a list of (name, EmbeddingMatrix, TypeMap) triples. The
    baseline defaults to the first entry; the metric is log10(sigma_min /
    sigma), so the smallest baseline sits at 0 and anything larger is
    negative.
    """
    if len(entries) < 2:
        raise ValueError("space report needs at least 2 embeddings")
    names = [e[0] for e in entries]
    if baseline is None:
        baseline_names = {names[0]}
    else:
        baseline_names = {baseline}
        if baseline not in names:
            raise ValueError(f"baseline {baseline!r} not among entries")
    sizes = {name: embedding_size_bytes(emb, tm, value_bytes=value_bytes)
             for name, emb, tm in entries}
    sigma_min = min(sizes[name] for name in baseline_names)
    rows = []
    for name, emb, tm in entries:
        rows.append(SpaceRow(
            name=name, m=emb.m, dims=emb.dims, size_bytes=sizes[name],
            log_space_metric=math.log10(sigma_min / sizes[name])))
    return rows


def render_space_report(rows: list[SpaceRow], type_counts=None) -> str:
    """TSV rendering of the space rows plus the optional type-count table."""
    lines = ["name\tm\td\tsigma_bytes\tlog10_space_gain"]
    for r in rows:
        lines.append(f"{r.name}\t{r.m}\t{r.dims}\t{r.size_bytes}\t{r.log_space_metric:.4f}")
    if type_counts:
        lines.append("")
        lines.append("attribute_set\tnum_types")
        for name, m in type_counts:
            lines.append(f"{name}\t{m}")
    return "\n".join(lines) + "\n"
