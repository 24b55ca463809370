"""End-to-end wiring: attributes -> transform -> types -> walks -> embedding."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .binning import BinningConfig, transform_attributes
from .graph import AttributeMatrix, Graph
from .graphlets import count_graphlets
from .skipgram import EmbeddingConfig, EmbeddingMatrix, train_skipgram
from .typemap import TypeMap, identity_types, map_concat
from .walks import WalkConfig, WalkCorpus, generate_corpus, precompute_transitions


@dataclass
class TypeOptions:
    """How nodes get their types in the default (concatenation) pipeline."""

    alpha: float = 0.5
    scheme: str = "logarithmic"
    binned: bool = True          # False: concatenate raw attribute values
    identity: bool = False       # True: every node its own type
    columns: list[str] | None = None  # attribute subset, None = all

    def binning_config(self) -> BinningConfig:
        return BinningConfig(alpha=self.alpha, scheme=self.scheme)


def structural_attributes(graph: Graph) -> AttributeMatrix:
    """Graphlet participation counts, the default attributes when none are given."""
    return count_graphlets(graph)


def build_types(graph: Graph, attrs: AttributeMatrix | None = None,
                options: TypeOptions | None = None) -> tuple[TypeMap, AttributeMatrix | None]:
    """Resolve the type map; returns it with the (possibly binned) attributes."""
    options = options or TypeOptions()
    if options.identity:
        return identity_types(graph.num_nodes), None
    if attrs is None:
        attrs = structural_attributes(graph)
    if attrs.num_rows != graph.num_nodes:
        raise ValueError("attribute rows do not match the graph")
    if options.columns:
        attrs = attrs.select(options.columns)
    if options.binned:
        attrs = transform_attributes(attrs, options.binning_config())
    return map_concat(attrs), attrs


def embed_graph(graph: Graph, typemap: TypeMap, walk_config: WalkConfig,
                embed_config: EmbeddingConfig, workers: int = 1,
                keep_nodes: bool = False) -> tuple[EmbeddingMatrix, WalkCorpus]:
    """Walk generation plus skip-gram training for an already typed graph."""
    table = precompute_transitions(graph, walk_config.p, walk_config.q)
    corpus = generate_corpus(graph, table, typemap, walk_config,
                             workers=workers, keep_nodes=keep_nodes)
    emb = train_skipgram(corpus, typemap.m, embed_config)
    emb.typemap = typemap
    return emb, corpus
