"""Command-line front-end: features -> types -> walks -> embed -> evaluate."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .binning import BinningConfig, SCHEMES, transform_attributes
from .graph import EdgeListParseError, load_attributes, load_edge_list, write_attributes
from .graphlets import count_graphlets
from .linkpred import (EDGE_OPERATORS, render_linkpred_report, run_link_prediction)
from .pipeline import TypeOptions, build_types, embed_graph, structural_attributes
from .skipgram import EmbeddingConfig, EmbeddingMatrix, save_embedding
from .spacereport import render_space_report, space_report, type_count_table
from .typemap import (argmax_types, factorize, identity_types, kmeans_types,
                      save_model, save_typemap, save_vocabulary)
from .walks import WalkConfig, generate_corpus, precompute_transitions, save_corpus

PQ_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)


def _add_type_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--attrs", default=None, help="attribute TSV (default: graphlet counts)")
    p.add_argument("--columns", default=None,
                   help="comma-separated attribute subset, e.g. x2,x3")
    p.add_argument("--alpha", type=float, default=0.5, help="binning fraction (default 0.5)")
    p.add_argument("--scheme", choices=SCHEMES, default="logarithmic")
    p.add_argument("--raw", action="store_true", help="skip binning, concatenate raw values")
    p.add_argument("--identity-types", action="store_true",
                   help="one type per node (recovers identity-walk methods)")


def _add_walk_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-r", "--walks-per-node", type=int, default=10)
    p.add_argument("-l", "--walk-length", type=int, default=80)
    p.add_argument("-p", "--return-param", type=float, default=1.0, dest="p")
    p.add_argument("-q", "--inout-param", type=float, default=1.0, dest="q")


def _add_embed_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-d", "--dims", type=int, default=128)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--lr", type=float, default=0.025)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--deterministic", action="store_true",
                   help="force single-threaded sequential paths")


def _type_options(args) -> TypeOptions:
    columns = args.columns.split(",") if args.columns else None
    return TypeOptions(alpha=args.alpha, scheme=args.scheme, binned=not args.raw,
                       identity=args.identity_types, columns=columns)


def _workers(args) -> int:
    return 1 if args.deterministic else max(1, args.threads)


def cmd_features(args) -> int:
    graph = load_edge_list(args.edge_list)
    attrs = count_graphlets(graph)
    write_attributes(args.out, attrs, graph)
    print(f"wrote {attrs.num_rows}x{attrs.num_cols} attribute matrix to {args.out}")
    return 0


def cmd_types(args) -> int:
    graph = load_edge_list(args.edge_list)
    attrs = load_attributes(args.attrs, graph) if args.attrs else None
    if args.learned is None:
        typemap, _ = build_types(graph, attrs, _type_options(args))
        model = None
    else:
        if attrs is None:
            attrs = structural_attributes(graph)
        opts = _type_options(args)
        if opts.columns:
            attrs = attrs.select(opts.columns)
        if opts.binned:
            attrs = transform_attributes(attrs, opts.binning_config())
        model = factorize(attrs, rank=args.rank, iters=args.als_iters,
                          seed=args.seed, l2=args.l2)
        if args.learned == "kmeans":
            typemap = kmeans_types(model, m=args.num_types, iters=args.kmeans_iters,
                                   seed=args.seed)
        else:
            typemap = argmax_types(model)
    save_typemap(args.out, typemap, graph)
    if args.vocab_out:
        save_vocabulary(args.vocab_out, typemap)
    if model is not None and args.model_out:
        save_model(args.model_out, model)
    print(f"{typemap.m} types over {graph.num_nodes} nodes -> {args.out}")
    return 0


def cmd_walks(args) -> int:
    graph = load_edge_list(args.edge_list)
    attrs = load_attributes(args.attrs, graph) if args.attrs else None
    typemap, _ = build_types(graph, attrs, _type_options(args))
    table = precompute_transitions(graph, args.p, args.q)
    config = WalkConfig(walks_per_node=args.walks_per_node, walk_length=args.walk_length,
                        p=args.p, q=args.q, seed=args.seed)
    corpus = generate_corpus(graph, table, typemap, config, workers=_workers(args),
                             keep_nodes=args.nodes_out is not None)
    save_corpus(args.out, corpus, nodes_path=args.nodes_out, graph=graph)
    print(f"wrote {len(corpus)} walks to {args.out}")
    return 0


def cmd_embed(args) -> int:
    graph = load_edge_list(args.edge_list)
    attrs = load_attributes(args.attrs, graph) if args.attrs else None
    typemap, _ = build_types(graph, attrs, _type_options(args))
    walk_config = WalkConfig(walks_per_node=args.walks_per_node,
                             walk_length=args.walk_length, p=args.p, q=args.q,
                             seed=args.seed)
    embed_config = EmbeddingConfig(dims=args.dims, window=args.window,
                                   negatives=args.negatives, epochs=args.epochs,
                                   initial_lr=args.lr, seed=args.seed)
    emb, _ = embed_graph(graph, typemap, walk_config, embed_config,
                         workers=_workers(args))
    save_embedding(args.out, emb, typemap, node_level=args.node_embeddings, graph=graph)
    if args.types_out:
        save_typemap(args.types_out, typemap, graph)
    print(f"trained {emb.m}x{emb.dims} type embedding -> {args.out}")
    return 0


def cmd_linkpred(args) -> int:
    graph = load_edge_list(args.edge_list)
    operators = args.operators.split(",")
    for op in operators:
        if op not in EDGE_OPERATORS:
            raise ValueError(f"unknown edge operator {op!r}")
    type_options = _type_options(args)
    walk_config = WalkConfig(walks_per_node=args.walks_per_node,
                             walk_length=args.walk_length, p=args.p, q=args.q,
                             seed=args.seed)
    embed_config = EmbeddingConfig(dims=args.dims, window=args.window,
                                   negatives=args.negatives, epochs=args.epochs,
                                   initial_lr=args.lr, seed=args.seed)
    if args.grid_pq:
        from .linkpred import _single_run
        best = (-1.0, args.p, args.q)
        for p in PQ_GRID:
            for q in PQ_GRID:
                aucs, _, _ = _single_run(
                    graph, operators[:1], args.seed, args.fraction,
                    args.preserve_degree, type_options,
                    replace(walk_config, p=p, q=q), embed_config,
                    _workers(args), False)
                score = aucs[operators[0]]
                if score > best[0]:
                    best = (score, p, q)
        walk_config = replace(walk_config, p=best[1], q=best[2])
        print(f"grid search selected p={best[1]} q={best[2]}", file=sys.stderr)
    rows = run_link_prediction(
        graph, operators=operators, n_seeds=args.seeds, base_seed=args.seed,
        fraction=args.fraction, preserve_degree=args.preserve_degree,
        type_options=type_options, walk_config=walk_config,
        embed_config=embed_config, workers=_workers(args),
        permute_labels=args.permute_labels)
    report = render_linkpred_report(rows, dataset=args.edge_list)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report)
    print(report, end="")
    return 0


def cmd_space(args) -> int:
    graph = load_edge_list(args.edge_list)
    attrs = load_attributes(args.attrs, graph) if args.attrs else None
    counts = type_count_table(graph, alpha=args.alpha, attrs=attrs)

    # identity baseline vs typed variants at the same dimensionality: sizes are
    # determined by m and the vocabulary, so train-free matrices suffice here
    from .typemap import map_concat
    base_attrs = attrs if attrs is not None else structural_attributes(graph)
    binned = transform_attributes(base_attrs, BinningConfig(alpha=args.alpha))
    entries = []
    id_tm = identity_types(graph.num_nodes)
    entries.append(("identity", _zero_embedding(id_tm.m, args.dims, id_tm), id_tm))
    from .spacereport import ATTRIBUTE_SUBSETS
    for subset in ATTRIBUTE_SUBSETS:
        tm = map_concat(binned.select(subset))
        entries.append(("[" + " ".join(subset) + "]",
                        _zero_embedding(tm.m, args.dims, tm), tm))
    rows = space_report(entries, baseline="identity", value_bytes=args.value_bytes)
    report = render_space_report(rows, type_counts=counts)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report)
    print(report, end="")
    return 0


def _zero_embedding(m: int, dims: int, typemap) -> EmbeddingMatrix:
    z = np.zeros((m, dims), dtype=np.float32)
    return EmbeddingMatrix(Z=z, C=z, typemap=typemap)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attrwalk",
        description="Attributed random-walk embeddings: structural types, "
                    "type-sequence walks, and evaluation harnesses.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="write per-node graphlet counts as attribute TSV")
    p.add_argument("edge_list")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("types", help="map nodes to types (concatenation or learned)")
    p.add_argument("edge_list")
    _add_type_args(p)
    p.add_argument("--learned", choices=("kmeans", "argmax"), default=None)
    p.add_argument("--rank", type=int, default=8, help="factorization rank")
    p.add_argument("--num-types", type=int, default=8, help="k-means cluster count")
    p.add_argument("--als-iters", type=int, default=50)
    p.add_argument("--kmeans-iters", type=int, default=100)
    p.add_argument("--l2", type=float, default=0.1, help="factorization ridge penalty")
    p.add_argument("--out", required=True)
    p.add_argument("--vocab-out", default=None)
    p.add_argument("--model-out", default=None, help="persist factors for inductive reuse")
    _add_common(p)
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("walks", help="generate an attributed-walk corpus")
    p.add_argument("edge_list")
    _add_type_args(p)
    _add_walk_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--nodes-out", default=None, help="debug sidecar with node ids")
    _add_common(p)
    p.set_defaults(func=cmd_walks)

    p = sub.add_parser("embed", help="full pipeline to a type embedding")
    p.add_argument("edge_list")
    _add_type_args(p)
    _add_walk_args(p)
    _add_embed_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--types-out", default=None)
    p.add_argument("--node-embeddings", action="store_true",
                   help="export one row per node instead of per type")
    _add_common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("linkpred", help="link-prediction benchmark over seeds")
    p.add_argument("edge_list")
    _add_type_args(p)
    _add_walk_args(p)
    _add_embed_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--operators", default="mean,hadamard")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--preserve-degree", action="store_true")
    p.add_argument("--grid-pq", action="store_true",
                   help="select p,q from the standard grid on the first seed")
    p.add_argument("--permute-labels", action="store_true",
                   help="control run with permuted labels (chance-level AUC)")
    _add_common(p)
    p.set_defaults(func=cmd_linkpred)

    p = sub.add_parser("space", help="space and type-count report")
    p.add_argument("edge_list")
    p.add_argument("--attrs", default=None)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("-d", "--dims", type=int, default=128)
    p.add_argument("--value-bytes", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_space)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    resolved = {k: v for k, v in vars(args).items() if k != "func"}
    print("config: " + json.dumps(resolved, default=str, sort_keys=True), file=sys.stderr)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EdgeListParseError, ValueError, IndexError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
