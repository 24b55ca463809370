"""Attributed random-walk node embeddings.

Maps nodes to types through structural attributes, generates type-sequence
random walks, trains type embeddings with skip-gram negative sampling, and
evaluates them on link prediction and space efficiency.
"""

from .binning import BinningConfig, equal_width_bin, identity_bin, log_bin, transform_attributes
from .graph import (AttributeMatrix, EdgeListParseError, Graph, load_attributes,
                    load_edge_list, write_attributes, write_edge_list)
from .graphlets import GRAPHLET_COLUMNS, brute_force_graphlet_oracle, count_graphlets
from .linkpred import (EDGE_OPERATORS, LinkSplit, LogisticRegressionL2, auc,
                       edge_features, paired_sign_test, run_link_prediction,
                       split_edges, train_logreg)
from .pipeline import TypeOptions, build_types, embed_graph, structural_attributes
from .skipgram import (EmbeddingConfig, EmbeddingMatrix, embedding_size_bytes,
                       load_embedding, node_embedding, pair_loss_and_grad,
                       save_embedding, train_skipgram)
from .spacereport import ATTRIBUTE_SUBSETS, space_report, type_count_table
from .typemap import (FactorizationModel, TypeMap, argmax_types, factorize,
                      identity_types, inductive_assign, kmeans_types, load_model,
                      load_typemap, map_concat, save_model, save_typemap,
                      save_vocabulary)
from .walks import (AliasTable, TransitionTable, WalkConfig, WalkCorpus,
                    attributed_walk, generate_corpus, load_corpus,
                    precompute_transitions, save_corpus)

__version__ = "0.1.0"
