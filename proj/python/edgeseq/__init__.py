"""Edge-sequence graph generation: a two-network recurrent generator,
classical baselines, and distribution-level evaluation metrics."""

from edgeseq._core import (
    Graph,
    EdgeSeqModel,
    SampleDiagnostics,
    UserError,
    canonical_form,
    clustering_stats,
    decode,
    degree_stats,
    degrees,
    emd_1d,
    encode,
    evaluate_sampler,
    extract_destination,
    extract_ego,
    extract_source,
    fit_ba,
    fit_er,
    gen_ba,
    gen_community,
    gen_er,
    gen_ladders,
    is_connected,
    isomorphic,
    kld,
    load_edge_lists,
    load_model,
    novelty,
    orbit_stats,
    order_nodes,
    split,
    train_model,
    uniqueness,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "EdgeSeqModel",
    "SampleDiagnostics",
    "UserError",
    "canonical_form",
    "clustering_stats",
    "decode",
    "degree_stats",
    "degrees",
    "emd_1d",
    "encode",
    "evaluate_sampler",
    "extract_destination",
    "extract_ego",
    "extract_source",
    "fit_ba",
    "fit_er",
    "gen_ba",
    "gen_community",
    "gen_er",
    "gen_ladders",
    "is_connected",
    "isomorphic",
    "kld",
    "load_edge_lists",
    "load_model",
    "novelty",
    "orbit_stats",
    "order_nodes",
    "split",
    "train_model",
    "uniqueness",
]
