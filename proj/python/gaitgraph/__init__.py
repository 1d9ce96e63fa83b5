"""Skeleton-sequence gait embeddings (C++ core via pybind11)."""

from ._gaitgraph import (
    ContractError,
    DegenerateError,
    FormatError,
    GaitGraphError,
    IndexingError,
    Model,
    OptimizerError,
    ParseError,
    ProtocolError,
    ShapeError,
    TopologyError,
    coco17_adjacency,
    coco17_topology,
    default_config,
    gradcheck,
    index_corpus,
    jitter_joints,
    mirror_pose,
    normalize_adjacency,
    normalize_coords,
    partition,
    rank1_cross_view,
    read_pose_csv,
    reverse_time,
    sample_window,
    shape_trace,
    supcon_loss,
    synthesize_corpus,
    synthesize_sequence,
    train,
    write_pose_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
