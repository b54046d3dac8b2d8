"""Synthetic graphs that reproduce a source graph's degree, per-degree
clustering and joint-degree structure at any size."""

from .bucketing import BucketPlan, group_into_buckets, merge_incomplete_buckets, quantize_ce
from .edgegen import (
    GenerationConfig,
    GenerationState,
    InvariantViolation,
    build,
    cross_bucket_pass,
    generate,
    high_degree_pass,
    intra_bucket_edges,
)
from .graph import EdgeListError, Graph, load_edge_list, save_edge_list
from .model import GraphModel, Targets, VertexTarget, assign_targets, extract_model, load_model, local_cc, save_model
from .supercomm import ShardedPlan, generate_sharded, plan_shards

__version__ = "0.1.0"

__all__ = [
    "BucketPlan", "group_into_buckets", "merge_incomplete_buckets", "quantize_ce",
    "GenerationConfig", "GenerationState", "InvariantViolation", "build", "cross_bucket_pass",
    "generate", "high_degree_pass", "intra_bucket_edges",
    "EdgeListError", "Graph", "load_edge_list", "save_edge_list",
    "GraphModel", "Targets", "VertexTarget", "assign_targets", "extract_model", "load_model",
    "local_cc", "save_model",
    "ShardedPlan", "generate_sharded", "plan_shards",
]
