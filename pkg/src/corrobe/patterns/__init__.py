from .clustering import DEFAULT_MIN_CLUSTER_SIZE, DEFAULT_MIN_SAMPLES, cluster
from .density import GRID_SIZE, density_grid
from .distance import (
    DEFAULT_ALPHA,
    EmbeddingTriple,
    distance_matrix,
    pair_distance,
    quality_delta,
)
from .labels import centroid_label
from .model import (
    PatternModel,
    build_pattern_model,
    export_selection,
    read_selection_manifest,
)
from .projection import project_2d

__all__ = [
    "DEFAULT_ALPHA",
    "DEFAULT_MIN_CLUSTER_SIZE",
    "DEFAULT_MIN_SAMPLES",
    "EmbeddingTriple",
    "GRID_SIZE",
    "PatternModel",
    "build_pattern_model",
    "centroid_label",
    "cluster",
    "density_grid",
    "distance_matrix",
    "export_selection",
    "pair_distance",
    "project_2d",
    "quality_delta",
    "read_selection_manifest",
]
