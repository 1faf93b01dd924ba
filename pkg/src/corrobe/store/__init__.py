from .cache import ResultsCache
from .embeddings import EmbeddingTable, pool_max, write_embeddings
from .formats import read_records, write_records
from .manifest import (
    CLEAN_KEY,
    DatasetManifest,
    InstanceRecord,
    load_manifest,
    save_manifest,
)
from .scene_graphs import load_scene_graphs, save_scene_graphs

__all__ = [
    "CLEAN_KEY",
    "DatasetManifest",
    "EmbeddingTable",
    "InstanceRecord",
    "ResultsCache",
    "load_manifest",
    "load_scene_graphs",
    "pool_max",
    "read_records",
    "save_manifest",
    "save_scene_graphs",
    "write_embeddings",
    "write_records",
]
