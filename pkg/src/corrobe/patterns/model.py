"""Pattern model assembly and augmentation-subset export.

A pattern model is everything the projection view needs for one (corruption
key, task) selection: the instance ids that attempt the task, their pairwise
error-aware distances, cluster labels, 2D coordinates, per-cluster density
grids, and centroid labels. Outliers (label -1) never contribute to grids or
centroid labels.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import squareform

from ..errors import InputError
from ..sg import SceneGraph, TaskCategory, TaskVocab
from .clustering import DEFAULT_MIN_CLUSTER_SIZE, DEFAULT_MIN_SAMPLES, cluster
from .density import density_grid
from .distance import DEFAULT_ALPHA, EmbeddingTriple, distance_matrix
from .labels import centroid_label
from .projection import project_2d

logger = logging.getLogger(__name__)

MANIFEST_MAGIC = "corrobe-augmentation-manifest"
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class PatternModel:
    task: TaskCategory
    corruption_key: str
    instance_ids: tuple[str, ...]
    condensed_distances: np.ndarray  # scipy-style condensed vector
    alpha: float
    labels: np.ndarray  # per instance; -1 = outlier
    coords: np.ndarray  # (n, 2)
    density_grids: dict[int, dict] = field(default_factory=dict)
    centroid_labels: dict[int, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.instance_ids)

    def square_distances(self) -> np.ndarray:
        if self.n < 2:
            return np.zeros((self.n, self.n))
        return squareform(self.condensed_distances)

    def cluster_ids(self) -> list[int]:
        return sorted(int(c) for c in set(self.labels.tolist()) if c != -1)


def build_pattern_model(
    triples: Sequence[EmbeddingTriple],
    candidate_sgs: Mapping[str, SceneGraph],
    task: TaskCategory,
    corruption_key: str,
    vocab: TaskVocab,
    alpha: float = DEFAULT_ALPHA,
    min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE,
    min_samples: int = DEFAULT_MIN_SAMPLES,
    external_coords: Mapping[str, tuple[float, float]] | None = None,
) -> PatternModel:
    """Cluster, project, and label the attempting instances of one task.

    `triples` must already be restricted to instances attempting the task.
    When `external_coords` covers every instance, those coordinates are served
    verbatim instead of the built-in deterministic projection.
    """
    ids = tuple(t.instance_id for t in triples)
    if len(set(ids)) != len(ids):
        raise InputError("duplicate instance ids in pattern model input")

    dist = distance_matrix(triples, alpha=alpha)
    labels = cluster(dist, min_cluster_size=min_cluster_size, min_samples=min_samples)

    if external_coords is not None and all(i in external_coords for i in ids):
        coords = np.array([external_coords[i] for i in ids], dtype=np.float64)
    else:
        if external_coords is not None:
            logger.warning("external coordinates incomplete; falling back to built-in projection")
        coords = project_2d(dist)

    grids: dict[int, dict] = {}
    centroids: dict[int, str] = {}
    for c in sorted(set(labels.tolist())):
        if c == -1:
            continue
        member_idx = [i for i, lab in enumerate(labels) if lab == c]
        grids[int(c)] = density_grid(coords[member_idx])
        member_sgs = [candidate_sgs[ids[i]] for i in member_idx if ids[i] in candidate_sgs]
        centroids[int(c)] = centroid_label(member_sgs, task, vocab) if member_sgs else ""

    condensed = squareform(dist, checks=False) if len(ids) >= 2 else np.zeros(0)
    return PatternModel(
        task=task,
        corruption_key=corruption_key,
        instance_ids=ids,
        condensed_distances=condensed,
        alpha=alpha,
        labels=labels,
        coords=coords,
        density_grids=grids,
        centroid_labels=centroids,
    )


def export_selection(
    ids: Sequence[str],
    model: PatternModel,
    out_path: Path,
    config_hash: str = "",
) -> dict:
    """Write an augmentation manifest for the selected instances.

    Selected ids must all belong to the model; duplicates are dropped with a
    warning. Returns the parsed header record.
    """
    if not ids:
        raise InputError("selection is empty; nothing to export")
    known = set(model.instance_ids)
    unknown = sorted(set(ids) - known)
    if unknown:
        raise InputError(f"unknown instance ids in selection: {unknown}")

    deduped = list(dict.fromkeys(ids))
    if len(deduped) != len(ids):
        warnings.warn(f"selection contained {len(ids) - len(deduped)} duplicate ids; deduplicated")

    label_of = {iid: int(lab) for iid, lab in zip(model.instance_ids, model.labels)}
    header = {
        "magic": MANIFEST_MAGIC,
        "version": MANIFEST_VERSION,
        "task": model.task.value,
        "corruption_key": model.corruption_key,
        "alpha": model.alpha,
        "config_hash": config_hash,
        "count": len(deduped),
        "exported_at": dt.datetime.now(dt.timezone.utc).isoformat(),
    }
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for iid in deduped:
            rec = {
                "image_id": iid,
                "corruption_key": model.corruption_key,
                "task": model.task.value,
                "cluster_label": label_of[iid],
            }
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    return header


def read_selection_manifest(path: Path) -> tuple[dict, list[dict]]:
    """Read back an augmentation manifest (header, records)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise InputError(f"empty augmentation manifest: {path}")
    header = json.loads(lines[0])
    if header.get("magic") != MANIFEST_MAGIC:
        raise InputError(f"not an augmentation manifest: {path}")
    return header, [json.loads(line) for line in lines[1:]]
