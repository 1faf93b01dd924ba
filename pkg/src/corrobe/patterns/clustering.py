"""Density-based clustering of instances over precomputed distances.

Backed by scikit-learn's HDBSCAN (mutual reachability, minimum spanning tree,
condensed tree, excess-of-mass cluster extraction) on the precomputed
error-aware distance matrix. Label -1 marks outliers.
"""

from __future__ import annotations

import numpy as np
from sklearn.cluster import HDBSCAN

from ..errors import InputError

DEFAULT_MIN_CLUSTER_SIZE = 15
DEFAULT_MIN_SAMPLES = 5


def cluster(
    dist_matrix: np.ndarray,
    min_cluster_size: int = DEFAULT_MIN_CLUSTER_SIZE,
    min_samples: int = DEFAULT_MIN_SAMPLES,
) -> np.ndarray:
    """Cluster labels for each row of the distance matrix; -1 = outlier."""
    d = np.asarray(dist_matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {d.shape}")
    if not np.allclose(d, d.T, atol=1e-9):
        raise InputError("distance matrix must be symmetric")
    if min_cluster_size < 2:
        raise InputError("min_cluster_size must be at least 2")
    n = d.shape[0]
    if n < min_cluster_size:
        return np.full(n, -1, dtype=int)
    model = HDBSCAN(
        min_cluster_size=min_cluster_size,
        min_samples=min_samples,
        metric="precomputed",
        cluster_selection_method="eom",
        allow_single_cluster=True,
    )
    return model.fit_predict(d).astype(int)
