"""Deterministic 2D layout of the error-aware distance matrix.

Classical multidimensional scaling: double-center the squared distances, take
the top-2 eigenvectors, and fix reflections by making the largest-magnitude
entry of each axis positive. Externally computed layouts (e.g. from a UMAP
run) can be ingested upstream and served verbatim instead; this projector is
the deterministic built-in.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError


def project_2d(dist_matrix: np.ndarray) -> np.ndarray:
    """(n, 2) coordinates approximating the given pairwise distances."""
    d = np.asarray(dist_matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if n == 0:
        return np.zeros((0, 2))
    if n == 1:
        return np.zeros((1, 2))
    if n == 2:
        # Degenerate configuration: place the pair on the x axis.
        return np.array([[0.0, 0.0], [d[0, 1], 0.0]])

    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ (d**2) @ j
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    coords = np.zeros((n, 2))
    for axis in range(2):
        lam = evals[order[axis]]
        if lam > 0:
            coords[:, axis] = evecs[:, order[axis]] * np.sqrt(lam)
    # Sign convention: the entry with the largest magnitude on each axis is positive.
    for axis in range(2):
        col = coords[:, axis]
        if col.any():
            pivot = np.argmax(np.abs(col))
            if col[pivot] < 0:
                coords[:, axis] = -col
    return coords
