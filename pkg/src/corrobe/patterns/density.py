"""Per-cluster 2D density grids for contour rendering.

Product-kernel Gaussian KDE with per-axis Silverman bandwidths, evaluated on a
64x64 grid spanning the cluster's bounding box padded by 10% per side. Grid
cells hold probability mass scaled by the member count, so the grid total
approximates the cluster size (minus whatever tail mass falls outside the
padded bounds).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InputError
from ..task_metrics import silverman_bandwidth

GRID_SIZE = 64
PAD_FRACTION = 0.10


def density_grid(coords: np.ndarray) -> dict:
    """64x64 mass grid over one cluster's padded bounds.

    Returns {"grid": 64x64 nested lists (row-major, y outer), "extent":
    [xmin, xmax, ymin, ymax], "bandwidth": [hx, hy]}.
    """
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise InputError(f"density_grid needs a non-empty (n, 2) array, got {pts.shape}")
    n = pts.shape[0]

    hx = silverman_bandwidth(pts[:, 0])
    hy = silverman_bandwidth(pts[:, 1])

    mins = pts.min(axis=0)
    maxs = pts.max(axis=0)
    # Degenerate (near-point) extents widen to a few bandwidths so the kernel
    # mass stays on the grid; normal clusters keep their own bounding box.
    spans = np.maximum(maxs - mins, [6.0 * hx, 6.0 * hy])
    centers = (mins + maxs) / 2.0
    lo = np.minimum(mins, centers - spans / 2.0) - PAD_FRACTION * spans
    hi = np.maximum(maxs, centers + spans / 2.0) + PAD_FRACTION * spans

    xs = np.linspace(lo[0], hi[0], GRID_SIZE)
    ys = np.linspace(lo[1], hi[1], GRID_SIZE)
    dx = (hi[0] - lo[0]) / (GRID_SIZE - 1)
    dy = (hi[1] - lo[1]) / (GRID_SIZE - 1)

    zx = (xs[:, None] - pts[None, :, 0]) / hx
    zy = (ys[:, None] - pts[None, :, 1]) / hy
    kx = np.exp(-0.5 * zx**2) / (hx * math.sqrt(2 * math.pi))  # (GRID, n)
    ky = np.exp(-0.5 * zy**2) / (hy * math.sqrt(2 * math.pi))
    # density summed over points (not averaged): integral over the plane = n
    dens = ky @ kx.T  # (GRID y, GRID x)
    grid = dens * dx * dy  # per-cell mass

    return {
        "grid": grid.tolist(),
        "extent": [float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])],
        "bandwidth": [hx, hy],
        "count": int(n),
    }
