"""Error-aware pairwise distances between instances.

Two constraints shape the geometry: semantically similar images/captions sit
close together (cosine distance on their embeddings), and instances whose
captions deviate from their ground truths in the same direction sit close
together (cosine distance on the deviation vectors). The blend weight alpha
balances the two:

    delta_i   = e_cap_i - mean_j(e_gt_ij)
    dist(i,k) = (1 - alpha) * (d_img + d_cap) / 2 + alpha * d_qual

with every d term = 1 - cosine. A zero embedding carries no semantic signal,
so its cosine against a non-zero vector is treated as maximal dissimilarity
(term = 1.0) and logged rather than left undefined; two zero vectors compare
as identical (term = 0.0) so that self-distance is always exactly 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.1


@dataclass(frozen=True)
class EmbeddingTriple:
    """The three embeddings of one instance used for distance computation."""

    instance_id: str
    e_img: np.ndarray
    e_cap: np.ndarray
    e_gts: tuple[np.ndarray, ...]  # one per ground truth, all same dimension

    def __post_init__(self):
        if len(self.e_gts) == 0:
            raise InputError(f"instance {self.instance_id}: needs at least one GT embedding")
        d_txt = self.e_cap.shape
        for g in self.e_gts:
            if g.shape != d_txt:
                raise InputError(
                    f"instance {self.instance_id}: GT embedding dim {g.shape} != caption dim {d_txt}"
                )
        for name, v in (("e_img", self.e_img), ("e_cap", self.e_cap), *(("e_gt", g) for g in self.e_gts)):
            if not np.all(np.isfinite(v)):
                raise InputError(f"instance {self.instance_id}: {name} has non-finite values")

    @property
    def quality_delta(self) -> np.ndarray:
        return quality_delta(self.e_cap, self.e_gts)


def quality_delta(e_cap: np.ndarray, e_gts: Sequence[np.ndarray]) -> np.ndarray:
    """Deviation of the caption embedding from the mean GT embedding."""
    if len(e_gts) == 0:
        raise InputError("quality_delta needs at least one GT embedding")
    for g in e_gts:
        if g.shape != e_cap.shape:
            raise InputError(f"dimension mismatch: caption {e_cap.shape} vs GT {g.shape}")
    return np.asarray(e_cap, dtype=np.float64) - np.mean(
        np.asarray(e_gts, dtype=np.float64), axis=0
    )


def _cosine_distance(a: np.ndarray, b: np.ndarray, what: str) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 and nb == 0.0:
        # Two identically missing signals: keep self-distance exactly 0.
        logger.warning("both %s vectors are zero; treating the pair as identical", what)
        return 0.0
    if na == 0.0 or nb == 0.0:
        logger.warning("zero %s vector in distance computation; using maximal dissimilarity", what)
        return 1.0
    # Rounding can push |cos| a hair past 1; clamp so distances stay in [0, 2].
    cos = min(1.0, max(-1.0, float(np.dot(a, b) / (na * nb))))
    return 1.0 - cos


def pair_distance(a: EmbeddingTriple, b: EmbeddingTriple, alpha: float = DEFAULT_ALPHA) -> float:
    """Error-aware distance between two instances; 0 for identical triples."""
    if not 0.0 <= alpha <= 1.0:
        raise InputError(f"alpha must lie in [0, 1], got {alpha}")
    d_img = _cosine_distance(a.e_img, b.e_img, "image")
    d_cap = _cosine_distance(a.e_cap, b.e_cap, "caption")
    d_qual = _cosine_distance(a.quality_delta, b.quality_delta, "quality-delta")
    return (1.0 - alpha) * (d_img + d_cap) / 2.0 + alpha * d_qual


def distance_matrix(triples: Sequence[EmbeddingTriple], alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Symmetric (n, n) distance matrix with a zero diagonal."""
    if not 0.0 <= alpha <= 1.0:
        raise InputError(f"alpha must lie in [0, 1], got {alpha}")
    n = len(triples)
    deltas = [t.quality_delta for t in triples]
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        a = triples[i]
        for k in range(i + 1, n):
            b = triples[k]
            d = (
                (1.0 - alpha)
                * (
                    _cosine_distance(a.e_img, b.e_img, "image")
                    + _cosine_distance(a.e_cap, b.e_cap, "caption")
                )
                / 2.0
                + alpha * _cosine_distance(deltas[i], deltas[k], "quality-delta")
            )
            out[i, k] = out[k, i] = d
    return out
