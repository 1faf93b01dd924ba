"""Image-level correction of raw false positives.

Ground truths are incomplete: a caption element can be correct even though no
reference mentions it. Each raw FP tuple is turned into a probe sentence, its
precomputed embedding is compared against the clean image embedding, and
tuples whose cosine similarity strictly exceeds the threshold are rescued into
the attention-correct set:

    ac     = rescued raw FPs (visually supported)
    fp_new = fp_raw minus ac

The probe encoder itself is external; this module only consumes its vectors.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError, InputError
from .sg import ALL_TASKS, SgTuple, TaskCategory
from .sg.matching import TextMatchResult

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.25
TESTED_THRESHOLD_RANGE = (0.1, 0.5)

MISSING_PROBE_POLICIES = ("strict", "keep-fp")


def probe_sentence(t: SgTuple) -> str:
    """Deterministic template sentence describing one tuple."""
    if t.arity == 1:
        return f"a photo of a {t.head}"
    if t.arity == 2:
        return f"a photo of a {t.slot2} {t.head}"
    return f"a photo of a {t.head} {t.slot2} a {t.slot3}"


def probe_sentences_for(match: TextMatchResult) -> list[str]:
    """Sorted probe sentences required to judge one match result."""
    tuples = set()
    for cat in ALL_TASKS:
        tuples |= match.fp_raw[cat]
    return sorted(probe_sentence(t) for t in tuples)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"embedding dimensions differ: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


@dataclass(frozen=True)
class JudgedMatchResult:
    """Text match partitions refined by image-level judgment."""

    tp: dict[TaskCategory, frozenset[SgTuple]]
    fp_raw: dict[TaskCategory, frozenset[SgTuple]]
    fn: dict[TaskCategory, frozenset[SgTuple]]
    ac: dict[TaskCategory, frozenset[SgTuple]]
    fp_new: dict[TaskCategory, frozenset[SgTuple]]
    threshold_used: float


def judge(
    match: TextMatchResult,
    image_vec: np.ndarray,
    probe_vecs: Mapping[str, np.ndarray],
    threshold: float = DEFAULT_THRESHOLD,
    missing_policy: str = "strict",
) -> JudgedMatchResult:
    """Split every fp_raw set into ac (rescued) and fp_new.

    A tuple is rescued iff cosine(image, probe) > threshold (strictly). When a
    probe vector is missing, policy "strict" raises and "keep-fp" leaves the
    tuple in fp_new and logs it.
    """
    if missing_policy not in MISSING_PROBE_POLICIES:
        raise ConfigError(f"unknown missing-probe policy {missing_policy!r}")
    lo, hi = TESTED_THRESHOLD_RANGE
    if not lo <= threshold <= hi:
        warnings.warn(
            f"judgment threshold {threshold} is outside the validated range [{lo}, {hi}]",
            stacklevel=2,
        )

    # Cosine per distinct tuple (a tuple can appear in several categories).
    verdict: dict[SgTuple, bool] = {}
    for cat in ALL_TASKS:
        for t in match.fp_raw[cat]:
            if t in verdict:
                continue
            sentence = probe_sentence(t)
            vec = probe_vecs.get(sentence)
            if vec is None:
                if missing_policy == "strict":
                    raise InputError(f"no probe embedding for {sentence!r}")
                logger.warning("no probe embedding for %r; keeping tuple as FP", sentence)
                verdict[t] = False
                continue
            verdict[t] = cosine(image_vec, vec) > threshold

    ac = {cat: frozenset(t for t in match.fp_raw[cat] if verdict.get(t, False)) for cat in ALL_TASKS}
    fp_new = {cat: match.fp_raw[cat] - ac[cat] for cat in ALL_TASKS}
    return JudgedMatchResult(
        tp=match.tp,
        fp_raw=match.fp_raw,
        fn=match.fn,
        ac=ac,
        fp_new=fp_new,
        threshold_used=threshold,
    )
