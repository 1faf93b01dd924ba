"""METEOR-lite: unigram alignment with exact and stemmed stages.

This variant keeps METEOR's structure (recall-weighted harmonic mean plus a
chunk fragmentation penalty) but replaces the WordNet synonym stage with a
small rule-based suffix stemmer, so it has no lexical-database dependency.
Reports that include it carry ``variant: lite``.

    P = m / |candidate|, R = m / |reference|
    Fmean = P * R / (alpha * P + (1 - alpha) * R)
    penalty = gamma * (chunks / m) ** theta
    score = Fmean * (1 - penalty)

Multiple references: the maximum score over references.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import InputError
from .tokenizer import tokenize

METEOR_VARIANT = "lite"
DEFAULT_ALPHA = 0.9
DEFAULT_GAMMA = 0.5
DEFAULT_THETA = 3.0

_DOUBLE_CONSONANTS = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")


def stem(word: str) -> str:
    """Tiny deterministic suffix stemmer: plural s/es, -ed, -ing."""
    if len(word) <= 3:
        return word
    if word.endswith("ies"):
        return word[:-3] + "y"
    if word.endswith(("ches", "shes", "sses", "xes", "zes")):
        return word[:-2]
    if word.endswith("ing") and len(word) > 5:
        base = word[:-3]
        return base[:-1] if base.endswith(_DOUBLE_CONSONANTS) else base
    if word.endswith("ed") and len(word) > 4:
        base = word[:-2]
        return base[:-1] if base.endswith(_DOUBLE_CONSONANTS) else base
    if word.endswith("s") and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


def _align(cand: list[str], ref: list[str]) -> list[tuple[int, int]]:
    """Two-stage greedy left-to-right alignment: exact matches, then stems.

    Returns (candidate index, reference index) pairs sorted by candidate index.
    """
    matched_ref: set[int] = set()
    pairs: dict[int, int] = {}

    for stage in ("exact", "stem"):
        key = (lambda w: w) if stage == "exact" else stem
        ref_keys = [key(w) for w in ref]
        for i, w in enumerate(cand):
            if i in pairs:
                continue
            k = key(w)
            for j, rk in enumerate(ref_keys):
                if j in matched_ref:
                    continue
                if rk == k:
                    pairs[i] = j
                    matched_ref.add(j)
                    break
    return sorted(pairs.items())


def _chunk_count(pairs: list[tuple[int, int]]) -> int:
    """Number of runs contiguous in both candidate and reference order."""
    if not pairs:
        return 0
    chunks = 1
    for (ci, ri), (cj, rj) in zip(pairs, pairs[1:]):
        if cj != ci + 1 or rj != ri + 1:
            chunks += 1
    return chunks


def meteor_lite(
    candidate: str,
    references: Sequence[str],
    alpha: float = DEFAULT_ALPHA,
    gamma: float = DEFAULT_GAMMA,
    theta: float = DEFAULT_THETA,
) -> float:
    """METEOR-lite score of one candidate against its references."""
    if not references:
        raise InputError("meteor_lite requires at least one reference")
    cand = tokenize(candidate)
    best = 0.0
    for ref_text in references:
        ref = tokenize(ref_text)
        if not cand or not ref:
            continue
        pairs = _align(cand, ref)
        m = len(pairs)
        if m == 0:
            continue
        p = m / len(cand)
        r = m / len(ref)
        fmean = p * r / (alpha * p + (1 - alpha) * r)
        penalty = gamma * (_chunk_count(pairs) / m) ** theta
        best = max(best, fmean * (1 - penalty))
    return best
