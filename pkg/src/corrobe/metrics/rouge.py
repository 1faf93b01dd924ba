"""ROUGE-L: longest-common-subsequence F-measure.

F = (1 + beta^2) * P * R / (R + beta^2 * P), with P = LCS/|candidate| and
R = LCS/|reference|. Multiple references: the maximum F over references.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import InputError
from .tokenizer import tokenize

DEFAULT_BETA = 1.2


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence (gaps allowed)."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, references: Sequence[str], beta: float = DEFAULT_BETA) -> float:
    """ROUGE-L score of one candidate against its references."""
    if not references:
        raise InputError("rouge_l requires at least one reference")
    ct = tokenize(candidate)
    best = 0.0
    for ref in references:
        rt = tokenize(ref)
        lcs = lcs_length(ct, rt)
        if lcs == 0 or not ct or not rt:
            continue
        p = lcs / len(ct)
        r = lcs / len(rt)
        f = (1 + beta**2) * p * r / (r + beta**2 * p)
        best = max(best, f)
    return best
