"""Corpus- and sentence-level BLEU.

Corpus score: modified n-gram precision pooled over all instances, geometric
mean over orders 1..n, with a brevity penalty against the closest reference
length. Sentence score: same formula on one instance; orders 2..n get add-one
smoothing so a single missing 4-gram does not zero out per-instance charts.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from ..errors import InputError
from .tokenizer import tokenize


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _closest_ref_len(cand_len: int, ref_lens: Sequence[int]) -> int:
    return min(ref_lens, key=lambda r: (abs(r - cand_len), r))


def _clipped_counts(cand_tokens, ref_token_lists, n):
    cand_counts = _ngrams(cand_tokens, n)
    max_ref: Counter = Counter()
    for ref in ref_token_lists:
        for gram, c in _ngrams(ref, n).items():
            if c > max_ref[gram]:
                max_ref[gram] = c
    clipped = sum(min(c, max_ref[g]) for g, c in cand_counts.items())
    total = sum(cand_counts.values())
    return clipped, total


def corpus_bleu(candidates: Sequence[str], reference_sets: Sequence[Sequence[str]], n: int = 4) -> float:
    """Corpus BLEU-n over tokenized candidates, no smoothing."""
    if not candidates:
        raise InputError("corpus_bleu requires at least one candidate")
    if len(candidates) != len(reference_sets):
        raise InputError("candidates and reference_sets must align")
    for refs in reference_sets:
        if not refs:
            raise InputError("every candidate needs at least one reference")

    clipped = [0] * n
    totals = [0] * n
    cand_len_sum = 0
    ref_len_sum = 0
    for cand, refs in zip(candidates, reference_sets):
        ct = tokenize(cand)
        rts = [tokenize(r) for r in refs]
        cand_len_sum += len(ct)
        ref_len_sum += _closest_ref_len(len(ct), [len(r) for r in rts])
        for k in range(1, n + 1):
            c, t = _clipped_counts(ct, rts, k)
            clipped[k - 1] += c
            totals[k - 1] += t

    log_sum = 0.0
    for k in range(n):
        if clipped[k] == 0 or totals[k] == 0:
            return 0.0
        log_sum += math.log(clipped[k] / totals[k])
    precision_gm = math.exp(log_sum / n)
    bp = 1.0 if cand_len_sum >= ref_len_sum else math.exp(1.0 - ref_len_sum / max(cand_len_sum, 1))
    return precision_gm * bp


def sentence_bleu(candidate: str, references: Sequence[str], n: int = 4) -> float:
    """Per-instance BLEU-n with add-one smoothing on orders 2..n."""
    if not references:
        raise InputError("sentence_bleu requires at least one reference")
    ct = tokenize(candidate)
    rts = [tokenize(r) for r in references]
    if not ct:
        return 0.0

    log_sum = 0.0
    for k in range(1, n + 1):
        c, t = _clipped_counts(ct, rts, k)
        if k == 1:
            if c == 0 or t == 0:
                return 0.0
            log_sum += math.log(c / t)
        else:
            log_sum += math.log((c + 1) / (t + 1))
    precision_gm = math.exp(log_sum / n)
    ref_len = _closest_ref_len(len(ct), [len(r) for r in rts])
    bp = 1.0 if len(ct) >= ref_len else math.exp(1.0 - ref_len / len(ct))
    return precision_gm * bp
