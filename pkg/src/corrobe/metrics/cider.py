"""CIDEr: consensus scoring via TF-IDF weighted n-gram cosine similarity.

Per instance the score is the mean over n-gram orders 1..4 of the average
cosine similarity between the candidate's TF-IDF vector and each reference's,
scaled by 10. Document frequency is counted over reference sets (an n-gram is
"in a document" if any reference of that instance contains it) and

    idf(g) = ln(N / df(g))        for df(g) >= 1
    weight = 0                     for n-grams never seen in any reference

The zero weight for reference-unseen n-grams keeps per-instance scores exactly
invariant under corpus duplication (N and df scale together); such n-grams can
never contribute to a dot product anyway.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from ..errors import InputError
from .tokenizer import tokenize

MAX_NGRAM = 4
CIDER_SCALE = 10.0


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _cosine(a: dict, b: dict) -> float:
    if not a or not b:
        return 0.0
    dot = sum(w * b[g] for g, w in a.items() if g in b)
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def cider(
    candidates: Sequence[str], reference_sets: Sequence[Sequence[str]]
) -> tuple[float, list[float]]:
    """Corpus CIDEr and per-instance scores.

    Needs at least two instances: with a single document every idf is
    ln(1/1) = 0 and all vectors degenerate.
    """
    if len(candidates) != len(reference_sets):
        raise InputError("candidates and reference_sets must align")
    n_docs = len(candidates)
    if n_docs < 2:
        raise InputError("cider needs >= 2 instances for a meaningful idf")
    for refs in reference_sets:
        if not refs:
            raise InputError("every candidate needs at least one reference")

    cand_tokens = [tokenize(c) for c in candidates]
    ref_tokens = [[tokenize(r) for r in refs] for refs in reference_sets]

    # Document frequency per order, counted over reference sets.
    df: list[Counter] = [Counter() for _ in range(MAX_NGRAM)]
    for refs in ref_tokens:
        for k in range(1, MAX_NGRAM + 1):
            seen = set()
            for ref in refs:
                seen.update(_ngram_counts(ref, k).keys())
            for g in seen:
                df[k - 1][g] += 1

    def tfidf(tokens: Sequence[str], k: int) -> dict:
        vec = {}
        for g, c in _ngram_counts(tokens, k).items():
            d = df[k - 1][g]
            if d > 0:
                vec[g] = c * math.log(n_docs / d)
        return vec

    per_instance: list[float] = []
    for ct, refs in zip(cand_tokens, ref_tokens):
        order_scores = []
        for k in range(1, MAX_NGRAM + 1):
            cvec = tfidf(ct, k)
            sims = [_cosine(cvec, tfidf(rt, k)) for rt in refs]
            order_scores.append(sum(sims) / len(sims))
        per_instance.append(CIDER_SCALE * sum(order_scores) / MAX_NGRAM)

    return sum(per_instance) / n_docs, per_instance
