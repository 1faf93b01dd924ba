"""Semantic labels for cluster centroids.

The label of a cluster is the most frequent task-relevant element across the
candidate scene graphs of its members:

    object task                the most frequent object head
    attribute/color/count/size the most frequent "head attribute" bigram
    relation task              the most frequent relation lexeme

Ties break toward the lexicographically smallest label.
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

from ..errors import InputError
from ..sg import SceneGraph, TaskCategory, TaskVocab, categorize


def centroid_label(
    member_sgs: Sequence[SceneGraph],
    task: TaskCategory,
    vocab: TaskVocab,
) -> str:
    """Most frequent task-relevant element among the member scene graphs."""
    if not member_sgs:
        raise InputError("centroid_label requires a non-empty cluster")
    counts: Counter = Counter()
    for sg in member_sgs:
        for t in sg.tuples:
            if task not in categorize(t, vocab):
                continue
            if task is TaskCategory.OBJECT:
                counts[t.head] += 1
            elif task is TaskCategory.RELATION:
                counts[t.slot2] += 1
            else:
                counts[f"{t.head} {t.slot2}"] += 1
    if not counts:
        return ""
    best = max(counts.values())
    return min(label for label, c in counts.items() if c == best)
