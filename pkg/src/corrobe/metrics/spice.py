"""Scene-graph F-score: tuple-level F1 between candidate and references.

The reference graphs are unioned into one tuple set, both sides are matched
with the standard binary matching operation, and F1 is computed over the
union of all task categories (i.e. plain tuple sets, deduplicated).
"""

from __future__ import annotations

from typing import Sequence

from ..sg import ALL_TASKS, SceneGraph, Source, SynonymLexicon, TaskVocab, match


def spice(
    candidate_sg: SceneGraph,
    reference_sgs: Sequence[SceneGraph],
    lex: SynonymLexicon,
    vocab: TaskVocab,
) -> float:
    """F1 over matched tuples; 0.0 when either side is empty."""
    merged = SceneGraph(
        frozenset(t for sg in reference_sgs for t in sg.tuples), Source.REFERENCE
    )
    result = match(candidate_sg, merged, lex, vocab)
    tp = set().union(*(result.tp[c] for c in ALL_TASKS))
    fp = set().union(*(result.fp_raw[c] for c in ALL_TASKS))
    fn = set().union(*(result.fn[c] for c in ALL_TASKS))
    if not tp:
        return 0.0
    p = len(tp) / (len(tp) + len(fp))
    r = len(tp) / (len(tp) + len(fn))
    return 2 * p * r / (p + r)
