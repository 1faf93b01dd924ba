"""Tuple matching between candidate and reference scene graphs.

Both graphs are canonicalized through the synonym lexicon, then compared per
task category with exact whole-tuple set operations:

    tp      tuples in both graphs
    fp_raw  tuples only in the candidate
    fn      tuples only in the reference
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ALL_TASKS,
    SceneGraph,
    SgTuple,
    SynonymLexicon,
    TaskCategory,
    TaskVocab,
)


def canonicalize_tuple(t: SgTuple, lex: SynonymLexicon) -> SgTuple:
    if t.slot3 is not None:
        return SgTuple(lex.canonical(t.head), lex.canonical(t.slot2), lex.canonical(t.slot3))
    if t.slot2 is not None:
        return SgTuple(lex.canonical(t.head), lex.canonical(t.slot2))
    return SgTuple(lex.canonical(t.head))


def canonicalize(sg: SceneGraph, lex: SynonymLexicon) -> SceneGraph:
    """Map every lexeme to its canonical form; the tuple set may shrink."""
    return SceneGraph(frozenset(canonicalize_tuple(t, lex) for t in sg.tuples), sg.source)


def categorize(t: SgTuple, vocab: TaskVocab) -> frozenset[TaskCategory]:
    """Task categories a tuple belongs to; never empty.

    Arity-2 tuples are always attributes and additionally color/count/size
    when slot2 matches the corresponding vocabulary.
    """
    if t.arity == 1:
        return frozenset({TaskCategory.OBJECT})
    if t.arity == 3:
        return frozenset({TaskCategory.RELATION})
    cats = {TaskCategory.ATTRIBUTE}
    if vocab.is_color(t.slot2):
        cats.add(TaskCategory.COLOR)
    if vocab.is_count(t.slot2):
        cats.add(TaskCategory.COUNT)
    if vocab.is_size(t.slot2):
        cats.add(TaskCategory.SIZE)
    return frozenset(cats)


def by_category(sg: SceneGraph, vocab: TaskVocab) -> dict[TaskCategory, frozenset[SgTuple]]:
    """Tuples of a graph grouped by category (one tuple may appear under several)."""
    buckets: dict[TaskCategory, set[SgTuple]] = {t: set() for t in ALL_TASKS}
    for tup in sg.tuples:
        for cat in categorize(tup, vocab):
            buckets[cat].add(tup)
    return {cat: frozenset(s) for cat, s in buckets.items()}


@dataclass(frozen=True)
class TextMatchResult:
    """Per-category tp / fp_raw / fn partitions of a candidate-reference pair."""

    tp: dict[TaskCategory, frozenset[SgTuple]]
    fp_raw: dict[TaskCategory, frozenset[SgTuple]]
    fn: dict[TaskCategory, frozenset[SgTuple]]

    def category(self, cat: TaskCategory) -> tuple[frozenset[SgTuple], frozenset[SgTuple], frozenset[SgTuple]]:
        return self.tp[cat], self.fp_raw[cat], self.fn[cat]


def match(
    candidate: SceneGraph,
    reference: SceneGraph,
    lex: SynonymLexicon,
    vocab: TaskVocab,
) -> TextMatchResult:
    """Binary matching of canonicalized candidate vs reference tuples.

    Per category: tp + fp_raw covers all candidate tuples of that category
    and tp + fn covers all reference tuples (conservation).
    """
    cand = by_category(canonicalize(candidate, lex), vocab)
    ref = by_category(canonicalize(reference, lex), vocab)
    tp = {cat: cand[cat] & ref[cat] for cat in ALL_TASKS}
    fp_raw = {cat: cand[cat] - ref[cat] for cat in ALL_TASKS}
    fn = {cat: ref[cat] - cand[cat] for cat in ALL_TASKS}
    return TextMatchResult(tp=tp, fp_raw=fp_raw, fn=fn)
