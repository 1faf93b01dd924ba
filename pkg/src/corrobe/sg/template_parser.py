"""Deterministic rule-based parser for template-grammar captions.

This is a test-grade stand-in for an external neural scene-graph parser: it
lets the whole pipeline run with zero model dependencies. It understands only
the documented template grammar

    sentence := NP (REL NP)*
    NP       := DET? MOD* NOUN
    DET      := "a" | "an" | "the"
    REL      := a phrase from sg/data/relations.txt (longest match wins)

where the last word of an NP chunk is its head noun (singularized) and every
preceding non-determiner word is an attribute of that noun. Every relation in
the chain attaches to the head of the FIRST noun phrase, e.g.

    "two gray cars on a winding street near small buildings"
      -> (car) (street) (building)
         (car, two) (car, gray) (street, winding) (building, small)
         (car, on, street) (car, near, building)

Fragments that do not fit the grammar (a dangling relation, modifiers with no
noun) are skipped, never guessed.
"""

from __future__ import annotations

import re
from functools import lru_cache
from pathlib import Path

from .model import SceneGraph, SgTuple, Source, _data_path, _read_lexeme_file

DETERMINERS = {"a", "an", "the"}

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Irregular plurals worth knowing about in caption vocabulary.
_IRREGULAR_PLURALS = {
    "people": "person",
    "men": "man",
    "women": "woman",
    "children": "child",
    "feet": "foot",
    "teeth": "tooth",
    "geese": "goose",
    "mice": "mouse",
    "leaves": "leaf",
    "knives": "knife",
    "shelves": "shelf",
    "buses": "bus",
    "dishes": "dish",
    "benches": "bench",
    "glasses": "glass",
}

_KEEP_TRAILING_S = {"grass", "glass", "bus", "dress", "gas", "lens", "pants", "scissors"}


def singularize(word: str) -> str:
    """Reduce a plural noun to its singular form with simple suffix rules."""
    if word in _IRREGULAR_PLURALS:
        return _IRREGULAR_PLURALS[word]
    if word in _KEEP_TRAILING_S or len(word) <= 3:
        return word
    if word.endswith("ies"):
        return word[:-3] + "y"
    if word.endswith(("ches", "shes", "sses", "xes", "zes")):
        return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


@lru_cache(maxsize=1)
def _relation_phrases(path: str | None = None) -> dict[tuple[str, ...], int]:
    """Relation phrases as token tuples, mapped to their token length."""
    src = Path(path) if path else _data_path("relations.txt")
    phrases = {}
    for phrase in _read_lexeme_file(src):
        toks = tuple(phrase.split())
        phrases[toks] = len(toks)
    return phrases


def _match_relation(tokens: list[str], i: int, phrases: dict[tuple[str, ...], int]) -> tuple[str, int] | None:
    """Longest relation phrase starting at token i, or None."""
    best = None
    for toks, n in phrases.items():
        if tuple(tokens[i : i + n]) == toks and (best is None or n > best[1]):
            best = (" ".join(toks), n)
    return best


@lru_cache(maxsize=1)
def _relation_word_set() -> frozenset[str]:
    return frozenset(w for toks in _relation_phrases() for w in toks)


def parse_template_caption(text: str) -> SceneGraph:
    """Parse a template-grammar caption into a scene graph.

    Empty or fully non-conforming text yields an empty graph.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    phrases = _relation_phrases()

    # Segment the token stream into NP chunks separated by relation phrases.
    chunks: list[list[str]] = [[]]
    relations: list[str] = []  # relation before chunk k+1
    i = 0
    while i < len(tokens):
        rel = _match_relation(tokens, i, phrases)
        if rel is not None and chunks[-1]:
            relations.append(rel[0])
            chunks.append([])
            i += rel[1]
            continue
        chunks[-1].append(tokens[i])
        i += 1

    tuples: set[SgTuple] = set()
    rel_words = _relation_word_set()
    subject: str | None = None
    for k, chunk in enumerate(chunks):
        words = [w for w in chunk if w not in DETERMINERS]
        if not words or words[-1] in rel_words:
            continue  # dangling relation or bare determiners: skip
        head = singularize(words[-1])
        tuples.add(SgTuple(head))
        for mod in words[:-1]:
            if mod in rel_words:
                continue  # relation word stranded before a noun: not a valid modifier
            tuples.add(SgTuple(head, mod))
        if subject is None:
            subject = head
        elif k >= 1 and k - 1 < len(relations):
            tuples.add(SgTuple(subject, relations[k - 1], head))

    return SceneGraph.of(tuples, Source.CANDIDATE)
