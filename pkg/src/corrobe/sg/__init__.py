from .matching import TextMatchResult, by_category, canonicalize, categorize, match
from .model import (
    ALL_TASKS,
    SceneGraph,
    SgTuple,
    Source,
    SynonymLexicon,
    TaskCategory,
    TaskVocab,
)
from .template_parser import parse_template_caption, singularize

__all__ = [
    "ALL_TASKS",
    "SceneGraph",
    "SgTuple",
    "Source",
    "SynonymLexicon",
    "TaskCategory",
    "TaskVocab",
    "TextMatchResult",
    "by_category",
    "canonicalize",
    "categorize",
    "match",
    "parse_template_caption",
    "singularize",
]
