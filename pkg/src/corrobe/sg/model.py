"""Scene-graph data model: tuples, graphs, task categories, and vocabularies.

A scene graph is a set of tuples over a caption's content:
  (object)                     arity 1
  (object, attribute)          arity 2
  (object, relation, object)   arity 3

Task categories classify tuples into the six capability dimensions used
throughout the analysis: object, attribute, relation, color, count, size.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from ..errors import InputError

_WORD_RE = re.compile(r"^\S+( \S+)*$")

NUMBER_WORDS = {
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen", "twenty",
}


def _check_lexeme(lexeme: str, slot: str) -> str:
    if not isinstance(lexeme, str) or not lexeme.strip():
        raise InputError(f"{slot} lexeme must be a non-empty string, got {lexeme!r}")
    norm = lexeme.strip().lower()
    if not _WORD_RE.match(norm):
        raise InputError(f"{slot} lexeme has malformed whitespace: {lexeme!r}")
    return norm


@dataclass(frozen=True)
class SgTuple:
    """One scene-graph tuple. slot2/slot3 are None for lower arities.

    arity 1: (head,)             an object mention
    arity 2: (head, slot2)       slot2 is an attribute of head
    arity 3: (head, slot2, slot3) slot2 relates head to object slot3
    """

    head: str
    slot2: str | None = None
    slot3: str | None = None

    def __lt__(self, other: "SgTuple") -> bool:
        if not isinstance(other, SgTuple):
            return NotImplemented
        return (self.arity, self.lexemes()) < (other.arity, other.lexemes())

    def __post_init__(self):
        object.__setattr__(self, "head", _check_lexeme(self.head, "head"))
        if self.slot2 is not None:
            object.__setattr__(self, "slot2", _check_lexeme(self.slot2, "slot2"))
        if self.slot3 is not None:
            object.__setattr__(self, "slot3", _check_lexeme(self.slot3, "slot3"))
            if self.slot2 is None:
                raise InputError("arity-3 tuple requires slot2 (relation lexeme)")

    @property
    def arity(self) -> int:
        if self.slot3 is not None:
            return 3
        if self.slot2 is not None:
            return 2
        return 1

    def lexemes(self) -> tuple[str, ...]:
        if self.slot3 is not None:
            return (self.head, self.slot2, self.slot3)
        if self.slot2 is not None:
            return (self.head, self.slot2)
        return (self.head,)

    @classmethod
    def from_list(cls, parts: Iterable[str]) -> "SgTuple":
        parts = list(parts)
        if not 1 <= len(parts) <= 3:
            raise InputError(f"tuple must have 1-3 elements, got {len(parts)}")
        return cls(*parts)

    def to_list(self) -> list[str]:
        return list(self.lexemes())


class Source(str, Enum):
    CANDIDATE = "candidate"
    REFERENCE = "reference"


@dataclass(frozen=True)
class SceneGraph:
    """Deduplicated set of tuples extracted from one caption or ground truth."""

    tuples: frozenset[SgTuple]
    source: Source = Source.CANDIDATE

    @classmethod
    def of(cls, tuples: Iterable[SgTuple], source: Source = Source.CANDIDATE) -> "SceneGraph":
        return cls(frozenset(tuples), source)

    @classmethod
    def empty(cls, source: Source = Source.CANDIDATE) -> "SceneGraph":
        return cls(frozenset(), source)

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[SgTuple]:
        return iter(self.tuples)

    def union(self, other: "SceneGraph") -> "SceneGraph":
        return SceneGraph(self.tuples | other.tuples, self.source)


class TaskCategory(str, Enum):
    OBJECT = "object"
    ATTRIBUTE = "attribute"
    RELATION = "relation"
    COLOR = "color"
    COUNT = "count"
    SIZE = "size"


ALL_TASKS: tuple[TaskCategory, ...] = tuple(TaskCategory)


def _read_lexeme_file(path: Path) -> list[str]:
    out = []
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(line.lower())
    return out


def _data_path(name: str) -> Path:
    return Path(resources.files("corrobe.sg").joinpath("data", name))  # type: ignore[arg-type]


class SynonymLexicon:
    """Disjoint synonym groups; canonical form = lexicographically smallest member."""

    def __init__(self, groups: Iterable[Iterable[str]] = ()):
        self._canonical: dict[str, str] = {}
        self.groups: list[frozenset[str]] = []
        for group in groups:
            members = frozenset(m.strip().lower() for m in group if m.strip())
            if len(members) < 2:
                continue
            overlap = members & self._canonical.keys()
            if overlap:
                raise InputError(f"synonym groups not disjoint: {sorted(overlap)}")
            rep = min(members)
            for m in members:
                self._canonical[m] = rep
            self.groups.append(members)

    def canonical(self, lexeme: str) -> str:
        return self._canonical.get(lexeme, lexeme)

    @classmethod
    def from_file(cls, path: Path) -> "SynonymLexicon":
        groups = []
        for raw in Path(path).read_text().splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            groups.append([p for p in (s.strip() for s in line.split(",")) if p])
        return cls(groups)

    @classmethod
    def default(cls) -> "SynonymLexicon":
        return cls.from_file(_data_path("synonyms.txt"))

    @classmethod
    def empty(cls) -> "SynonymLexicon":
        return cls(())


_COUNT_DIGITS_RE = re.compile(r"^\d+$")


@dataclass(frozen=True)
class TaskVocab:
    """Attribute sub-vocabularies driving color/count/size categorization."""

    colors: frozenset[str]
    sizes: frozenset[str]
    number_words: frozenset[str] = field(default_factory=lambda: frozenset(NUMBER_WORDS))

    def is_color(self, lexeme: str) -> bool:
        return lexeme in self.colors

    def is_size(self, lexeme: str) -> bool:
        return lexeme in self.sizes

    def is_count(self, lexeme: str) -> bool:
        return lexeme in self.number_words or bool(_COUNT_DIGITS_RE.match(lexeme))

    @classmethod
    def from_files(cls, colors_path: Path, sizes_path: Path) -> "TaskVocab":
        return cls(
            colors=frozenset(_read_lexeme_file(Path(colors_path))),
            sizes=frozenset(_read_lexeme_file(Path(sizes_path))),
        )

    @classmethod
    def default(cls) -> "TaskVocab":
        return cls.from_files(_data_path("colors.txt"), _data_path("sizes.txt"))
