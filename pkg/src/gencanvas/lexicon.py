"""Lexicon tables backing the deterministic mock language adapter.

The shipped data file maps each fragment type to an ordered value list and
adds a stopword list and a content-synonym table. Value tables are disjoint,
so classifying a token is a single lookup.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .errors import CorruptPayloadError

CANONICAL_TYPES = ("content", "style", "tone", "color", "composition")

_WORD_STRIP = re.compile(r"^[^\w-]+|[^\w-]+$")


def tokenize(text: str) -> list[str]:
    """Lowercased words with surrounding punctuation stripped (hyphens kept)."""
    words = []
    for raw in text.lower().split():
        word = _WORD_STRIP.sub("", raw)
        if word:
            words.append(word)
    return words


@dataclass
class Lexicon:
    values: dict[str, list[str]]
    stopwords: set[str]
    synonyms: dict[str, list[str]]
    value_to_type: dict[str, str] = field(init=False)
    max_phrase_words: int = field(init=False)

    def __post_init__(self):
        self.value_to_type = {}
        self.max_phrase_words = 1
        for ftype, vals in self.values.items():
            for v in vals:
                if v in self.value_to_type:
                    raise CorruptPayloadError(f"lexicon value {v!r} appears in two tables")
                self.value_to_type[v] = ftype
                self.max_phrase_words = max(self.max_phrase_words, len(v.split()))

    @property
    def types(self) -> list[str]:
        return list(self.values.keys())

    def type_order_key(self, ftype: str) -> tuple:
        """Canonical types first in table order, unknown types after, alphabetically."""
        try:
            return (0, self.types.index(ftype))
        except ValueError:
            return (1, ftype)

    def value_order_key(self, ftype: str, value: str) -> tuple:
        """Within a type: table order first, unknown values after, alphabetically."""
        table = self.values.get(ftype, [])
        try:
            return (0, table.index(value))
        except ValueError:
            return (1, value)

    def classify(self, phrase: str) -> str | None:
        return self.value_to_type.get(phrase)

    def is_stopword(self, word: str) -> bool:
        return word in self.stopwords

    def phrases(self, text: str) -> list[str]:
        """Greedy longest-match segmentation of each comma chunk into known
        phrases and leftover single words; stopwords dropped."""
        out: list[str] = []
        for chunk in text.split(","):
            words = tokenize(chunk)
            i = 0
            while i < len(words):
                match = None
                for n in range(min(self.max_phrase_words, len(words) - i), 1, -1):
                    candidate = " ".join(words[i : i + n])
                    if candidate in self.value_to_type:
                        match = candidate
                        break
                if match:
                    out.append(match)
                    i += len(match.split())
                elif self.is_stopword(words[i]):
                    i += 1
                else:
                    out.append(words[i])
                    i += 1
        return out

    def successors(self, ftype: str, value: str, k: int) -> list[str]:
        """The next k table entries cyclically after value (value excluded).

        A value missing from the table starts at a position derived from its
        hash so unknown values still vary deterministically.
        """
        table = self.values.get(ftype)
        if not table or k <= 0:
            return []
        if value in table:
            start = table.index(value) + 1
        else:
            start = stable_hash_text(value) % len(table)
        out: list[str] = []
        for i in range(len(table)):
            candidate = table[(start + i) % len(table)]
            if candidate != value and candidate not in out:
                out.append(candidate)
            if len(out) == k:
                break
        return out

    def content_variations(self, value: str, k: int) -> list[str]:
        """Synonym-table lookup for content values, table successors as fallback."""
        listed = [s for s in self.synonyms.get(value, []) if s != value]
        out = list(dict.fromkeys(listed))[:k]
        if len(out) < k:
            for s in self.successors("content", value, k + len(out)):
                if s not in out:
                    out.append(s)
                if len(out) == k:
                    break
        return out[:k]

    def mentioned_types(self, text: str) -> list[str]:
        """Fragment types named in the text itself (singular or plural)."""
        words = set(tokenize(text))
        found = []
        for ftype in self.types:
            if ftype in words or ftype + "s" in words:
                found.append(ftype)
        return found


FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a; the fixed hash behind every mock-adapter choice."""
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _MASK64
    return h


def stable_hash_text(*parts: str) -> int:
    return fnv1a64("\x1f".join(parts).encode("utf-8"))


def _parse(text: str) -> Lexicon:
    values: dict[str, list[str]] = {}
    stopwords: set[str] = set()
    synonyms: dict[str, list[str]] = {}
    section = None
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in ("stopwords", "synonyms"):
                values.setdefault(section, [])
            continue
        if section is None:
            raise CorruptPayloadError("lexicon entry before first section header")
        if section == "stopwords":
            stopwords.add(line.lower())
        elif section == "synonyms":
            head, _, tail = line.partition(":")
            synonyms[head.strip().lower()] = [s.strip().lower() for s in tail.split(",") if s.strip()]
        else:
            values[section].append(line.lower())
    return Lexicon(values=values, stopwords=stopwords, synonyms=synonyms)


def load_lexicon(path=None) -> Lexicon:
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return _parse(fh.read())
    return _default_lexicon()


@lru_cache(maxsize=1)
def _default_lexicon() -> Lexicon:
    text = resources.files("gencanvas.data").joinpath("lexicon.txt").read_text("utf-8")
    return _parse(text)
