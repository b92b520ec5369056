"""Domain types and tokenization primitives shared by every module.

The 26-tag error taxonomy lives here. Tag order is fixed once and for all:
it is the order masks are encoded in, so changing it would silently relabel
every corpus ever produced with this toolkit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .arabic import PUNCTUATION
from .errors import ShapeError, UnknownTagError

# Canonical taxonomy: (code, category), in canonical slot order 0..25.
_TAXONOMY: tuple[tuple[str, str], ...] = (
    ("OA", "Orthography"),  # alif / ya / alif-maqsura confusion
    ("OC", "Orthography"),  # character order
    ("OD", "Orthography"),  # additional character
    ("OG", "Orthography"),  # lengthened short vowel
    ("OH", "Orthography"),  # hamza error
    ("OM", "Orthography"),  # missing character(s)
    ("ON", "Orthography"),  # nun / tanwin confusion
    ("OR", "Orthography"),  # character replacement
    ("OS", "Orthography"),  # shortened long vowel
    ("OT", "Orthography"),  # ha / ta / ta-marbuta confusion
    ("OW", "Orthography"),  # alif fariqa confusion
    ("MI", "Morphology"),   # word inflection
    ("MT", "Morphology"),   # verb tense
    ("XC", "Syntax"),       # case
    ("XF", "Syntax"),       # definiteness
    ("XG", "Syntax"),       # gender
    ("XM", "Syntax"),       # missing word
    ("XN", "Syntax"),       # number
    ("XT", "Syntax"),       # unnecessary word
    ("SF", "Semantics"),    # conjunction error
    ("SW", "Semantics"),    # word selection error
    ("PC", "Punctuation"),  # punctuation confusion
    ("PM", "Punctuation"),  # missing punctuation
    ("PT", "Punctuation"),  # unnecessary punctuation
    ("MG", "Merge"),        # word erroneously split
    ("SP", "Split"),        # words erroneously merged
)

TAG_CODES: tuple[str, ...] = tuple(code for code, _ in _TAXONOMY)
TAG_CATEGORIES: tuple[str, ...] = tuple(cat for _, cat in _TAXONOMY)
NUM_TAGS = len(TAG_CODES)

_INDEX = {code: i for i, (code, _) in enumerate(_TAXONOMY)}
_CATEGORY = {code: cat for code, cat in _TAXONOMY}


def tag_index(code: str) -> int:
    """Canonical slot (0..25) of a tag code."""
    try:
        return _INDEX[code]
    except KeyError:
        raise UnknownTagError(f"unknown error tag code: {code!r}") from None


def tag_category(code: str) -> str:
    try:
        return _CATEGORY[code]
    except KeyError:
        raise UnknownTagError(f"unknown error tag code: {code!r}") from None


@dataclass(frozen=True)
class ErrorTag:
    """One taxonomy tag: a two-letter code plus its category."""

    code: str
    category: str = ""

    def __post_init__(self) -> None:
        expected = tag_category(self.code)
        if self.category == "":
            object.__setattr__(self, "category", expected)
        elif self.category != expected:
            raise UnknownTagError(
                f"tag {self.code} belongs to {expected}, not {self.category}"
            )

    @property
    def index(self) -> int:
        return tag_index(self.code)


ALL_TAGS: tuple[ErrorTag, ...] = tuple(ErrorTag(code) for code in TAG_CODES)


@dataclass(frozen=True)
class TagSet:
    """Presence vector over the 26 tags, stored as a bitmask on canonical slots."""

    mask: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.mask < (1 << NUM_TAGS):
            raise UnknownTagError(f"tag mask out of range: {self.mask:#x}")

    @classmethod
    def from_codes(cls, codes: Iterable[str]) -> "TagSet":
        mask = 0
        for code in codes:
            mask |= 1 << tag_index(code)
        return cls(mask)

    @classmethod
    def from_bits(cls, bits: Sequence[bool | int]) -> "TagSet":
        if len(bits) != NUM_TAGS:
            raise ShapeError(f"expected {NUM_TAGS} bits, got {len(bits)}")
        mask = 0
        for i, bit in enumerate(bits):
            if bit:
                mask |= 1 << i
        return cls(mask)

    @property
    def bits(self) -> tuple[bool, ...]:
        return tuple(bool(self.mask >> i & 1) for i in range(NUM_TAGS))

    def codes(self) -> tuple[str, ...]:
        return tuple(c for i, c in enumerate(TAG_CODES) if self.mask >> i & 1)

    def __contains__(self, tag: str | ErrorTag) -> bool:
        code = tag.code if isinstance(tag, ErrorTag) else tag
        return bool(self.mask >> tag_index(code) & 1)

    def __iter__(self) -> Iterator[str]:
        return iter(self.codes())

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "TagSet") -> "TagSet":
        return TagSet(self.mask | other.mask)

    def __and__(self, other: "TagSet") -> "TagSet":
        return TagSet(self.mask & other.mask)

    def __sub__(self, other: "TagSet") -> "TagSet":
        return TagSet(self.mask & ~other.mask)


EMPTY_TAGSET = TagSet()

_PUNCT_RE = re.escape("".join(PUNCTUATION))
_TOKEN_RE = re.compile(rf"[{_PUNCT_RE}]|[^\s{_PUNCT_RE}]+")


def tokenize(text: str) -> list[str]:
    """Split text into word and punctuation tokens.

    Punctuation marks become standalone tokens; words are maximal runs of
    non-space, non-punctuation characters. Empty input gives an empty list.
    """
    return _TOKEN_RE.findall(text)


def join_tokens(tokens: Sequence[str]) -> str:
    return " ".join(tokens)


def is_punct_token(token: str) -> bool:
    return len(token) == 1 and token in PUNCTUATION


@dataclass(frozen=True)
class Sentence:
    """A sentence as raw text plus its word/punctuation tokens."""

    text: str
    tokens: tuple[str, ...]

    @classmethod
    def from_text(cls, text: str) -> "Sentence":
        return cls(text=text, tokens=tuple(tokenize(text)))

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "Sentence":
        return cls(text=join_tokens(tokens), tokens=tuple(tokens))

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ParallelExample:
    """A correct sentence, its corrupted counterpart and the tags linking them."""

    correct: Sentence
    corrupted: Sentence
    tags: TagSet
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.corrupted.tokens != self.correct.tokens and not self.tags:
            raise ShapeError("corrupted differs from correct but the tag set is empty")


@dataclass
class LabelMatrix:
    """Per-sentence rows of 26 values: {0,1} for gold tags, [0,1] for predictions."""

    rows: np.ndarray = field(default_factory=lambda: np.zeros((0, NUM_TAGS)))

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != NUM_TAGS:
            raise ShapeError(f"label matrix must be (n, {NUM_TAGS}), got {rows.shape}")
        if rows.size and (rows.min() < 0.0 or rows.max() > 1.0):
            raise ShapeError("label matrix values must lie in [0, 1]")
        self.rows = rows

    @classmethod
    def from_tagsets(cls, tagsets: Iterable[TagSet]) -> "LabelMatrix":
        data = [ts.bits for ts in tagsets]
        if not data:
            return cls(np.zeros((0, NUM_TAGS)))
        return cls(np.array(data, dtype=float))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def is_binary(self) -> bool:
        return bool(np.all((self.rows == 0.0) | (self.rows == 1.0)))

    def binarize(self, threshold: float) -> np.ndarray:
        """Boolean matrix: cell is positive iff its value >= threshold."""
        return self.rows >= threshold

    def tagsets(self) -> list[TagSet]:
        if not self.is_binary():
            raise ShapeError("cannot read tag sets out of a probability matrix")
        return [TagSet.from_bits(row.astype(bool).tolist()) for row in self.rows]
