"""Conditioning-mask and training-line serialization.

A training source line is:

    grammar_error [<26 chars over {a,b}>] <correct sentence text>

Slot i of the mask is 'b' iff tag i (canonical order, see core.TAG_CODES) is
present. The bracket characters are ASCII, the separators are single ASCII
spaces, and payloads must be newline-free. This layout is bit-exact and stable;
docs/FORMATS.md in the repository root is the normative description.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .core import NUM_TAGS, Sentence, TagSet
from .errors import MalformedInputError, MalformedLineError, MalformedMaskError

TASK_PREFIX = "grammar_error"
ABSENT = "a"
PRESENT = "b"


def encode_mask(tags: TagSet) -> str:
    return "".join(PRESENT if tags.mask >> i & 1 else ABSENT for i in range(NUM_TAGS))


def decode_mask(mask: str) -> TagSet:
    if len(mask) != NUM_TAGS:
        raise MalformedMaskError(f"mask must have {NUM_TAGS} characters, got {len(mask)}")
    bits = 0
    for i, ch in enumerate(mask):
        if ch == PRESENT:
            bits |= 1 << i
        elif ch != ABSENT:
            raise MalformedMaskError(f"mask may only contain 'a'/'b', got {ch!r} at slot {i}")
    return TagSet(bits)


@dataclass(frozen=True)
class TrainingLine:
    tags: TagSet
    correct_text: str
    target_text: str | None = None

    @property
    def source(self) -> str:
        return format_training_line(self.tags, self.correct_text)[0]


def _check_payload(text: str) -> None:
    if "\n" in text or "\r" in text:
        raise MalformedInputError("payload must not contain newline characters")


def format_training_line(
    tags: TagSet, correct: Sentence | str, corrupted: Sentence | str | None = None
) -> tuple[str, str | None]:
    """Render the source line and, when a corrupted side is given, the target line."""
    correct_text = correct.text if isinstance(correct, Sentence) else correct
    _check_payload(correct_text)
    source = f"{TASK_PREFIX} [{encode_mask(tags)}] {correct_text}"
    if corrupted is None:
        return source, None
    target = corrupted.text if isinstance(corrupted, Sentence) else corrupted
    _check_payload(target)
    return source, target


def parse_training_line(line: str) -> tuple[TagSet, str]:
    """Invert the source-line format; failures carry the UTF-8 byte offset."""

    def offset(chars: int) -> int:
        return len(line[:chars].encode("utf-8"))

    head = TASK_PREFIX + " ["
    if not line.startswith(head):
        bad = next(
            (i for i, (x, y) in enumerate(zip(line, head)) if x != y), min(len(line), len(head))
        )
        raise MalformedLineError("missing task prefix or opening bracket", offset(bad))
    mask_start = len(head)
    mask_end = mask_start + NUM_TAGS
    mask = line[mask_start:mask_end]
    if len(mask) < NUM_TAGS:
        raise MalformedLineError("truncated mask", offset(len(line)))
    try:
        tags = decode_mask(mask)
    except MalformedMaskError as exc:
        raise MalformedLineError(str(exc), offset(mask_start)) from None
    if line[mask_end : mask_end + 2] != "] ":
        raise MalformedLineError("missing closing bracket", offset(mask_end))
    return tags, line[mask_end + 2 :]


# --- parallel-corpus files ---------------------------------------------------

FORMAT_TSV = "tsv"
FORMAT_SPLIT = "split"  # paired .src / .tgt files


def _check_tsv_payload(text: str) -> None:
    _check_payload(text)
    if "\t" in text:
        raise MalformedInputError("TSV payload must not contain tab characters")


def write_corpus_tsv(path: str | Path, lines: Iterable[TrainingLine]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        n = _write_tsv(fh, lines)
    return n


def _write_tsv(fh: io.TextIOBase, lines: Iterable[TrainingLine]) -> int:
    n = 0
    for tl in lines:
        _check_tsv_payload(tl.correct_text)
        target = tl.target_text if tl.target_text is not None else ""
        _check_tsv_payload(target)
        fh.write(f"{tl.source}\t{target}\n")
        n += 1
    return n


def write_corpus_split(prefix: str | Path, lines: Iterable[TrainingLine]) -> int:
    prefix = Path(prefix)
    n = 0
    with open(prefix.with_suffix(".src"), "w", encoding="utf-8", newline="\n") as src, open(
        prefix.with_suffix(".tgt"), "w", encoding="utf-8", newline="\n"
    ) as tgt:
        for tl in lines:
            _check_payload(tl.correct_text)
            target = tl.target_text if tl.target_text is not None else ""
            _check_payload(target)
            src.write(tl.source + "\n")
            tgt.write(target + "\n")
            n += 1
    return n


def read_corpus_tsv(path: str | Path) -> Iterator[TrainingLine]:
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.rstrip("\n")
            if not raw:
                continue
            source, _, target = raw.partition("\t")
            tags, correct = parse_training_line(source)
            yield TrainingLine(tags, correct, target or None)
