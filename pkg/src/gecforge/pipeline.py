"""Corpus ingestion, normalization, filtering and parallel-corpus generation.

Sources come in three kinds: XML files whose <text> elements hold the prose,
"numbered" files with a leading sequence number per line, and plain line
files. Lines flow through normalization and filtering into the generation
step, which tags each sentence, corrupts it, and emits training lines in
deterministic shards. Everything is keyed off the job seed, the input digest
and the sentence ordinal, so reruns and different worker counts produce
byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping

from . import codec, rng
from .annotate import RuleTable
from .arabic import ARABIC_SHAPE, PUNCTUATION, SPACING_MARKS, is_arabic_letter
from .core import LabelMatrix, Sentence, TAG_CODES, TagSet, is_punct_token, tokenize
from .corrupt import CorruptionReport, corrupt
from .errors import AdapterError, InputContractError
from .metrics import class_weights

KIND_XML = "xml"
KIND_NUMBERED = "numbered"
KIND_PLAIN = "plain"

DROP_BAD_ENCODING = "bad_encoding"
DROP_EMPTY = "empty"
DROP_TOO_SHORT = "too_short"
DROP_TOO_LONG = "too_long"


@dataclass
class DropStats:
    lines_in: int = 0
    kept: int = 0
    dropped: dict[str, int] = field(default_factory=dict)
    records_skipped: int = 0  # unparseable XML inputs

    def drop(self, reason: str) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + 1

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())

    def to_dict(self) -> dict:
        return {
            "lines_in": self.lines_in,
            "kept": self.kept,
            "dropped": dict(sorted(self.dropped.items())),
            "records_skipped": self.records_skipped,
        }


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class CorpusSource:
    kind: str
    paths: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.kind not in (KIND_XML, KIND_NUMBERED, KIND_PLAIN):
            raise InputContractError(f"unknown corpus kind: {self.kind!r}")

    def digest(self) -> str:
        h = hashlib.sha256()
        for path in self.paths:
            with open(path, "rb") as fh:
                for chunk in iter(lambda: fh.read(1 << 20), b""):
                    h.update(chunk)
        return h.hexdigest()


_NUMBER_PREFIX = re.compile(r"^\s*\d+\s+")


def _decode_lines(path: str, stats: DropStats) -> Iterator[str]:
    with open(path, "rb") as fh:
        for raw in fh:
            stats.lines_in += 1
            try:
                yield raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError:
                stats.drop(DROP_BAD_ENCODING)


def ingest(source: CorpusSource, stats: DropStats | None = None) -> Iterator[str]:
    """Yield raw text lines from the source; rejects are counted, not fatal."""
    if stats is None:
        stats = DropStats()
    for path in source.paths:
        if not Path(path).exists():
            raise IOError(f"cannot read corpus file: {path}")
        if source.kind == KIND_XML:
            # Streaming parse: a malformed file is counted and skipped; text
            # already yielded before the parse error stands.
            try:
                for _, elem in ET.iterparse(path, events=("end",)):
                    if elem.tag == "text":
                        for line in "".join(elem.itertext()).split("\n"):
                            stats.lines_in += 1
                            yield line.strip()
                        elem.clear()
            except ET.ParseError:
                stats.records_skipped += 1
                continue
        elif source.kind == KIND_NUMBERED:
            for line in _decode_lines(path, stats):
                yield _NUMBER_PREFIX.sub("", line)
        else:
            yield from _decode_lines(path, stats)


# --- normalization -----------------------------------------------------------

_ALL_PUNCT = re.escape("".join(PUNCTUATION))
_DEDUP_RE = re.compile(rf"([{_ALL_PUNCT}])(\s*\1)+")
_SPACE_BEFORE_RE = re.compile(rf"[ \t]+([{re.escape(''.join(SPACING_MARKS))}])")
_SPACE_AFTER_RE = re.compile(
    rf"([{re.escape(''.join(SPACING_MARKS))}])([^\s{_ALL_PUNCT}])"
)
_TANWIN_FINAL_RE = re.compile(rf"اً(?=$|\s|[{_ALL_PUNCT}])")
_LINK_RE = re.compile(r"https?://\S+|www\.\S+")
_MENTION_RE = re.compile(r"[@#]\w+")


@lru_cache(maxsize=1)
def _default_repairs() -> tuple[tuple[str, str], ...]:
    path = Path(__file__).parent / "data" / "spelling_repairs.tsv"
    rules: list[tuple[str, str]] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        wrong, _, right = line.partition("\t")
        rules.append((wrong.strip(), right.strip()))
    return tuple(rules)


@dataclass(frozen=True)
class CleanConfig:
    min_words: int = 10
    max_words: int = 400
    drop_empty: bool = True
    dedup_punct: bool = True
    collapse_spaces: bool = True
    strip_links_mentions_hashtags: bool = False
    normalize_rules: tuple[tuple[str, str], ...] = field(default_factory=_default_repairs)

    def __post_init__(self) -> None:
        if self.min_words < 0:
            raise InputContractError("min_words must be >= 0")


def _canonicalize_shapes(text: str) -> str:
    chars = list(text)
    for i, ch in enumerate(chars):
        if ch not in ARABIC_SHAPE:
            continue
        prev = next((c for c in reversed(chars[:i]) if not c.isspace()), "")
        nxt = next((c for c in chars[i + 1 :] if not c.isspace()), "")
        if prev.isdigit() and nxt.isdigit():
            continue  # decimal / thousands separators keep their form
        if (prev and is_arabic_letter(prev)) or (nxt and is_arabic_letter(nxt)):
            chars[i] = ARABIC_SHAPE[ch]
    return "".join(chars)


def _fix_spacing(text: str) -> str:
    text = _SPACE_BEFORE_RE.sub(r"\1", text)

    def insert_space(m: re.Match) -> str:
        mark, follower = m.group(1), m.group(2)
        prev = m.string[m.start() - 1] if m.start() > 0 else ""
        if prev.isdigit() and follower.isdigit():
            return mark + follower
        return mark + " " + follower

    return _SPACE_AFTER_RE.sub(insert_space, text)


def _apply_repairs(text: str, rules: tuple[tuple[str, str], ...]) -> str:
    if not rules:
        return text
    tokens = text.split(" ")
    table = dict(rules)
    out = []
    for tok in tokens:
        # Match the word form with punctuation already spaced off.
        out.append(table.get(tok, tok))
    return " ".join(out)


def normalize(text: str, config: CleanConfig | None = None) -> str:
    """Normalize punctuation shape, spacing and common misspellings.

    Idempotent: normalizing an already-normal line changes nothing.
    """
    if config is None:
        config = CleanConfig()
    text = _canonicalize_shapes(text)
    if config.dedup_punct:
        text = _DEDUP_RE.sub(r"\1", text)
    text = _fix_spacing(text)
    text = _TANWIN_FINAL_RE.sub("ًا", text)
    if config.collapse_spaces:
        text = " ".join(text.split())
    text = _apply_repairs(text, config.normalize_rules)
    return text


def _word_count(line: str) -> int:
    return sum(1 for tok in tokenize(line) if not is_punct_token(tok))


def clean_filter(
    lines: Iterable[str],
    config: CleanConfig | None = None,
    stats: DropStats | None = None,
    count_input: bool = True,
) -> tuple[Iterator[str], DropStats]:
    """Normalize and filter a line stream; DropStats is complete once the
    returned iterator is exhausted."""
    if config is None:
        config = CleanConfig()
    if stats is None:
        stats = DropStats()

    def run() -> Iterator[str]:
        for line in lines:
            if count_input:
                stats.lines_in += 1
            if config.strip_links_mentions_hashtags:
                line = _MENTION_RE.sub(" ", _LINK_RE.sub(" ", line))
            line = normalize(line, config)
            if not line.strip():
                if config.drop_empty:
                    stats.drop(DROP_EMPTY)
                    continue
                line = ""
            words = _word_count(line)
            if words < config.min_words:
                stats.drop(DROP_TOO_SHORT)
                continue
            if config.max_words and words > config.max_words:
                stats.drop(DROP_TOO_LONG)
                continue
            stats.kept += 1
            yield line

    return run(), stats


def preprocess(
    source: CorpusSource, config: CleanConfig | None = None
) -> tuple[Iterator[str], DropStats]:
    """Ingest + clean_filter with one shared DropStats."""
    stats = DropStats()
    lines = ingest(source, stats)
    return clean_filter(lines, config, stats=stats, count_input=False)


# --- corpus statistics ---------------------------------------------------------


def corpus_stats(matrix: LabelMatrix) -> dict:
    """Per-tag sentence counts and the class-rebalance weight export."""
    n = matrix.n
    counts = matrix.rows.astype(bool).sum(axis=0)
    per_tag = {
        code: {
            "count": int(counts[i]),
            "percent": float(counts[i] / n) if n else 0.0,
        }
        for i, code in enumerate(TAG_CODES)
    }
    weights = class_weights({code: int(counts[i]) for i, code in enumerate(TAG_CODES)}, n)
    return {"n": n, "per_tag": per_tag, "class_weights": weights.to_dict()}


# --- tag providers and corruptors ----------------------------------------------


class FixedTagger:
    """Request the same tag set for every sentence."""

    def __init__(self, tags: TagSet):
        self.tags = tags

    def __call__(self, sentence: Sentence, ordinal: int) -> TagSet:
        return self.tags


class FrequencyTagger:
    """Sample each tag independently from empirical per-tag frequencies."""

    def __init__(self, frequencies: Mapping[str, float], seed: int):
        self.frequencies = dict(frequencies)
        self.seed = seed

    @classmethod
    def from_json(cls, path: str | Path, seed: int) -> "FrequencyTagger":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh), seed)

    @classmethod
    def default(cls, seed: int) -> "FrequencyTagger":
        path = Path(__file__).parent / "data" / "default_tag_frequencies.json"
        return cls.from_json(path, seed)

    def __call__(self, sentence: Sentence, ordinal: int) -> TagSet:
        mask = 0
        for slot, code in enumerate(TAG_CODES):
            p = self.frequencies.get(code, 0.0)
            if p > 0.0 and rng.uniform("tagset", self.seed, ordinal, slot) < p:
                mask |= 1 << slot
        return TagSet(mask)


class EngineCorruptor:
    """The built-in deterministic corruption engine."""

    def __init__(self, rules: RuleTable | None = None):
        self.rules = rules

    def __call__(
        self, sentence: Sentence, tags: TagSet, seed: int
    ) -> tuple[Sentence, CorruptionReport | None]:
        corrupted, report = corrupt(sentence, tags, seed, self.rules)
        return corrupted, report


class AdapterTagger:
    def __init__(self, client):
        self.client = client

    def __call__(self, sentence: Sentence, ordinal: int) -> TagSet:
        return self.client.request_tags(sentence.text)


class AdapterCorruptor:
    def __init__(self, client):
        self.client = client

    def __call__(
        self, sentence: Sentence, tags: TagSet, seed: int
    ) -> tuple[Sentence, CorruptionReport | None]:
        text = self.client.request_corruption(tags, sentence.text)
        return Sentence.from_text(text), None


# --- generation ------------------------------------------------------------------


@dataclass
class GenerationJob:
    source: CorpusSource | list[str]
    out_dir: str | Path
    seed: int
    tagger: Callable[[Sentence, int], TagSet]
    corruptor: Callable[[Sentence, TagSet, int], tuple[Sentence, CorruptionReport | None]]
    shards: int = 1
    clean: CleanConfig = field(default_factory=CleanConfig)
    fmt: str = codec.FORMAT_TSV
    threads: int = 1
    overwrite: bool = False
    max_retries: int = 2

    def __post_init__(self) -> None:
        if self.shards < 1:
            raise InputContractError("shard count must be >= 1")


def generate(job: GenerationJob) -> dict:
    """Run tag -> corrupt -> emit over the cleaned source; returns the manifest."""
    out_dir = Path(job.out_dir)
    suffix = ".tsv" if job.fmt == codec.FORMAT_TSV else ".src"
    shard_paths = [out_dir / f"shard-{i:04d}{suffix}" for i in range(job.shards)]
    manifest_path = out_dir / "manifest.json"
    for path in [*shard_paths, manifest_path]:
        if path.exists() and not job.overwrite:
            raise InputContractError(f"refusing to overwrite {path} (use overwrite)")

    if isinstance(job.source, CorpusSource):
        digest = job.source.digest()
        lines, stats = preprocess(job.source, job.clean)
        inputs = [{"path": str(p), "sha256": _sha256_file(Path(p))} for p in job.source.paths]
    else:
        material = list(job.source)
        digest = hashlib.sha256("\n".join(material).encode("utf-8")).hexdigest()
        lines, stats = clean_filter(iter(material), job.clean)
        inputs = [{"inline": True, "sha256": digest}]

    requested: dict[str, int] = {code: 0 for code in TAG_CODES}
    fulfilled: dict[str, int] = {code: 0 for code in TAG_CODES}
    unfulfilled: dict[str, int] = {code: 0 for code in TAG_CODES}

    def process(item: tuple[int, str]):
        ordinal, line = item
        sentence = Sentence.from_text(line)
        tags = job.tagger(sentence, ordinal)
        seed_i = rng.derive(job.seed, digest, ordinal)
        last_exc: Exception | None = None
        for _ in range(job.max_retries + 1):
            try:
                corrupted, report = job.corruptor(sentence, tags, seed_i)
                return ordinal, line, tags, corrupted, report
            except AdapterError as exc:
                last_exc = exc
        return ordinal, line, tags, None, last_exc

    def results():
        work = enumerate(lines)
        if job.threads <= 1:
            yield from map(process, work)
            return
        # Chunked submission keeps memory bounded on corpus-scale streams while
        # preserving input order (and therefore byte-identical output).
        from concurrent.futures import ThreadPoolExecutor
        from itertools import islice

        with ThreadPoolExecutor(max_workers=job.threads) as pool:
            while True:
                chunk = list(islice(work, 256 * job.threads))
                if not chunk:
                    return
                yield from pool.map(process, chunk)

    out_dir.mkdir(parents=True, exist_ok=True)
    emitted, skipped = _emit(job, shard_paths, results(), requested, fulfilled, unfulfilled)

    shard_meta = []
    for i, path in enumerate(shard_paths):
        meta = {"name": path.name, "sha256": _sha256_file(path)}
        if job.fmt == codec.FORMAT_SPLIT:
            tgt = path.with_suffix(".tgt")
            meta["tgt_name"] = tgt.name
            meta["tgt_sha256"] = _sha256_file(tgt)
        shard_meta.append(meta)

    manifest = {
        "seed": job.seed,
        "shards": job.shards,
        "format": job.fmt,
        "assignment": "ordinal % shards",
        "inputs": inputs,
        "input_digest": digest,
        "counts": {
            **stats.to_dict(),
            "emitted": emitted,
            "skipped_corruptor_failures": skipped,
        },
        "tags": {
            "requested": requested,
            "fulfilled": fulfilled,
            "unfulfilled": unfulfilled,
        },
        "shard_files": shard_meta,
    }
    manifest_path.write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    manifest["manifest_path"] = str(manifest_path)
    return manifest


def _emit(job, shard_paths, results, requested, fulfilled, unfulfilled) -> tuple[int, int]:
    emitted = skipped = 0
    if job.fmt == codec.FORMAT_TSV:
        handles = [open(p, "w", encoding="utf-8", newline="\n") for p in shard_paths]
        tgt_handles = None
    elif job.fmt == codec.FORMAT_SPLIT:
        handles = [open(p, "w", encoding="utf-8", newline="\n") for p in shard_paths]
        tgt_handles = [
            open(p.with_suffix(".tgt"), "w", encoding="utf-8", newline="\n")
            for p in shard_paths
        ]
    else:
        raise InputContractError(f"unknown output format: {job.fmt!r}")
    try:
        for ordinal, line, tags, corrupted, report in results:
            for code in tags:
                requested[code] += 1
            if corrupted is None:
                skipped += 1
                continue
            if isinstance(report, CorruptionReport):
                mask_tags = report.fulfilled
                for code in report.fulfilled:
                    fulfilled[code] += 1
                for code in report.unfulfilled:
                    unfulfilled[code] += 1
            else:
                # External corruptors give no report; trust the requested tags.
                mask_tags = tags
                for code in tags:
                    fulfilled[code] += 1
            source_line, target_line = codec.format_training_line(mask_tags, line, corrupted.text)
            shard = ordinal % job.shards
            if tgt_handles is None:
                handles[shard].write(f"{source_line}\t{target_line}\n")
            else:
                handles[shard].write(source_line + "\n")
                tgt_handles[shard].write((target_line or "") + "\n")
            emitted += 1
    finally:
        for fh in handles:
            fh.close()
        if tgt_handles:
            for fh in tgt_handles:
                fh.close()
    return emitted, skipped
