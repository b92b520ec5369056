"""Rule-based error-type annotation of raw/reference sentence pairs.

Every non-keep alignment edit is mapped to one or more taxonomy tags. The
structural cases are fixed by definition (merge -> MG, split -> SP, punctuation
insert/delete/replace -> PM/PT/PC, word insert/delete -> XM/XT). Word
replacements are classified by decomposing the character edit script into
independent segments and running each segment through an orthographic cascade;
if any segment stays unexplained the whole pair falls back to OR (near word)
or SW (far word) by normalized edit distance.

Tags always describe what is wrong in the raw sentence relative to the
reference: MG means the raw text split a word that should be joined, SP means
it joined words that should be split, OD means the raw word carries an extra
character, OM that it lacks one, and so on.

Morphosyntactic tags (MI MT XC XF XG XN SF) need a lexicon and are only
produced through a user-supplied lookup table of exact word pairs; edits that
match no rule are counted as unknown rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .align import (
    Alignment,
    CH_DEL,
    CH_INS,
    CH_KEEP,
    CH_SUB,
    CharEditScript,
    CharOp,
    DELETE,
    EditOp,
    INSERT,
    KEEP,
    MERGE,
    SPLIT,
    align,
    char_edit_script,
    normalized_levenshtein,
)
from .arabic import (
    ALIF,
    ALIF_MAQSURA,
    HA,
    HAMZA_FAMILY,
    LONG_VOWELS,
    TA,
    TA_MARBUTA,
    TANWIN_FATHA,
    WAW,
    YA,
    has_arabic_letter,
)
from .core import (
    LabelMatrix,
    Sentence,
    TAG_CODES,
    TagSet,
    is_punct_token,
    tag_index,
)
from .errors import InputContractError

_FINAL_YA_PAIRS = {(YA, ALIF_MAQSURA), (ALIF_MAQSURA, YA), (ALIF, ALIF_MAQSURA), (ALIF_MAQSURA, ALIF)}
_FINAL_TA_PAIRS = {(HA, TA_MARBUTA), (TA_MARBUTA, HA), (TA, TA_MARBUTA), (TA_MARBUTA, TA)}


class RuleTable:
    """Exact-match (raw word, reference word) -> tag lookup, loaded from TSV.

    File format: UTF-8, three tab-separated columns raw_word, reference_word,
    tag_code; '#' starts a comment line. The same table drives the corruption
    engine in reverse.
    """

    def __init__(self, entries: Iterable[tuple[str, str, str]] = ()):
        self._by_pair: dict[tuple[str, str], set[str]] = {}
        self._by_tag: dict[str, list[tuple[str, str]]] = {}
        for raw, ref, code in entries:
            self.add(raw, ref, code)

    def add(self, raw: str, ref: str, code: str) -> None:
        tag_index(code)  # validate
        self._by_pair.setdefault((raw, ref), set()).add(code)
        self._by_tag.setdefault(code, []).append((raw, ref))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "RuleTable":
        table = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise InputContractError(
                        f"{path}:{lineno}: expected 3 tab-separated columns, got {len(parts)}"
                    )
                table.add(parts[0].strip(), parts[1].strip(), parts[2].strip())
        return table

    def lookup(self, raw: str, ref: str) -> frozenset[str]:
        return frozenset(self._by_pair.get((raw, ref), ()))

    def pairs_for_tag(self, code: str) -> tuple[tuple[str, str], ...]:
        return tuple(self._by_tag.get(code, ()))

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_pair.values())


def _segments(script: CharEditScript) -> list[list[CharOp]]:
    """Maximal runs of consecutive non-keep ops."""
    segs: list[list[CharOp]] = []
    cur: list[CharOp] = []
    for op in script.ops:
        if op.kind == CH_KEEP:
            if cur:
                segs.append(cur)
                cur = []
        else:
            cur.append(op)
    if cur:
        segs.append(cur)
    return segs


def _classify_segment(seg: list[CharOp], raw: str, ref: str) -> str | None:
    subs = [op for op in seg if op.kind == CH_SUB]
    dels = [op for op in seg if op.kind == CH_DEL]
    inss = [op for op in seg if op.kind == CH_INS]

    # Hamza form confusion: substitutions staying inside the hamza family.
    if subs and not dels and not inss:
        if all(op.src_char in HAMZA_FAMILY and op.tgt_char in HAMZA_FAMILY for op in subs):
            return "OH"

    if len(seg) == 1:
        op = seg[0]
        # Word-final defective-vowel and ta-marbuta confusions.
        if op.kind == CH_SUB and op.src_pos == len(raw) - 1 and op.tgt_pos == len(ref) - 1:
            pair = (op.src_char, op.tgt_char)
            if pair in _FINAL_YA_PAIRS:
                return "OA"
            if pair in _FINAL_TA_PAIRS:
                return "OT"
        # Alif fariqa dropped or added after a final waw.
        if (
            op.kind == CH_DEL
            and op.src_char == ALIF
            and op.src_pos == len(raw) - 1
            and op.tgt_pos == len(ref)
            and op.src_pos >= 1
            and raw[op.src_pos - 1] == WAW
        ):
            return "OW"
        if (
            op.kind == CH_INS
            and op.tgt_char == ALIF
            and op.tgt_pos == len(ref) - 1
            and op.src_pos == len(raw)
            and op.tgt_pos >= 1
            and ref[op.tgt_pos - 1] == WAW
        ):
            return "OW"

    # Tanwin fatha written as nun, dropped, or added.
    if all(TANWIN_FATHA in (op.src_char, op.tgt_char) for op in seg):
        return "ON"

    # Adjacent transposition.
    if len(subs) == 2 and not dels and not inss:
        first, second = subs
        if (
            second.src_pos == first.src_pos + 1
            and first.src_char == second.tgt_char
            and first.tgt_char == second.src_char
        ):
            return "OC"

    # Pure surplus / missing characters; long vowels get their own classes.
    if dels and not subs and not inss:
        if all(op.src_char in LONG_VOWELS for op in dels):
            return "OG"
        return "OD"
    if inss and not subs and not dels:
        if all(op.tgt_char in LONG_VOWELS for op in inss):
            return "OS"
        return "OM"

    return None


def classify_word_replacement(raw: str, ref: str, rules: RuleTable | None = None) -> frozenset[str]:
    """Tags for a word-level replacement; empty set means unknown."""
    if rules is not None:
        hit = rules.lookup(raw, ref)
        if hit:
            return hit
    if not has_arabic_letter(raw) and not has_arabic_letter(ref):
        return frozenset()
    script = char_edit_script(raw, ref)
    tags: set[str] = set()
    for seg in _segments(script):
        tag = _classify_segment(seg, raw, ref)
        if tag is None:
            # Some part of the change has no orthographic explanation:
            # classify the whole pair by how far apart the words are.
            if normalized_levenshtein(raw, ref) <= 0.5:
                return frozenset({"OR"})
            return frozenset({"SW"})
        tags.add(tag)
    return frozenset(tags)


def classify_edit(
    op: EditOp,
    raw_tokens: Sequence[str],
    ref_tokens: Sequence[str],
    rules: RuleTable | None = None,
) -> frozenset[str]:
    """Tags for one alignment edit; empty set on a KEEP or an unknown edit."""
    if op.kind == KEEP:
        return frozenset()
    if op.kind == MERGE:
        return frozenset({"MG"})
    if op.kind == SPLIT:
        return frozenset({"SP"})
    if op.kind == INSERT:
        token = ref_tokens[op.tgt_span[0]]
        return frozenset({"PM"}) if is_punct_token(token) else frozenset({"XM"})
    if op.kind == DELETE:
        token = raw_tokens[op.src_span[0]]
        return frozenset({"PT"}) if is_punct_token(token) else frozenset({"XT"})
    # REPLACE
    raw_word = raw_tokens[op.src_span[0]]
    ref_word = ref_tokens[op.tgt_span[0]]
    raw_punct, ref_punct = is_punct_token(raw_word), is_punct_token(ref_word)
    if raw_punct and ref_punct:
        return frozenset({"PC"})
    if raw_punct != ref_punct:
        return frozenset()  # punctuation against word: no rule applies
    return classify_word_replacement(raw_word, ref_word, rules)


@dataclass(frozen=True)
class AnnotatedPair:
    raw: Sentence
    reference: Sentence
    alignment: Alignment
    edit_tags: tuple[frozenset[str], ...]
    sentence_tags: TagSet
    unknown_count: int


def annotate(
    raw: Sentence | str, reference: Sentence | str, rules: RuleTable | None = None
) -> AnnotatedPair:
    """Align a raw sentence with its reference and tag every edit."""
    if isinstance(raw, str):
        raw = Sentence.from_text(raw)
    if isinstance(reference, str):
        reference = Sentence.from_text(reference)
    alignment = align(raw.tokens, reference.tokens)
    edit_tags: list[frozenset[str]] = []
    codes: set[str] = set()
    unknown = 0
    for op in alignment.ops:
        tags = classify_edit(op, raw.tokens, reference.tokens, rules)
        edit_tags.append(tags)
        codes.update(tags)
        if op.kind != KEEP and not tags:
            unknown += 1
    return AnnotatedPair(
        raw=raw,
        reference=reference,
        alignment=alignment,
        edit_tags=tuple(edit_tags),
        sentence_tags=TagSet.from_codes(codes),
        unknown_count=unknown,
    )


def annotate_corpus(
    pairs: Iterable[tuple[Sentence | str, Sentence | str]],
    rules: RuleTable | None = None,
    threads: int = 1,
) -> tuple[LabelMatrix, dict[str, int], int]:
    """Annotate pairs in order; returns the label matrix, per-tag sentence
    counts, and the total number of unknown edits."""
    pair_list = list(pairs)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            annotated = list(pool.map(lambda p: annotate(p[0], p[1], rules), pair_list))
    else:
        annotated = [annotate(raw, ref, rules) for raw, ref in pair_list]
    matrix = LabelMatrix.from_tagsets([ap.sentence_tags for ap in annotated])
    freq = {code: 0 for code in TAG_CODES}
    for ap in annotated:
        for code in ap.sentence_tags:
            freq[code] += 1
    unknown_total = sum(ap.unknown_count for ap in annotated)
    return matrix, freq, unknown_total
