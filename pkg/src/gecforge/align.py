"""Word-level alignment with merge/split support, plus character edit scripts.

The aligner finds the minimum-cost monotone alignment between a raw token list
and a reference token list under these costs:

    KEEP            0                  (identical tokens only)
    REPLACE         lev(a, b) / max(|a|, |b|)
    INSERT, DELETE  1
    MERGE(a1 a2->b) lev(a1+a2, b) / max(|a1+a2|, |b|) + 1/10
    SPLIT(a->b1 b2) lev(a, b1+b2) / max(|a|, |b1+b2|) + 1/10

The 1/10 surcharge keeps unrelated neighbours from being merged or split just
because a merge happens to be marginally cheaper than two unit edits. MERGE
and SPLIT are word-boundary ops with two structural guards:

* they are never offered when any involved token is a punctuation mark, so a
  missing final period aligns as INSERT (a punctuation error) rather than as
  a split of the last word;
* they are never offered when one piece equals the whole (e.g. merging
  "w w" into "w"), because that shape is a duplicated/absent word next to a
  kept one, and must align as DELETE/INSERT of the word.

REPLACE is likewise never offered between a punctuation token and a word: a
mark does not turn into a word, so that shape aligns as DELETE plus INSERT.

Ties are broken deterministically: among equal-cost alignments the op sequence
that is lexicographically smallest under KEEP < REPLACE < MERGE < SPLIT <
DELETE < INSERT wins. At any DP state the candidate ops all have distinct
kinds, so the lexicographic comparison is always settled by the first op and
the DP only ever compares (cost, kind rank) pairs. Costs are exact rationals
(integers scaled by a common denominator inside the DP), so minimization never
depends on float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .core import is_punct_token

MERGE_SPLIT_PENALTY = Fraction(1, 10)

KEEP = "keep"
REPLACE = "replace"
INSERT = "insert"
DELETE = "delete"
MERGE = "merge"
SPLIT = "split"

# Tie-break rank of each op kind.
KIND_RANK = {KEEP: 0, REPLACE: 1, MERGE: 2, SPLIT: 3, DELETE: 4, INSERT: 5}

_ARITY = {
    KEEP: (1, 1),
    REPLACE: (1, 1),
    INSERT: (0, 1),
    DELETE: (1, 0),
    MERGE: (2, 1),
    SPLIT: (1, 2),
}


@dataclass(frozen=True)
class EditOp:
    """One alignment link between a raw span and a reference span."""

    kind: str
    src_span: tuple[int, int]
    tgt_span: tuple[int, int]
    cost: Fraction

    def __post_init__(self) -> None:
        want = _ARITY[self.kind]
        got = (self.src_span[1] - self.src_span[0], self.tgt_span[1] - self.tgt_span[0])
        if got != want:
            raise ValueError(f"{self.kind} op must consume {want} tokens, got {got}")


@dataclass(frozen=True)
class Alignment:
    ops: tuple[EditOp, ...]
    total_cost: Fraction

    def replay(self, raw: Sequence[str], reference: Sequence[str]) -> list[str]:
        """Apply the ops to the raw tokens; the result equals the reference."""
        out: list[str] = []
        for op in self.ops:
            out.extend(reference[op.tgt_span[0] : op.tgt_span[1]])
        return out


_LEV_CACHE: dict[tuple[str, str], int] = {}


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance, cached because the aligner hammers it."""
    if a == b:
        return 0
    key = (a, b)
    hit = _LEV_CACHE.get(key)
    if hit is not None:
        return hit
    if len(a) < len(b):  # keep the inner row short
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    _LEV_CACHE[key] = prev[-1]
    return prev[-1]


def normalized_levenshtein(a: str, b: str) -> Fraction:
    if not a and not b:
        return Fraction(0)
    return Fraction(levenshtein(a, b), max(len(a), len(b)))


def align(raw: Sequence[str], reference: Sequence[str]) -> Alignment:
    """Minimum-cost monotone alignment of raw tokens onto reference tokens."""
    n, m = len(raw), len(reference)

    # Common denominator for exact integer costs inside the DP.
    denoms = {1, 10}
    for i in range(n):
        for j in range(m):
            denoms.add(max(1, len(raw[i]), len(reference[j])))
            if i + 1 < n:
                denoms.add(max(1, len(raw[i]) + len(raw[i + 1]), len(reference[j])))
            if j + 1 < m:
                denoms.add(max(1, len(raw[i]), len(reference[j]) + len(reference[j + 1])))
    scale = lcm(*denoms)
    unit = scale  # INSERT / DELETE
    penalty = scale // 10

    def replace_cost(a: str, b: str) -> int:
        if a == b:
            return 0
        return levenshtein(a, b) * (scale // max(1, len(a), len(b)))

    raw_punct = [is_punct_token(t) for t in raw]
    ref_punct = [is_punct_token(t) for t in reference]

    # Suffix DP over (i, j): best[(i, j)] = (int cost, kind rank, op kind).
    best: dict[tuple[int, int], tuple[int, int, str | None]] = {(n, m): (0, 0, None)}
    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if (i, j) == (n, m):
                continue
            candidates: list[tuple[int, int, str]] = []
            if i < n and j < m:
                if raw[i] == reference[j]:
                    candidates.append((best[(i + 1, j + 1)][0], KIND_RANK[KEEP], KEEP))
                elif raw_punct[i] == ref_punct[j]:
                    c = replace_cost(raw[i], reference[j])
                    candidates.append((c + best[(i + 1, j + 1)][0], KIND_RANK[REPLACE], REPLACE))
            if (
                i + 1 < n
                and j < m
                and not (raw_punct[i] or raw_punct[i + 1] or ref_punct[j])
                and raw[i] != reference[j]
                and raw[i + 1] != reference[j]
            ):
                c = replace_cost(raw[i] + raw[i + 1], reference[j]) + penalty
                candidates.append((c + best[(i + 2, j + 1)][0], KIND_RANK[MERGE], MERGE))
            if (
                i < n
                and j + 1 < m
                and not (raw_punct[i] or ref_punct[j] or ref_punct[j + 1])
                and raw[i] != reference[j]
                and raw[i] != reference[j + 1]
            ):
                c = replace_cost(raw[i], reference[j] + reference[j + 1]) + penalty
                candidates.append((c + best[(i + 1, j + 2)][0], KIND_RANK[SPLIT], SPLIT))
            if i < n:
                candidates.append((unit + best[(i + 1, j)][0], KIND_RANK[DELETE], DELETE))
            if j < m:
                candidates.append((unit + best[(i, j + 1)][0], KIND_RANK[INSERT], INSERT))
            best[(i, j)] = min(candidates)

    # Walk the chosen ops forward, rebuilding exact rational costs.
    ops: list[EditOp] = []
    total = Fraction(0)
    i = j = 0
    while (i, j) != (n, m):
        kind = best[(i, j)][2]
        assert kind is not None
        if kind == KEEP:
            cost = Fraction(0)
            spans = ((i, i + 1), (j, j + 1))
            i, j = i + 1, j + 1
        elif kind == REPLACE:
            cost = normalized_levenshtein(raw[i], reference[j])
            spans = ((i, i + 1), (j, j + 1))
            i, j = i + 1, j + 1
        elif kind == MERGE:
            cost = normalized_levenshtein(raw[i] + raw[i + 1], reference[j]) + MERGE_SPLIT_PENALTY
            spans = ((i, i + 2), (j, j + 1))
            i, j = i + 2, j + 1
        elif kind == SPLIT:
            cost = normalized_levenshtein(raw[i], reference[j] + reference[j + 1]) + MERGE_SPLIT_PENALTY
            spans = ((i, i + 1), (j, j + 2))
            i, j = i + 1, j + 2
        elif kind == DELETE:
            cost = Fraction(1)
            spans = ((i, i + 1), (j, j))
            i += 1
        else:  # INSERT
            cost = Fraction(1)
            spans = ((i, i), (j, j + 1))
            j += 1
        ops.append(EditOp(kind, spans[0], spans[1], cost))
        total += cost
    return Alignment(tuple(ops), total)


# --- character-level edit scripts ------------------------------------------

CH_KEEP = "keep"
CH_SUB = "sub"
CH_DEL = "del"
CH_INS = "ins"

_CH_RANK = {CH_KEEP: 0, CH_SUB: 1, CH_DEL: 2, CH_INS: 3}


@dataclass(frozen=True)
class CharOp:
    kind: str
    src_pos: int
    tgt_pos: int
    src_char: str  # "" for ins
    tgt_char: str  # "" for del


@dataclass(frozen=True)
class CharEditScript:
    ops: tuple[CharOp, ...]

    @property
    def distance(self) -> int:
        return sum(1 for op in self.ops if op.kind != CH_KEEP)

    def edits(self) -> tuple[CharOp, ...]:
        return tuple(op for op in self.ops if op.kind != CH_KEEP)

    def apply(self, source: str) -> str:
        out: list[str] = []
        i = 0
        for op in self.ops:
            if op.kind == CH_KEEP:
                out.append(source[i])
                i += 1
            elif op.kind == CH_SUB:
                out.append(op.tgt_char)
                i += 1
            elif op.kind == CH_DEL:
                i += 1
            else:
                out.append(op.tgt_char)
        return "".join(out)


def char_edit_script(a: str, b: str) -> CharEditScript:
    """Minimum-length script converting word a into word b.

    At equal cost the script prefers sub over del over ins, leftmost first,
    so the output is deterministic.
    """
    n, m = len(a), len(b)
    best: dict[tuple[int, int], tuple[int, int, str | None]] = {(n, m): (0, 0, None)}
    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if (i, j) == (n, m):
                continue
            candidates: list[tuple[int, int, str]] = []
            if i < n and j < m:
                if a[i] == b[j]:
                    candidates.append((best[(i + 1, j + 1)][0], _CH_RANK[CH_KEEP], CH_KEEP))
                else:
                    candidates.append((1 + best[(i + 1, j + 1)][0], _CH_RANK[CH_SUB], CH_SUB))
            if i < n:
                candidates.append((1 + best[(i + 1, j)][0], _CH_RANK[CH_DEL], CH_DEL))
            if j < m:
                candidates.append((1 + best[(i, j + 1)][0], _CH_RANK[CH_INS], CH_INS))
            best[(i, j)] = min(candidates)

    ops: list[CharOp] = []
    i = j = 0
    while (i, j) != (n, m):
        kind = best[(i, j)][2]
        assert kind is not None
        if kind == CH_KEEP:
            ops.append(CharOp(CH_KEEP, i, j, a[i], b[j]))
            i, j = i + 1, j + 1
        elif kind == CH_SUB:
            ops.append(CharOp(CH_SUB, i, j, a[i], b[j]))
            i, j = i + 1, j + 1
        elif kind == CH_DEL:
            ops.append(CharOp(CH_DEL, i, j, a[i], ""))
            i += 1
        else:
            ops.append(CharOp(CH_INS, i, j, "", b[j]))
            j += 1
    return CharEditScript(tuple(ops))
