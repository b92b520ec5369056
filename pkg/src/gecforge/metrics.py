"""Evaluation surface: multi-label metrics, threshold sweeps, word-edit GEC
scoring, BLEU-4, and class-rebalance weights.

Conventions used throughout:

* precision, recall and F scores are 0 whenever their denominator is 0;
* F_beta = (1 + beta^2) * P * R / (beta^2 * P + R);
* every report also carries ``f05_variant``, the non-standard form
  1.25 * P * R / (0.25 * (P + R)). That expression reduces to 2.5 * F1 and can
  exceed 1; it is exported alongside the standard score so downstream numbers
  computed either way can be audited instead of silently diverging.

Confusion counts and n-gram statistics are associative: shards can be computed
in parallel and summed, and the result does not depend on shard boundaries.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .align import KEEP, align
from .core import LabelMatrix, NUM_TAGS, Sentence, TAG_CODES
from .errors import BadGridError, ShapeError


def _as_bool_matrix(pred: LabelMatrix | np.ndarray) -> np.ndarray:
    if isinstance(pred, LabelMatrix):
        if not pred.is_binary():
            raise ShapeError("prediction matrix must be binarized first")
        return pred.rows.astype(bool)
    arr = np.asarray(pred)
    if arr.dtype != bool:
        if not np.all((arr == 0) | (arr == 1)):
            raise ShapeError("prediction matrix must be binary")
        arr = arr.astype(bool)
    return arr


def _as_gold_matrix(gold: LabelMatrix | np.ndarray) -> np.ndarray:
    if isinstance(gold, LabelMatrix):
        gold = gold.rows
    arr = np.asarray(gold)
    if not np.all((arr == 0) | (arr == 1)):
        raise ShapeError("gold matrix must be binary")
    return arr.astype(bool)


@dataclass(frozen=True)
class ConfusionCounts:
    """Per-label TP/FP/FN/TN over a fixed number of evaluated sentences."""

    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray

    def __post_init__(self) -> None:
        totals = self.tp + self.fp + self.fn + self.tn
        if totals.size and not np.all(totals == totals[0]):
            raise ShapeError("per-label count totals must all equal the sentence count")

    @property
    def labels(self) -> int:
        return self.tp.shape[0]

    @property
    def n_rows(self) -> int:
        return int(self.tp[0] + self.fp[0] + self.fn[0] + self.tn[0]) if self.tp.size else 0

    @property
    def support(self) -> np.ndarray:
        return self.tp + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )


def confusion(pred: LabelMatrix | np.ndarray, gold: LabelMatrix | np.ndarray) -> ConfusionCounts:
    p = _as_bool_matrix(pred)
    g = _as_gold_matrix(gold)
    if p.shape != g.shape:
        raise ShapeError(f"prediction shape {p.shape} != gold shape {g.shape}")
    tp = (p & g).sum(axis=0)
    fp = (p & ~g).sum(axis=0)
    fn = (~p & g).sum(axis=0)
    tn = (~p & ~g).sum(axis=0)
    return ConfusionCounts(tp, fp, fn, tn)


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num, dtype=float)
    np.divide(num, den, out=out, where=den > 0)
    return out


def fbeta(precision: np.ndarray | float, recall: np.ndarray | float, beta: float) -> np.ndarray | float:
    p = np.asarray(precision, dtype=float)
    r = np.asarray(recall, dtype=float)
    num = (1.0 + beta * beta) * p * r
    den = beta * beta * p + r
    out = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return out if out.ndim else float(out)


def f05_variant(precision: np.ndarray | float, recall: np.ndarray | float) -> np.ndarray | float:
    """Non-standard F0.5 form 1.25*P*R/(0.25*(P+R)); equals 2.5*F1."""
    p = np.asarray(precision, dtype=float)
    r = np.asarray(recall, dtype=float)
    num = 1.25 * p * r
    den = 0.25 * (p + r)
    out = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return out if out.ndim else float(out)


def prf(counts: ConfusionCounts, beta: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-label precision, recall and F_beta."""
    precision = _safe_div(counts.tp, counts.tp + counts.fp)
    recall = _safe_div(counts.tp, counts.tp + counts.fn)
    return precision, recall, fbeta(precision, recall, beta)


MICRO = "micro"
MACRO = "macro"
WEIGHTED = "weighted"


def aggregate(counts: ConfusionCounts, mode: str) -> dict[str, float]:
    """Micro/macro/weighted aggregates of P, R, F1, F0.5 (plus the variant)."""
    if mode == MICRO:
        tp, fp, fn = counts.tp.sum(), counts.fp.sum(), counts.fn.sum()
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        return {
            "precision": float(p),
            "recall": float(r),
            "f1": float(fbeta(p, r, 1.0)),
            "f05": float(fbeta(p, r, 0.5)),
            "f05_variant": float(f05_variant(p, r)),
        }
    precision, recall, f1 = prf(counts, 1.0)
    f05 = fbeta(precision, recall, 0.5)
    variant = f05_variant(precision, recall)
    if mode == MACRO:
        weights = np.full(counts.labels, 1.0 / counts.labels) if counts.labels else np.array([])
    elif mode == WEIGHTED:
        support = counts.support.astype(float)
        total = support.sum()
        weights = support / total if total > 0 else np.zeros_like(support)
    else:
        raise ShapeError(f"unknown aggregation mode: {mode!r}")
    return {
        "precision": float(precision @ weights) if counts.labels else 0.0,
        "recall": float(recall @ weights) if counts.labels else 0.0,
        "f1": float(f1 @ weights) if counts.labels else 0.0,
        "f05": float(f05 @ weights) if counts.labels else 0.0,
        "f05_variant": float(variant @ weights) if counts.labels else 0.0,
    }


def hamming_loss(pred: LabelMatrix | np.ndarray, gold: LabelMatrix | np.ndarray) -> float:
    p = _as_bool_matrix(pred)
    g = _as_gold_matrix(gold)
    if p.shape != g.shape:
        raise ShapeError(f"prediction shape {p.shape} != gold shape {g.shape}")
    if p.size == 0:
        return 0.0
    return float((p != g).sum() / p.size)


@dataclass(frozen=True)
class MetricsReport:
    labels: tuple[str, ...]
    counts: ConfusionCounts
    hamming: float
    n_rows: int

    def per_label(self) -> list[dict[str, float | int | str]]:
        precision, recall, f1 = prf(self.counts, 1.0)
        f05 = fbeta(precision, recall, 0.5)
        variant = f05_variant(precision, recall)
        rows = []
        for i, code in enumerate(self.labels):
            rows.append(
                {
                    "label": code,
                    "tp": int(self.counts.tp[i]),
                    "fp": int(self.counts.fp[i]),
                    "fn": int(self.counts.fn[i]),
                    "tn": int(self.counts.tn[i]),
                    "support": int(self.counts.support[i]),
                    "precision": float(precision[i]),
                    "recall": float(recall[i]),
                    "f1": float(f1[i]),
                    "f05": float(f05[i]),
                    "f05_variant": float(variant[i]),
                }
            )
        return rows

    def to_dict(self) -> dict:
        return {
            "n": self.n_rows,
            "hamming_loss": self.hamming,
            "micro": aggregate(self.counts, MICRO),
            "macro": aggregate(self.counts, MACRO),
            "weighted": aggregate(self.counts, WEIGHTED),
            "per_label": self.per_label(),
        }


def evaluate_labels(
    pred: LabelMatrix | np.ndarray,
    gold: LabelMatrix | np.ndarray,
    labels: Sequence[str] = TAG_CODES,
) -> MetricsReport:
    counts = confusion(pred, gold)
    if counts.labels != len(labels):
        raise ShapeError(f"expected {len(labels)} labels, got {counts.labels}")
    return MetricsReport(
        labels=tuple(labels),
        counts=counts,
        hamming=hamming_loss(pred, gold),
        n_rows=counts.n_rows,
    )


# --- threshold sweep ---------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSweepResult:
    best_threshold: float
    best_f1: float
    curve: tuple[tuple[float, float, float, float], ...]  # (threshold, P, R, F1)

    def to_dict(self) -> dict:
        return {
            "best_threshold": self.best_threshold,
            "best_f1": self.best_f1,
            "curve": [list(point) for point in self.curve],
        }


def threshold_grid(step: float) -> list[float]:
    if not 0.0 < step <= 1.0:
        raise BadGridError(f"grid step must be in (0, 1], got {step}")
    ts = []
    k = 0
    while True:
        t = k * step
        if t >= 1.0:
            break
        ts.append(t)
        k += 1
    ts.append(1.0)
    return ts


def sweep_threshold(
    probs: LabelMatrix | np.ndarray,
    gold: LabelMatrix | np.ndarray,
    step: float = 0.01,
) -> ThresholdSweepResult:
    """Micro-F1 over the threshold grid {0, step, 2*step, ..., 1}.

    Cells are predicted positive when probability >= threshold. Ties on the
    best F1 go to the smallest threshold.
    """
    p = probs.rows if isinstance(probs, LabelMatrix) else np.asarray(probs, dtype=float)
    g = _as_gold_matrix(gold)
    if p.shape != g.shape:
        raise ShapeError(f"probability shape {p.shape} != gold shape {g.shape}")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ShapeError("probabilities must lie in [0, 1]")
    curve: list[tuple[float, float, float, float]] = []
    best_t, best_f1 = 0.0, -1.0
    for t in threshold_grid(step):
        b = p >= t
        tp = int((b & g).sum())
        fp = int((b & ~g).sum())
        fn = int((~b & g).sum())
        prec = tp / (tp + fp) if tp + fp > 0 else 0.0
        rec = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = float(fbeta(prec, rec, 1.0))
        curve.append((t, prec, rec, f1))
        if f1 > best_f1:
            best_t, best_f1 = t, f1
    return ThresholdSweepResult(best_t, best_f1, tuple(curve))


# --- word-edit GEC scoring ---------------------------------------------------


@dataclass(frozen=True)
class GecScore:
    precision: float
    recall: float
    f1: float
    f05: float
    proposed: int
    gold: int
    matched: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "f05": self.f05,
            "edits": {"proposed": self.proposed, "gold": self.gold, "matched": self.matched},
        }


def _edit_signature(source: Sequence[str], target: Sequence[str]) -> Counter:
    """Multiset of non-keep edits as (kind, src_span, replacement text)."""
    alignment = align(source, target)
    edits = Counter()
    for op in alignment.ops:
        if op.kind == KEEP:
            continue
        replacement = tuple(target[op.tgt_span[0] : op.tgt_span[1]])
        edits[(op.kind, op.src_span, replacement)] += 1
    return edits


def _score_from_counts(proposed: int, gold: int, matched: int) -> GecScore:
    precision = matched / proposed if proposed > 0 else 0.0
    recall = matched / gold if gold > 0 else 0.0
    return GecScore(
        precision=precision,
        recall=recall,
        f1=float(fbeta(precision, recall, 1.0)),
        f05=float(fbeta(precision, recall, 0.5)),
        proposed=proposed,
        gold=gold,
        matched=matched,
    )


def gec_score(
    source: Sentence | str, hypothesis: Sentence | str, reference: Sentence | str
) -> GecScore:
    """Score hypothesis edits against gold edits, both extracted from source."""
    triples = [(source, hypothesis, reference)]
    return gec_score_corpus(triples)


def gec_score_corpus(
    triples: Iterable[tuple[Sentence | str, Sentence | str, Sentence | str]],
) -> GecScore:
    proposed = gold = matched = 0
    for source, hypothesis, reference in triples:
        src = source.tokens if isinstance(source, Sentence) else tuple(Sentence.from_text(source).tokens)
        hyp = hypothesis.tokens if isinstance(hypothesis, Sentence) else tuple(Sentence.from_text(hypothesis).tokens)
        ref = reference.tokens if isinstance(reference, Sentence) else tuple(Sentence.from_text(reference).tokens)
        prop_edits = _edit_signature(src, hyp)
        gold_edits = _edit_signature(src, ref)
        proposed += sum(prop_edits.values())
        gold += sum(gold_edits.values())
        matched += sum((prop_edits & gold_edits).values())
    return _score_from_counts(proposed, gold, matched)


# --- BLEU-4 -------------------------------------------------------------------

BLEU_ORDER = 4
BLEU_WEIGHTS = (0.25, 0.25, 0.25, 0.25)


@dataclass(frozen=True)
class BleuScore:
    bleu4: float
    brevity_penalty: float
    precisions: tuple[float, float, float, float]
    weights: tuple[float, float, float, float]
    candidate_len: int
    reference_len: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "bleu4": self.bleu4,
            "brevity_penalty": self.brevity_penalty,
            "precisions": list(self.precisions),
            "weights": list(self.weights),
            "candidate_len": self.candidate_len,
            "reference_len": self.reference_len,
            "degenerate": self.degenerate,
        }


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass
class BleuStats:
    """Summable clipped-match / total counts per n-gram order."""

    matches: list[int] = field(default_factory=lambda: [0] * BLEU_ORDER)
    totals: list[int] = field(default_factory=lambda: [0] * BLEU_ORDER)
    candidate_len: int = 0
    reference_len: int = 0

    def add(self, candidate: Sequence[str], reference: Sequence[str]) -> None:
        self.candidate_len += len(candidate)
        self.reference_len += len(reference)
        for n in range(1, BLEU_ORDER + 1):
            cand = _ngrams(candidate, n)
            ref = _ngrams(reference, n)
            self.totals[n - 1] += sum(cand.values())
            self.matches[n - 1] += sum((cand & ref).values())

    def __add__(self, other: "BleuStats") -> "BleuStats":
        return BleuStats(
            [a + b for a, b in zip(self.matches, other.matches)],
            [a + b for a, b in zip(self.totals, other.totals)],
            self.candidate_len + other.candidate_len,
            self.reference_len + other.reference_len,
        )

    def score(self) -> BleuScore:
        c, r = self.candidate_len, self.reference_len
        if c == 0:
            return BleuScore(0.0, 0.0, (0.0,) * 4, BLEU_WEIGHTS, c, r, degenerate=True)
        bp = 1.0 if c >= r else math.exp(1.0 - r / c)
        raw = [
            (self.matches[i] / self.totals[i]) if self.totals[i] > 0 else 0.0
            for i in range(BLEU_ORDER)
        ]
        if raw[0] == 0.0:
            return BleuScore(0.0, bp, tuple(raw), BLEU_WEIGHTS, c, r)
        # Floor vanished higher-order precisions so one missing order does not
        # zero the whole geometric mean; unigram zero stays an exact zero.
        smoothed = [
            p if p > 0.0 else 1.0 / (2.0 * max(self.totals[i], 1))
            for i, p in enumerate(raw)
        ]
        log_sum = sum(w * math.log(p) for w, p in zip(BLEU_WEIGHTS, smoothed))
        return BleuScore(bp * math.exp(log_sum), bp, tuple(raw), BLEU_WEIGHTS, c, r)


def bleu4(candidate: Sentence | str, reference: Sentence | str) -> BleuScore:
    """Sentence-level BLEU with n-grams up to order 4 and uniform weights."""
    cand = candidate.tokens if isinstance(candidate, Sentence) else Sentence.from_text(candidate).tokens
    ref = reference.tokens if isinstance(reference, Sentence) else Sentence.from_text(reference).tokens
    stats = BleuStats()
    stats.add(cand, ref)
    return stats.score()


def bleu4_corpus(pairs: Iterable[tuple[Sentence | str, Sentence | str]]) -> BleuScore:
    stats = BleuStats()
    for candidate, reference in pairs:
        cand = candidate.tokens if isinstance(candidate, Sentence) else Sentence.from_text(candidate).tokens
        ref = reference.tokens if isinstance(reference, Sentence) else Sentence.from_text(reference).tokens
        stats.add(cand, ref)
    return stats.score()


# --- class-rebalance weights ---------------------------------------------------


@dataclass(frozen=True)
class ClassWeightTable:
    labels: tuple[str, ...]
    counts: tuple[int, ...]
    weights: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            code: {"count": c, "weight": w}
            for code, c, w in zip(self.labels, self.counts, self.weights)
        }


def class_weights(
    freq: Mapping[str, int] | Sequence[int], total: int
) -> ClassWeightTable:
    """Inverse-frequency weights, normalized to mean 1 over the given labels.

    Zero counts are floored at 1, which hands the rarest (absent) labels the
    largest weight in the table.
    """
    if isinstance(freq, Mapping):
        labels = tuple(freq.keys())
        counts = tuple(int(freq[k]) for k in labels)
    else:
        counts = tuple(int(c) for c in freq)
        labels = tuple(TAG_CODES[: len(counts)]) if len(counts) <= NUM_TAGS else tuple(
            str(i) for i in range(len(counts))
        )
    if counts and total < max(counts):
        raise ShapeError("total sentence count cannot be below the largest label count")
    raw = np.array([total / max(c, 1) for c in counts], dtype=float)
    if raw.size == 0:
        return ClassWeightTable((), (), ())
    mean = raw.mean()
    normalized = raw / mean if mean > 0 else np.ones_like(raw)
    return ClassWeightTable(labels, counts, tuple(float(w) for w in normalized))
