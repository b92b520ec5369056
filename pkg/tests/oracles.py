"""Independent brute-force oracles used by the unit and acceptance tests.

Everything here deliberately reimplements its subject from the definitions,
in plain Python, without calling into the library code it checks.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

PUNCT = {".", ",", "،", "؛", "؟", "!", ":", '"', "(", ")"}


def naive_levenshtein(a: str, b: str) -> int:
    """Plain quadratic edit-distance table."""
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return d[n][m]


def _norm(a: str, b: str) -> Fraction:
    if not a and not b:
        return Fraction(0)
    return Fraction(naive_levenshtein(a, b), max(len(a), len(b)))


def brute_force_align_cost(raw: tuple[str, ...], ref: tuple[str, ...]) -> Fraction:
    """Minimum alignment cost by exhaustive enumeration of every monotone
    segmentation into 1:1 / 1:0 / 0:1 / 2:1 / 1:2 links, under the same cost
    definitions and structural guards as the aligner."""

    def is_punct(tok: str) -> bool:
        return len(tok) == 1 and tok in PUNCT

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> Fraction:
        n, m = len(raw), len(ref)
        if i == n and j == m:
            return Fraction(0)
        options: list[Fraction] = []
        if i < n and j < m:
            if raw[i] == ref[j]:
                options.append(go(i + 1, j + 1))
            elif is_punct(raw[i]) == is_punct(ref[j]):
                options.append(_norm(raw[i], ref[j]) + go(i + 1, j + 1))
        if i < n:
            options.append(Fraction(1) + go(i + 1, j))
        if j < m:
            options.append(Fraction(1) + go(i, j + 1))
        if (
            i + 1 < n
            and j < m
            and not (is_punct(raw[i]) or is_punct(raw[i + 1]) or is_punct(ref[j]))
            and raw[i] != ref[j]
            and raw[i + 1] != ref[j]
        ):
            options.append(_norm(raw[i] + raw[i + 1], ref[j]) + Fraction(1, 10) + go(i + 2, j + 1))
        if (
            i < n
            and j + 1 < m
            and not (is_punct(raw[i]) or is_punct(ref[j]) or is_punct(ref[j + 1]))
            and raw[i] != ref[j]
            and raw[i] != ref[j + 1]
        ):
            options.append(_norm(raw[i], ref[j] + ref[j + 1]) + Fraction(1, 10) + go(i + 1, j + 2))
        return min(options)

    return go(0, 0)


# --- naive multi-label metrics -------------------------------------------------


def naive_counts(pred, gold):
    """Per-label TP/FP/FN/TN via an explicit per-cell loop."""
    n = len(pred)
    labels = len(pred[0]) if n else 0
    tp = [0] * labels
    fp = [0] * labels
    fn = [0] * labels
    tn = [0] * labels
    for row_p, row_g in zip(pred, gold):
        for k in range(labels):
            p, g = bool(row_p[k]), bool(row_g[k])
            if p and g:
                tp[k] += 1
            elif p and not g:
                fp[k] += 1
            elif not p and g:
                fn[k] += 1
            else:
                tn[k] += 1
    return tp, fp, fn, tn


def _div(a: float, b: float) -> float:
    return a / b if b else 0.0


def _f(p: float, r: float, beta: float) -> float:
    den = beta * beta * p + r
    return (1 + beta * beta) * p * r / den if den else 0.0


def naive_metrics(pred, gold):
    """P/R/F1/F0.5 per label plus micro, macro and weighted aggregates plus
    Hamming loss, computed directly from the defining equations."""
    tp, fp, fn, tn = naive_counts(pred, gold)
    labels = len(tp)
    per_label = []
    for k in range(labels):
        p = _div(tp[k], tp[k] + fp[k])
        r = _div(tp[k], tp[k] + fn[k])
        per_label.append(
            {"precision": p, "recall": r, "f1": _f(p, r, 1.0), "f05": _f(p, r, 0.5)}
        )
    sum_tp, sum_fp, sum_fn = sum(tp), sum(fp), sum(fn)
    micro_p = _div(sum_tp, sum_tp + sum_fp)
    micro_r = _div(sum_tp, sum_tp + sum_fn)
    micro = {
        "precision": micro_p,
        "recall": micro_r,
        "f1": _div(2 * micro_p * micro_r, micro_p + micro_r),
        "f05": _div(1.25 * micro_p * micro_r, 0.25 * micro_p + micro_r),
    }
    macro = {
        key: _div(sum(row[key] for row in per_label), labels)
        for key in ("precision", "recall", "f1", "f05")
    }
    support = [tp[k] + fn[k] for k in range(labels)]
    total_support = sum(support)
    weighted = {
        key: _div(sum(row[key] * s for row, s in zip(per_label, support)), total_support)
        for key in ("precision", "recall", "f1", "f05")
    }
    wrong = sum(sum(1 for k in range(labels) if bool(rp[k]) != bool(rg[k])) for rp, rg in zip(pred, gold))
    cells = len(pred) * labels
    return {
        "counts": (tp, fp, fn, tn),
        "per_label": per_label,
        "micro": micro,
        "macro": macro,
        "weighted": weighted,
        "hamming": _div(wrong, cells),
    }


def naive_micro_f1_at_threshold(probs, gold, threshold: float) -> float:
    """Binarize at one threshold (>=) and return micro-F1, all in loops."""
    tp = fp = fn = 0
    for row_p, row_g in zip(probs, gold):
        for p, g in zip(row_p, row_g):
            pred = p >= threshold
            if pred and g:
                tp += 1
            elif pred and not g:
                fp += 1
            elif not pred and g:
                fn += 1
    prec = _div(tp, tp + fp)
    rec = _div(tp, tp + fn)
    return _div(2 * prec * rec, prec + rec)
