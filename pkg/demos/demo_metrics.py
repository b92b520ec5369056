"""The evaluation surface: multi-label report, threshold sweep, word-edit GEC
scoring and BLEU-4."""

import numpy as np

from gecforge import (
    LabelMatrix,
    TagSet,
    bleu4,
    evaluate_labels,
    gec_score,
    sweep_threshold,
)

rng = np.random.default_rng(0)

# --- multi-label metrics over noisy predictions --------------------------------
gold = LabelMatrix.from_tagsets(
    [TagSet.from_codes(codes) for codes in (["OH"], ["OH", "PM"], ["OT"], [], ["PM"])]
)
noise = rng.random(gold.rows.shape) * 0.3
probs = np.clip(gold.rows * 0.8 + noise, 0.0, 1.0)

report = evaluate_labels(probs >= 0.5, gold).to_dict()
print("micro:", {k: round(v, 4) for k, v in report["micro"].items()})
print("macro F1:", round(report["macro"]["f1"], 4))
print("hamming loss:", round(report["hamming_loss"], 4))
print("note: f05_variant is the non-standard 1.25*P*R/(0.25*(P+R)) form,")
print("      reported next to the standard f05 so both conventions are visible")
print()

# --- threshold sweep ------------------------------------------------------------
sweep = sweep_threshold(probs, gold.rows, step=0.05)
print(f"best threshold {sweep.best_threshold:.2f} with micro-F1 {sweep.best_f1:.4f}")
print()

# --- GEC scoring ------------------------------------------------------------------
src = "ذهب الولد الي المدرسه ."
ref = "ذهب الولد إلى المدرسة ."
hyp = "ذهب الولد إلى المدرسه ."  # fixed one of the two errors

score = gec_score(src, hyp, ref)
print("GEC edits:", score.to_dict()["edits"])
print(f"P={score.precision:.2f} R={score.recall:.2f} F1={score.f1:.2f} F0.5={score.f05:.2f}")
print()

# --- BLEU-4 -------------------------------------------------------------------------
print("BLEU-4 identical:", bleu4(ref, ref).bleu4)
partial = bleu4(hyp, ref)
print(f"BLEU-4 partial fix: {partial.bleu4:.4f} (precisions {[round(p, 3) for p in partial.precisions]})")
