"""Walk through error-type annotation: align a raw sentence with its
reference, inspect the edits, and aggregate corpus-level tag statistics."""

from gecforge import annotate, annotate_corpus
from gecforge.pipeline import corpus_stats

raw = "عبد الله ذهب الي المدرسه"
reference = "عبدالله ذهب إلى المدرسة"

pair = annotate(raw, reference)
print("raw:      ", raw)
print("reference:", reference)
print("sentence tags:", ", ".join(pair.sentence_tags.codes()))
print()

# Each alignment op and the tags it contributed.
for op, tags in zip(pair.alignment.ops, pair.edit_tags):
    src = " ".join(pair.raw.tokens[op.src_span[0] : op.src_span[1]]) or "-"
    tgt = " ".join(pair.reference.tokens[op.tgt_span[0] : op.tgt_span[1]]) or "-"
    print(f"  {op.kind:8s} {src!r:24} -> {tgt!r:24} {sorted(tags)}")
print()

# A small corpus: per-tag sentence frequencies and the class-weight export.
pairs = [
    ("احمد هنا اليوم", "أحمد هنا اليوم"),
    ("دخل المدرسه صباحا", "دخل المدرسة صباحا"),
    ("ذهب عبد الله", "ذهب عبدالله"),
    ("نص سليم تماما", "نص سليم تماما"),
]
matrix, freq, unknown = annotate_corpus(pairs)
print("per-tag sentence counts (non-zero):")
for code, count in freq.items():
    if count:
        print(f"  {code}: {count}")
print("unknown edits:", unknown)

stats = corpus_stats(matrix)
print("class weight for OH:", round(stats["class_weights"]["OH"]["weight"], 3))
