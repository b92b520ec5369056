"""Tag-conditioned corruption: request error types, inspect the plan, and
verify the annotation side reads the injected tags back."""

from gecforge import Sentence, TagSet, annotate, corrupt, plan
from gecforge.codec import encode_mask, format_training_line

sentence = Sentence.from_text("أكل الولد التفاحة الكبيرة في الحديقة صباحاً .")
requested = TagSet.from_codes(["OH", "OT", "PM"])

print("correct:  ", sentence.text)
print("requested:", ", ".join(requested.codes()), "=", encode_mask(requested))
print()

built, report = plan(sentence, requested, seed=5)
for step in built.steps:
    print(f"  step {step.tag}: {step.action} @ {step.index}: {step.before} -> {step.after}")

corrupted, report = corrupt(sentence, requested, seed=5)
print()
print("corrupted:", corrupted.text)
print("fulfilled:", ", ".join(report.fulfilled.codes()) or "-")
print("unfulfilled:", ", ".join(report.unfulfilled.codes()) or "-")

# Round trip: annotating (corrupted, correct) recovers the injected tags.
recovered = annotate(corrupted, sentence).sentence_tags
print("recovered:", ", ".join(recovered.codes()))
assert set(report.fulfilled.codes()) <= set(recovered.codes())

# Different seeds pick different applicable sites, deterministically.
print()
for seed in range(3):
    alt, _ = corrupt(sentence, TagSet.from_codes(["OD"]), seed)
    print(f"seed {seed}: {alt.text}")

# The training line a generation job would emit for this pair.
source, target = format_training_line(report.fulfilled, sentence, corrupted)
print()
print("training source:", source)
print("training target:", target)
