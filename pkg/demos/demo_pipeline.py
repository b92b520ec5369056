"""The corpus factory end to end: ingest an XML corpus, normalize and filter
it, then generate a sharded synthetic parallel corpus with a manifest."""

import tempfile
from pathlib import Path

from gecforge.pipeline import (
    CleanConfig,
    CorpusSource,
    EngineCorruptor,
    FrequencyTagger,
    GenerationJob,
    KIND_XML,
    generate,
    normalize,
    preprocess,
)

workdir = Path(tempfile.mkdtemp(prefix="gecforge-demo-"))

# A toy monolingual source: prose lives in <text> elements.
xml = """<corpus>
  <doc><text>ذهب الولد الصغير الي المدرسه الكبيرة فى الصباح الباكر جدا !!
سطر قصير يسقط في الترشيح</text></doc>
  <doc><text>قرأ الطالب المجتهد الكتاب الجديد ثم كتب ملخصا وافيا عنه اليوم .</text></doc>
</corpus>"""
corpus = workdir / "corpus.xml"
corpus.write_text(xml, encoding="utf-8")

# Normalization also repairs common misspellings (الي -> إلى, فى -> في).
print("normalize:", normalize("ذهب الي المدرسه فى الصباح !!"))

lines, stats = preprocess(CorpusSource(KIND_XML, (str(corpus),)), CleanConfig(min_words=8))
print("cleaned lines:")
for line in lines:
    print("  ", line)
print("drop stats:", stats.to_dict())
print()

# Generation: sample tag sets from the bundled empirical profile, corrupt with
# the built-in engine, and write two deterministic shards.
job = GenerationJob(
    source=CorpusSource(KIND_XML, (str(corpus),)),
    out_dir=workdir / "synthetic",
    seed=7,
    tagger=FrequencyTagger.default(seed=7),
    corruptor=EngineCorruptor(),
    shards=2,
    clean=CleanConfig(min_words=8),
)
manifest = generate(job)
print("manifest:", manifest["manifest_path"])
print("emitted:", manifest["counts"]["emitted"])
print("fulfilled tags:", {k: v for k, v in manifest["tags"]["fulfilled"].items() if v})

for shard in sorted((workdir / "synthetic").glob("shard-*.tsv")):
    print(f"-- {shard.name}")
    for row in shard.read_text(encoding="utf-8").splitlines():
        print("  ", row)

# Rerunning the same job elsewhere produces byte-identical shards.
job2 = GenerationJob(
    source=CorpusSource(KIND_XML, (str(corpus),)),
    out_dir=workdir / "synthetic-again",
    seed=7,
    tagger=FrequencyTagger.default(seed=7),
    corruptor=EngineCorruptor(),
    shards=2,
    clean=CleanConfig(min_words=8),
)
generate(job2)
same = all(
    (workdir / "synthetic" / f"shard-{i:04d}.tsv").read_bytes()
    == (workdir / "synthetic-again" / f"shard-{i:04d}.tsv").read_bytes()
    for i in range(2)
)
print("reruns byte-identical:", same)
