"""Command-line interface.

Subcommands: annotate, corrupt, generate, encode, evaluate-tags, evaluate-gec,
sweep, stats. Exit codes are a stable contract: 0 success, 2 input contract
violation, 3 IO failure, 4 adapter failure. Outputs are JSON (reports) and TSV
(corpus-scale artifacts), UTF-8 with \\n newlines. Existing output files are
never overwritten without --force. GECFORGE_SEED is the fallback seed when
--seed is not given; --config FILE (JSON) supplies flag defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import codec, metrics, pipeline
from .adapter import AdapterClient, AdapterEndpoint
from .annotate import RuleTable, annotate
from .core import LabelMatrix, NUM_TAGS, Sentence, TAG_CODES, TagSet
from .corrupt import corrupt
from .errors import AdapterError, InputContractError

_MASK_LINE = re.compile(r"^[ab]{26}(\t.*)?$")


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def _require_same_length(name_a: str, a: list, name_b: str, b: list) -> None:
    if len(a) != len(b):
        raise InputContractError(
            f"{name_a} has {len(a)} lines but {name_b} has {len(b)}"
        )


def _check_out(path: str | Path, force: bool) -> None:
    if Path(path).exists() and not force:
        raise InputContractError(f"refusing to overwrite {path} (use --force)")


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("GECFORGE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputContractError(f"GECFORGE_SEED must be an integer, got {env!r}")
    return 0


def _read_label_matrix(path: str) -> LabelMatrix:
    """Masks (26 a/b chars, optionally followed by TSV columns) or rows of 26
    whitespace-separated probabilities."""
    rows = []
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        if _MASK_LINE.match(line):
            rows.append([1.0 if ch == "b" else 0.0 for ch in line[:NUM_TAGS]])
            continue
        parts = line.split()
        if len(parts) != NUM_TAGS:
            raise InputContractError(
                f"{path}:{lineno}: expected a 26-char mask or {NUM_TAGS} floats, "
                f"got {len(parts)} fields"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise InputContractError(f"{path}:{lineno}: {exc}") from None
    return LabelMatrix(np.array(rows) if rows else np.zeros((0, NUM_TAGS)))


def _emit_json(payload: dict, out: str | None, force: bool) -> None:
    text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    if out:
        _check_out(out, force)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_rules(path: str | None) -> RuleTable | None:
    return RuleTable.from_tsv(path) if path else None


# --- subcommands ---------------------------------------------------------------


def cmd_annotate(args: argparse.Namespace) -> int:
    raw_lines = _read_lines(args.raw)
    ref_lines = _read_lines(args.ref)
    _require_same_length(args.raw, raw_lines, args.ref, ref_lines)
    rules = _load_rules(args.rules)
    _check_out(args.out, args.force)
    results = [annotate(r, f, rules) for r, f in zip(raw_lines, ref_lines)]
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for ap in results:
            codes = ",".join(ap.sentence_tags.codes())
            fh.write(f"{codec.encode_mask(ap.sentence_tags)}\t{codes}\t{ap.unknown_count}\n")
    freq = {code: 0 for code in TAG_CODES}
    for ap in results:
        for code in ap.sentence_tags:
            freq[code] += 1
    unknown_total = sum(ap.unknown_count for ap in results)
    _emit_json(
        {
            "n": len(results),
            "out": str(args.out),
            "tag_frequencies": freq,
            "unknown_edits": unknown_total,
            "unknown_rate": unknown_total / max(len(results), 1),
        },
        None,
        args.force,
    )
    return 0


def cmd_corrupt(args: argparse.Namespace) -> int:
    if (args.tags is None) == (args.mask is None):
        raise InputContractError("exactly one of --tags or --mask is required")
    tags = (
        codec.decode_mask(args.mask)
        if args.mask
        else TagSet.from_codes(c.strip() for c in args.tags.split(",") if c.strip())
    )
    seed = _resolve_seed(args)
    rules = _load_rules(args.rules)
    lines = _read_lines(args.infile) if args.infile else [l.rstrip("\n") for l in sys.stdin]
    out_fh = None
    if args.out:
        _check_out(args.out, args.force)
        out_fh = open(args.out, "w", encoding="utf-8", newline="\n")
    fulfilled_total: dict[str, int] = {}
    unfulfilled_total: dict[str, int] = {}
    try:
        for ordinal, line in enumerate(lines):
            corrupted, report = corrupt(Sentence.from_text(line), tags, seed, rules, ordinal)
            (out_fh or sys.stdout).write(corrupted.text + "\n")
            for code in report.fulfilled:
                fulfilled_total[code] = fulfilled_total.get(code, 0) + 1
            for code in report.unfulfilled:
                unfulfilled_total[code] = unfulfilled_total.get(code, 0) + 1
    finally:
        if out_fh:
            out_fh.close()
    print(
        json.dumps(
            {"n": len(lines), "fulfilled": fulfilled_total, "unfulfilled": unfulfilled_total},
            ensure_ascii=False,
            sort_keys=True,
        ),
        file=sys.stderr,
    )
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    rules = _load_rules(args.rules)
    clean = pipeline.CleanConfig(
        min_words=args.min_words,
        max_words=args.max_words,
        strip_links_mentions_hashtags=args.strip_social,
    )
    client = None
    if args.adapter:
        client = AdapterClient(
            AdapterEndpoint(args.adapter, timeout_ms=args.timeout_ms, pool_size=args.threads)
        )
    if args.tags:
        tagger = pipeline.FixedTagger(
            TagSet.from_codes(c.strip() for c in args.tags.split(",") if c.strip())
        )
    elif client is not None and args.adapter_role in ("tag", "both"):
        tagger = pipeline.AdapterTagger(client)
    elif args.tag_freq:
        tagger = pipeline.FrequencyTagger.from_json(args.tag_freq, seed)
    else:
        tagger = pipeline.FrequencyTagger.default(seed)
    if client is not None and args.adapter_role in ("corrupt", "both"):
        corruptor = pipeline.AdapterCorruptor(client)
    else:
        corruptor = pipeline.EngineCorruptor(rules)
    job = pipeline.GenerationJob(
        source=pipeline.CorpusSource(args.kind, tuple(args.infile)),
        out_dir=args.out,
        seed=seed,
        tagger=tagger,
        corruptor=corruptor,
        shards=args.shards,
        clean=clean,
        fmt=args.format,
        threads=args.threads,
        overwrite=args.force,
    )
    try:
        manifest = pipeline.generate(job)
    finally:
        if client is not None:
            client.close()
    print(manifest["manifest_path"])
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    correct = _read_lines(args.correct)
    masks = _read_lines(args.masks)
    _require_same_length(args.correct, correct, args.masks, masks)
    corrupted = None
    if args.corrupted:
        corrupted = _read_lines(args.corrupted)
        _require_same_length(args.correct, correct, args.corrupted, corrupted)
    lines = []
    for i, (text, mask) in enumerate(zip(correct, masks)):
        tags = codec.decode_mask(mask.split("\t")[0])
        target = corrupted[i] if corrupted else None
        lines.append(codec.TrainingLine(tags, text, target))
    if args.format == codec.FORMAT_TSV:
        _check_out(args.out, args.force)
        n = codec.write_corpus_tsv(args.out, lines)
    else:
        prefix = Path(args.out)
        _check_out(prefix.with_suffix(".src"), args.force)
        _check_out(prefix.with_suffix(".tgt"), args.force)
        n = codec.write_corpus_split(prefix, lines)
    print(json.dumps({"written": n, "out": str(args.out)}, ensure_ascii=False))
    return 0


def cmd_evaluate_tags(args: argparse.Namespace) -> int:
    pred = _read_label_matrix(args.pred)
    gold = _read_label_matrix(args.gold)
    if not gold.is_binary():
        raise InputContractError("gold file must contain masks or 0/1 rows")
    payload: dict = {}
    if args.sweep:
        sweep = metrics.sweep_threshold(pred, gold, args.step)
        payload["sweep"] = sweep.to_dict()
        threshold = sweep.best_threshold
    else:
        threshold = args.threshold
    binary = pred.binarize(threshold) if not pred.is_binary() or args.sweep else pred.rows.astype(bool)
    report = metrics.evaluate_labels(binary, gold)
    payload.update(report.to_dict())
    payload["threshold"] = threshold
    _emit_json(payload, args.out, args.force)
    return 0


def cmd_evaluate_gec(args: argparse.Namespace) -> int:
    src = _read_lines(args.src)
    hyp = _read_lines(args.hyp)
    ref = _read_lines(args.ref)
    _require_same_length(args.src, src, args.hyp, hyp)
    _require_same_length(args.src, src, args.ref, ref)
    score = metrics.gec_score_corpus(zip(src, hyp, ref))
    bleu = metrics.bleu4_corpus(zip(hyp, ref))
    _emit_json({"gec": score.to_dict(), "bleu": bleu.to_dict(), "n": len(src)}, args.out, args.force)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    pred = _read_label_matrix(args.pred)
    gold = _read_label_matrix(args.gold)
    result = metrics.sweep_threshold(pred, gold, args.step)
    if args.curve_out:
        _check_out(args.curve_out, args.force)
        with open(args.curve_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("threshold\tprecision\trecall\tf1\n")
            for t, p, r, f1 in result.curve:
                fh.write(f"{t:.6g}\t{p:.9f}\t{r:.9f}\t{f1:.9f}\n")
    _emit_json(result.to_dict(), args.out, args.force)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    matrix = _read_label_matrix(args.masks)
    if not matrix.is_binary():
        raise InputContractError("stats expects masks or 0/1 rows")
    _emit_json(pipeline.corpus_stats(matrix), args.out, args.force)
    return 0


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gecforge",
        description="Error-tag annotation, corruption and evaluation for Arabic GEC data.",
    )
    parser.add_argument("--config", help="JSON file with flag defaults", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--force", action="store_true", help="allow overwriting outputs")

    p = sub.add_parser("annotate", help="tag raw/reference sentence pairs")
    p.add_argument("--raw", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", required=True, help="mask TSV output")
    p.add_argument("--rules", default=None, help="extension rule table TSV")
    common(p)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("corrupt", help="corrupt sentences with requested tags")
    p.add_argument("--in", dest="infile", default=None, help="input lines (default stdin)")
    p.add_argument("--out", default=None, help="output lines (default stdout)")
    p.add_argument("--tags", default=None, help="comma-separated tag codes")
    p.add_argument("--mask", default=None, help="26-char a/b mask")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rules", default=None)
    common(p)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("generate", help="build a synthetic parallel corpus")
    p.add_argument("--in", dest="infile", required=True, nargs="+")
    p.add_argument("--kind", choices=[pipeline.KIND_XML, pipeline.KIND_NUMBERED, pipeline.KIND_PLAIN], required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--format", choices=[codec.FORMAT_TSV, codec.FORMAT_SPLIT], default=codec.FORMAT_TSV)
    p.add_argument("--min-words", type=int, default=10)
    p.add_argument("--max-words", type=int, default=400)
    p.add_argument("--strip-social", action="store_true", help="strip links/mentions/hashtags")
    p.add_argument("--tags", default=None, help="fixed tag codes for every sentence")
    p.add_argument("--tag-freq", default=None, help="JSON of per-tag frequencies")
    p.add_argument("--rules", default=None)
    p.add_argument("--adapter", default=None, help="external model command line")
    p.add_argument("--adapter-role", choices=["tag", "corrupt", "both"], default="both")
    p.add_argument("--timeout-ms", type=int, default=30_000)
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("encode", help="encode training lines from parts")
    p.add_argument("--correct", required=True)
    p.add_argument("--masks", required=True)
    p.add_argument("--corrupted", default=None)
    p.add_argument("--format", choices=[codec.FORMAT_TSV, codec.FORMAT_SPLIT], default=codec.FORMAT_TSV)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("evaluate-tags", help="multi-label metrics report")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=cmd_evaluate_tags)

    p = sub.add_parser("evaluate-gec", help="word-edit GEC score plus BLEU-4")
    p.add_argument("--src", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=cmd_evaluate_gec)

    p = sub.add_parser("sweep", help="threshold sweep on probability rows")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--curve-out", default=None, help="TSV of the sweep curve")
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="tag frequency report and class weights")
    p.add_argument("--masks", required=True)
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # Two-pass parse so --config can supply defaults for the chosen subcommand.
    probe, _ = parser.parse_known_args(argv)
    if probe.config:
        try:
            with open(probe.config, encoding="utf-8") as fh:
                overrides = json.load(fh)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 3
        if not isinstance(overrides, dict):
            print("error: config file must hold a JSON object", file=sys.stderr)
            return 2
        parser = build_parser()
        for action in parser._subparsers._group_actions:  # noqa: SLF001
            for sp in action.choices.values():
                sp.set_defaults(**{k: v for k, v in overrides.items()})
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AdapterError as exc:
        print(f"adapter error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
