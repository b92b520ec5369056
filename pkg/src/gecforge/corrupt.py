"""Tag-conditioned corruption of correct sentences.

For every requested tag the planner enumerates the concrete injections that
would make the annotation side read that tag back (one deterministic injection
family per tag, listed below), picks one site uniformly with a counter-based
PRNG keyed by (seed, sentence ordinal, tag slot), and records a step. Tags
with no applicable site are reported unfulfilled, never faked.

Built-in injections (19 tags):

    OH  strip the hamza seat off one of أ/إ/آ
    OA  toggle the final defective vowel (ي <-> ى)
    OT  toggle the final ta-marbuta (ة <-> ه)
    OW  drop or append the alif fariqa after a final waw
    ON  rewrite a tanwin fatha as nun, or drop it
    OC  swap two adjacent characters
    OD  duplicate a character
    OM  delete a non-initial character
    OG  insert a long alif after a consonant
    OS  delete a medial long vowel
    OR  substitute a character with a keyboard neighbour
    PC  replace a punctuation mark with a different one
    PM  delete a punctuation token
    PT  duplicate a punctuation token
    MG  split a word of 6+ characters at an interior position
    SP  join two adjacent word tokens
    XM  delete a non-initial word
    XT  insert a duplicate of a word
    SW  replace a word with a distant word from the same sentence

MI MT XC XF XG XN SF need a lexicon; they are injectable only through a
substitution table (the annotation RuleTable, applied in reverse) and are
otherwise unfulfilled. Orientation matches the annotation side exactly, so
annotating (corrupted, correct) recovers the injected tags.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rng
from .annotate import RuleTable, classify_word_replacement
from .arabic import (
    ALIF,
    ALIF_MAQSURA,
    HA,
    HAMZA_SEATED_ALIF,
    KEYBOARD_NEIGHBOURS,
    LONG_VOWELS,
    NOON,
    PUNCTUATION,
    TA_MARBUTA,
    TANWIN_FATHA,
    WAW,
    YA,
    is_arabic_letter,
)
from .core import Sentence, TAG_CODES, TagSet, is_punct_token
from .errors import InvalidPlanError

LEXICON_ONLY_TAGS = frozenset({"MI", "MT", "XC", "XF", "XG", "XN", "SF"})
INJECTABLE_TAGS = tuple(c for c in TAG_CODES if c not in LEXICON_ONLY_TAGS)

REWRITE = "rewrite"
DELETE = "delete"
INSERT = "insert"
SPLIT = "split"
JOIN = "join"


@dataclass(frozen=True)
class CorruptionStep:
    """One token-list edit: tokens[index : index+len(before)] -> after."""

    tag: str
    action: str
    index: int
    before: tuple[str, ...]
    after: tuple[str, ...]


@dataclass(frozen=True)
class CorruptionPlan:
    steps: tuple[CorruptionStep, ...]
    seed: int


@dataclass(frozen=True)
class CorruptionReport:
    fulfilled: TagSet
    unfulfilled: TagSet
    plan: CorruptionPlan


def _rewrite(tag: str, i: int, old: str, new: str) -> CorruptionStep:
    return CorruptionStep(tag, REWRITE, i, (old,), (new,))


def _word_sites(tag: str, i: int, tok: str) -> list[CorruptionStep]:
    """Candidate single-word rewrites for one token, verified to read back."""
    out: list[CorruptionStep] = []

    def add(new: str) -> None:
        if new != tok and classify_word_replacement(new, tok) == {tag}:
            out.append(_rewrite(tag, i, tok, new))

    if tag == "OH":
        for p, ch in enumerate(tok):
            if ch in HAMZA_SEATED_ALIF:
                add(tok[:p] + ALIF + tok[p + 1 :])
    elif tag == "OA":
        if tok.endswith(YA):
            add(tok[:-1] + ALIF_MAQSURA)
        elif tok.endswith(ALIF_MAQSURA):
            add(tok[:-1] + YA)
    elif tag == "OT":
        if tok.endswith(TA_MARBUTA):
            add(tok[:-1] + HA)
        elif tok.endswith(HA):
            add(tok[:-1] + TA_MARBUTA)
    elif tag == "OW":
        if tok.endswith(WAW + ALIF):
            add(tok[:-1])
        elif tok.endswith(WAW) and len(tok) >= 2:
            add(tok + ALIF)
    elif tag == "ON":
        for p, ch in enumerate(tok):
            if ch == TANWIN_FATHA:
                add(tok[:p] + NOON + tok[p + 1 :])
                add(tok[:p] + tok[p + 1 :])
    elif tag == "OC":
        for p in range(len(tok) - 1):
            if tok[p] != tok[p + 1]:
                add(tok[:p] + tok[p + 1] + tok[p] + tok[p + 2 :])
    elif tag == "OD":
        for p, ch in enumerate(tok):
            add(tok[: p + 1] + ch + tok[p + 1 :])
    elif tag == "OM":
        if len(tok) >= 2:
            for p in range(1, len(tok)):
                add(tok[:p] + tok[p + 1 :])
    elif tag == "OG":
        for p, ch in enumerate(tok):
            if is_arabic_letter(ch) and ch not in LONG_VOWELS:
                add(tok[: p + 1] + ALIF + tok[p + 1 :])
    elif tag == "OS":
        for p in range(1, len(tok) - 1):
            if tok[p] in LONG_VOWELS:
                add(tok[:p] + tok[p + 1 :])
    elif tag == "OR":
        for p, ch in enumerate(tok):
            for nb in KEYBOARD_NEIGHBOURS.get(ch, ()):
                add(tok[:p] + nb + tok[p + 1 :])
    return out


def _sites(tag: str, tokens: list[str], rules: RuleTable | None) -> list[CorruptionStep]:
    word_idx = [i for i, t in enumerate(tokens) if not is_punct_token(t)]
    punct_idx = [i for i, t in enumerate(tokens) if is_punct_token(t)]
    out: list[CorruptionStep] = []

    if tag == "PC":
        for i in punct_idx:
            for mark in PUNCTUATION:
                if mark != tokens[i]:
                    out.append(_rewrite(tag, i, tokens[i], mark))
    elif tag == "PM":
        for i in punct_idx:
            out.append(CorruptionStep(tag, DELETE, i, (tokens[i],), ()))
    elif tag == "PT":
        for i in punct_idx:
            out.append(CorruptionStep(tag, INSERT, i + 1, (), (tokens[i],)))
    elif tag == "MG":
        for i in word_idx:
            tok = tokens[i]
            if len(tok) >= 6:
                for p in range(1, len(tok)):
                    out.append(CorruptionStep(tag, SPLIT, i, (tok,), (tok[:p], tok[p:])))
    elif tag == "SP":
        for i in range(len(tokens) - 1):
            if not is_punct_token(tokens[i]) and not is_punct_token(tokens[i + 1]):
                out.append(
                    CorruptionStep(
                        tag, JOIN, i, (tokens[i], tokens[i + 1]), (tokens[i] + tokens[i + 1],)
                    )
                )
    elif tag == "XM":
        for i in word_idx:
            if i >= 1:
                out.append(CorruptionStep(tag, DELETE, i, (tokens[i],), ()))
    elif tag == "XT":
        for i in word_idx:
            out.append(CorruptionStep(tag, INSERT, i + 1, (), (tokens[i],)))
    elif tag == "SW":
        for i in word_idx:
            for j in word_idx:
                if i != j and tokens[i] != tokens[j]:
                    if classify_word_replacement(tokens[j], tokens[i]) == {"SW"}:
                        out.append(_rewrite(tag, i, tokens[i], tokens[j]))
    else:
        for i in word_idx:
            out.extend(_word_sites(tag, i, tokens[i]))

    if rules is not None:
        # Substitution table applied in reverse: plant the raw form where the
        # reference form occurs.
        for raw_form, ref_form in rules.pairs_for_tag(tag):
            for i, tok in enumerate(tokens):
                if tok == ref_form and raw_form != ref_form:
                    out.append(_rewrite(tag, i, tok, raw_form))
    return out


def _apply_step(tokens: list[str], step: CorruptionStep) -> None:
    end = step.index + len(step.before)
    if step.index < 0 or end > len(tokens):
        raise InvalidPlanError(f"step index {step.index} out of range for {len(tokens)} tokens")
    if tuple(tokens[step.index : end]) != step.before:
        raise InvalidPlanError(
            f"plan expected {step.before!r} at index {step.index}, "
            f"found {tuple(tokens[step.index:end])!r}"
        )
    tokens[step.index : end] = list(step.after)


def plan(
    correct: Sentence | str,
    tags: TagSet,
    seed: int,
    rules: RuleTable | None = None,
    ordinal: int = 0,
) -> tuple[CorruptionPlan, CorruptionReport]:
    """Choose one injection site per requested tag; unfillable tags are reported."""
    if isinstance(correct, str):
        correct = Sentence.from_text(correct)
    tokens = list(correct.tokens)
    steps: list[CorruptionStep] = []
    fulfilled: set[str] = set()
    unfulfilled: set[str] = set()
    # Token positions already carrying an injected error. Later steps may not
    # consume them: deleting, joining or rewriting an already-corrupted token
    # would erase the earlier tag's evidence and make the reported tag set lie.
    # Word insertions/deletions (XT, XM) additionally keep one token of
    # distance, because changing the token count right next to a corrupted
    # word lets the aligner absorb that word into a merge or split.
    touched: set[int] = set()
    for slot, code in enumerate(TAG_CODES):
        if code not in tags:
            continue
        buffer = 2 if code in ("XT", "XM") else 0
        candidates = [
            c
            for c in _sites(code, tokens, rules)
            if all(
                idx not in touched
                for idx in range(c.index - buffer, c.index + len(c.before) + buffer)
            )
        ]
        if not candidates:
            unfulfilled.add(code)
            continue
        step = candidates[rng.choose(len(candidates), seed, ordinal, slot)]
        steps.append(step)
        _apply_step(tokens, step)
        fulfilled.add(code)
        delta = len(step.after) - len(step.before)
        touched = {
            idx + delta if idx >= step.index + len(step.before) else idx for idx in touched
        }
        # Deletions produce no tokens; mark the seam (the successor position)
        # so later structural steps keep away from it.
        touched.update(range(step.index, step.index + max(len(step.after), 1)))
        if code == "XT":
            # Consuming either neighbour of an inserted duplicate invites the
            # aligner to merge the pair away; fence the copy off.
            touched.update((step.index - 1, step.index + 1))
    built = CorruptionPlan(tuple(steps), seed)
    report = CorruptionReport(
        fulfilled=TagSet.from_codes(fulfilled),
        unfulfilled=TagSet.from_codes(unfulfilled),
        plan=built,
    )
    return built, report


def apply(correct: Sentence | str, built: CorruptionPlan) -> Sentence:
    """Replay a plan against the sentence it was built for."""
    if isinstance(correct, str):
        correct = Sentence.from_text(correct)
    if not built.steps:
        return correct
    tokens = list(correct.tokens)
    for step in built.steps:
        _apply_step(tokens, step)
    return Sentence.from_tokens(tokens)


def corrupt(
    correct: Sentence | str,
    tags: TagSet,
    seed: int,
    rules: RuleTable | None = None,
    ordinal: int = 0,
) -> tuple[Sentence, CorruptionReport]:
    """Corrupt a sentence so it exhibits the requested error tags."""
    if isinstance(correct, str):
        correct = Sentence.from_text(correct)
    built, report = plan(correct, tags, seed, rules, ordinal)
    return apply(correct, built), report
