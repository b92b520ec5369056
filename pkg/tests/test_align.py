from fractions import Fraction

from hypothesis import given, settings, strategies as st

from gecforge.align import (
    KEEP,
    MERGE,
    SPLIT,
    align,
    char_edit_script,
    levenshtein,
    normalized_levenshtein,
)
from oracles import brute_force_align_cost, naive_levenshtein


def kinds(alignment):
    return [op.kind for op in alignment.ops]


def test_identity_alignment():
    a = align(["ذهب", "الولد"], ["ذهب", "الولد"])
    assert kinds(a) == [KEEP, KEEP]
    assert a.total_cost == 0


def test_merge_is_cheapest():
    a = align(["عبد", "الله"], ["عبدالله"])
    assert kinds(a) == [MERGE]
    assert a.ops[0].src_span == (0, 2)
    assert a.ops[0].tgt_span == (0, 1)
    assert a.total_cost == Fraction(1, 10)


def test_split_is_cheapest():
    a = align(["ذهبوا"], ["ذهب", "وا"])
    assert kinds(a) == [SPLIT]
    assert a.total_cost == Fraction(1, 10)


def test_total_cost_is_exact_sum():
    a = align(["عبد", "الله", "ذهب", "الي"], ["عبدالله", "ذهب", "إلى"])
    assert a.total_cost == sum((op.cost for op in a.ops), Fraction(0))


def test_replay_reconstructs_reference():
    raw = ["عبد", "الله", "ذهب", "الي", "المدرسه"]
    ref = ["عبدالله", "ذهب", "إلى", "المدرسة"]
    assert align(raw, ref).replay(raw, ref) == ref


def test_duplicate_word_is_delete_not_merge():
    a = align(["كتب", "كتب", "الدرس"], ["كتب", "الدرس"])
    assert kinds(a) == [KEEP, "delete", KEEP]


def test_punctuation_insert_not_split():
    a = align(["ذهب", "الولد"], ["ذهب", "الولد", "."])
    assert kinds(a) == [KEEP, KEEP, "insert"]


def test_keep_before_delete_on_tie():
    a = align(["و", "و"], ["و"])
    assert kinds(a) == [KEEP, "delete"]


TOKENS = ["ذهب", "الولد", "ال", "ولد", "كتب", "درس", "كتبدرس", ".", "،", "إلى", "الي", "في"]


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.sampled_from(TOKENS), max_size=4).map(tuple),
    st.lists(st.sampled_from(TOKENS), max_size=4).map(tuple),
)
def test_align_matches_brute_force(raw, ref):
    assert align(raw, ref).total_cost == brute_force_align_cost(raw, ref)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.sampled_from(TOKENS), max_size=5).map(tuple),
    st.lists(st.sampled_from(TOKENS), max_size=5).map(tuple),
)
def test_align_replay_property(raw, ref):
    alignment = align(raw, ref)
    assert alignment.replay(raw, ref) == list(ref)
    spans_src = [op.src_span for op in alignment.ops]
    covered = [idx for span in spans_src for idx in range(*span)]
    assert covered == list(range(len(raw)))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=5))
def test_align_self_is_all_keeps(tokens):
    alignment = align(tokens, tokens)
    assert all(op.kind == KEEP for op in alignment.ops)
    assert alignment.total_cost == 0


# --- character edit scripts -----------------------------------------------


def test_char_script_hamza_sub():
    script = char_edit_script("احمد", "أحمد")
    edits = script.edits()
    assert len(edits) == 1
    assert edits[0].kind == "sub"
    assert edits[0].src_pos == 0
    assert (edits[0].src_char, edits[0].tgt_char) == ("ا", "أ")


def test_char_script_identity():
    script = char_edit_script("كتاب", "كتاب")
    assert script.distance == 0
    assert len(script.ops) == 4


def test_char_script_insertion():
    script = char_edit_script("كتب", "كتاب")
    edits = script.edits()
    assert len(edits) == 1
    assert edits[0].kind == "ins"
    assert edits[0].tgt_pos == 2
    assert edits[0].tgt_char == "ا"


def test_char_script_prefers_sub_over_del_ins():
    script = char_edit_script("اب", "با")
    assert [op.kind for op in script.edits()] == ["sub", "sub"]


WORDS = st.text(alphabet="ابتكلمدرسوية", max_size=8)


@settings(max_examples=200, deadline=None)
@given(WORDS, WORDS)
def test_char_script_applies_and_is_minimal(a, b):
    script = char_edit_script(a, b)
    assert script.apply(a) == b
    assert script.distance == naive_levenshtein(a, b)
    assert levenshtein(a, b) == naive_levenshtein(a, b)


@given(WORDS, WORDS)
def test_normalized_levenshtein_bounds(a, b):
    d = normalized_levenshtein(a, b)
    assert 0 <= d <= 1
    if a != b:
        assert d > 0
