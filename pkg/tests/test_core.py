import pytest
from hypothesis import given, strategies as st

from gecforge.core import (
    ALL_TAGS,
    LabelMatrix,
    NUM_TAGS,
    ParallelExample,
    Sentence,
    TAG_CODES,
    TagSet,
    join_tokens,
    tag_category,
    tag_index,
    tokenize,
)
from gecforge.errors import ShapeError, UnknownTagError


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_splits_punctuation():
    assert tokenize("ذهب الولد.") == ["ذهب", "الولد", "."]
    assert tokenize("هل جئت؟") == ["هل", "جئت", "؟"]


def test_tokenize_conserves_characters():
    text = "ذهب الولد، إلى (المدرسة)!"
    tokens = tokenize(text)
    assert "".join(tokens) == text.replace(" ", "")


ARABIC_CHARS = "ابتثجحخدذرزسشصضطظعغفقكلمنهويةىءأإآؤئ"


@given(st.text(alphabet=ARABIC_CHARS + " .،؟!\"()", max_size=60))
def test_tokenize_join_idempotent(text):
    tokens = tokenize(text)
    assert tokenize(join_tokens(tokens)) == tokens


def test_tag_index_canonical_order():
    assert tag_index("OA") == 0
    assert tag_index("OW") == 10
    assert tag_index("MI") == 11
    assert tag_index("XC") == 13
    assert tag_index("SF") == 19
    assert tag_index("PM") == 22
    assert tag_index("SP") == 25


def test_tag_index_bijection():
    seen = {tag_index(code) for code in TAG_CODES}
    assert seen == set(range(NUM_TAGS))


def test_tag_index_unknown():
    with pytest.raises(UnknownTagError):
        tag_index("ZZ")


def test_category_sizes():
    sizes = {}
    for tag in ALL_TAGS:
        sizes[tag.category] = sizes.get(tag.category, 0) + 1
    assert sizes == {
        "Orthography": 11,
        "Morphology": 2,
        "Syntax": 6,
        "Semantics": 2,
        "Punctuation": 3,
        "Merge": 1,
        "Split": 1,
    }


def test_error_tag_category_mismatch_rejected():
    with pytest.raises(UnknownTagError):
        from gecforge.core import ErrorTag

        ErrorTag("OA", "Punctuation")


def test_tagset_roundtrip_codes():
    ts = TagSet.from_codes(["PM", "SP", "OH"])
    assert set(ts.codes()) == {"PM", "SP", "OH"}
    assert "PM" in ts and "OA" not in ts
    assert len(ts) == 3
    assert TagSet.from_bits(ts.bits) == ts


def test_tagset_set_algebra():
    a = TagSet.from_codes(["OH", "PM"])
    b = TagSet.from_codes(["PM", "SP"])
    assert set((a | b).codes()) == {"OH", "PM", "SP"}
    assert set((a & b).codes()) == {"PM"}
    assert set((a - b).codes()) == {"OH"}


def test_sentence_from_text_and_tokens():
    s = Sentence.from_text("ذهب الولد.")
    assert s.tokens == ("ذهب", "الولد", ".")
    assert Sentence.from_tokens(s.tokens).text == "ذهب الولد ."


def test_parallel_example_requires_tags_when_different():
    correct = Sentence.from_text("ذهب الولد")
    corrupted = Sentence.from_text("ذهب الولدد")
    with pytest.raises(ShapeError):
        ParallelExample(correct, corrupted, TagSet())
    ParallelExample(correct, corrupted, TagSet.from_codes(["OD"]))
    ParallelExample(correct, correct, TagSet())


def test_label_matrix_validation():
    with pytest.raises(ShapeError):
        LabelMatrix([[0.5] * 10])
    with pytest.raises(ShapeError):
        LabelMatrix([[1.5] + [0.0] * (NUM_TAGS - 1)])
    m = LabelMatrix.from_tagsets([TagSet.from_codes(["OA"]), TagSet()])
    assert m.n == 2
    assert m.is_binary()
    assert m.tagsets()[0] == TagSet.from_codes(["OA"])
