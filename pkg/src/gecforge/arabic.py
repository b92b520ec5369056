"""Arabic character classes used by the annotation rules and the corruption engine."""

from __future__ import annotations

# Sentence punctuation recognized by the tokenizer. Arabic comma, semicolon and
# question mark rank equally with their ASCII counterparts.
PUNCTUATION = (".", ",", "،", "؛", "؟", "!", ":", '"', "(", ")")
PUNCTUATION_SET = frozenset(PUNCTUATION)

# Marks eligible for the no-space-before / one-space-after rule. Quotes and
# brackets are excluded: their spacing depends on pairing direction.
SPACING_MARKS = frozenset({".", ",", "،", "؛", "؟", "!", ":"})

# ASCII -> Arabic punctuation shapes, applied between Arabic words.
ARABIC_SHAPE = {",": "،", ";": "؛", "?": "؟"}

HAMZA_FAMILY = frozenset("اأإآءؤئ")

# Hamza-seat carriers whose hamza is commonly dropped in raw text.
HAMZA_SEATED_ALIF = ("أ", "إ", "آ")

ALIF = "ا"
ALIF_MAQSURA = "ى"
YA = "ي"
WAW = "و"
TA_MARBUTA = "ة"
HA = "ه"
TA = "ت"
NOON = "ن"
TANWIN_FATHA = "ً"  # ً

LONG_VOWELS = frozenset({ALIF, WAW, YA})

_ARABIC_BLOCKS = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)


def is_arabic_char(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _ARABIC_BLOCKS)


def is_arabic_letter(ch: str) -> bool:
    return is_arabic_char(ch) and ch not in PUNCTUATION_SET and not ch.isdigit()


def has_arabic_letter(token: str) -> bool:
    return any(is_arabic_letter(ch) for ch in token)


# Neighbouring keys on the standard Arabic 101 keyboard, restricted to plain
# consonants so that a slipped finger never fabricates a hamza/ta-marbuta/defective
# vowel confusion (those belong to other error classes).
_KEY_ROWS = (
    "ضصثقفغعخحجد",
    "شسبلتنمكط",
    "رزظ",
)

KEYBOARD_NEIGHBOURS: dict[str, tuple[str, ...]] = {}
for _row in _KEY_ROWS:
    for _i, _ch in enumerate(_row):
        _adj = []
        if _i > 0:
            _adj.append(_row[_i - 1])
        if _i + 1 < len(_row):
            _adj.append(_row[_i + 1])
        KEYBOARD_NEIGHBOURS[_ch] = tuple(_adj)
