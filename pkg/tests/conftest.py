import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def pairs_20() -> list[tuple[str, str]]:
    pairs = []
    for line in (FIXTURES / "pairs_20.tsv").read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        raw, ref = line.split("\t")
        pairs.append((raw, ref))
    return pairs


@pytest.fixture
def roundtrip_sentences() -> list[str]:
    return (FIXTURES / "roundtrip_200.txt").read_text(encoding="utf-8").splitlines()
