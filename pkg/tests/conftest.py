from __future__ import annotations

from pathlib import Path

import pytest

from btlint.bts import parse_bts
from btlint.similarity import default_strategy

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
MICROWAVE = FIXTURES / "microwave.bts"
TABLE1_DECISIONS = FIXTURES / "table1.decisions.json"


@pytest.fixture(scope="session")
def strategy():
    return default_strategy()


@pytest.fixture(scope="session")
def microwave():
    return parse_bts(MICROWAVE.read_text("utf-8"), str(MICROWAVE))
