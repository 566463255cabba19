from __future__ import annotations

import json
from pathlib import Path

import pytest

from gdpdesk.parser import parse_advisory

TESTDATA = Path(__file__).resolve().parent.parent / "testdata"


def load_fixture(name: str) -> str:
    return (TESTDATA / name).read_text(encoding="utf-8")


def load_expected(name: str) -> dict:
    return json.loads((TESTDATA / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def ewr_text() -> str:
    return load_fixture("ewr_20221118.txt")


@pytest.fixture(scope="session")
def sfo_text() -> str:
    return load_fixture("sfo_20181115.txt")


@pytest.fixture(scope="session")
def cancellation_text() -> str:
    return load_fixture("sfo_cancellation.txt")


@pytest.fixture(scope="session")
def superlative_texts() -> list[str]:
    names = ("sfo_784.txt", "sfo_1444.txt", "sfo_105.txt")
    return [load_fixture(f"superlative/{n}") for n in names]


@pytest.fixture(scope="session")
def ewr_record(ewr_text):
    outcome = parse_advisory(ewr_text)
    assert outcome.ok, outcome.fatal
    return outcome.record


@pytest.fixture(scope="session")
def sfo_record(sfo_text):
    outcome = parse_advisory(sfo_text)
    assert outcome.ok, outcome.fatal
    return outcome.record
