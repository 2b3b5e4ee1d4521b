from functools import lru_cache
from pathlib import Path

import pytest

from stackymirror import io

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
EXAMPLES = sorted(p.name for p in CORPUS.iterdir() if (p / "input.json").exists())


@lru_cache(maxsize=None)
def load(name: str, **overrides) -> io.Problem:
    return io.Problem.from_file(CORPUS / name / "input.json", **overrides)


@pytest.fixture
def corpus_path():
    return lambda name: str(CORPUS / name / "input.json")


ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
