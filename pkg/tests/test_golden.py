"""Every stored output under corpus/*/expected must be reproduced exactly."""

import json

import pytest

from stackymirror import io
from stackymirror.cli import run

from conftest import CORPUS

CASES = sorted((d.parent.name, f.stem) for d in CORPUS.glob("*/expected") for f in d.glob("*.json"))


@pytest.mark.parametrize("example,command", CASES, ids=[f"{e}-{c}" for e, c in CASES])
def test_matches_stored_output(example, command):
    expected = json.loads((CORPUS / example / "expected" / f"{command}.json").read_text())
    got = json.loads(io.dumps(run(command, str(CORPUS / example / "input.json"))))
    assert got == expected


def test_every_example_is_covered():
    examples = {p.parent.name for p in CORPUS.glob("*/input.json")}
    assert examples == {e for e, _ in CASES}


@pytest.mark.parametrize("example", ["bmu3", "p2", "p_2_2"])
def test_series_round_trip(example):
    doc = run("ifunction", str(CORPUS / example / "input.json"))["result"]["series"]
    s = io.series_from_doc(doc)
    assert io.series_to_doc(s) == doc
