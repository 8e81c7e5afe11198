"""Acceptance gate: every numbered criterion runs at its stated tolerance.

Each test executes one criterion from the registry and prints its
PASS/FAIL line (visible with `pytest -s` or on failure), then asserts.
"""

import pytest

from liedeg import acceptance


@pytest.mark.parametrize(
    "cid,name",
    [(cid, name) for cid, name, _fn, _budget in acceptance.CRITERIA],
    ids=[f"{cid:02d}-{name.replace(' ', '-')}"
         for cid, name, _fn, _budget in acceptance.CRITERIA])
def test_criterion(cid, name):
    result = acceptance.run_one(cid)
    print(result.line())
    assert result.passed, result.line()


def test_registry_is_complete():
    cids = [cid for cid, _n, _f, _b in acceptance.CRITERIA]
    assert cids == list(range(1, 13))
