"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""

import pytest

from dilators.acceptance import CRITERIA, run_criterion

_LINES: list[str] = []


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"{c[0]:02d}-{c[1].replace(' ', '-')}" for c in CRITERIA])
def test_criterion(number):
    result = run_criterion(number)
    line = result.line()
    print(line)
    _LINES.append(line)
    assert result.passed, line

