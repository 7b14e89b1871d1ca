"""The ten end-to-end acceptance criteria, each at its stated tolerance."""

from __future__ import annotations

import time

import pytest

from nevlab.acceptance import SUITES, run_criterion

RESULTS = []


@pytest.mark.parametrize("name", list(SUITES))
def test_criterion(name):
    result = run_criterion(name)
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.detail


def test_full_suite_wall_time():
    # every criterion has run above; the whole suite must fit in five minutes
    if len(RESULTS) < len(SUITES):
        pytest.skip("run together with the per-criterion tests")
    assert sum(r.seconds for r in RESULTS) < 300.0
