"""The twelve acceptance criteria, one test each, one verdict line each."""

import pytest

from pcalab.acceptance import CRITERIA, Context, run_criterion


@pytest.fixture(scope="module")
def ctx():
    return Context(seed=7)


@pytest.mark.parametrize("number", [c.number for c in CRITERIA], ids=lambda n: f"criterion-{n:02d}")
def test_criterion(ctx, number, capsys):
    result = run_criterion(number, ctx)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.details
    assert result.within_time, f"{result.elapsed:.2f}s over the {result.limit}s limit"
