"""Acceptance criteria 1-7, each at its pinned tolerance.

Every test prints one ``[PASS]``/``[FAIL]`` line (visible with ``pytest -s``
or in the captured output of a failure).
"""

import pytest

from lorentz_curves import acceptance


@pytest.mark.parametrize("criterion", acceptance.CRITERIA,
                         ids=[f"criterion_{i + 1}" for i in range(len(acceptance.CRITERIA))])
def test_criterion(criterion):
    result = criterion()
    print(result.line())
    assert result.passed, result.line()


def test_table_format():
    rows = [acceptance.CriterionResult(1, "x", True, "ok"),
            acceptance.CriterionResult(2, "y", False, "bad")]
    table = acceptance.format_table(rows)
    assert table.splitlines() == ["[PASS] 1. x: ok", "[FAIL] 2. y: bad", "1/2 criteria passed"]
