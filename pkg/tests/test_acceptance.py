"""Acceptance gate: every criterion at its stated tolerance and budget.

Run with ``pytest -s tests/test_acceptance.py`` to see one line per
criterion; the same suite backs ``orbitlab check --all``.
"""

import pytest

from orbitlab.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("cid,name", [(c[0], c[1]) for c in CRITERIA])
def test_criterion(cid, name):
    result = run_criterion(cid)
    print(result.line())
    assert result.passed, result.detail
    assert result.runtime < result.budget, (
        f"criterion {cid} exceeded its {result.budget:.0f}s budget "
        f"({result.runtime:.2f}s)"
    )
