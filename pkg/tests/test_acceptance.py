"""Seeded acceptance corpus: one PASS/FAIL line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the summary lines.
"""
import pytest

from polydensity import acceptance

SEED = 42
NUMBERS = list(range(1, 12))
# full-corpus wall-clock budget in seconds
TOTAL_BUDGET = 300.0


@pytest.fixture(scope="module")
def results():
    out = {}

    def show(c):
        print(f"\n{c.line()}  ({c.seconds:.1f}s, budget {c.budget:g}s)")

    for c in acceptance.run(seed=SEED, progress=show):
        out[c.number] = c
    return out


@pytest.mark.parametrize("number", NUMBERS)
def test_criterion(results, number):
    c = results[number]
    assert c.passed, f"{c.line()} detail={c.detail}"


@pytest.mark.parametrize("number", NUMBERS)
def test_criterion_runtime(results, number):
    c = results[number]
    assert c.seconds < c.budget, f"criterion {number} took {c.seconds:.1f}s, budget {c.budget:g}s"


def test_total_runtime(results):
    assert sum(c.seconds for c in results.values()) < TOTAL_BUDGET
