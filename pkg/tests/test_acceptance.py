"""Acceptance criteria 1-9, one test each.

Every test prints a single PASS/FAIL line; the lines are repeated at the
end of the pytest run.  Criteria 1-8 run with VARLEX_THREADS=4 here and
are rerun with VARLEX_THREADS=1 in a subprocess for criterion 9.
"""
import pytest

import acceptance_runs as A

pytestmark = pytest.mark.acceptance

THREADS, OTHER_THREADS = 4, 1
OUTCOMES = {}


@pytest.fixture(autouse=True)
def _threads(monkeypatch):
    monkeypatch.setenv("VARLEX_THREADS", str(THREADS))


def _report(outcome):
    OUTCOMES[outcome.number] = outcome
    A.SUMMARY.append(outcome.line())
    print(outcome.line())
    assert outcome.passed, outcome.line()


def test_criterion_1_lemma_exactness():
    _report(A.criterion_1())


def test_criterion_2_composite_modular_identity():
    _report(A.criterion_2())


def test_criterion_3_luxemburg_norm():
    _report(A.criterion_3())


def test_criterion_4_oracle_equivalence():
    _report(A.criterion_4())


def test_criterion_5_operator_properties():
    _report(A.criterion_5())


def test_criterion_6_exponent_machinery():
    _report(A.criterion_6())


def test_criterion_7_proposition_stability():
    _report(A.criterion_7())


def test_criterion_8_bound_sweep():
    _report(A.criterion_8())


def test_criterion_9_determinism():
    outcomes = [OUTCOMES.get(i + 1) or fn() for i, fn in enumerate(A.CRITERIA)]
    _report(A.criterion_9(outcomes, THREADS, OTHER_THREADS))
