import pytest

from stribola.suites import SUITES, Outcome, run_suite


@pytest.mark.parametrize("name", ["inverse", "operators"])
def test_fast_suites_pass(name):
    outcomes = run_suite(name, 512)
    assert outcomes and all(isinstance(o, Outcome) for o in outcomes)
    assert [o.name for o in outcomes if not o.passed] == []


def test_outcome_text():
    assert str(Outcome("x ≤ 1", True, "ok")) == "x ≤ 1: pass (ok)"
    assert str(Outcome("x ≤ 1", False)).startswith("x ≤ 1: FAIL")


def test_unknown_suite():
    assert "lemmas" in SUITES
    with pytest.raises(KeyError):
        run_suite("nope")
