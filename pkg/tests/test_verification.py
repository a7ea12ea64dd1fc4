import pytest

from i4mirror.verification import CHECKS, run_suite

FAST_CHECKS = [
    "phi-charts",
    "phi-convexity",
    "phi-difference-bound",
    "bryan-leung",
    "j-invariant",
    "theta-identities",
    "modular",
    "discriminant",
]


@pytest.mark.parametrize("name", FAST_CHECKS)
def test_fast_check_passes(run_config, name):
    entry = CHECKS[name](run_config, True)
    assert entry.passed, (entry.lhs, entry.rhs)
    assert entry.status != "FAILED"


def test_difference_bound_reports_literal_failures(run_config):
    entry = CHECKS["phi-difference-bound"](run_config, True)
    assert 9 in entry.detail["literal_fails_at"]
    assert entry.detail["failed"] == []


def test_every_check_is_named_in_the_suite():
    assert len(CHECKS) == 19
    assert list(CHECKS)[0] == "phi-charts"


@pytest.mark.slow
def test_quick_suite(run_config):
    results = dict(run_suite(run_config, quick=True))
    assert set(results) == set(CHECKS)
    failed = {name: (entry.lhs, entry.rhs) for name, entry in results.items() if not entry.passed}
    assert not failed
