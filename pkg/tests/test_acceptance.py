"""Acceptance gate: one test per end-to-end criterion.

The shared artifacts (simulated trajectories, closed-form samples) are
built once per session; each test prints its criterion's pass/fail line
and asserts it.  Expect a few minutes of wall time, dominated by the two
explicit flow simulations.
"""

import pytest

from csflab import verify

_RESULTS: dict[int, verify.CriterionResult] = {}


@pytest.fixture(scope="session")
def results():
    if not _RESULTS:
        for r in verify.run_all():
            _RESULTS[r.id] = r
    return _RESULTS


def _check(results, cid):
    r = results[cid]
    print("\n" + r.line())
    assert r.passed, f"{r.name}: measured {r.measured}, want {r.expected}"


def test_criterion_01_exact_flow_reproduction(results):
    _check(results, 1)


def test_criterion_02_entropy_values(results):
    _check(results, 2)


def test_criterion_03_density_monotonicity(results):
    _check(results, 3)


def test_criterion_04_critical_point_counts(results):
    _check(results, 4)


def test_criterion_05_vertex_curvature_bounds(results):
    _check(results, 5)


def test_criterion_06_translator_asymptotics(results):
    _check(results, 6)


def test_criterion_07_finger_turning_angle(results):
    _check(results, 7)


def test_criterion_08_finger_area(results):
    _check(results, 8)


def test_criterion_09_zero_counts(results):
    _check(results, 9)


def test_criterion_10_graphical_radius(results):
    _check(results, 10)


def test_criterion_11_spectral_invariants(results):
    _check(results, 11)


def test_criterion_12_norm_decay(results):
    _check(results, 12)


def test_criterion_13_localized_density(results):
    _check(results, 13)


def test_criterion_14_negative_controls(results):
    _check(results, 14)
