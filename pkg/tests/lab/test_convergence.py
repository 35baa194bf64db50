# tests/lab/test_convergence.py

import math

import pytest
from numpy.testing import assert_allclose

from src.errors import BadParams
from src.lab.convergence import STUDIES, add_trend_checks, run_convergence, smoothed, trend_decreasing
from src.models.report import ExperimentReport


def test_smoothed_moving_average():
    """
    Tests the three-point moving average and short series passthrough.
    """
    assert_allclose(smoothed([3.0, 2.0, 4.0, 1.0]), [3.0, 7.0 / 3.0])
    assert_allclose(smoothed([1.0, 2.0]), [1.0, 2.0])


@pytest.mark.parametrize(
    "series, expected",
    [
        ([1.0, 0.5, 0.25, 0.125], True),
        ([1.0, 0.4, 0.5, 0.2, 0.1], True),
        ([1.0, 0.5, 0.5, 0.5, 0.5], False),
        ([0.1, 0.2, 0.3, 0.4], False),
    ],
)
def test_trend_decreasing(series, expected):
    """
    Tests that noise is tolerated while flat or rising trends are not.
    """
    assert trend_decreasing(series) is expected


def test_add_trend_checks():
    """
    Tests the recorded series and the trend and final checks.
    """
    report = ExperimentReport("r")
    add_trend_checks(report, "gap", [1.0, 0.5, 0.2, 0.1], threshold=0.15)
    assert report.series["gap"] == [1.0, 0.5, 0.2, 0.1]
    assert [c.name for c in report.checks] == ["gap_smoothed_decreasing", "gap_final"]
    assert report.passed
    add_trend_checks(report, "other", [1.0, 0.5, 0.2, 0.1], threshold=0.05)
    assert not report.passed


def test_ex_a_study():
    """
    Tests the exA study on a reduced grid and sweep.
    """
    report = run_convergence(
        "exA",
        {"grid": 2001, "sweep": [4, 8, 16, 32, 64], "threshold": 0.25, "pointwise_n": 256},
    )
    assert report.passed, [c.describe() for c in report.violations()]
    assert report.name == "convergence_exA"
    assert report.series["n"] == [4.0, 8.0, 16.0, 32.0, 64.0]
    for name in ("ordered_w1q", "rho_w1q", "speed_gap_lq", "energy_gap", "lipschitz_gap_off_kink"):
        assert len(report.series[name]) == 5
    assert report.scalars["pointwise_fraction"] <= 0.02
    assert report.scalars["pointwise_sup"] >= 0.25


def test_ex_a_study_derivative_rate():
    """
    Tests that the ordered W^{1,2} distance roughly halves when n grows fourfold.
    """
    report = run_convergence("exA", {"grid": 4001, "sweep": [16, 64], "threshold": 1.0})
    first, second = report.series["ordered_w1q"]
    assert second / first == pytest.approx(0.5, abs=0.1)


@pytest.mark.parametrize("study", ["random", "kappa"])
def test_random_family_studies(study):
    """
    Tests the random Hermitian and condition number studies.
    """
    report = run_convergence(study, {"grid": 51, "sweep": [4, 8, 16, 32], "threshold": 0.5, "seed": 0})
    assert report.passed, [c.describe() for c in report.violations()]
    assert report.seed == 0


def test_kappa_study_records_sigma_min():
    """
    Tests that the kappa study keeps sigma_min away from zero.
    """
    report = run_convergence("kappa", {"grid": 21, "sweep": [8, 16], "threshold": 1.0})
    assert report.scalars["sigma_min_limit"] > 1.0
    assert min(report.series["sigma_min"]) > 0.5


def test_area_study():
    """
    Tests that the eigenvalue graph area approaches 2 sqrt(2) from below.
    """
    report = run_convergence("area", {"grid": 1001, "sweep": [4, 8, 16, 32], "threshold": 0.05})
    assert report.passed, [c.describe() for c in report.violations()]
    assert report.scalars["area_limit"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    assert report.series["area_deficit"][-1] == pytest.approx(1.19 / 32, rel=0.1)


@pytest.mark.parametrize(
    "study, params",
    [
        ("spectral", None),
        ("area", {"sweep": [8]}),
        ("area", {"sweep": [8, 4]}),
        ("area", {"grid": 2}),
        ("exA", {"q": 0.5}),
    ],
)
def test_convergence_rejects_bad_params(study, params):
    """
    Tests the BadParams cases of run_convergence.
    """
    with pytest.raises(BadParams):
        run_convergence(study, params)


def test_studies_are_listed():
    """
    Tests the study names accepted by the CLI.
    """
    assert STUDIES == ("exA", "random", "kappa", "area")
