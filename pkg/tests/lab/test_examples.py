# tests/lab/test_examples.py

import math

import numpy as np
import pytest

from src.errors import BadParams
from src.lab.examples import RUNNERS, nodal_slope, run_exA, run_exA2, run_exAuc, run_exUcq
from src.lab.families import FamilyId


def test_ex_a_lipschitz_gap():
    """
    Tests the exA run: Lipschitz gap above 2 - sqrt(2) and derivative gap 1 - 1/sqrt(2) at 1/n.
    """
    report = run_exA(n=100, grid=4001, sweep=(4, 16, 64))
    assert report.passed, [c.describe() for c in report.violations()]
    assert report.scalars["lipschitz_seminorm"] >= 0.5857
    assert report.scalars["derivative_gap"] == pytest.approx(1 - 1 / math.sqrt(2), abs=1e-6)
    assert report.meta["node_offset"] <= 1e-9
    assert len(report.series["w1q_distance"]) == 3


def test_ex_a_off_grid_node_is_inconclusive():
    """
    Tests that 1/n missing from the grid leaves the derivative check inconclusive.
    """
    report = run_exA(n=7, grid=101, sweep=(4, 8, 16))
    check = next(c for c in report.checks if c.name.startswith("derivative gap at 1/n"))
    assert not check.conclusive


@pytest.mark.parametrize("q", [1.0, 2.0, 4.0])
def test_ex_ucq_derivative_gap(q):
    """
    Tests that a_n' - b_n' stays above 1/(12 2^(1/q)) while the matrices are C^{0,1}-close.
    """
    report = run_exUcq(n=16, q=q)
    assert report.passed, [c.describe() for c in report.violations()]
    assert report.scalars["derivative_gap_lq"] >= 1 / (12 * 2 ** (1 / q))
    assert report.scalars["matrix_c01_distance"] == pytest.approx(math.sqrt(2) / 32, abs=1e-9)
    assert all(c.conclusive for c in report.checks)


def test_ex_ucq_gap_does_not_shrink_with_n():
    """
    Tests that the L^2 derivative gap is the same for n = 8 and n = 32.
    """
    small = run_exUcq(n=8).scalars["derivative_gap_lq"]
    large = run_exUcq(n=32).scalars["derivative_gap_lq"]
    assert small == pytest.approx(large, rel=1e-6)


@pytest.mark.parametrize("n, alpha", [(32, 0.5), (32, 2 / 3), (8, 0.9)])
def test_ex_auc_holder_gap(n, alpha):
    """
    Tests that the Holder gap stays above sqrt(5)/2 + 1/2 - sqrt(2) for several alpha.
    """
    report = run_exAuc(n=n, alpha=alpha)
    assert report.passed, [c.describe() for c in report.violations()]
    assert report.scalars["holder_seminorm"] >= math.sqrt(5) / 2 + 0.5 - math.sqrt(2) - 1e-3
    assert report.meta["x_star"] == pytest.approx(n ** (-1 / (1 - alpha)))


def test_ex_a2_decay():
    """
    Tests the exA2 bounds and the n^(-1/2) decay of the derivative gap.
    """
    report = run_exA2(n=8, sweep=(8, 16, 32))
    assert report.passed, [c.describe() for c in report.violations()]
    assert report.scalars["matrix_derivative_distance"] == 0.0
    assert report.scalars["loglog_slope"] == pytest.approx(-0.5, abs=0.1)
    assert report.series["sweep_n"] == [8.0, 16.0, 32.0]


@pytest.mark.parametrize(
    "runner, kwargs",
    [
        (run_exA, {"n": 0}),
        (run_exA, {"q": 0.5}),
        (run_exUcq, {"n": 2.5}),
        (run_exAuc, {"alpha": 1.0}),
        (run_exA2, {"q": math.inf}),
    ],
)
def test_runners_reject_bad_params(runner, kwargs):
    """
    Tests the BadParams cases of the example runners.
    """
    with pytest.raises(BadParams):
        runner(**kwargs)


def test_runner_table_covers_every_family():
    """
    Tests that every family id has a runner.
    """
    assert set(RUNNERS) == set(FamilyId)


def test_nodal_slope_is_exact_on_quartics():
    """
    Tests that the nodal slope built from forward differences recovers the derivative of a quartic.
    """
    x = np.linspace(0.0, 1.0, 11)
    cells = np.diff(x ** 4 - 2 * x ** 3) / 0.1
    assert nodal_slope(cells, 5) == pytest.approx(4 * 0.5 ** 3 - 6 * 0.5 ** 2, abs=1e-12)
    with pytest.raises(BadParams):
        nodal_slope(cells, 1)


def test_ex_a_derivative_gap_follows_the_samples():
    """
    Tests that the exA derivative gap is read from the sampled family, so a coarse grid moves it off 1 - 1/sqrt(2).
    """
    coarse = run_exA(n=10, grid=41, sweep=(4,))
    fine = run_exA(n=10, grid=401, sweep=(4,))
    target = 1 - 1 / math.sqrt(2)
    assert abs(coarse.scalars["derivative_gap"] - target) > 5e-5
    assert abs(fine.scalars["derivative_gap"] - target) < abs(coarse.scalars["derivative_gap"] - target)
