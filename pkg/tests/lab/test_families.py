# tests/lab/test_families.py

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import BadParams, EigenflowError
from src.lab.families import (
    FamilyId,
    auc_exponent,
    auc_node,
    cell_midpoints,
    default_grid,
    ex_a_branch,
    ex_a_slope,
    make_family,
    sawtooth,
    sawtooth_slope,
    solver_agreement,
)
from src.models.family import Grid, SampledFamily, ValueKind


def test_ex_a_at_zero():
    """
    Tests that A_5(0) = diag(0.2, -0.2) with spectrum (-0.2, 0.2).
    """
    matrices, spectra = make_family(FamilyId.EX_A, 5)
    zero, = matrices.grid.nearest_node(0.0)
    assert matrices.grid.axis_nodes(0)[zero] == pytest.approx(0.0, abs=1e-12)
    assert_allclose(matrices.values[zero], np.diag([0.2, -0.2]), atol=1e-12)
    assert_allclose(spectra.values[zero], [-0.2, 0.2], atol=1e-12)
    assert spectra.kind == ValueKind.ORDERED


def test_ex_a_companion_is_the_limit():
    """
    Tests that the exA companion is [[0, x], [x, 0]] with spectrum (-|x|, |x|).
    """
    grid = Grid.interval(-1.0, 1.0, 21)
    matrices, spectra = make_family("exA", 7, grid=grid, companion=True)
    x = grid.axis_nodes(0)
    assert np.all(matrices.values[:, 0, 0] == 0.0)
    assert_allclose(spectra.values[:, 1], np.abs(x))
    assert matrices.meta["family"].companion


def test_ex_auc_exponent_and_entries():
    """
    Tests r = 1 for alpha = 1/2 and the entries ((1/n, n x), (n x, -1/n)).
    """
    assert auc_exponent(0.5) == pytest.approx(1.0)
    assert auc_exponent(2 / 3) == pytest.approx(2.0)
    grid = Grid.interval(-0.5, 0.5, 11)
    matrices, _ = make_family(FamilyId.EX_AUC, 4, grid=grid, alpha=0.5)
    x = grid.axis_nodes(0)
    assert_allclose(matrices.values[:, 0, 0].real, np.full(11, 0.25))
    assert_allclose(matrices.values[:, 0, 1].real, 4 * x)
    assert auc_node(4, 0.5) == pytest.approx(1 / 16)


def test_ex_a2_companion_halves_the_diagonal():
    """
    Tests that the exA2 companion is A_{2n}.
    """
    matrices, _ = make_family(FamilyId.EX_A2, 4, companion=True)
    assert_allclose(matrices.values[:, 0, 0].real, 1 / 8)
    assert matrices.grid.counts == (64 * 4 + 1,)


def test_sawtooth_values_and_slopes():
    """
    Tests the sawtooth profile and its +-1 slopes for n = 2.
    """
    assert_allclose(sawtooth(2, [0.0, 0.25, 0.5, 0.75, 1.0]), [0.0, 0.25, 0.5, 0.25, 0.0])
    assert_allclose(sawtooth_slope(2, [0.1, 0.6, 0.9, 1.1]), [1.0, -1.0, -1.0, 1.0])


def test_ex_a_closed_forms():
    """
    Tests a_n and its derivative at x = 1/n.
    """
    assert ex_a_branch(4, 0.25) == pytest.approx(math.sqrt(2) / 4)
    assert ex_a_slope(4, 0.25) == pytest.approx(1 / math.sqrt(2))
    assert ex_a_slope(math.inf, -0.3) == -1.0
    assert ex_a_branch(math.inf, -0.3) == pytest.approx(0.3)


def test_ucq_spectra_match_solver():
    """
    Tests that the sawtooth family passes its solver self-check on the default grid.
    """
    matrices, spectra = make_family(FamilyId.EX_UCQ, 8)
    assert matrices.grid.counts == (65,)
    assert solver_agreement(matrices, spectra) < 1e-12


def test_solver_agreement_detects_wrong_closed_form():
    """
    Tests that a wrong spectrum fails the self-check.
    """
    matrices, spectra = make_family(FamilyId.EX_A, 3, grid=Grid.interval(-1.0, 1.0, 11))
    wrong = SampledFamily(spectra.grid, 2.0 * spectra.values, ValueKind.ORDERED)
    with pytest.raises(EigenflowError):
        solver_agreement(matrices, wrong)


@pytest.mark.parametrize(
    "family_id, n, kwargs",
    [
        ("exB", 4, {}),
        (FamilyId.EX_A, 0, {}),
        (FamilyId.EX_UCQ, 4, {"grid": Grid.interval(0.0, 2.0, 65)}),
        (FamilyId.EX_UCQ, 4, {"grid": Grid.interval(0.0, 1.0, 17)}),
        (FamilyId.EX_A2, 4, {"grid": Grid.interval(0.0, 1.0, 33)}),
        (FamilyId.EX_AUC, 4, {"alpha": 1.0}),
        (FamilyId.EX_A, 4, {"grid": Grid.from_bounds([0.0, 0.0], [1.0, 1.0], [3, 3])}),
    ],
)
def test_make_family_rejects_bad_params(family_id, n, kwargs):
    """
    Tests the BadParams cases of make_family.
    """
    with pytest.raises(BadParams):
        make_family(family_id, n, **kwargs)


def test_default_grids():
    """
    Tests the default interval and node count of every family.
    """
    assert default_grid(FamilyId.EX_A, 10).counts == (4001,)
    assert default_grid(FamilyId.EX_UCQ, 10).counts == (81,)
    assert default_grid(FamilyId.EX_A2, 2).counts == (129,)
    auc = default_grid(FamilyId.EX_AUC, 4, alpha=0.5)
    assert auc.lower[0] == pytest.approx(-0.25)
    assert auc.upper[0] == pytest.approx(0.25)


def test_cell_midpoints():
    """
    Tests midpoints of the cells of a five-node grid.
    """
    assert_allclose(cell_midpoints(Grid.interval(0.0, 1.0, 5)), [0.125, 0.375, 0.625, 0.875])
