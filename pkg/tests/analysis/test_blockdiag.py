# tests/analysis/test_blockdiag.py

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.analysis.blockdiag import (
    SpectralPartition,
    bdiag_difference_bounds,
    block_diagonalize,
    partition_by_gap,
    separation_margin,
    spectral_partition,
)
from src.analysis.eigen import ordered_spectrum
from src.analysis.unordered import d2
from src.errors import AllEqual, BadParam, ClusterFlip, GapTooSmall, NotNormal, ResidualTooLarge, ZeroMatrix
from src.lab.families import symmetric_pair
from src.models.family import Grid, SampledFamily, ValueKind
from src.models.matrix import ComplexMatrix, random_hermitian, random_unitary
from src.models.spectrum import UnorderedSpectrum


@pytest.mark.parametrize(
    "spectrum, strategy, cluster_a, cluster_b, gap",
    [
        ([-1, 1], "hermitian", (0,), (1,), 2.0),
        ([0, 0.1, 5, 5.1], "hermitian", (0, 1), (2, 3), 4.9),
        ([5.1, 0, 5, 0.1], "hermitian", (1, 3), (0, 2), 4.9),
    ],
)
def test_partition_by_largest_gap(spectrum, strategy, cluster_a, cluster_b, gap):
    """
    Tests the Hermitian strategy: split at the largest sorted gap.
    """
    partition = partition_by_gap(spectrum, strategy)
    assert partition.cluster_a == cluster_a
    assert partition.cluster_b == cluster_b
    assert partition.gap == pytest.approx(gap)


def test_partition_of_roots_of_unity():
    """
    Tests the normal strategy on {1, i, -1, -i}.
    """
    partition = partition_by_gap([1, 1j, -1, -1j], "normal")
    assert partition.gap == pytest.approx(math.sqrt(2))
    assert partition.size == 4


def test_partition_spanning_tree_matches_exhaustive_on_clusters(rng):
    """
    Tests that two well separated clouds are split the same way beyond the exhaustive limit.
    """
    near = rng.normal(scale=0.1, size=7) + 1j * rng.normal(scale=0.1, size=7)
    far = 10 + rng.normal(scale=0.1, size=7) + 1j * rng.normal(scale=0.1, size=7)
    partition = partition_by_gap(np.concatenate([near, far]), "normal")
    assert {partition.cluster_a, partition.cluster_b} == {tuple(range(7)), tuple(range(7, 14))}


def test_partition_errors():
    """
    Tests AllEqual and invalid partitions.
    """
    with pytest.raises(AllEqual):
        partition_by_gap([2.0, 2.0, 2.0])
    with pytest.raises(BadParam):
        SpectralPartition((0, 1), (1,), 1.0)
    with pytest.raises(BadParam):
        partition_by_gap([0, 1], "clustered")


def test_block_diagonalize_diagonal_matrix():
    """
    Tests that an already block-diagonal matrix gets U = I up to phases.
    """
    a = ComplexMatrix.diag([1.0, 2.0, 5.0])
    partition = spectral_partition(a)
    result = block_diagonalize(a, partition)
    assert_allclose(np.abs(result.U.data), np.eye(3), atol=1e-14)
    assert result.off_diag_residual <= 1e-12
    assert_allclose(np.diag(result.block_b.data).real, [1.0, 2.0])
    assert_allclose(result.block_c.data, [[5.0]])


def test_block_diagonalize_recovers_split(rng):
    """
    Tests the 1 + 2 split of V diag(1, 1, -1) V*.
    """
    v = random_unitary(rng, 3).data
    a = ComplexMatrix(v @ np.diag([1.0, 1.0, -1.0]) @ v.conj().T)
    result = block_diagonalize(a, spectral_partition(a))
    assert result.off_diag_residual <= 1e-10
    assert_allclose(ordered_spectrum(result.block_b).values, [-1.0], atol=1e-10)
    assert_allclose(ordered_spectrum(result.block_c).values, [1.0, 1.0], atol=1e-10)


def test_block_diagonalize_random_hermitian_ordering(rng):
    """
    Tests that Hermitian blocks keep max sigma(B) below min sigma(C) and preserve the spectrum.
    """
    for _ in range(20):
        a = random_hermitian(rng, 6)
        result = block_diagonalize(a, spectral_partition(a))
        spec_b = ordered_spectrum(result.block_b).values
        spec_c = ordered_spectrum(result.block_c).values
        assert spec_b.max() < spec_c.min()
        assert_allclose(np.concatenate([spec_b, spec_c]), ordered_spectrum(a).values, atol=1e-9)
        assert result.off_diag_residual <= 1e-9 * np.linalg.norm(a.data)


def test_block_diagonalize_errors():
    """
    Tests NotNormal and GapTooSmall.
    """
    with pytest.raises(NotNormal):
        block_diagonalize(ComplexMatrix.from_rows([[1, 1], [0, 2]]), SpectralPartition((0,), (1,), 1.0))
    with pytest.raises(GapTooSmall):
        block_diagonalize(ComplexMatrix.diag([1.0, 1.0 + 1e-9]), SpectralPartition((0,), (1,), 1e-9))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_block_diagonalize_normal_strategy_on_non_hermitian_input(seed):
    """
    Tests the normal strategy on U diag(z) U* with two complex clusters: blocks carry the clusters, residual stays small.
    """
    generator = np.random.default_rng(seed)
    near = 2j + 0.05 * (generator.standard_normal(2) + 1j * generator.standard_normal(2))
    far = -1 - 1j + 0.05 * (generator.standard_normal(3) + 1j * generator.standard_normal(3))
    z = np.concatenate([near, far])
    u = random_unitary(generator, 5).data
    a = ComplexMatrix((u * z[np.newaxis, :]) @ u.conj().T)
    partition = spectral_partition(a)
    assert partition.gap > 1.0
    result = block_diagonalize(a, partition)
    assert result.off_diag_residual <= 1e-9 * np.linalg.norm(a.data)
    assert_allclose(result.U.data.conj().T @ result.U.data, np.eye(5), atol=1e-12)
    blocks = sorted([np.linalg.eigvals(result.block_b.data), np.linalg.eigvals(result.block_c.data)], key=len)
    assert d2(UnorderedSpectrum(blocks[0]), UnorderedSpectrum(near)) < 1e-9
    assert d2(UnorderedSpectrum(blocks[1]), UnorderedSpectrum(far)) < 1e-9


def test_block_diagonalize_raises_when_residual_misses_bound(rng):
    """
    Tests ResidualTooLarge when the off-diagonal residual exceeds bd_tol * ||A||.
    """
    a = random_hermitian(rng, 5)
    with pytest.raises(ResidualTooLarge):
        block_diagonalize(a, spectral_partition(a), bd_tol=1e-300)


def test_separation_margin_of_reflection():
    """
    Tests the margin of diag(1, -1) against itself.
    """
    a = ComplexMatrix.diag([1.0, -1.0])
    p = spectral_partition(a)
    assert separation_margin(a, a, p, p) == pytest.approx(math.sqrt(2))


def test_separation_margin_is_scale_invariant(rng):
    """
    Tests margin(cA, cB) = margin(A, B) for c > 0.
    """
    a, b = random_hermitian(rng, 4), random_hermitian(rng, 4)
    pa, pb = spectral_partition(a), spectral_partition(b)
    base = separation_margin(a, b, pa, pb)
    scaled = separation_margin(ComplexMatrix(3.5 * a.data), ComplexMatrix(3.5 * b.data), pa, pb)
    assert scaled == pytest.approx(base, abs=1e-12)


def test_separation_margin_zero_matrix():
    """
    Tests that a vanishing matrix raises ZeroMatrix.
    """
    a = ComplexMatrix.diag([1.0, -1.0])
    p = spectral_partition(a)
    with pytest.raises(ZeroMatrix):
        separation_margin(a, ComplexMatrix(np.zeros((2, 2))), p, p)


def _ex_a_family(grid, n):
    x = grid.axis_nodes(0)
    return SampledFamily(grid, symmetric_pair(np.full_like(x, 1.0 / n), x), ValueKind.MATRIX)


def test_difference_bounds_of_equal_families():
    """
    Tests that identical families need the constant 0.
    """
    grid = Grid.interval(0.25, 1.0, 31)
    family = _ex_a_family(grid, 8)
    report = bdiag_difference_bounds(family, family)
    assert report.passed
    assert report.meta["c_required"] == 0.0
    assert np.all(np.array(report.series["lhs_pointwise"]) == 0.0)


def test_difference_bounds_of_ex_a_pair():
    """
    Tests that (A_n, A_2n) away from 0 admit a finite constant.
    """
    grid = Grid.interval(0.25, 1.0, 31)
    report = bdiag_difference_bounds(_ex_a_family(grid, 8), _ex_a_family(grid, 16))
    assert report.passed
    assert 0.0 < report.scalars["c_required"] < math.inf


def test_difference_bounds_cluster_flip():
    """
    Tests that a partition changing along the grid raises ClusterFlip.
    """
    grid = Grid.interval(-3.0, 3.0, 7)
    stack = np.zeros((7, 3, 3))
    stack[:, 1, 1] = 1.0
    stack[:, 2, 2] = grid.axis_nodes(0)
    family = SampledFamily(grid, stack, ValueKind.MATRIX)
    with pytest.raises(ClusterFlip):
        bdiag_difference_bounds(family, family)
