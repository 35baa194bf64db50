# tests/analysis/test_charmap.py

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.analysis.charmap import (
    branch,
    char_map_hermitian,
    char_map_normal,
    condition_number_flow,
    embedded_flow,
    graph_surface_area,
)
from src.analysis.unordered import AlmgrenEmbedding, d2, up_map
from src.errors import BadParam, NotHermitian, SingularNode, SizeMismatch
from src.lab.families import FamilyId, ex_a_branch, make_family
from src.models.family import Grid, SampledFamily, ValueKind
from src.models.matrix import random_general, random_hermitian, random_unitary
from src.models.spectrum import UnorderedSpectrum


def matrix_family(grid, stack):
    return SampledFamily(grid, np.asarray(stack, dtype=complex), ValueKind.MATRIX)


def test_char_map_hermitian_on_ex_a():
    """
    Tests that the ordered flow of A_n matches (-a_n, a_n) within 1e-10.
    """
    grid = Grid.interval(-1.0, 1.0, 401)
    matrices, _ = make_family(FamilyId.EX_A, 10, grid=grid, self_check=False)
    flow = char_map_hermitian(matrices)
    a_n = ex_a_branch(10, grid.axis_nodes(0))
    assert flow.ordered
    assert_allclose(flow.flow.values, np.stack([-a_n, a_n], axis=-1), atol=1e-10)
    assert flow.residual_max < 1e-10


def test_char_map_hermitian_constant_and_diagonal():
    """
    Tests a constant family and diag(x, -x), whose flow is (-|x|, |x|).
    """
    grid = Grid.interval(-1.0, 1.0, 21)
    x = grid.axis_nodes(0)
    constant = matrix_family(grid, np.broadcast_to(np.diag([1.0, 2.0]), (21, 2, 2)))
    assert_allclose(char_map_hermitian(constant).flow.values, np.tile([1.0, 2.0], (21, 1)))

    diagonal = np.zeros((21, 2, 2))
    diagonal[:, 0, 0], diagonal[:, 1, 1] = x, -x
    flow = char_map_hermitian(matrix_family(grid, diagonal)).flow.values
    assert_allclose(flow, np.stack([-np.abs(x), np.abs(x)], axis=-1), atol=1e-15)


def test_char_map_hermitian_reports_bad_node():
    """
    Tests that a non-Hermitian sample raises NotHermitian carrying its node index.
    """
    grid = Grid.interval(0.0, 1.0, 5)
    stack = np.zeros((5, 2, 2))
    stack[3, 0, 1] = 1.0
    with pytest.raises(NotHermitian) as info:
        char_map_hermitian(matrix_family(grid, stack))
    assert info.value.node == 3


def test_lowner_transfer_on_cells(rng):
    """
    Tests that each cell difference of the ordered flow is dominated by the matrix difference.
    """
    grid = Grid.interval(0.0, 1.0, 41)
    x = grid.axis_nodes(0)
    h0, h1 = random_hermitian(rng, 4).data, random_hermitian(rng, 4).data
    stack = h0[np.newaxis] + np.sin(3 * x)[:, np.newaxis, np.newaxis] * h1[np.newaxis]
    flow = char_map_hermitian(matrix_family(grid, stack)).flow.values
    flow_steps = np.linalg.norm(np.diff(flow, axis=0), axis=1)
    matrix_steps = np.linalg.norm(np.diff(stack, axis=0), axis=(1, 2))
    assert np.all(flow_steps <= matrix_steps + 1e-8)
    assert np.all(np.linalg.norm(flow, axis=1) <= np.linalg.norm(stack, axis=(1, 2)) + 1e-8)


def test_char_map_normal_of_skew_family():
    """
    Tests that [[0, x], [-x, 0]] has the unordered spectrum [ix, -ix].
    """
    grid = Grid.interval(0.0, 1.0, 11)
    x = grid.axis_nodes(0)
    stack = np.zeros((11, 2, 2))
    stack[:, 0, 1], stack[:, 1, 0] = x, -x
    flow = char_map_normal(matrix_family(grid, stack))
    assert not flow.ordered
    for k, value in enumerate(flow.flow.values):
        assert d2(UnorderedSpectrum(value), UnorderedSpectrum([1j * x[k], -1j * x[k]])) < 1e-12


def test_char_map_normal_recovers_rotating_spectrum(rng):
    """
    Tests V e^{i theta} diag(1, -1) V* against the spectrum {e^{i theta}, -e^{i theta}}.
    """
    grid = Grid.interval(0.0, 1.0, 11)
    theta = grid.axis_nodes(0)
    v = random_unitary(rng, 2).data
    stack = np.array([v @ (np.exp(1j * t) * np.diag([1.0, -1.0])) @ v.conj().T for t in theta])
    flow = char_map_normal(matrix_family(grid, stack)).flow.values
    for k, t in enumerate(theta):
        expected = UnorderedSpectrum([np.exp(1j * t), -np.exp(1j * t)])
        assert d2(UnorderedSpectrum(flow[k]), expected) < 1e-10


def test_normal_and_hermitian_maps_agree(rng):
    """
    Tests that up_map of the unordered flow equals the ordered flow on a Hermitian family.
    """
    grid = Grid.interval(0.0, 1.0, 9)
    x = grid.axis_nodes(0)
    h0, h1 = random_hermitian(rng, 3).data, random_hermitian(rng, 3).data
    family = matrix_family(grid, h0[np.newaxis] + x[:, np.newaxis, np.newaxis] * h1[np.newaxis])
    ordered = char_map_hermitian(family).flow.values
    unordered = char_map_normal(family).flow.values
    for k in range(9):
        sorted_values = up_map(UnorderedSpectrum(unordered[k]), real_tol=1e-9).values
        assert_allclose(sorted_values, ordered[k], atol=1e-9)


def test_embedded_flow():
    """
    Tests that swapped flows embed identically and a zero flow embeds to zero.
    """
    grid = Grid.interval(0.0, 1.0, 5)
    x = grid.axis_nodes(0)
    embedding = AlmgrenEmbedding.default(2)
    f = SampledFamily(grid, np.stack([x, 1j * x], axis=-1), ValueKind.UNORDERED)
    g = SampledFamily(grid, np.stack([1j * x, x], axis=-1), ValueKind.UNORDERED)
    assert np.array_equal(embedded_flow(f, embedding).values, embedded_flow(g, embedding).values)
    zero = SampledFamily(grid, np.zeros((5, 2), dtype=complex), ValueKind.UNORDERED)
    assert np.all(embedded_flow(zero, embedding).values == 0.0)
    with pytest.raises(SizeMismatch):
        embedded_flow(f, AlmgrenEmbedding.default(3))


@pytest.mark.parametrize("diagonal, expected", [([2.0, 1.0], 2.0), ([1.0, 1.0], 1.0)])
def test_condition_number_of_constant_family(diagonal, expected):
    """
    Tests kappa of constant diagonal families.
    """
    grid = Grid.interval(0.0, 1.0, 6)
    kappa = condition_number_flow(matrix_family(grid, np.broadcast_to(np.diag(diagonal), (6, 2, 2))))
    assert_allclose(kappa.values, np.full(6, expected))
    assert kappa.meta["sigma_min"] == pytest.approx(1.0)


def test_condition_number_singular_node():
    """
    Tests that diag(x, 1) on (0, 1) is singular at node 0.
    """
    grid = Grid.interval(0.0, 1.0, 6)
    stack = np.zeros((6, 2, 2))
    stack[:, 0, 0], stack[:, 1, 1] = grid.axis_nodes(0), 1.0
    with pytest.raises(SingularNode) as info:
        condition_number_flow(matrix_family(grid, stack))
    assert info.value.node == 0


def test_graph_surface_area():
    """
    Tests the area of a flat graph and of |x| on (-1, 1).
    """
    unit = Grid.interval(0.0, 1.0, 11)
    assert graph_surface_area(SampledFamily(unit, np.full(11, 3.0), ValueKind.SCALAR)) == pytest.approx(1.0)
    grid = Grid.interval(-1.0, 1.0, 2001)
    area = graph_surface_area(SampledFamily(grid, np.abs(grid.axis_nodes(0)), ValueKind.SCALAR))
    assert area == pytest.approx(2 * math.sqrt(2), rel=1e-9)


def test_graph_surface_area_on_square():
    """
    Tests the area of the plane z = x + y over the unit square.
    """
    grid = Grid.from_bounds([0.0, 0.0], [1.0, 1.0], [11, 11])
    coords = grid.coordinates()
    plane = SampledFamily(grid, coords[..., 0] + coords[..., 1], ValueKind.SCALAR)
    assert graph_surface_area(plane) == pytest.approx(math.sqrt(3))


def test_branch():
    """
    Tests branch extraction from ordered flows only.
    """
    grid = Grid.interval(0.0, 1.0, 3)
    flow = SampledFamily(grid, np.array([[0.0, 1.0], [0.0, 2.0], [1.0, 3.0]]), ValueKind.ORDERED)
    assert_allclose(branch(flow, 1).values, [1.0, 2.0, 3.0])
    with pytest.raises(BadParam):
        branch(flow, 2)
    with pytest.raises(BadParam):
        branch(SampledFamily(grid, np.zeros(3), ValueKind.SCALAR), 0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), d=st.integers(min_value=2, max_value=5))
def test_condition_number_is_unitarily_invariant(seed, d):
    """
    Tests that kappa is unchanged by U A V conjugation and by unit-modulus and positive scalars.
    """
    generator = np.random.default_rng(seed)
    grid = Grid.interval(0.0, 1.0, 7)
    x = grid.axis_nodes(0)
    sigma = 1.0 + 2.0 * generator.random(d)
    a0 = (random_unitary(generator, d).data * sigma[np.newaxis, :]) @ random_unitary(generator, d).data
    a1 = random_general(generator, d, d).data
    a1 = a1 * (0.1 / np.linalg.norm(a1))
    stack = a0[np.newaxis] + x[:, np.newaxis, np.newaxis] * a1[np.newaxis]
    u, v = random_unitary(generator, d).data, random_unitary(generator, d).data
    phase = np.exp(1j * generator.uniform(0.0, 2.0 * np.pi))
    moved = 2.5 * phase * (u[np.newaxis] @ stack @ v[np.newaxis])
    kappa = condition_number_flow(matrix_family(grid, stack), sigma_floor=0.0).values
    assert_allclose(condition_number_flow(matrix_family(grid, moved), sigma_floor=0.0).values, kappa, rtol=1e-8)


def test_char_map_normal_transfers_distances_node_by_node(rng):
    """
    Tests d_2 of the unordered flows against ||A - B||_2 at every node and across every cell.
    """
    grid = Grid.interval(0.0, 1.0, 17)
    x = grid.axis_nodes(0)
    u, v = random_unitary(rng, 3).data, random_unitary(rng, 3).data
    z0, z1 = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    w0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    first = np.array([(u * (z0 + t * z1)[np.newaxis, :]) @ u.conj().T for t in x])
    second = np.array([(v * (w0 + np.exp(1j * t) * z1)[np.newaxis, :]) @ v.conj().T for t in x])
    flow_1 = char_map_normal(matrix_family(grid, first)).flow.values
    flow_2 = char_map_normal(matrix_family(grid, second)).flow.values
    for k in range(17):
        gap = d2(UnorderedSpectrum(flow_1[k]), UnorderedSpectrum(flow_2[k]))
        assert gap <= np.linalg.norm(first[k] - second[k]) + 1e-9
    for k in range(16):
        step = d2(UnorderedSpectrum(flow_1[k]), UnorderedSpectrum(flow_1[k + 1]))
        assert step <= np.linalg.norm(first[k + 1] - first[k]) + 1e-9
