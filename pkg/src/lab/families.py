# src/lab/families.py

"""
Counterexample matrix families with closed-form spectra and derivatives.
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.analysis.charmap import char_map_hermitian
from src.errors import BadParams, EigenflowError
from src.models.family import Grid, SampledFamily, ValueKind

logger = logging.getLogger(__name__)

SELF_CHECK_TOL = 1e-10
SELF_CHECK_NODES = 257


class FamilyId(enum.Enum):
    EX_A = "exA"
    EX_UCQ = "exUcq"
    EX_AUC = "exAuc"
    EX_A2 = "exA2"


@dataclass(frozen=True)
class CounterexampleFamily:
    id: FamilyId
    n: int
    grid: Grid
    params: dict = field(default_factory=dict)
    companion: bool = False


def sawtooth(n: int, x) -> np.ndarray:
    """Slope +-1 sawtooth with zeros at even multiples of 1/n and peaks 1/n at odd ones."""
    t = np.mod(n * np.asarray(x, dtype=np.float64), 2.0)
    return np.where(t <= 1.0, t, 2.0 - t) / n


def sawtooth_slope(n: int, x) -> np.ndarray:
    """+1 on even pieces [k/n, (k+1)/n], -1 on odd ones."""
    piece = np.floor(n * np.asarray(x, dtype=np.float64))
    return np.where(np.mod(piece, 2.0) == 0.0, 1.0, -1.0)


def ex_a_branch(n: float, x) -> np.ndarray:
    """sqrt(x^2 + 1/n^2); n = inf gives |x|."""
    x = np.asarray(x, dtype=np.float64)
    if math.isinf(n):
        return np.abs(x)
    return np.sqrt(x * x + 1.0 / (n * n))


def ex_a_slope(n: float, x) -> np.ndarray:
    """Derivative of ex_a_branch; n = inf gives sgn(x)."""
    x = np.asarray(x, dtype=np.float64)
    if math.isinf(n):
        return np.sign(x)
    return x / np.sqrt(x * x + 1.0 / (n * n))


def ucq_branch(n: int, x, shift: float = 1.0) -> np.ndarray:
    """sqrt(phi_n^2 + shift^2 / n^2)."""
    phi = sawtooth(n, x)
    return np.sqrt(phi * phi + (shift / n) ** 2)


def ucq_slope(n: int, x, shift: float = 1.0) -> np.ndarray:
    phi = sawtooth(n, x)
    return phi * sawtooth_slope(n, x) / ucq_branch(n, x, shift)


def auc_exponent(alpha: float) -> float:
    """r = alpha / (1 - alpha)."""
    if not 0.0 < alpha < 1.0:
        raise BadParams(f"alpha must lie in (0, 1), got {alpha}")
    return alpha / (1.0 - alpha)


def auc_branch(n: int, alpha: float, x, shift: float = 1.0) -> np.ndarray:
    """sqrt(n^2 x^2 + shift^2 / n^(2r))."""
    r = auc_exponent(alpha)
    x = np.asarray(x, dtype=np.float64)
    return np.sqrt((n * x) ** 2 + (shift / n ** r) ** 2)


def auc_node(n: int, alpha: float) -> float:
    """x* = n^(-1 / (1 - alpha)), where the Holder quotient reaches its bound."""
    auc_exponent(alpha)
    return n ** (-1.0 / (1.0 - alpha))


def symmetric_pair(diagonal, off_diagonal) -> np.ndarray:
    """Stack of [[c, v], [v, -c]] for arrays c, v of equal shape."""
    c = np.broadcast_to(np.asarray(diagonal, dtype=np.float64), np.shape(off_diagonal))
    v = np.asarray(off_diagonal, dtype=np.float64)
    out = np.empty(v.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c
    out[..., 0, 1] = v
    out[..., 1, 0] = v
    out[..., 1, 1] = -c
    return out


def default_grid(family_id: FamilyId, n: int, alpha: float | None = None, count: int | None = None) -> Grid:
    """The interval each family lives on, with its default node count unless ``count`` is given."""
    if family_id == FamilyId.EX_A:
        return Grid.interval(-1.0, 1.0, count or 4001)
    if family_id == FamilyId.EX_UCQ:
        return Grid.interval(0.0, 1.0, count or 8 * n + 1)
    if family_id == FamilyId.EX_AUC:
        x_star = auc_node(n, 0.5 if alpha is None else alpha)
        return Grid.interval(-4.0 * x_star, 4.0 * x_star, count or 801)
    return Grid.interval(0.0, 1.0, count or 64 * n + 1)


def _check_grid(family_id: FamilyId, n: int, grid: Grid, alpha: float | None):
    if grid.dim != 1:
        raise BadParams("Counterexample families live on intervals")
    cells = grid.counts[0] - 1
    if family_id == FamilyId.EX_AUC:
        auc_exponent(alpha)
    if family_id == FamilyId.EX_UCQ:
        if grid.lower[0] != 0.0 or not math.isclose(grid.upper[0], 1.0, abs_tol=1e-12):
            raise BadParams("The sawtooth family lives on (0, 1)")
        if cells < 8 * n:
            raise BadParams(f"Sawtooth grid needs at least {8 * n} cells, got {cells}")
    if family_id == FamilyId.EX_A2 and cells < 16 * n:
        raise BadParams(f"Grid needs at least {16 * n} cells, got {cells}")


def closed_form(family_id: FamilyId, n: float, x, alpha: float | None = None, companion: bool = False):
    """(diagonal entry, off-diagonal entry, nonnegative eigenvalue) at the points x."""
    x = np.asarray(x, dtype=np.float64)
    if family_id in (FamilyId.EX_A, FamilyId.EX_A2):
        m = n
        if companion:
            m = math.inf if family_id == FamilyId.EX_A else 2 * n
        c = 0.0 if math.isinf(m) else 1.0 / m
        return np.full_like(x, c), x, ex_a_branch(m, x)
    if family_id == FamilyId.EX_UCQ:
        shift = 0.5 if companion else 1.0
        return np.full_like(x, shift / n), sawtooth(n, x), ucq_branch(n, x, shift)
    shift = 0.5 if companion else 1.0
    r = auc_exponent(alpha)
    return np.full_like(x, shift / n ** r), n * x, auc_branch(n, alpha, x, shift)


def make_family(
    family_id: FamilyId | str,
    n: int,
    grid: Grid | None = None,
    alpha: float | None = None,
    companion: bool = False,
    self_check: bool = True,
):
    """Builds a counterexample family and its closed-form ordered spectra.

    ``companion`` selects the partner family: the limit A for exA, B_n for
    exUcq and exAuc, A_{2n} for exA2.
    """
    try:
        family_id = FamilyId(family_id)
    except ValueError as e:
        raise BadParams(f"Unknown family '{family_id}'") from e
    if family_id == FamilyId.EX_AUC and alpha is None:
        alpha = 0.5
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadParams(f"n must be a positive integer, got {n}")
    grid = default_grid(family_id, n, alpha) if grid is None else grid
    _check_grid(family_id, n, grid, alpha)

    x = grid.axis_nodes(0)
    diagonal, off_diagonal, branch = closed_form(family_id, n, x, alpha, companion)
    descriptor = CounterexampleFamily(family_id, int(n), grid, {"alpha": alpha}, companion)
    matrices = SampledFamily(grid, symmetric_pair(diagonal, off_diagonal), ValueKind.MATRIX, meta={"family": descriptor})
    spectra = SampledFamily(grid, np.stack([-branch, branch], axis=-1), ValueKind.ORDERED, meta={"family": descriptor})

    if self_check:
        solver_agreement(matrices, spectra)
    return matrices, spectra


def solver_agreement(matrices: SampledFamily, spectra: SampledFamily, max_nodes: int = SELF_CHECK_NODES) -> float:
    """Max deviation of solver spectra from closed forms on an evenly strided node subset."""
    count = matrices.node_count
    stride = max(1, -(-count // max_nodes))
    picked = np.arange(0, count, stride)
    grid = Grid(matrices.grid.lower, (matrices.grid.spacing[0] * stride,), (picked.size,))
    subset = SampledFamily(grid, matrices.flat_values()[picked], ValueKind.MATRIX)
    flow = char_map_hermitian(subset).flow
    deviation = float(np.max(np.abs(flow.values - spectra.flat_values()[picked])))
    scale = max(1.0, float(np.max(np.abs(spectra.values))))
    if deviation > SELF_CHECK_TOL * scale:
        logger.error(f"Autoverifica fallita: deviazione {deviation:.3e}")
        raise EigenflowError(f"Solver spectra deviate from closed form by {deviation:.3e}")
    logger.debug(f"Autoverifica superata su {picked.size} nodi (deviazione {deviation:.3e})")
    return deviation


def scalar_family(grid: Grid, values, cells: bool = False) -> SampledFamily:
    """Scalar samples on the nodes of ``grid`` or, with ``cells``, on its cells."""
    if cells:
        return SampledFamily(grid.shrink(0), values, ValueKind.SCALAR, cell_axes={0})
    return SampledFamily(grid, values, ValueKind.SCALAR)


def cell_midpoints(grid: Grid) -> np.ndarray:
    return grid.axis_nodes(0)[:-1] + grid.spacing[0] / 2.0
