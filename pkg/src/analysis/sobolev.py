# src/analysis/sobolev.py

"""
Discrete Lebesgue, Sobolev and Holder quantities of sampled families, slope
functions, metric speed, q-energy and the d^{1,q} semimetric on curves of
unordered tuples.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from src import config
from src.analysis.unordered import d2, minimizing_permutations, permutations
from src.errors import AxisOutOfRange, BadExponent, BadParam, GridMismatch, NotCurve, PairBudgetExceeded
from src.models.family import SampledFamily, ValueKind
from src.models.spectrum import UnorderedSpectrum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SobolevReport:
    lq: float
    derivative_lq: tuple
    q: float
    w1q: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "derivative_lq", tuple(float(v) for v in self.derivative_lq))
        object.__setattr__(self, "w1q", self.lq + sum(self.derivative_lq))

    def to_json(self) -> dict:
        return {"lq": self.lq, "derivative_lq": list(self.derivative_lq), "w1q": self.w1q, "q": self.q}


def _check_exponent(q: float):
    if q != math.inf and not (q >= 1.0 and math.isfinite(q)):
        raise BadExponent(f"Exponent q must be >= 1 or infinity, got {q}")


def fd_derivative(f: SampledFamily, axis: int) -> SampledFamily:
    """Forward differences along ``axis``; the output lives on the cells of that axis."""
    if not 0 <= axis < f.grid.dim:
        raise AxisOutOfRange(f"Axis {axis} outside 0..{f.grid.dim - 1}")
    if f.grid.counts[axis] < 2:
        raise AxisOutOfRange(f"Axis {axis} has a single node")
    if f.kind == ValueKind.UNORDERED:
        raise BadParam("Unordered families have no componentwise difference; use metric_speed")
    h = f.grid.spacing[axis]
    values = np.diff(f.values, axis=axis) / h
    kind = ValueKind.VECTOR if f.kind == ValueKind.ORDERED else f.kind
    return f.with_values(values, kind=kind, grid=f.grid.shrink(axis), cell_axes=f.cell_axes | {axis}, meta={})


def riemann_weights(f: SampledFamily) -> np.ndarray:
    """Left-endpoint cell weights: nodal axes drop their last node, cell axes keep all samples."""
    weights = np.ones(())
    for axis in range(f.grid.dim):
        w = np.full(f.grid.counts[axis], f.grid.spacing[axis])
        if axis not in f.cell_axes:
            w[-1] = 0.0
        weights = np.multiply.outer(weights, w)
    return weights


def lq_norm(f: SampledFamily, q: float, mask: np.ndarray | None = None) -> float:
    """Riemann-sum L^q norm of the pointwise Euclidean norm; q = inf takes the max over nodes."""
    _check_exponent(q)
    norms = f.node_norms()
    selected = np.ones(f.grid.counts, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if q == math.inf:
        return float(norms[selected].max(initial=0.0))
    weights = riemann_weights(f) * selected
    return float(np.sum(weights * norms ** q) ** (1.0 / q))


def sup_norm(f: SampledFamily, mask: np.ndarray | None = None) -> float:
    return lq_norm(f, math.inf, mask)


def w1q_norm(f: SampledFamily, q: float) -> SobolevReport:
    """L^q norm of f plus the L^q norms of its forward differences."""
    derivatives = [lq_norm(fd_derivative(f, axis), q) for axis in range(f.grid.dim)]
    return SobolevReport(lq=lq_norm(f, q), derivative_lq=tuple(derivatives), q=q)


def family_difference(f: SampledFamily, g: SampledFamily) -> SampledFamily:
    """Node-wise difference of two compatible numeric families."""
    f.require_compatible(g)
    if f.kind == ValueKind.UNORDERED:
        raise BadParam("Unordered families cannot be subtracted; use d2 based quantities")
    kind = ValueKind.VECTOR if f.kind == ValueKind.ORDERED else f.kind
    return f.with_values(f.values - g.values, kind=kind, meta={})


def _pair_count(n: int) -> int:
    return n * (n - 1) // 2


def _distance_rows(f: SampledFamily, k: int, flat: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Distances between sample k and the samples listed in ``others``."""
    if f.kind == ValueKind.UNORDERED:
        x = UnorderedSpectrum(flat[k])
        return np.array([d2(x, UnorderedSpectrum(flat[j])) for j in others])
    diff = flat[others] - flat[k]
    diff = np.abs(diff.reshape(others.size, -1))
    return np.sqrt(np.sum(diff * diff, axis=1))


def _chain_distances(f: SampledFamily, nodes: np.ndarray) -> np.ndarray:
    """Distances between samples at consecutive entries of ``nodes``."""
    flat = f.flat_values()
    first, second = flat[nodes[:-1]], flat[nodes[1:]]
    if f.kind == ValueKind.UNORDERED:
        return np.array([d2(UnorderedSpectrum(a), UnorderedSpectrum(b)) for a, b in zip(first, second)])
    steps = np.abs((second - first).reshape(max(nodes.size - 1, 0), -1))
    return np.sqrt(np.sum(steps * steps, axis=1))


def adjacent_distances(f: SampledFamily) -> np.ndarray:
    """Distances between consecutive samples of a 1-D family (d2 for unordered tuples)."""
    return _chain_distances(f, np.arange(f.node_count))


def holder_seminorm(
    f: SampledFamily,
    alpha: float,
    mask: np.ndarray | None = None,
    pair_budget: int | None = None,
    all_pairs: bool = False,
) -> float:
    """Max over node pairs of dist(f(x), f(y)) / |x - y|^alpha.

    With alpha = 1 on a 1-D grid only consecutive selected nodes are scanned
    unless ``all_pairs`` is set; by the triangle inequality a pair spanning
    other selected nodes never has the larger ratio.
    """
    if not 0.0 < alpha <= 1.0:
        raise BadParam(f"Holder exponent must lie in (0, 1], got {alpha}")
    selected = np.ones(f.grid.counts, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    flat = f.flat_values()
    flat_mask = selected.reshape(-1)

    if alpha == 1.0 and f.grid.dim == 1 and not all_pairs:
        nodes = np.flatnonzero(flat_mask)
        if nodes.size < 2:
            return 0.0
        ratios = _chain_distances(f, nodes) / (np.diff(nodes) * f.grid.spacing[0])
        return float(ratios.max())

    nodes = np.flatnonzero(flat_mask)
    budget = config.PAIR_BUDGET if pair_budget is None else pair_budget
    if _pair_count(nodes.size) > budget:
        raise PairBudgetExceeded(f"{_pair_count(nodes.size)} pairs exceed the budget of {budget}")
    coords = f.grid.coordinates().reshape(f.node_count, f.grid.dim)
    best = 0.0
    for position, k in enumerate(nodes[:-1]):
        others = nodes[position + 1:]
        spread = np.linalg.norm(coords[others] - coords[k], axis=1)
        ratios = _distance_rows(f, int(k), flat, others) / spread ** alpha
        best = max(best, float(ratios.max()))
    return best


def holder_norm(f: SampledFamily, alpha: float, mask: np.ndarray | None = None, pair_budget: int | None = None) -> float:
    """Full C^{0,alpha} norm: sup norm plus Holder seminorm."""
    return sup_norm(f, mask) + holder_seminorm(f, alpha, mask, pair_budget)


def lipschitz_constant_gap(f: SampledFamily, g: SampledFamily, mask: np.ndarray | None = None) -> float:
    """|Lip(f) - Lip(g)| on the masked nodes."""
    f.require_compatible(g)
    return abs(holder_seminorm(f, 1.0, mask) - holder_seminorm(g, 1.0, mask))


def slope_function(
    f: SampledFamily,
    g: SampledFamily,
    mask: np.ndarray | None = None,
    pair_budget: int | None = None,
) -> float:
    """Sup over distinct node pairs of |s_f(x, y) - s_g(x, y)|."""
    if f.grid != g.grid or f.value_shape != g.value_shape:
        raise GridMismatch("Slope comparison needs families on the same grid with the same value shape")
    selected = np.ones(f.grid.counts, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    nodes = np.flatnonzero(selected.reshape(-1))
    budget = config.PAIR_BUDGET if pair_budget is None else pair_budget
    if _pair_count(nodes.size) > budget:
        raise PairBudgetExceeded(f"{_pair_count(nodes.size)} pairs exceed the budget of {budget}")
    coords = f.grid.coordinates().reshape(f.node_count, f.grid.dim)
    flat_f, flat_g = f.flat_values(), g.flat_values()
    best = 0.0
    for position, k in enumerate(nodes[:-1]):
        others = nodes[position + 1:]
        spread = np.linalg.norm(coords[others] - coords[k], axis=1)
        s_f = _distance_rows(f, int(k), flat_f, others) / spread
        s_g = _distance_rows(g, int(k), flat_g, others) / spread
        best = max(best, float(np.abs(s_f - s_g).max()))
    return best


def _require_curve(f: SampledFamily):
    if f.grid.dim != 1:
        raise NotCurve(f"Expected a 1-D grid, got dimension {f.grid.dim}")


def metric_speed(curve: SampledFamily) -> SampledFamily:
    """Per cell, the distance between consecutive samples divided by h."""
    _require_curve(curve)
    speeds = adjacent_distances(curve) / curve.grid.spacing[0]
    return SampledFamily(curve.grid.shrink(0), speeds, ValueKind.SCALAR, cell_axes={0})


def q_energy(curve: SampledFamily, q: float) -> float:
    """Riemann sum of speed^q over the cells of a curve."""
    _check_exponent(q)
    if q == math.inf:
        raise BadExponent("q-energy needs a finite exponent")
    speed = metric_speed(curve)
    return float(np.sum(speed.values ** q) * curve.grid.spacing[0])


def _matched_next(current: np.ndarray, following: np.ndarray) -> np.ndarray:
    """Reorders ``following`` to the optimal matching with ``current`` (first lexicographic minimizer)."""
    d = current.size
    table = permutations(d)
    cost = np.abs(current[:, np.newaxis] - following[np.newaxis, :]) ** 2
    best = int(np.argmin(cost[np.arange(d), table].sum(axis=1)))
    return following[table[best]]


def s1_profile(f: SampledFamily, g: SampledFamily, tie_tol: float | None = None):
    """Cellwise s_1 values and the cells whose value depends on the tie-broken ordering.

    Across each cell both curves are parameterized by optimal matchings of the
    right node to the left node; s_1 is the largest derivative mismatch over
    all orderings minimizing d_2 at the cell midpoint.
    """
    _require_curve(f)
    f.require_compatible(g)
    if f.kind != ValueKind.UNORDERED:
        raise BadParam("d^{1,q} is defined for curves of unordered tuples")
    if g.flat_values().tobytes() < f.flat_values().tobytes():
        f, g = g, f
    h = f.grid.spacing[0]
    flat_f, flat_g = f.flat_values(), g.flat_values()
    cells = f.node_count - 1
    values = np.zeros(cells)
    tied = np.zeros(cells, dtype=bool)
    for k in range(cells):
        next_f = _matched_next(flat_f[k], flat_f[k + 1])
        next_g = _matched_next(flat_g[k], flat_g[k + 1])
        df = (next_f - flat_f[k]) / h
        dg = (next_g - flat_g[k]) / h
        mid_f = UnorderedSpectrum((flat_f[k] + next_f) / 2.0)
        mid_g = UnorderedSpectrum((flat_g[k] + next_g) / 2.0)
        orderings = minimizing_permutations(mid_f, mid_g, tie_tol)
        mismatches = [float(np.linalg.norm(df - dg[list(tau)])) for tau in orderings]
        values[k] = max(mismatches)
        tied[k] = len(orderings) > 1 and max(mismatches) != mismatches[0]
    return values, tied


def d1q_semimetric(
    f: SampledFamily,
    g: SampledFamily,
    q: float,
    mask: np.ndarray | None = None,
    tie_tol: float | None = None,
) -> tuple[float, float]:
    """Returns (sup of s_0 over masked nodes, L^q norm of s_1 over masked cells)."""
    _check_exponent(q)
    _require_curve(f)
    f.require_compatible(g)
    selected = np.ones(f.grid.counts, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    flat_f, flat_g = f.flat_values(), g.flat_values()
    s0 = [d2(UnorderedSpectrum(a), UnorderedSpectrum(b)) for a, b in zip(flat_f, flat_g)]
    s0_sup = max((v for v, keep in zip(s0, selected) if keep), default=0.0)

    s1, tied = s1_profile(f, g, tie_tol)
    if tied.any():
        logger.info(f"s1 depends on the tie-broken ordering on {int(tied.sum())} cells")
    cells = SampledFamily(f.grid.shrink(0), s1, ValueKind.SCALAR, cell_axes={0})
    return float(s0_sup), lq_norm(cells, q, selected[:-1])
