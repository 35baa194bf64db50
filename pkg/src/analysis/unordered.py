# src/analysis/unordered.py

"""
Metrics on unordered complex tuples (optimal assignment), Almgren maps and
embedding, and the sorting isomorphism for real tuples.
"""

import bisect
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from src import config
from src.errors import BadParam, DegeneratePair, NotRealTuple, NotUnitModulus, SizeMismatch, TooLarge
from src.models.spectrum import OrderedSpectrum, UnorderedSpectrum
from src.utils.decorators import same_size_required

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12


@lru_cache(maxsize=None)
def permutations(d: int) -> np.ndarray:
    """All permutations of range(d) in lexicographic order, one per row."""
    table = np.array(list(itertools.permutations(range(d))), dtype=np.intp).reshape(-1, d)
    table.setflags(write=False)
    return table


def _ordered_pair(x: UnorderedSpectrum, y: UnorderedSpectrum):
    """Canonical representatives in a fixed operand order, so metrics are bit-symmetric."""
    if y.sort_key() < x.sort_key():
        x, y = y, x
    return x.canonical(), y.canonical()


def _method(d: int, method: str, brute_force_max: int | None) -> str:
    limit = config.BRUTE_FORCE_MAX if brute_force_max is None else brute_force_max
    if method == "auto":
        return "brute" if d <= limit else "assignment"
    if method not in ("brute", "assignment"):
        raise BadParam(f"Unknown assignment method '{method}'")
    return method


@same_size_required
def d2(x: UnorderedSpectrum, y: UnorderedSpectrum, method: str = "auto", brute_force_max: int | None = None) -> float:
    """Minimum over permutations of the Euclidean distance between representatives."""
    if len(x) == 0:
        return 0.0
    z, w = _ordered_pair(x, y)
    cost = np.abs(z[:, np.newaxis] - w[np.newaxis, :]) ** 2
    if _method(z.size, method, brute_force_max) == "brute":
        table = permutations(z.size)
        total = cost[np.arange(z.size), table].sum(axis=1).min()
    else:
        rows, cols = linear_sum_assignment(cost)
        total = cost[rows, cols].sum()
    return float(np.sqrt(total))


@same_size_required
def d_inf(x: UnorderedSpectrum, y: UnorderedSpectrum, method: str = "auto", brute_force_max: int | None = None) -> float:
    """Bottleneck assignment: minimum over permutations of the largest pointwise distance."""
    if len(x) == 0:
        return 0.0
    z, w = _ordered_pair(x, y)
    cost = np.abs(z[:, np.newaxis] - w[np.newaxis, :])
    if _method(z.size, method, brute_force_max) == "brute":
        table = permutations(z.size)
        return float(cost[np.arange(z.size), table].max(axis=1).min())

    candidates = np.unique(cost)

    def feasible(t):
        graph = csr_matrix(cost <= t)
        matching = maximum_bipartite_matching(graph, perm_type="column")
        return not (matching == -1).any()

    index = bisect.bisect_left(candidates, True, key=feasible)
    return float(candidates[index])


@same_size_required
def minimizing_permutations(
    x: UnorderedSpectrum,
    y: UnorderedSpectrum,
    tie_tol: float | None = None,
    brute_force_max: int | None = None,
) -> list[tuple[int, ...]]:
    """All sigma with ||x - sigma y||_2 <= d2(x, y) + tie_tol, in lexicographic order.

    ``(sigma y)_i = y_{sigma(i)}``; the first entry is the lexicographically
    smallest minimizer.
    """
    d = len(x)
    limit = config.BRUTE_FORCE_MAX if brute_force_max is None else brute_force_max
    if d > limit:
        raise TooLarge(f"minimizing_permutations enumerates S_d, d={d} exceeds {limit}")
    table = permutations(d)
    cost = np.abs(x.points[:, np.newaxis] - y.points[np.newaxis, :]) ** 2
    distances = np.sqrt(cost[np.arange(d), table].sum(axis=1))
    best = distances.min()
    tol = 1e-9 * (1.0 + best) if tie_tol is None else tie_tol
    keep = np.flatnonzero(distances <= best + tol)
    return [tuple(int(i) for i in table[k]) for k in keep]


def _check_unit(theta: complex, tol: float = UNIT_TOL):
    if abs(abs(theta) - 1.0) > tol:
        raise NotUnitModulus(f"|theta| = {abs(theta)} is not 1")


def almgren_map(theta: complex, x: UnorderedSpectrum) -> OrderedSpectrum:
    """Sorted real parts of theta * z_i."""
    _check_unit(theta)
    return OrderedSpectrum(np.sort((theta * x.points).real))


@dataclass(frozen=True, eq=False)
class AlmgrenEmbedding:
    """Scaled concatenation of Almgren maps over a set of unit directions."""

    d: int
    thetas: np.ndarray

    def __post_init__(self):
        thetas = np.array(self.thetas, dtype=np.complex128, copy=True).reshape(-1)
        if self.d < 1 or thetas.size < 1:
            raise BadParam("Embedding needs d >= 1 and at least one direction")
        for theta in thetas:
            _check_unit(theta)
        thetas.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)

    @classmethod
    def default(cls, d: int, h: int | None = None) -> "AlmgrenEmbedding":
        """h-th roots of unity, with h = 2d^2 + 1 unless given."""
        h = 2 * d * d + 1 if h is None else h
        return cls(d, np.exp(2j * np.pi * np.arange(h) / h))

    @property
    def h(self) -> int:
        return self.thetas.size

    @property
    def n_dim(self) -> int:
        return self.d * self.h

    @property
    def scale(self) -> float:
        return 1.0 / np.sqrt(self.h)


def embed_points(embedding: AlmgrenEmbedding, points: np.ndarray) -> np.ndarray:
    """Embeds a stack of representatives of shape (..., d) into shape (..., N)."""
    points = np.asarray(points, dtype=np.complex128)
    if points.shape[-1] != embedding.d:
        raise SizeMismatch(f"Tuple size {points.shape[-1]} does not match embedding d={embedding.d}")
    rotated = (embedding.thetas[:, np.newaxis] * points[..., np.newaxis, :]).real
    rotated = np.sort(rotated, axis=-1)
    return rotated.reshape(*points.shape[:-1], embedding.n_dim) * embedding.scale


def embed(embedding: AlmgrenEmbedding, x: UnorderedSpectrum) -> np.ndarray:
    """Returns the real N-vector of an unordered tuple."""
    return embed_points(embedding, x.points)


def embedding_distortion(embedding: AlmgrenEmbedding, sample) -> tuple[float, float]:
    """Returns (max, min) of ||embed(x) - embed(y)|| / d2(x, y) over sample pairs."""
    ratios = []
    for x, y in sample:
        distance = d2(x, y)
        if distance == 0.0:
            raise DegeneratePair("Sample pair is the same unordered tuple")
        ratios.append(np.linalg.norm(embed(embedding, x) - embed(embedding, y)) / distance)
    if not ratios:
        raise BadParam("Distortion needs at least one pair")
    return float(max(ratios)), float(min(ratios))


def up_map(x: UnorderedSpectrum, real_tol: float | None = None) -> OrderedSpectrum:
    """Increasingly sorted real parts of a real tuple."""
    scale = max(1.0, float(np.max(np.abs(x.points)))) if len(x) else 1.0
    tol = (config.REAL_TOL if real_tol is None else real_tol) * scale
    if np.any(np.abs(x.points.imag) > tol):
        raise NotRealTuple("Tuple has non-negligible imaginary parts")
    return OrderedSpectrum(np.sort(x.points.real))
