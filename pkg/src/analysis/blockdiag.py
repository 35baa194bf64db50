# src/analysis/blockdiag.py

"""
Two-block unitary block-diagonalization of normal matrices along a spectral
gap, separation margins and the pointwise difference bounds for families.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree

from src import config
from src.analysis.eigen import eig_hermitian, eig_normal
from src.errors import AllEqual, BadParam, ClusterFlip, GapTooSmall, NotNormal, ResidualTooLarge, ZeroMatrix
from src.models.family import SampledFamily, ValueKind
from src.models.matrix import ComplexMatrix, frobenius_norm, is_hermitian, is_normal, traceless_part
from src.models.report import ExperimentReport

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX = 12


@dataclass(frozen=True)
class SpectralPartition:
    """0-based index clusters into a decomposition spectrum, separated by ``gap``."""

    cluster_a: tuple
    cluster_b: tuple
    gap: float

    def __post_init__(self):
        a = tuple(sorted(int(i) for i in self.cluster_a))
        b = tuple(sorted(int(i) for i in self.cluster_b))
        if not a or not b:
            raise BadParam("Both clusters must be nonempty")
        if set(a) & set(b) or sorted(a + b) != list(range(len(a) + len(b))):
            raise BadParam("Clusters must be disjoint and cover every index")
        if not self.gap > 0:
            raise BadParam(f"Partition gap must be positive, got {self.gap}")
        object.__setattr__(self, "cluster_a", a)
        object.__setattr__(self, "cluster_b", b)

    @property
    def size(self) -> int:
        return len(self.cluster_a) + len(self.cluster_b)


@dataclass(frozen=True)
class BlockDiagonalization:
    U: ComplexMatrix
    block_b: ComplexMatrix
    block_c: ComplexMatrix
    off_diag_residual: float
    partition: SpectralPartition


def _hermitian_split(values: np.ndarray):
    order = np.argsort(values, kind="stable")
    gaps = np.diff(values[order])
    cut = int(np.argmax(gaps))
    return order[: cut + 1], order[cut + 1:], float(gaps[cut])


def _exhaustive_split(distances: np.ndarray):
    """Best of the 2^(d-1) - 1 bipartitions; index d-1 always lies in the second cluster."""
    d = distances.shape[0]
    masks = np.arange(1, 2 ** (d - 1))
    members = ((masks[:, np.newaxis] >> np.arange(d)) & 1).astype(bool)
    members[:, d - 1] = False
    cross = members[:, :, np.newaxis] & ~members[:, np.newaxis, :]
    gaps = np.where(cross, distances[np.newaxis], np.inf).min(axis=(1, 2))
    best = int(np.argmax(gaps))
    chosen = members[best]
    return np.flatnonzero(chosen), np.flatnonzero(~chosen), float(gaps[best])


def _spanning_tree_split(distances: np.ndarray):
    """Single-linkage split: drop the longest edge of a minimum spanning tree."""
    weights = np.where(distances > 0, distances, np.finfo(float).tiny)
    np.fill_diagonal(weights, 0.0)
    tree = minimum_spanning_tree(csr_matrix(weights)).toarray()
    rows, cols = np.nonzero(tree)
    longest = int(np.argmax(tree[rows, cols]))
    tree[rows[longest], cols[longest]] = 0.0
    _, labels = connected_components(csr_matrix(tree), directed=False)
    a = np.flatnonzero(labels == labels[0])
    b = np.flatnonzero(labels != labels[0])
    gap = float(distances[np.ix_(a, b)].min())
    return a, b, gap


def partition_by_gap(spectrum, strategy: str = "hermitian", gap_tol: float | None = None) -> SpectralPartition:
    """Splits a spectrum into two clusters.

    ``hermitian`` cuts the sorted real spectrum at its largest gap; ``normal``
    maximizes the inter-cluster distance (exhaustive up to d = 12, minimum
    spanning tree beyond).
    """
    values = np.asarray(spectrum, dtype=np.complex128).reshape(-1)
    tol = (config.GAP_TOL if gap_tol is None else gap_tol) * max(1.0, float(np.abs(values).max(initial=0.0)))
    distances = np.abs(values[:, np.newaxis] - values[np.newaxis, :])
    if values.size < 2 or distances.max() < tol:
        raise AllEqual("Spectrum has no two values separated by gapTol")

    if strategy == "hermitian":
        a, b, gap = _hermitian_split(values.real)
    elif strategy == "normal":
        split = _exhaustive_split if values.size <= EXHAUSTIVE_MAX else _spanning_tree_split
        a, b, gap = split(distances)
    else:
        raise BadParam(f"Unknown partition strategy '{strategy}'")
    return SpectralPartition(tuple(a), tuple(b), gap)


def decompose(a: ComplexMatrix):
    """eig_hermitian for Hermitian input, eig_normal otherwise."""
    if is_hermitian(a):
        return eig_hermitian(a)
    return eig_normal(a)


def spectral_partition(a: ComplexMatrix, strategy: str | None = None) -> SpectralPartition:
    """Partition of the decomposition spectrum of ``a``."""
    hermitian = is_hermitian(a)
    strategy = strategy or ("hermitian" if hermitian else "normal")
    return partition_by_gap(decompose(a).spectrum, strategy)


def block_diagonalize(
    a: ComplexMatrix,
    partition: SpectralPartition,
    gap_tol: float | None = None,
    bd_tol: float | None = None,
) -> BlockDiagonalization:
    """Unitary U grouping eigenvectors by cluster so that U* A U = diag(B, C)."""
    if not is_normal(a):
        raise NotNormal("Block diagonalization needs a normal matrix")
    if partition.size != a.rows:
        raise BadParam(f"Partition covers {partition.size} indices, matrix has {a.rows}")
    norm = frobenius_norm(a)
    tol = config.GAP_TOL if gap_tol is None else gap_tol
    if partition.gap < tol * norm:
        raise GapTooSmall(f"Gap {partition.gap:.3e} below {tol:.1e} * ||A||")

    hermitian = is_hermitian(a)
    basis = decompose(a).basis.data
    columns = list(partition.cluster_a) + list(partition.cluster_b)
    u = basis[:, columns]
    t = u.conj().T @ a.data @ u
    k = len(partition.cluster_a)
    block_b, block_c = t[:k, :k], t[k:, k:]
    if hermitian:
        block_b = (block_b + block_b.conj().T) / 2.0
        block_c = (block_c + block_c.conj().T) / 2.0
    residual = float(np.sqrt(np.linalg.norm(t[:k, k:]) ** 2 + np.linalg.norm(t[k:, :k]) ** 2))

    limit = (config.BD_TOL if bd_tol is None else bd_tol) * norm
    if residual > limit:
        logger.warning(f"Residuo fuori diagonale {residual:.3e} oltre la soglia {limit:.3e}")
        raise ResidualTooLarge(f"Off-diagonal residual {residual:.3e} exceeds {limit:.3e}")
    return BlockDiagonalization(ComplexMatrix(u), ComplexMatrix(block_b), ComplexMatrix(block_c), residual, partition)


def separation_margin(a: ComplexMatrix, b: ComplexMatrix, pa: SpectralPartition, pb: SpectralPartition) -> float:
    """min over mu in the first cluster of A, nu in the second cluster of B, of | ||B|| mu - ||A|| nu | / (||A|| ||B||)."""
    norm_a, norm_b = frobenius_norm(a), frobenius_norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroMatrix("Separation margin needs nonzero matrices")
    mu = decompose(a).spectrum[list(pa.cluster_a)]
    nu = decompose(b).spectrum[list(pb.cluster_b)]
    cross = np.abs(norm_b * mu[:, np.newaxis] - norm_a * nu[np.newaxis, :])
    return float(cross.min() / (norm_a * norm_b))


def _block_forms(family: SampledFamily, strategy: str | None, traceless: bool):
    """(U*AU, A) per node with the partition checked for consistency along the grid."""
    matrices = family.flat_values()
    forms, reference = [], None
    for node, data in enumerate(matrices):
        a = ComplexMatrix(data)
        if traceless:
            a = traceless_part(a)
        if frobenius_norm(a) == 0.0:
            raise ZeroMatrix("Family vanishes", node=node)
        partition = spectral_partition(a, strategy)
        key = (partition.cluster_a, partition.cluster_b)
        if reference is None:
            reference = key
        elif key != reference:
            raise ClusterFlip(f"Partition changed from {reference} to {key}", node=node)
        result = block_diagonalize(a, partition)
        forms.append((result.U.data.conj().T @ a.data @ result.U.data, a.data))
    return forms


def bdiag_difference_bounds(
    family_1: SampledFamily,
    family_2: SampledFamily,
    strategy: str | None = None,
    traceless: bool = False,
) -> ExperimentReport:
    """Node-wise and cellwise sides of the block-form difference bounds.

    Records the smallest constant C for which
    ||T_1 - T_2|| <= C ||A_1 - A_2|| holds at every node, and for which the
    finite-difference form holds on every cell with the smaller of the two
    right-hand sides (j = 1, 2).
    """
    if family_1.kind != ValueKind.MATRIX or family_1.grid.dim != 1:
        raise BadParam("Difference bounds need matrix families on a 1-D grid")
    family_1.require_compatible(family_2)
    h = family_1.grid.spacing[0]
    forms_1 = _block_forms(family_1, strategy, traceless)
    forms_2 = _block_forms(family_2, strategy, traceless)

    lhs = np.array([np.linalg.norm(t1 - t2) for (t1, _), (t2, _) in zip(forms_1, forms_2)])
    rhs = np.array([np.linalg.norm(a1 - a2) for (_, a1), (_, a2) in zip(forms_1, forms_2)])

    d_lhs, d_rhs = [], []
    for k in range(len(forms_1) - 1):
        (t1, a1), (t1n, a1n) = forms_1[k], forms_1[k + 1]
        (t2, a2), (t2n, a2n) = forms_2[k], forms_2[k + 1]
        dt = ((t1n - t1) - (t2n - t2)) / h
        da1, da2 = (a1n - a1) / h, (a2n - a2) / h
        spread = np.linalg.norm(a1 - a2)
        scale = max(np.linalg.norm(a1), np.linalg.norm(a2))
        d_lhs.append(np.linalg.norm(dt))
        d_rhs.append(np.linalg.norm(da1 - da2) + (np.linalg.norm(da1) + np.linalg.norm(da2)) * spread / scale)
    d_lhs, d_rhs = np.array(d_lhs), np.array(d_rhs)

    def required(left, right):
        zero_rhs = right == 0.0
        if np.any(left[zero_rhs] > 0.0):
            return np.inf
        ratios = left[~zero_rhs] / right[~zero_rhs]
        return float(ratios.max(initial=0.0))

    c_pointwise = required(lhs, rhs)
    c_derivative = required(d_lhs, d_rhs) if d_lhs.size else 0.0

    report = ExperimentReport(
        name="bdiag_difference_bounds",
        params={"counts": list(family_1.grid.counts), "strategy": strategy, "traceless": traceless},
        provenance=["block-form difference bounds for families of normal matrices"],
    )
    report.add_series("lhs_pointwise", lhs)
    report.add_series("rhs_pointwise", rhs)
    report.add_series("lhs_derivative", d_lhs)
    report.add_series("rhs_derivative", d_rhs)
    report.meta["c_pointwise"] = c_pointwise
    report.meta["c_derivative"] = c_derivative
    constant = max(c_pointwise, c_derivative)
    report.meta["c_required"] = constant
    if np.isfinite(constant):
        report.add_scalar("c_required", constant)
    report.check("c_required_finite", 0.0 if np.isfinite(constant) else 1.0, 0.0, relation="le")
    return report
