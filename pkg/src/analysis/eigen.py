# src/analysis/eigen.py

"""
Eigensolvers for Hermitian and normal matrices, singular values, the ordered
characteristic map and spectral statistics.

Every solver has a stack variant that takes an array of shape (T, d, d) and
runs one batched Jacobi solve for all T matrices.
"""

import logging
import math

import numpy as np

from src import config
from src.analysis.jacobi import fix_phases, gram_eigenvalues, jacobi_eigh
from src.errors import BadParam, NotDensityMatrix, NotHermitian, NotNormal, ShapeError, UnsupportedKind
from src.models.matrix import ComplexMatrix, frobenius_norm, hermitian_mask, is_hermitian, is_normal, normal_mask
from src.models.spectrum import EigenDecomposition, EigenStack, OrderedSpectrum
from src.utils.decorators import square_required

logger = logging.getLogger(__name__)

# H, then K, then H again inside clusters that survive both
REFINE_DEPTH = 2


def _adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _residuals(m: np.ndarray, spectra: np.ndarray, bases: np.ndarray) -> np.ndarray:
    rebuilt = (bases * spectra[..., np.newaxis, :]) @ _adjoint(bases)
    return np.linalg.norm(m - rebuilt, axis=(-2, -1))


def _as_stack(stack) -> np.ndarray:
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ShapeError(f"Expected a stack of square matrices, got shape {stack.shape}")
    if not np.all(np.isfinite(stack)):
        raise ShapeError("Matrix entries must be finite")
    return stack


def _first_failure(mask: np.ndarray) -> int:
    return int(np.flatnonzero(~mask)[0])


@square_required
def eig_hermitian(a: ComplexMatrix, eig_tol: float | None = None, max_sweeps: int | None = None) -> EigenDecomposition:
    """Diagonalizes a Hermitian matrix; spectrum ascending and exactly real."""
    if not is_hermitian(a):
        raise NotHermitian("Matrix is not Hermitian at classTol")
    m = (a.data + a.data.conj().T) / 2.0
    values, vectors, sweeps = jacobi_eigh(m, eig_tol, max_sweeps)
    spectrum = values.astype(np.complex128)
    return EigenDecomposition(
        spectrum=spectrum,
        basis=ComplexMatrix(vectors),
        residual=float(_residuals(a.data, spectrum, vectors)),
        sweeps=sweeps,
    )


def eig_hermitian_stack(stack, eig_tol: float | None = None, max_sweeps: int | None = None) -> EigenStack:
    """Batched ``eig_hermitian``; NotHermitian carries the index of the first offending matrix."""
    stack = _as_stack(stack)
    mask = hermitian_mask(stack)
    if not mask.all():
        raise NotHermitian("Matrix is not Hermitian at classTol", node=_first_failure(mask))
    m = (stack + _adjoint(stack)) / 2.0
    values, vectors, _ = jacobi_eigh(m, eig_tol, max_sweeps)
    spectra = values.astype(np.complex128)
    return EigenStack(spectra, vectors, _residuals(stack, spectra, vectors))


def _clusters(values: np.ndarray, radius: float) -> list[np.ndarray]:
    """Groups ascending values whose consecutive gaps are within ``radius``."""
    if values.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(values) > radius) + 1
    return np.split(np.arange(values.size), breaks)


def _split_parts(m: np.ndarray):
    """Hermitian and skew Hermitian parts H, K with A = H + iK."""
    adj = _adjoint(m)
    h = (m + adj) / 2.0
    k = (m - adj) / 2.0j
    return h, (k + _adjoint(k)) / 2.0


def _refine(block: np.ndarray, parts, depth: int, radius: float, eig_tol, max_sweeps):
    """Rediagonalizes span(block) with the next part and recurses into its clusters."""
    op = parts[depth % 2]
    compressed = block.conj().T @ op @ block
    compressed = (compressed + compressed.conj().T) / 2.0
    values, rotation, sweeps = jacobi_eigh(compressed, eig_tol, max_sweeps)
    block = block @ rotation
    if depth < REFINE_DEPTH:
        for group in _clusters(values, radius):
            if group.size > 1:
                block[:, group], extra = _refine(block[:, group], parts, depth + 1, radius, eig_tol, max_sweeps)
                sweeps += extra
    return block, sweeps


def _resolve_clusters(h_values, basis, parts, radius, eig_tol, max_sweeps) -> int:
    """Diagonalizes the compressed K inside each cluster of H values, in place."""
    sweeps = 0
    for group in _clusters(h_values, radius):
        if group.size > 1:
            basis[:, group], extra = _refine(basis[:, group], parts, 1, radius, eig_tol, max_sweeps)
            sweeps += extra
    return sweeps


def _cluster_radius(norm, cluster_tol: float | None):
    tol = config.CLUSTER_TOL if cluster_tol is None else cluster_tol
    return max(tol, config.REFINE_TOL) * norm


@square_required
def eig_normal(
    a: ComplexMatrix,
    eig_tol: float | None = None,
    max_sweeps: int | None = None,
    cluster_tol: float | None = None,
) -> EigenDecomposition:
    """Diagonalizes a normal matrix through its commuting Hermitian parts.

    H values closer than the cluster radius are treated as one cluster; the
    radius is never below REFINE_TOL * ||A|| since eigenvectors across smaller
    H gaps are too ill-conditioned to separate distinct K values.
    """
    if not is_normal(a):
        raise NotNormal("Matrix is not normal at classTol")
    m = a.data
    parts = _split_parts(m)
    h_values, basis, sweeps = jacobi_eigh(parts[0], eig_tol, max_sweeps)
    radius = _cluster_radius(frobenius_norm(a), cluster_tol)
    sweeps += _resolve_clusters(h_values, basis, parts, radius, eig_tol, max_sweeps)

    basis = fix_phases(basis)
    spectrum = np.einsum("ij,ik,kj->j", basis.conj(), m, basis)
    return EigenDecomposition(
        spectrum=spectrum,
        basis=ComplexMatrix(basis),
        residual=float(_residuals(m, spectrum, basis)),
        sweeps=sweeps,
    )


def eig_normal_stack(
    stack,
    eig_tol: float | None = None,
    max_sweeps: int | None = None,
    cluster_tol: float | None = None,
) -> EigenStack:
    """Batched ``eig_normal``; only matrices with clustered H values leave the batch."""
    stack = _as_stack(stack)
    mask = normal_mask(stack)
    if not mask.all():
        raise NotNormal("Matrix is not normal at classTol", node=_first_failure(mask))
    h, k = _split_parts(stack)
    h_values, bases, _ = jacobi_eigh(h, eig_tol, max_sweeps)
    radii = _cluster_radius(np.linalg.norm(stack, axis=(1, 2)), cluster_tol)
    clustered = np.flatnonzero(np.any(np.diff(h_values, axis=1) <= radii[:, np.newaxis], axis=1))
    for t in clustered:
        _resolve_clusters(h_values[t], bases[t], (h[t], k[t]), radii[t], eig_tol, max_sweeps)

    bases = fix_phases(bases)
    spectra = np.einsum("tij,tik,tkj->tj", bases.conj(), stack, bases)
    return EigenStack(spectra, bases, _residuals(stack, spectra, bases))


def ordered_spectrum(a: ComplexMatrix) -> OrderedSpectrum:
    """Returns the increasingly ordered eigenvalues of a Hermitian matrix."""
    decomposition = eig_hermitian(a)
    return OrderedSpectrum(np.sort(decomposition.spectrum.real))


def singular_values(a: ComplexMatrix) -> OrderedSpectrum:
    """Returns sigma_1 >= ... >= sigma_d >= 0 for a D x d matrix with d <= D."""
    if a.cols > a.rows:
        raise ShapeError(f"Expected d <= D, got a {a.rows}x{a.cols} matrix; pass the transpose")
    return OrderedSpectrum(singular_values_stack(a.data[np.newaxis])[0], increasing=False)


def singular_values_stack(stack) -> np.ndarray:
    """Descending singular values of each matrix of a (T, D, d) stack, min(D, d) per row."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3:
        raise ShapeError(f"Expected a stack of matrices, got shape {stack.shape}")
    return np.sqrt(gram_eigenvalues(stack))[:, ::-1]


def augmented_hermitian(a: ComplexMatrix) -> ComplexMatrix:
    """Returns the Hermitian block matrix [[0, A], [A*, 0]]."""
    rows, cols = a.rows, a.cols
    block = np.zeros((rows + cols, rows + cols), dtype=np.complex128)
    block[:rows, rows:] = a.data
    block[rows:, :rows] = a.data.conj().T
    return ComplexMatrix(block)


def eigenvalue_residual(a: ComplexMatrix, decomposition: EigenDecomposition) -> float:
    """Returns ||V* V - I||_2 of a decomposition basis."""
    v = decomposition.basis.data
    return float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])))


def _density_spectrum(a: ComplexMatrix) -> np.ndarray:
    if not is_hermitian(a):
        raise NotDensityMatrix("Density matrix must be Hermitian")
    values = ordered_spectrum(a).values
    if np.any(values < -1e-8) or abs(values.sum() - 1.0) > 1e-8:
        raise NotDensityMatrix("Density matrix needs a nonnegative spectrum with unit trace")
    return np.clip(values, 0.0, None)


def spectral_statistics(a: ComplexMatrix, kind: str, **params) -> float:
    """Spectral functionals of a matrix.

    Kinds: ``schatten`` (p, raw p-th power sum), ``ky_fan`` (k),
    ``von_neumann``, ``renyi`` (alpha > 1) and ``spectral_gap`` (i, 1-based).
    """
    if kind == "schatten":
        p = float(params.get("p", 2.0))
        if not p >= 1.0:
            raise BadParam(f"Schatten exponent must be >= 1, got {p}")
        sigma = singular_values(a if a.rows >= a.cols else a.H).values
        return float(np.sum(sigma ** p))

    if kind == "ky_fan":
        sigma = singular_values(a if a.rows >= a.cols else a.H).values
        k = int(params.get("k", 1))
        if not 1 <= k <= sigma.size:
            raise BadParam(f"Ky Fan index k={k} out of range 1..{sigma.size}")
        return float(np.sum(sigma[:k]))

    if kind == "von_neumann":
        values = _density_spectrum(a)
        positive = values[values > 0]
        return float(-np.sum(positive * np.log(positive)))

    if kind == "renyi":
        alpha = float(params.get("alpha", 2.0))
        if not alpha > 1.0:
            raise BadParam(f"Renyi order must be > 1, got {alpha}")
        values = _density_spectrum(a)
        return float(math.log(np.sum(values ** alpha)) / (1.0 - alpha))

    if kind == "spectral_gap":
        values = ordered_spectrum(a).values
        i = int(params.get("i", 1))
        if not 1 <= i < values.size:
            raise BadParam(f"Gap index i={i} out of range 1..{values.size - 1}")
        return float(values[i] - values[i - 1])

    raise UnsupportedKind(f"Unknown spectral statistic '{kind}'")
