# src/analysis/jacobi.py

"""
Parallel-order complex Jacobi kernel on raw numpy arrays.

The kernel knows nothing about the model types so that both the matrix
model (operator norm) and the eigen module can share it. Every step of a
sweep applies d/2 disjoint rotations at once, and stacks of matrices of
shape (..., d, d) are rotated together. A matrix that has converged only
receives identity rotations, so its result does not depend on the batch it
was solved in.
"""

import logging
from functools import lru_cache

import numpy as np

from src import config
from src.errors import NoConvergence

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def round_robin(d: int) -> tuple:
    """Steps of a sweep, each a pair (P, Q) of index arrays of disjoint pivots with P < Q."""
    if d < 2:
        return ()
    n = d + d % 2
    players = list(range(n))
    steps = []
    for _ in range(n - 1):
        pairs = [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < d and q < d]
        p_idx = np.array([p for p, _ in pairs], dtype=np.intp)
        q_idx = np.array([q for _, q in pairs], dtype=np.intp)
        p_idx.setflags(write=False)
        q_idx.setflags(write=False)
        steps.append((p_idx, q_idx))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(steps)


def _rotations(app: np.ndarray, aqq: np.ndarray, apq: np.ndarray):
    """(c, s, phase) annihilating every (p, q) entry; zero entries get the identity."""
    r = np.abs(apq)
    active = r > 0.0
    safe = np.where(active, r, 1.0)
    phase = np.where(active, apq / safe, 1.0)
    with np.errstate(over="ignore"):
        theta = (aqq - app) / (2.0 * safe)
        t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
    t = np.where(theta == 0.0, 1.0, t)
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c, phase


def _off_mass(work: np.ndarray) -> np.ndarray:
    """Frobenius norm of the strictly off-diagonal part of every matrix of the stack."""
    d = work.shape[-1]
    return np.linalg.norm(work[:, ~np.eye(d, dtype=bool)], axis=1)


def _sweep(work: np.ndarray, vectors: np.ndarray, active: np.ndarray):
    for p_idx, q_idx in round_robin(work.shape[-1]):
        apq = np.where(active[:, np.newaxis], work[:, p_idx, q_idx], 0.0)
        c, s, phase = _rotations(work[:, p_idx, p_idx].real, work[:, q_idx, q_idx].real, apq)
        back = np.conj(phase)

        cc, ss, bb = c[:, np.newaxis, :], s[:, np.newaxis, :], back[:, np.newaxis, :]
        for target in (work, vectors):
            col_p, col_q = target[:, :, p_idx], target[:, :, q_idx]
            target[:, :, p_idx] = col_p * cc - col_q * (ss * bb)
            target[:, :, q_idx] = col_p * ss + col_q * (cc * bb)

        cr, sr, pr = c[:, :, np.newaxis], s[:, :, np.newaxis], phase[:, :, np.newaxis]
        row_p, row_q = work[:, p_idx, :], work[:, q_idx, :]
        work[:, p_idx, :] = row_p * cr - row_q * (sr * pr)
        work[:, q_idx, :] = row_p * sr + row_q * (cr * pr)

        hit = active[:, np.newaxis]
        work[:, p_idx, q_idx] = np.where(hit, 0.0, work[:, p_idx, q_idx])
        work[:, q_idx, p_idx] = np.where(hit, 0.0, work[:, q_idx, p_idx])
        work[:, p_idx, p_idx] = work[:, p_idx, p_idx].real
        work[:, q_idx, q_idx] = work[:, q_idx, q_idx].real


def jacobi_eigh(a: np.ndarray, tol: float | None = None, max_sweeps: int | None = None):
    """Diagonalizes a Hermitian array, or a stack of them, by Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with the eigenvalues in
    ascending order and each eigenvector phase-fixed so that its
    largest-modulus component is real positive. For a stack of shape
    (..., d, d) every output carries the same leading dimensions.
    """
    tol = config.EIG_TOL if tol is None else tol
    max_sweeps = config.MAX_SWEEPS if max_sweeps is None else max_sweeps

    a = np.asarray(a, dtype=np.complex128)
    single = a.ndim == 2
    lead, d = a.shape[:-2], a.shape[-1]
    work = np.array(a.reshape(-1, d, d), copy=True)
    vectors = np.broadcast_to(np.eye(d, dtype=np.complex128), work.shape).copy()
    threshold = tol * np.linalg.norm(work.reshape(work.shape[0], -1), axis=1)

    sweeps = np.zeros(work.shape[0], dtype=np.int64)
    active = _off_mass(work) > threshold
    while active.any():
        if np.any(sweeps[active] >= max_sweeps):
            logger.warning(f"Jacobi non converge dopo {max_sweeps} sweep (d={d})")
            raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")
        _sweep(work, vectors, active)
        sweeps[active] += 1
        active = _off_mass(work) > threshold

    values = np.diagonal(work, axis1=1, axis2=2).real.copy()
    order = np.argsort(values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    vectors = fix_phases(np.take_along_axis(vectors, order[:, np.newaxis, :], axis=2))
    logger.debug(f"Jacobi convergito in {int(sweeps.max(initial=0))} sweep (d={d}, {work.shape[0]} matrici)")
    if single:
        return values[0], vectors[0], int(sweeps[0])
    return values.reshape(*lead, d), vectors.reshape(*lead, d, d), sweeps.reshape(lead)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Makes the largest-modulus component of every column real positive."""
    vectors = np.array(vectors, dtype=np.complex128, copy=True)
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=-2)
    lead = np.take_along_axis(vectors, pivots[..., np.newaxis, :], axis=-2)[..., 0, :]
    size = np.abs(lead)
    scale = np.where(size > 0.0, np.conj(lead) / np.where(size > 0.0, size, 1.0), 1.0)
    return vectors * scale[..., np.newaxis, :]


def gram_eigenvalues(a: np.ndarray, tol: float | None = None, max_sweeps: int | None = None) -> np.ndarray:
    """Eigenvalues of the smaller Gram matrix of ``a`` (or of each matrix of a stack), clamped at zero."""
    a = np.asarray(a, dtype=np.complex128)
    adjoint = np.conj(np.swapaxes(a, -1, -2))
    gram = adjoint @ a if a.shape[-2] >= a.shape[-1] else a @ adjoint
    gram = (gram + np.conj(np.swapaxes(gram, -1, -2))) / 2.0
    values, _, _ = jacobi_eigh(gram, tol, max_sweeps)
    return np.clip(values, 0.0, None)
