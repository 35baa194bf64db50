# src/models/matrix.py

"""
Complex dense matrix model, structural predicates, norms and elementary transforms.
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np

from src import config
from src.analysis.jacobi import gram_eigenvalues
from src.errors import NonSquare, ShapeError, ZeroMatrix
from src.utils.decorators import square_required

logger = logging.getLogger(__name__)


class MatrixClass(enum.Enum):
    GENERAL = "General"
    HERMITIAN = "Hermitian"
    NORMAL = "Normal"
    UNITARY = "Unitary"


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Immutable dense complex matrix backed by a read-only complex128 array."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128, copy=True)
        if data.ndim != 2:
            raise ShapeError(f"Expected a 2-D array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ShapeError("Matrix entries must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def H(self) -> "ComplexMatrix":
        return conjugate_transpose(self)

    def __eq__(self, other):
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"ComplexMatrix({self.rows}x{self.cols})"

    @classmethod
    def from_rows(cls, rows) -> "ComplexMatrix":
        return cls(np.asarray(rows, dtype=np.complex128))

    @classmethod
    def diag(cls, values) -> "ComplexMatrix":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    @classmethod
    def identity(cls, d: int) -> "ComplexMatrix":
        return cls(np.eye(d, dtype=np.complex128))

    def to_json(self) -> dict:
        flat = self.data.ravel()
        return {
            "rows": self.rows,
            "cols": self.cols,
            "re": [float(v) for v in flat.real],
            "im": [float(v) for v in flat.imag],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ComplexMatrix":
        rows, cols = int(payload["rows"]), int(payload["cols"])
        re = np.asarray(payload["re"], dtype=np.float64)
        im = np.asarray(payload.get("im", [0.0] * re.size), dtype=np.float64)
        if re.size != rows * cols or im.size != rows * cols:
            raise ShapeError(f"Literal has {re.size} entries, expected {rows * cols}")
        return cls((re + 1j * im).reshape(rows, cols))


def frobenius_norm(a: ComplexMatrix) -> float:
    """Returns the Frobenius norm (sum of squared moduli, square-rooted)."""
    return float(np.linalg.norm(a.data))


def operator_norm(a: ComplexMatrix) -> float:
    """Returns the largest singular value, via the Jacobi solver on the Gram matrix."""
    if a.data.size == 0:
        return 0.0
    return float(np.sqrt(gram_eigenvalues(a.data)[-1]))


def conjugate_transpose(a: ComplexMatrix) -> ComplexMatrix:
    """Returns A*."""
    return ComplexMatrix(a.data.conj().T)


def _adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _norms(m: np.ndarray) -> np.ndarray:
    return np.linalg.norm(m, axis=(-2, -1))


def hermitian_mask(m: np.ndarray, class_tol: float | None = None):
    """||A - A*||_2 <= tol ||A||_2 for one square array or each of a stack."""
    tol = config.CLASS_TOL if class_tol is None else class_tol
    return _norms(m - _adjoint(m)) <= tol * _norms(m)


def normal_mask(m: np.ndarray, class_tol: float | None = None):
    """||A*A - AA*||_2 <= tol ||A||_2^2 for one square array or each of a stack."""
    tol = config.CLASS_TOL if class_tol is None else class_tol
    adj = _adjoint(m)
    norm = _norms(m)
    return _norms(adj @ m - m @ adj) <= tol * norm * norm


@square_required
def classify(a: ComplexMatrix, class_tol: float | None = None) -> frozenset:
    """Returns every MatrixClass whose residual test passes at ``class_tol``."""
    tol = config.CLASS_TOL if class_tol is None else class_tol
    m = a.data
    found = set()

    if hermitian_mask(m, tol):
        found.add(MatrixClass.HERMITIAN)
    if normal_mask(m, tol):
        found.add(MatrixClass.NORMAL)
    if np.linalg.norm(_adjoint(m) @ m - np.eye(a.rows)) <= tol:
        found.add(MatrixClass.UNITARY)
    if not found:
        found.add(MatrixClass.GENERAL)
    return frozenset(found)


def is_hermitian(a: ComplexMatrix, class_tol: float | None = None) -> bool:
    return a.is_square and bool(hermitian_mask(a.data, class_tol))


def is_normal(a: ComplexMatrix, class_tol: float | None = None) -> bool:
    return a.is_square and bool(normal_mask(a.data, class_tol))


@square_required
def traceless_part(a: ComplexMatrix) -> ComplexMatrix:
    """Returns A - (Tr A / d) I."""
    shift = np.trace(a.data) / a.rows
    return ComplexMatrix(a.data - shift * np.eye(a.rows))


def normalize(a: ComplexMatrix) -> ComplexMatrix:
    """Returns A / ||A||_2 (Frobenius)."""
    norm = frobenius_norm(a)
    if norm == 0.0:
        raise ZeroMatrix("Cannot normalize the zero matrix")
    return ComplexMatrix(a.data / norm)


def hermitian_part(a: ComplexMatrix) -> ComplexMatrix:
    """Returns (A + A*) / 2."""
    if not a.is_square:
        raise NonSquare(f"Matrix is {a.rows}x{a.cols}")
    return ComplexMatrix((a.data + a.data.conj().T) / 2.0)


def random_hermitian(rng: np.random.Generator, d: int) -> ComplexMatrix:
    """Gaussian Hermitian matrix (unnormalized, GUE-style)."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return ComplexMatrix((g + g.conj().T) / 2.0)


def random_unitary(rng: np.random.Generator, d: int) -> ComplexMatrix:
    """Unitary factor of the QR decomposition of a complex Gaussian matrix."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    diag = np.diag(r)
    phases = np.where(diag == 0, 1.0, diag / np.abs(diag))
    return ComplexMatrix(q * phases[np.newaxis, :])


def random_normal(rng: np.random.Generator, d: int, spectrum=None) -> ComplexMatrix:
    """U diag(z) U* with Gaussian complex z unless ``spectrum`` is given."""
    if spectrum is None:
        spectrum = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    u = random_unitary(rng, d).data
    z = np.asarray(spectrum, dtype=np.complex128)
    return ComplexMatrix((u * z[np.newaxis, :]) @ u.conj().T)


def random_general(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    return ComplexMatrix(rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))
