# src/models/spectrum.py

"""
Spectrum value types: ordered real spectra, unordered complex tuples and
eigen-decompositions.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import BadParam, ShapeError
from src.models.matrix import ComplexMatrix


def _frozen(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise ShapeError("Spectrum values must be finite")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class OrderedSpectrum:
    """Monotone real d-vector; increasing unless ``increasing`` is False."""

    values: np.ndarray
    increasing: bool = True

    def __post_init__(self):
        values = _frozen(self.values, np.float64)
        steps = np.diff(values)
        if self.increasing and np.any(steps < 0):
            raise BadParam("Ordered spectrum must be non-decreasing")
        if not self.increasing and np.any(steps > 0):
            raise BadParam("Decreasing spectrum must be non-increasing")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, OrderedSpectrum):
            return NotImplemented
        return self.increasing == other.increasing and bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.increasing, self.values.tobytes()))

    def __repr__(self):
        return f"OrderedSpectrum({self.values.tolist()})"

    def to_json(self) -> list:
        return [float(v) for v in self.values]


@dataclass(frozen=True, eq=False)
class UnorderedSpectrum:
    """A point of the space of unordered complex d-tuples.

    ``points`` is one representative; equality, hashing and serialization go
    through the canonical (Re, Im)-lexicographic order.
    """

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points, np.complex128))

    def __len__(self):
        return self.points.size

    def canonical(self) -> np.ndarray:
        order = np.lexsort((self.points.imag, self.points.real))
        return self.points[order]

    def sort_key(self) -> tuple:
        canon = self.canonical()
        return tuple(zip(canon.real.tolist(), canon.imag.tolist()))

    def __eq__(self, other):
        if not isinstance(other, UnorderedSpectrum):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self.canonical(), other.canonical()))

    def __hash__(self):
        return hash(self.canonical().tobytes())

    def __repr__(self):
        return f"UnorderedSpectrum({self.canonical().tolist()})"

    def to_json(self) -> list:
        canon = self.canonical()
        return [[float(z.real), float(z.imag)] for z in canon]

    @classmethod
    def from_json(cls, payload) -> "UnorderedSpectrum":
        return cls([complex(re, im) for re, im in payload])


@dataclass(frozen=True)
class EigenDecomposition:
    spectrum: np.ndarray
    basis: ComplexMatrix
    residual: float
    sweeps: int = 0

    @property
    def size(self) -> int:
        return self.spectrum.size


@dataclass(frozen=True)
class EigenStack:
    """Decompositions of a stack of matrices; entry t belongs to matrix t."""

    spectra: np.ndarray
    bases: np.ndarray
    residuals: np.ndarray

    def __len__(self):
        return self.spectra.shape[0]

    def decomposition(self, t: int) -> EigenDecomposition:
        return EigenDecomposition(self.spectra[t], ComplexMatrix(self.bases[t]), float(self.residuals[t]))
