# src/models/family.py

"""
Uniform grids and families of values sampled on them.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from src.errors import BadParam, GridMismatch, ShapeError


class ValueKind(enum.Enum):
    MATRIX = "matrix"
    ORDERED = "ordered"
    UNORDERED = "unordered"
    VECTOR = "vector"
    SCALAR = "scalar"


_VALUE_NDIM = {
    ValueKind.MATRIX: 2,
    ValueKind.ORDERED: 1,
    ValueKind.UNORDERED: 1,
    ValueKind.VECTOR: 1,
    ValueKind.SCALAR: 0,
}


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid; node k on axis j sits at lower[j] + k * spacing[j]."""

    lower: tuple
    spacing: tuple
    counts: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        spacing = tuple(float(v) for v in self.spacing)
        counts = tuple(int(v) for v in self.counts)
        if not (len(lower) == len(spacing) == len(counts)) or not counts:
            raise BadParam("Grid lower, spacing and counts must have the same positive length")
        if any(c < 1 for c in counts) or any(not h > 0 for h in spacing):
            raise BadParam("Grid needs positive spacing and at least one node per axis")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_bounds(cls, lower, upper, counts) -> "Grid":
        """Grid including both endpoints; every axis needs two nodes and lower < upper."""
        lower = np.atleast_1d(np.asarray(lower, dtype=np.float64))
        upper = np.atleast_1d(np.asarray(upper, dtype=np.float64))
        counts = np.atleast_1d(np.asarray(counts, dtype=np.int64))
        if np.any(counts < 2):
            raise BadParam("Every grid axis needs at least two nodes")
        if np.any(~(lower < upper)):
            raise BadParam("Grid bounds must satisfy lower < upper")
        spacing = (upper - lower) / (counts - 1)
        return cls(tuple(lower), tuple(spacing), tuple(counts))

    @classmethod
    def interval(cls, lower: float, upper: float, count: int) -> "Grid":
        return cls.from_bounds([lower], [upper], [count])

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def upper(self) -> tuple:
        return tuple(a + h * (c - 1) for a, h, c in zip(self.lower, self.spacing, self.counts))

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_nodes(self, axis: int) -> np.ndarray:
        return self.lower[axis] + self.spacing[axis] * np.arange(self.counts[axis])

    def coordinates(self) -> np.ndarray:
        """Node coordinates of shape (*counts, dim)."""
        axes = [self.axis_nodes(j) for j in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def shrink(self, axis: int) -> "Grid":
        """Drops the last node along ``axis``."""
        counts = list(self.counts)
        counts[axis] -= 1
        return Grid(self.lower, self.spacing, tuple(counts))

    def nearest_node(self, point) -> tuple:
        """Multi-index of the node nearest to ``point``."""
        point = np.atleast_1d(np.asarray(point, dtype=np.float64))
        index = np.rint((point - np.asarray(self.lower)) / np.asarray(self.spacing)).astype(int)
        return tuple(int(np.clip(i, 0, c - 1)) for i, c in zip(index, self.counts))

    def to_json(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "counts": list(self.counts)}


@dataclass(frozen=True, eq=False)
class SampledFamily:
    """One value per grid node, stored as an array of shape (*counts, *value_shape).

    ``cell_axes`` lists the axes along which samples belong to grid cells
    rather than to nodes (forward differences, cellwise quantities).
    """

    grid: Grid
    values: np.ndarray
    kind: ValueKind
    cell_axes: frozenset = field(default_factory=frozenset)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, copy=True)
        if values.dtype.kind not in "fc":
            values = values.astype(np.float64)
        expected = self.grid.dim + _VALUE_NDIM[self.kind]
        if values.ndim != expected or values.shape[: self.grid.dim] != self.grid.counts:
            raise ShapeError(
                f"{self.kind.value} family on grid {self.grid.counts} cannot hold values of shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ShapeError("Sampled values must be finite")
        if self.kind in (ValueKind.ORDERED, ValueKind.SCALAR) and values.dtype.kind == "c":
            raise ShapeError(f"{self.kind.value} samples must be real")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "cell_axes", frozenset(int(a) for a in self.cell_axes))

    @property
    def value_shape(self) -> tuple:
        return self.values.shape[self.grid.dim:]

    @property
    def node_count(self) -> int:
        return self.grid.size

    def flat_values(self) -> np.ndarray:
        """Values of shape (node_count, *value_shape) in row-major node order."""
        return self.values.reshape(self.node_count, *self.value_shape)

    def node_norms(self) -> np.ndarray:
        """Euclidean (Frobenius for matrices) norm of every sample, shape counts."""
        flat = np.abs(self.values.reshape(*self.grid.counts, -1))
        return np.sqrt(np.sum(flat * flat, axis=-1))

    def with_values(self, values, kind: ValueKind | None = None, grid: Grid | None = None, cell_axes=None, meta=None):
        return SampledFamily(
            grid=self.grid if grid is None else grid,
            values=values,
            kind=self.kind if kind is None else kind,
            cell_axes=self.cell_axes if cell_axes is None else cell_axes,
            meta=dict(self.meta) if meta is None else meta,
        )

    def compatible_with(self, other: "SampledFamily") -> bool:
        return (
            self.grid == other.grid
            and self.kind == other.kind
            and self.value_shape == other.value_shape
            and self.cell_axes == other.cell_axes
        )

    def require_compatible(self, other: "SampledFamily"):
        if not self.compatible_with(other):
            raise GridMismatch(
                f"Families differ: grids {self.grid.counts} / {other.grid.counts}, "
                f"values {self.value_shape} / {other.value_shape}"
            )

    def csv_header(self) -> list[str]:
        columns = [f"i{j}" for j in range(self.grid.dim)] + [f"x{j}" for j in range(self.grid.dim)]
        width = int(np.prod(self.value_shape)) if self.value_shape else 1
        if self.values.dtype.kind == "c":
            for k in range(width):
                columns += [f"re{k}", f"im{k}"]
        else:
            columns += [f"v{k}" for k in range(width)]
        return columns

    def csv_rows(self) -> list[list]:
        """Rows of (node multi-index, coordinates, flattened value components)."""
        coords = self.grid.coordinates().reshape(self.node_count, self.grid.dim)
        # cell-located samples report the left end of their cell, which is the node coordinate
        flat = self.values.reshape(self.node_count, -1)
        rows = []
        for k, index in enumerate(np.ndindex(*self.grid.counts)):
            row = list(index) + [repr(float(c)) for c in coords[k]]
            if flat.dtype.kind == "c":
                for z in flat[k]:
                    row += [repr(float(z.real)), repr(float(z.imag))]
            else:
                row += [repr(float(v)) for v in flat[k]]
            rows.append(row)
        return rows
