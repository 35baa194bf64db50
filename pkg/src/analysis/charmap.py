# src/analysis/charmap.py

"""
Characteristic maps of sampled matrix families: ordered eigenvalues for
Hermitian families, unordered spectra for normal families, their Almgren
embedding, condition numbers and eigenvalue graph surface area.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src import config
from src.analysis.eigen import eig_hermitian, eig_normal, singular_values
from src.analysis.sobolev import fd_derivative
from src.analysis.unordered import AlmgrenEmbedding, embed_points
from src.errors import BadParam, NotHermitian, NotNormal, SingularNode, SizeMismatch
from src.models.family import SampledFamily, ValueKind
from src.models.matrix import ComplexMatrix
from src.utils.io_helpers import parallel_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralFlow:
    flow: SampledFamily
    source: SampledFamily
    residual_max: float

    @property
    def ordered(self) -> bool:
        return self.flow.kind == ValueKind.ORDERED


def _require_matrices(family: SampledFamily):
    if family.kind != ValueKind.MATRIX:
        raise BadParam(f"Expected a matrix family, got {family.kind.value}")


def _decompose_nodes(family: SampledFamily, solver, error_type):
    """Runs ``solver`` node-wise, re-raising class failures with the node index."""
    _require_matrices(family)
    matrices = family.flat_values()

    def run(node):
        try:
            return solver(ComplexMatrix(matrices[node]))
        except error_type as e:
            logger.error(f"Nodo {node} non valido: {e}")
            raise error_type(str(e), node=node) from e

    return parallel_map(run, range(family.node_count))


def char_map_hermitian(family: SampledFamily) -> SpectralFlow:
    """Node-wise increasingly ordered eigenvalues of a Hermitian family."""
    decompositions = _decompose_nodes(family, eig_hermitian, NotHermitian)
    spectra = np.stack([np.sort(dec.spectrum.real) for dec in decompositions])
    flow = SampledFamily(
        family.grid,
        spectra.reshape(*family.grid.counts, -1),
        ValueKind.ORDERED,
        cell_axes=family.cell_axes,
    )
    residual = max(dec.residual for dec in decompositions)
    logger.debug(f"Flusso ordinato: {family.node_count} nodi, residuo massimo {residual:.3e}")
    return SpectralFlow(flow, family, residual)


def char_map_normal(family: SampledFamily) -> SpectralFlow:
    """Node-wise unordered spectra of a normal family."""
    decompositions = _decompose_nodes(family, eig_normal, NotNormal)
    spectra = np.stack([dec.spectrum for dec in decompositions])
    flow = SampledFamily(
        family.grid,
        spectra.reshape(*family.grid.counts, -1),
        ValueKind.UNORDERED,
        cell_axes=family.cell_axes,
    )
    residual = max(dec.residual for dec in decompositions)
    return SpectralFlow(flow, family, residual)


def embedded_flow(flow: SpectralFlow | SampledFamily, embedding: AlmgrenEmbedding) -> SampledFamily:
    """Node-wise Almgren embedding of a flow of tuples."""
    family = flow.flow if isinstance(flow, SpectralFlow) else flow
    if family.value_shape[-1] != embedding.d:
        raise SizeMismatch(f"Flow carries {family.value_shape[-1]}-tuples, embedding expects {embedding.d}")
    values = embed_points(embedding, family.values.astype(np.complex128))
    return SampledFamily(family.grid, values, ValueKind.VECTOR, cell_axes=family.cell_axes)


def condition_number_flow(family: SampledFamily, sigma_floor: float | None = None) -> SampledFamily:
    """Node-wise sigma_1 / sigma_d; ``meta['sigma_min']`` holds the smallest sigma_d."""
    _require_matrices(family)
    matrices = family.flat_values()
    scale = float(np.max(family.node_norms()))
    floor = (config.SIGMA_FLOOR * scale) if sigma_floor is None else sigma_floor

    def run(node):
        a = ComplexMatrix(matrices[node])
        return singular_values(a if a.rows >= a.cols else a.H).values

    sigmas = np.stack(parallel_map(run, range(family.node_count)))
    smallest = sigmas[:, -1]
    bad = np.flatnonzero(smallest < floor)
    if bad.size:
        node = int(bad[0])
        logger.error(f"Nodo singolare {node}: sigma_d = {smallest[node]:.3e}")
        raise SingularNode(f"sigma_d = {smallest[node]:.3e} below floor {floor:.3e}", node=node, sigma=float(smallest[node]))
    kappa = sigmas[:, 0] / smallest
    return SampledFamily(
        family.grid,
        kappa.reshape(family.grid.counts),
        ValueKind.SCALAR,
        cell_axes=family.cell_axes,
        meta={"sigma_min": float(smallest.min())},
    )


def graph_surface_area(f: SampledFamily) -> float:
    """Riemann sum over cells of sqrt(1 + |grad f|^2)."""
    if f.kind != ValueKind.SCALAR:
        raise BadParam(f"Surface area needs scalar samples, got {f.kind.value}")
    cells = tuple(c - 1 for c in f.grid.counts)
    squared = np.zeros(cells)
    for axis in range(f.grid.dim):
        derivative = fd_derivative(f, axis).values
        squared += derivative[tuple(slice(0, c) for c in cells)] ** 2
    return float(np.sum(np.sqrt(1.0 + squared)) * f.grid.cell_volume)


def branch(flow: SpectralFlow | SampledFamily, j: int) -> SampledFamily:
    """The j-th (0-based) eigenvalue branch of an ordered flow as a scalar family."""
    family = flow.flow if isinstance(flow, SpectralFlow) else flow
    if family.kind != ValueKind.ORDERED:
        raise BadParam("Branches are defined for ordered flows")
    if not 0 <= j < family.value_shape[0]:
        raise BadParam(f"Branch {j} out of range")
    return SampledFamily(family.grid, family.values[..., j], ValueKind.SCALAR, cell_axes=family.cell_axes)
