# src/storage.py

"""
Handles file persistence: matrix literals, grid manifests of matrix families,
reports and family CSV tables.
"""

import csv
import io
import json
import logging
from pathlib import Path

import numpy as np

from src import config
from src.errors import EigenflowError, ManifestError
from src.models.family import Grid, SampledFamily, ValueKind
from src.models.matrix import ComplexMatrix
from src.models.report import ExperimentReport
from src.utils.io_helpers import safe_write_text

logger = logging.getLogger(__name__)

MANIFEST_KEYS = {"lower", "upper", "counts", "nodes"}


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ManifestError(f"Cannot read {path}: {e}") from e


def load_matrix(path) -> ComplexMatrix:
    """Reads a matrix literal {"rows", "cols", "re", "im"}."""
    payload = _read_json(path)
    try:
        return ComplexMatrix.from_json(payload)
    except (KeyError, TypeError, ValueError, EigenflowError) as e:
        raise ManifestError(f"Invalid matrix literal in {path}: {e}") from e


def save_matrix(a: ComplexMatrix, path) -> Path:
    return safe_write_text(path, json.dumps(a.to_json()))


def validate_manifest(payload) -> tuple[bool, set]:
    """Checks that a manifest carries every required key and one node file per grid node."""
    if not isinstance(payload, dict):
        return False, set(MANIFEST_KEYS)
    missing = MANIFEST_KEYS - set(payload)
    if missing:
        return False, missing
    try:
        expected = int(np.prod([int(c) for c in payload["counts"]]))
    except (TypeError, ValueError):
        return False, {"counts"}
    lengths_ok = len(payload["lower"]) == len(payload["upper"]) == len(payload["counts"])
    if not lengths_ok:
        return False, {"lower", "upper"}
    if len(payload["nodes"]) != expected:
        return False, {"nodes"}
    return True, set()


def _manifest_grid(payload) -> Grid:
    try:
        if "spacing" in payload:
            return Grid(payload["lower"], payload["spacing"], payload["counts"])
        return Grid.from_bounds(payload["lower"], payload["upper"], payload["counts"])
    except EigenflowError as e:
        raise ManifestError(f"Invalid grid: {e}") from e


def load_family(manifest_path) -> SampledFamily:
    """Reads a matrix family from a grid manifest; node files are relative to the manifest."""
    manifest_path = Path(manifest_path)
    payload = _read_json(manifest_path)
    valid, missing = validate_manifest(payload)
    if not valid:
        logger.error(f"Manifest non valido {manifest_path}: campi {sorted(missing)}")
        raise ManifestError(f"Invalid manifest {manifest_path}: check {', '.join(sorted(missing))}")
    grid = _manifest_grid(payload)

    matrices = []
    for node, name in enumerate(payload["nodes"]):
        try:
            matrices.append(load_matrix(manifest_path.parent / name))
        except ManifestError as e:
            raise ManifestError(str(e), node=node) from e
    shapes = {m.data.shape for m in matrices}
    if len(shapes) != 1:
        raise ManifestError(f"Node matrices have different shapes: {sorted(shapes)}")
    shape = shapes.pop()
    values = np.stack([m.data for m in matrices]).reshape(*grid.counts, *shape)
    logger.info(f"Famiglia caricata da {manifest_path}: {len(matrices)} nodi, matrici {shape}")
    return SampledFamily(grid, values, ValueKind.MATRIX)


def export_family(family: SampledFamily, directory, manifest_name: str = "manifest.json") -> Path:
    """Writes one matrix literal per node plus the manifest; returns the manifest path."""
    if family.kind != ValueKind.MATRIX:
        raise ManifestError(f"Only matrix families can be exported, got {family.kind.value}")
    directory = Path(directory)
    names = []
    for node, data in enumerate(family.flat_values()):
        name = f"node_{node:06d}.json"
        save_matrix(ComplexMatrix(data), directory / name)
        names.append(name)
    payload = dict(family.grid.to_json())
    payload["spacing"] = list(family.grid.spacing)
    payload["nodes"] = names
    path = safe_write_text(directory / manifest_name, json.dumps(payload, indent=2))
    logger.info(f"Famiglia esportata in {directory} ({len(names)} nodi)")
    return path


def write_report(report: ExperimentReport, out_dir=None) -> tuple[Path, Path]:
    """Writes <name>_<hash>.json and .csv atomically."""
    out_dir = Path(config.OUTPUT_DIR if out_dir is None else out_dir)
    json_path = safe_write_text(out_dir / f"{report.stem}.json", report.to_json_text())
    csv_path = safe_write_text(out_dir / f"{report.stem}.csv", report.to_csv_text())
    logger.info(f"Report scritto: {json_path}")
    return json_path, csv_path


def family_csv_text(family: SampledFamily) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(family.csv_header())
    writer.writerows(family.csv_rows())
    return buffer.getvalue()


def write_family_csv(family: SampledFamily, path) -> Path:
    return safe_write_text(path, family_csv_text(family))
