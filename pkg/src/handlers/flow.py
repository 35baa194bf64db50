# src/handlers/flow.py

"""
Command handler computing characteristic maps and their norms on a family
read from a grid manifest.
"""

import hashlib
import logging
from pathlib import Path

from src import config
from src.analysis.charmap import branch, char_map_hermitian, char_map_normal, condition_number_flow, embedded_flow, graph_surface_area
from src.analysis.sobolev import lq_norm, metric_speed, q_energy, w1q_norm
from src.analysis.unordered import AlmgrenEmbedding
from src.models.report import ExperimentReport
from src.storage import load_family, write_family_csv
from src.utils.cli_helpers import finish_report
from src.utils.decorators import exit_codes

logger = logging.getLogger(__name__)

MAPS = ("ordered", "unordered", "kappa", "area")


def flow_report(family, map_name: str, q: float):
    """Computes the chosen map; returns (flow family, report)."""
    report = ExperimentReport(
        name=f"flow_{map_name}",
        params={
            "map": map_name,
            "q": q,
            "grid": family.grid.to_json(),
            "family_sha": hashlib.sha256(family.values.tobytes()).hexdigest()[:12],
        },
    )
    if map_name == "unordered":
        spectral = char_map_normal(family)
        flow = spectral.flow
        embedded = embedded_flow(flow, AlmgrenEmbedding.default(flow.value_shape[0]))
        sobolev = w1q_norm(embedded, q)
        if family.grid.dim == 1 and family.node_count > 1:
            report.add_scalar("speed_lq", lq_norm(metric_speed(flow), q))
            report.add_scalar("q_energy", q_energy(flow, q))
        report.add_scalar("residual_max", spectral.residual_max)
        report.provenance.append("unordered eigenvalue map through the Almgren embedding")
    elif map_name == "kappa":
        flow = condition_number_flow(family)
        sobolev = w1q_norm(flow, q)
        report.add_scalar("sigma_min", flow.meta["sigma_min"])
        report.provenance.append("condition number map")
    else:
        spectral = char_map_hermitian(family)
        flow = spectral.flow
        sobolev = w1q_norm(flow, q)
        report.add_scalar("residual_max", spectral.residual_max)
        report.provenance.append("ordered eigenvalue map")
        if map_name == "area":
            areas = [graph_surface_area(branch(flow, j)) for j in range(flow.value_shape[0])]
            report.add_series("area", areas)
            report.provenance.append("surface area of eigenvalue graphs")

    report.add_scalar("lq", sobolev.lq)
    report.add_series("derivative_lq", sobolev.derivative_lq)
    report.add_scalar("w1q", sobolev.w1q)
    return flow, report


@exit_codes
def cmd_flow(args) -> int:
    """Writes the flow CSV and the norm report of a manifest family."""
    family = load_family(args.input)
    flow, report = flow_report(family, args.map, args.q)
    out_dir = Path(config.OUTPUT_DIR if args.out is None else args.out)
    csv_path = write_family_csv(flow, out_dir / f"{report.stem}_flow.csv")
    print(f"Flusso: {csv_path}")
    return finish_report(report, out_dir)


def flow_handler(subparsers):
    """Registers the flow command."""
    parser = subparsers.add_parser("flow", help="Characteristic map and norms of a matrix family")
    parser.add_argument("--input", required=True, help="Grid manifest JSON")
    parser.add_argument("--map", required=True, choices=MAPS)
    parser.add_argument("--q", type=float, default=2.0)
    parser.add_argument("--out", default=None)
    parser.set_defaults(func=cmd_flow)
    return parser
