# src/handlers/fuzz.py

"""
Command handler for the perturbation inequality fuzzing.
"""

import logging
from pathlib import Path

from src import config
from src.lab.fuzz import KINDS, fuzz_inequalities, offending_pairs
from src.storage import save_matrix
from src.utils.cli_helpers import finish_report
from src.utils.decorators import EXIT_OK, exit_codes

logger = logging.getLogger(__name__)


@exit_codes
def cmd_fuzz(args) -> int:
    """Fuzzes one inequality; every violated check dumps its offending pair next to the report."""
    report = fuzz_inequalities(args.seed, args.trials, args.d, args.kind)
    if "max_ratio" in report.scalars:
        print(f"Rapporto massimo d_inf / ||A - B||_op: {report.scalars['max_ratio']:.6f}")
    status = finish_report(report, args.out)
    if status != EXIT_OK:
        out_dir = Path(config.OUTPUT_DIR if args.out is None else args.out)
        for tag, (a, b) in offending_pairs(report, args.seed, args.d, args.kind).items():
            for label, matrix in (("A", a), ("B", b)):
                path = save_matrix(matrix, out_dir / f"{report.stem}_{tag}_{label}.json")
                print(f"Coppia {tag} ({label}): {path}")
    return status


def fuzz_handler(subparsers):
    """Registers the fuzz command."""
    parser = subparsers.add_parser("fuzz", help="Fuzz an eigenvalue perturbation inequality")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--d", type=int, default=4)
    parser.add_argument("--trials", type=int, default=10000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None)
    parser.set_defaults(func=cmd_fuzz)
    return parser
