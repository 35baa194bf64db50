# src/handlers/convergence.py

"""
Command handler for the convergence studies.
"""

import logging

from src.lab.convergence import STUDIES, run_convergence
from src.utils.cli_helpers import finish_report
from src.utils.decorators import exit_codes

logger = logging.getLogger(__name__)


@exit_codes
def cmd_convergence(args) -> int:
    """Runs one convergence study and writes its report."""
    params = {
        "q": args.q,
        "grid": args.grid,
        "sweep": args.sweep,
        "threshold": args.threshold,
        "seed": args.seed,
    }
    report = run_convergence(args.study, params)
    return finish_report(report, args.out)


def convergence_handler(subparsers):
    """Registers the convergence command."""
    parser = subparsers.add_parser("convergence", help="Trend study of spectral distances over n")
    parser.add_argument("--study", required=True, choices=STUDIES)
    parser.add_argument("--q", type=float, default=None)
    parser.add_argument("--grid", type=int, default=None)
    parser.add_argument("--sweep", type=int, nargs="+", default=None)
    parser.add_argument("--threshold", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None)
    parser.set_defaults(func=cmd_convergence)
    return parser
