# src/handlers/example.py

"""
Command handler for the counterexample runs.
"""

import logging

from src.lab.examples import run_exA, run_exA2, run_exAuc, run_exUcq
from src.lab.families import FamilyId, default_grid, make_family
from src.storage import export_family
from src.utils.cli_helpers import finish_report
from src.utils.decorators import exit_codes

logger = logging.getLogger(__name__)

DEFAULT_N = {FamilyId.EX_A: 100, FamilyId.EX_UCQ: 64, FamilyId.EX_AUC: 32, FamilyId.EX_A2: 16}


def _run(family_id: FamilyId, n: int, q: float, alpha: float | None, grid: int | None):
    if family_id == FamilyId.EX_A:
        return run_exA(n, grid or 4001, q=q)
    if family_id == FamilyId.EX_UCQ:
        return run_exUcq(n, q, grid)
    if family_id == FamilyId.EX_AUC:
        return run_exAuc(n, 0.5 if alpha is None else alpha, grid or 801)
    return run_exA2(n, q, grid)


@exit_codes
def cmd_example(args) -> int:
    """Runs one counterexample and writes its report."""
    family_id = FamilyId(args.id)
    n = DEFAULT_N[family_id] if args.n is None else args.n
    logger.info(f"Esempio {family_id.value}: n={n}, q={args.q}, alpha={args.alpha}, grid={args.grid}")
    report = _run(family_id, n, args.q, args.alpha, args.grid)

    if args.export_family:
        domain = default_grid(family_id, n, args.alpha, args.grid)
        matrices, _ = make_family(family_id, n, domain, alpha=args.alpha)
        manifest = export_family(matrices, args.export_family)
        print(f"Famiglia esportata: {manifest}")
    return finish_report(report, args.out)


def example_handler(subparsers):
    """Registers the example command."""
    parser = subparsers.add_parser("example", help="Run a counterexample and check its bounds")
    parser.add_argument("--id", required=True, choices=[f.value for f in FamilyId])
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--q", type=float, default=2.0)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--grid", type=int, default=None, help="Number of grid nodes")
    parser.add_argument("--out", default=None, help="Output directory for reports")
    parser.add_argument("--export-family", default=None, help="Directory for the family manifest and node files")
    parser.set_defaults(func=cmd_example)
    return parser
