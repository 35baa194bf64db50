# src/utils/cli_helpers.py

"""
Shared plumbing of the command handlers: report output and exit status.
"""

import logging
import sys

from src.models.report import ExperimentReport
from src.storage import write_report
from src.utils.decorators import EXIT_OK, EXIT_VIOLATION

logger = logging.getLogger(__name__)


def finish_report(report: ExperimentReport, out_dir=None) -> int:
    """
    Scrive il report (JSON + CSV) e stampa l'esito dei controlli.

    :param report: report dell'esperimento
    :param out_dir: cartella di output (default: EIGENFLOW_OUTPUT_DIR)
    :return: 0 se tutti i limiti sono rispettati, 1 altrimenti
    """
    json_path, csv_path = write_report(report, out_dir)
    for check in report.checks:
        status = "ok" if check.passed else "VIOLATO"
        if not check.conclusive:
            status = "inconcludente"
        print(f"[{status}] {check.describe()}")
    print(f"Report: {json_path} / {csv_path}")

    violations = report.violations()
    if violations:
        for check in violations:
            logger.error(f"Limite violato in {report.name}: {check.describe()}")
            print(f"Limite violato: {check.describe()}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK
