# src/config.py

"""
Configuration settings and default tolerances for the laboratory.
"""

import logging
import os
from dotenv import load_dotenv

# Carica le variabili d'ambiente dal file .env
load_dotenv()

logger = logging.getLogger(__name__)

# Classification residual threshold (relative)
CLASS_TOL = float(os.getenv("EIGENFLOW_CLASS_TOL", "1e-10"))

# Jacobi eigensolver
EIG_TOL = float(os.getenv("EIGENFLOW_EIG_TOL", "1e-12"))
MAX_SWEEPS = int(os.getenv("EIGENFLOW_MAX_SWEEPS", "64"))
CLUSTER_TOL = float(os.getenv("EIGENFLOW_CLUSTER_TOL", "1e-8"))
# Hermitian-part gaps below this are resolved jointly with the skew part
REFINE_TOL = float(os.getenv("EIGENFLOW_REFINE_TOL", "1e-5"))
# Trials stacked per batched solve
BATCH_SIZE = int(os.getenv("EIGENFLOW_BATCH_SIZE", "256"))

# Unordered tuples
BRUTE_FORCE_MAX = int(os.getenv("EIGENFLOW_BRUTE_FORCE_MAX", "8"))
REAL_TOL = float(os.getenv("EIGENFLOW_REAL_TOL", "1e-12"))

# Grid scans
PAIR_BUDGET = int(os.getenv("EIGENFLOW_PAIR_BUDGET", "4000000"))

# Block diagonalization
GAP_TOL = float(os.getenv("EIGENFLOW_GAP_TOL", "1e-6"))
BD_TOL = float(os.getenv("EIGENFLOW_BD_TOL", "1e-9"))

# Condition numbers
SIGMA_FLOOR = float(os.getenv("EIGENFLOW_SIGMA_FLOOR", "1e-12"))

# Parallelism
THREADS = int(os.getenv("EIGENFLOW_THREADS", "1"))

# Output
OUTPUT_DIR = os.getenv("EIGENFLOW_OUTPUT_DIR", "reports")
LOG_DIR = os.getenv("EIGENFLOW_LOG_DIR", "logs")

# Environment setting (opzionale)
ENVIRONMENT = os.getenv("ENVIRONMENT", "development")


def validate_config():
    """Valida che tutte le configurazioni numeriche siano coerenti."""
    positive = {
        "EIGENFLOW_CLASS_TOL": CLASS_TOL,
        "EIGENFLOW_EIG_TOL": EIG_TOL,
        "EIGENFLOW_CLUSTER_TOL": CLUSTER_TOL,
        "EIGENFLOW_REFINE_TOL": REFINE_TOL,
        "EIGENFLOW_BATCH_SIZE": BATCH_SIZE,
        "EIGENFLOW_REAL_TOL": REAL_TOL,
        "EIGENFLOW_GAP_TOL": GAP_TOL,
        "EIGENFLOW_BD_TOL": BD_TOL,
        "EIGENFLOW_SIGMA_FLOOR": SIGMA_FLOOR,
        "EIGENFLOW_MAX_SWEEPS": MAX_SWEEPS,
        "EIGENFLOW_PAIR_BUDGET": PAIR_BUDGET,
        "EIGENFLOW_THREADS": THREADS,
    }
    invalid = [name for name, value in positive.items() if not value > 0]
    if not 1 <= BRUTE_FORCE_MAX <= 10:
        invalid.append("EIGENFLOW_BRUTE_FORCE_MAX")

    if invalid:
        raise ValueError(f"Variabili d'ambiente non valide: {', '.join(invalid)}")

    logger.info(f"✓ Configurazione caricata correttamente (Environment: {ENVIRONMENT})")


# Chiamata automatica della validazione
if __name__ == "__main__":
    validate_config()
