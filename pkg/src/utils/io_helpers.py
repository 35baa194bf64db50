# src/utils/io_helpers.py

"""
Helpers for atomic file output and ordered parallel maps.
"""

import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from src import config

logger = logging.getLogger(__name__)


def safe_write_text(path, text: str) -> Path:
    """
    Scrive in sicurezza un file: contenuto su file temporaneo nella stessa
    cartella, poi rename atomico sul percorso finale.

    :param path: percorso di destinazione
    :param text: contenuto (stringa)
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        os.replace(temp_name, path)
    except OSError as e:
        logger.error(f"Errore durante safe_write_text su {path}: {e}")
        if os.path.exists(temp_name):
            os.remove(temp_name)
        raise
    return path


def parallel_map(func, items, threads: int | None = None) -> list:
    """Maps ``func`` over ``items`` keeping input order; one thread runs inline."""
    threads = config.THREADS if threads is None else threads
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))
