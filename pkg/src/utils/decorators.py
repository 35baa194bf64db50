# src/utils/decorators.py

import logging
import sys
from functools import wraps

from src.errors import EigenflowError, NonSquare, SingularNode, SizeMismatch

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2


def square_required(func):
    """Decorator to check that the first argument is a square matrix."""
    @wraps(func)
    def wrapper(matrix, *args, **kwargs):
        if not matrix.is_square:
            raise NonSquare(f"{func.__name__} requires a square matrix, got {matrix.rows}x{matrix.cols}")
        return func(matrix, *args, **kwargs)
    return wrapper


def same_size_required(func):
    """Decorator to check that the first two tuple arguments have the same size."""
    @wraps(func)
    def wrapper(x, y, *args, **kwargs):
        if len(x) != len(y):
            raise SizeMismatch(f"{func.__name__}: sizes {len(x)} and {len(y)} differ")
        return func(x, y, *args, **kwargs)
    return wrapper


def exit_codes(func):
    """Decorator mapping command failures to exit codes: 1 for singular nodes, 2 for invalid input."""
    @wraps(func)
    def wrapper(args, *rest, **kwargs):
        try:
            return func(args, *rest, **kwargs)
        except SingularNode as e:
            logger.error(f"{func.__name__}: {e}")
            print(f"Nodo singolare: {e}", file=sys.stderr)
            return EXIT_VIOLATION
        except (EigenflowError, ValueError) as e:
            logger.error(f"{func.__name__}: {e}", exc_info=True)
            print(f"Input non valido: {e}", file=sys.stderr)
            return EXIT_INVALID
    return wrapper
