"""Numba/numpy backend selection for the hot kernels.

The package ships every hot kernel twice: a numba ``@njit`` version and a
pure-numpy equivalent.  Selection order:

1. ``CAPFIELD_BACKEND=numpy`` (or ``numba``) in the environment wins.
2. Otherwise numba is used when it imports cleanly, numpy otherwise.

``benchmarks/bench_kernels.py`` compares both paths on the same inputs.
"""

import os

_ENV_VAR = "CAPFIELD_BACKEND"


def _resolve() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice in ("numpy", "numba"):
        if choice == "numba":
            try:
                import numba  # noqa: F401
            except ImportError as exc:
                raise ImportError(
                    f"{_ENV_VAR}=numba requested but numba is not importable"
                ) from exc
        return choice
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


BACKEND = _resolve()
HAS_NUMBA = BACKEND == "numba"


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND
