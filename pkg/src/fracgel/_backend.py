"""Kernel backend selection.

Hot numeric loops exist twice: a numba @njit version and a vectorized
numpy version.  Set FRACGEL_BACKEND=numpy (or FRACGEL_NO_NUMBA=1) to force
the numpy path; default is numba when importable.  FRACGEL_THREADS caps
the numba thread pool.
"""

import os

_env_backend = os.environ.get("FRACGEL_BACKEND", "").strip().lower()
_no_numba = os.environ.get("FRACGEL_NO_NUMBA", "") not in ("", "0")

USE_NUMBA = not (_no_numba or _env_backend == "numpy")

if USE_NUMBA:
    try:
        import numba  # noqa: F401

        _threads = os.environ.get("FRACGEL_THREADS")
        if _threads:
            try:
                numba.set_num_threads(max(1, int(_threads)))
            except (ValueError, RuntimeError):
                pass
    except ImportError:
        USE_NUMBA = False


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
