"""Kernel backend selection: numba JIT by default, pure NumPy on request.

The environment variable ``PDMCAUSAL_BACKEND`` controls which implementation
of the hot kernels in :mod:`pdmcausal.kernels` is bound at import time:

* unset         -- use numba when importable, otherwise fall back to NumPy
* ``numpy``     -- force the pure-NumPy path
* ``numba``     -- require the JIT path; raise if numba is unavailable

Both paths compute identical results; see ``benchmarks/bench_kernels.py``
for a side-by-side timing comparison.
"""

import os

_requested = os.environ.get("PDMCAUSAL_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"PDMCAUSAL_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError(
                "PDMCAUSAL_BACKEND=numba but the numba package is not importable"
            )
        NUMBA_ENABLED = False


def active_backend() -> str:
    """Name of the kernel backend bound at import time."""
    return "numba" if NUMBA_ENABLED else "numpy"


if NUMBA_ENABLED:
    from numba import njit
else:

    def njit(*args, **kwargs):
        """No-op stand-in for numba.njit when running on the NumPy backend."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap
