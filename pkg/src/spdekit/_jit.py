"""Numba toggle shared by the hot kernels.

JIT compilation is on by default whenever numba imports cleanly.  Set the
environment variable ``SPDEKIT_DISABLE_NUMBA=1`` before import to force the
pure-numpy fallback paths (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``).
"""

import os

_disabled = os.environ.get("SPDEKIT_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

if not _disabled:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        """No-op stand-in so kernel modules import unchanged."""

        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return wrap
