"""Import shim for numba.

The hot kernels (decoder sweeps, girth search, channel folding) are jitted
when numba is present; without it everything still runs as plain Python,
just slowly.
"""

import os

# Pick a threading layer explicitly so numba does not probe (and warn about)
# incompatible TBB installs; omp falls back to workqueue automatically.
os.environ.setdefault("NUMBA_THREADING_LAYER_PRIORITY", "omp workqueue tbb")

try:
    from numba import njit, prange, set_num_threads, get_num_threads

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

    prange = range

    def set_num_threads(n):
        pass

    def get_num_threads():
        return 1
