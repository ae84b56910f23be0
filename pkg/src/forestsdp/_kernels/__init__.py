"""Backend selection for the numerical kernels.

The jitted lane is the default. Setting the environment variable
FSDP_DISABLE_NUMBA to 1/true/yes forces the pure-numpy lane; so does an
unimportable numba. The chosen lane is exposed as BACKEND ("numba"/"numpy")
so callers and the benchmark can report which one ran.
"""

import os

_disabled = os.environ.get("FSDP_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

if not _disabled:
    try:
        from . import numba_impl as _impl
        BACKEND = "numba"
    except ImportError:
        from . import numpy_impl as _impl
        BACKEND = "numpy"
else:
    from . import numpy_impl as _impl
    BACKEND = "numpy"

eigh_sym = _impl.eigh_sym
lu_factor = _impl.lu_factor
lu_solve = _impl.lu_solve

__all__ = ["BACKEND", "eigh_sym", "lu_factor", "lu_solve"]
