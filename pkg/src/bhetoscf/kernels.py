"""Backend selection for the numerical kernels.

The compiled Cython module is used when it has been built; otherwise the
numpy fallback is imported.  Setting ``BHETOSCF_PURE_PYTHON=1`` forces the
fallback, which is how the test suite exercises both backends.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("BHETOSCF_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend

#: ``"cython"`` or ``"python"``
BACKEND = "cython" if compiled_backend is not None else "python"

jacobi_eigh = _impl.jacobi_eigh
hyp2f1_a1_series = _impl.hyp2f1_a1_series
lower_gamma_array = _impl.lower_gamma_array
laguerre_table = _impl.laguerre_table

__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "jacobi_eigh",
    "hyp2f1_a1_series",
    "lower_gamma_array",
    "laguerre_table",
]
