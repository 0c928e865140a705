"""Selects the eigen kernels at import: the compiled extension when it was
built, otherwise the pure-Python fallback.

Set ``METRICOPS_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and by the cross-implementation tests).
"""

import os

if os.environ.get("METRICOPS_PURE_PYTHON", "") not in ("", "0"):
    from metricops import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from metricops import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from metricops import _kernels_py as _impl

        BACKEND = "python"

jacobi_hermitian = _impl.jacobi_hermitian
hessenberg_qr_eigvals = _impl.hessenberg_qr_eigvals

__all__ = ["BACKEND", "jacobi_hermitian", "hessenberg_qr_eigvals"]
