"""Select the compiled kernels when available, the pure-Python ones otherwise."""

import os

from . import _pykernels

if os.environ.get("TMSV_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

hyp2f1_unit = _impl.hyp2f1_unit
k_coefficient = _impl.k_coefficient
k_table = _impl.k_table
