"""Kernel backend selection.

Imports the compiled kernels when the extension built, otherwise the pure
Python ones.  ``DYNBICON_PURE=1`` forces the Python backend (used by the
kernel comparison benchmark and as an escape hatch).
"""

import os

if os.environ.get("DYNBICON_PURE"):
    from dynbicon import _pykernels as _impl
else:
    try:
        from dynbicon import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from dynbicon import _pykernels as _impl

BACKEND = _impl.BACKEND

vec_add = _impl.vec_add
vec_or = _impl.vec_or
vec_splice = _impl.vec_splice
vec_is_zero = _impl.vec_is_zero
mat_splice = _impl.mat_splice
mat_addvector = _impl.mat_addvector
mat_orvector = _impl.mat_orvector
mat_sum = _impl.mat_sum
mat_or = _impl.mat_or
mat_uppersum = _impl.mat_uppersum
mat_upperor = _impl.mat_upperor
