"""Arithmetic-core selection: compiled extension when importable, else pure Python.

Both cores expose the same FieldKernel/CurveKernel API on plain tuples and
produce identical outputs, so the choice never changes results (determinism
contract). Set ENDORING_BACKEND=python or ENDORING_BACKEND=c to force one.
"""

import os

from . import _kernel_py

try:
    from . import _kernel_c
except ImportError:
    _kernel_c = None

_forced = os.environ.get("ENDORING_BACKEND", "").strip().lower()
if _forced in ("python", "py"):
    _kernel_c = None
elif _forced == "c" and _kernel_c is None:
    raise ImportError("ENDORING_BACKEND=c but the compiled kernel is not built")

# The compiled kernel accumulates schoolbook products in int64; stay clear of
# overflow (k * (p-1)^2 < 2^62) and of its int64 coefficient representation.
_C_MAX_P = 2**20


def backend_name() -> str:
    return "c" if _kernel_c is not None else "python"


def field_kernel(p, modulus):
    if _kernel_c is not None and p < _C_MAX_P and len(modulus) <= 4096:
        return _kernel_c.FieldKernel(p, modulus)
    return _kernel_py.FieldKernel(p, modulus)


def curve_kernel(fk, a, b):
    if _kernel_c is not None and isinstance(fk, _kernel_c.FieldKernel):
        return _kernel_c.CurveKernel(fk, a, b)
    return _kernel_py.CurveKernel(fk, a, b)
