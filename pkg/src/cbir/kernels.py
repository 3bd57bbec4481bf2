"""Backend selection for the pixel kernels.

The compiled extension ``cbir._ckernels`` is used when it was built;
otherwise, or when ``CBIR_PURE_PYTHON=1`` is set, the numpy/pure-Python
reference in ``cbir._kernels_py`` is used. Both expose the same functions.
"""

import importlib
import os

from . import _kernels_py

__all__ = ["BACKEND", "available_backends", "get_backend",
           "convolve3", "chamfer34", "cooccurrence_counts", "correlogram_counts"]


def _load_compiled():
    try:
        return importlib.import_module("cbir._ckernels")
    except ImportError:
        return None


_compiled = _load_compiled()


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.append("cython")
    return names


def get_backend(name):
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built (run `python setup.py build_ext --inplace`)")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


if _compiled is not None and os.environ.get("CBIR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = get_backend(BACKEND)

convolve3 = _impl.convolve3
chamfer34 = _impl.chamfer34
cooccurrence_counts = _impl.cooccurrence_counts
correlogram_counts = _impl.correlogram_counts
