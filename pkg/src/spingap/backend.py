"""Kernel backend selection: numba-jitted loops or pure numpy.

The only hot kernel in the package is the CSR matrix-vector product that
drives the Lanczos iteration; everything else is LAPACK through
``numpy.linalg``. The backend is chosen once at import from the
``SPINGAP_BACKEND`` environment variable:

    SPINGAP_BACKEND=numba   force the jitted kernels (error if unavailable)
    SPINGAP_BACKEND=numpy   force the pure-numpy fallback
    SPINGAP_BACKEND=auto    numba if importable, else numpy (default)

``set_backend`` switches at runtime (used by the benchmark and tests).
Both paths accumulate per row in index order, so results agree to roundoff.
"""

from __future__ import annotations

import os

import numpy as np

_HAVE_NUMBA = False
try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None


def _csr_matvec_numpy(indptr, indices, data, x):
    prod = data * x[indices]
    out = np.zeros(indptr.shape[0] - 1, dtype=prod.dtype)
    nonempty = np.flatnonzero(np.diff(indptr))
    if nonempty.size:
        # reduceat over the starts of nonempty rows sums exactly one row
        # per segment (empty rows contribute no segment boundary).
        out[nonempty] = np.add.reduceat(prod, indptr[nonempty])
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def _csr_matvec_numba(indptr, indices, data, x):
        n = indptr.shape[0] - 1
        out = np.zeros(n, dtype=data.dtype)
        for i in range(n):
            acc = 0.0 + 0.0j
            for p in range(indptr[i], indptr[i + 1]):
                acc += data[p] * x[indices[p]]
            out[i] = acc
        return out


_backend = None


def _resolve(name):
    if name == "auto":
        return "numba" if _HAVE_NUMBA else "numpy"
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("SPINGAP_BACKEND=numba but numba is not importable")
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r} (expected numba|numpy|auto)")
    return name


def get_backend() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    global _backend
    if _backend is None:
        _backend = _resolve(os.environ.get("SPINGAP_BACKEND", "auto"))
    return _backend


def set_backend(name: str) -> str:
    """Switch kernel backend at runtime; returns the resolved name."""
    global _backend
    _backend = _resolve(name)
    return _backend


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix given by (indptr, indices, data)."""
    if get_backend() == "numba":
        return _csr_matvec_numba(indptr, indices, data, np.ascontiguousarray(x))
    return _csr_matvec_numpy(indptr, indices, data, x)
