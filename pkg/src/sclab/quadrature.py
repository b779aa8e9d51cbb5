"""Grid evaluation and quadrature for the floating-point pipeline.

Band-limited fields are integrated by averaging their values on a uniform
periodic grid, which is spectrally exact as soon as the grid resolves the
band.  The point-evaluation kernel is the hot loop; it is JIT-compiled with
numba when available, with a vectorized numpy fallback.  Set
``SCLAB_BACKEND=numpy`` or ``SCLAB_BACKEND=numba`` to force a backend
(default: numba when importable).
"""

from __future__ import annotations

import os

import numpy as np

from .exact_scalars import TrigScalar

_NUMBA_KERNEL = None
_NUMBA_FAILED = False


def _build_numba_kernel():
    global _NUMBA_KERNEL, _NUMBA_FAILED
    if _NUMBA_KERNEL is not None or _NUMBA_FAILED:
        return _NUMBA_KERNEL
    try:
        from numba import njit
    except ImportError:
        _NUMBA_FAILED = True
        return None

    @njit(cache=True)
    def kernel(jgrid, freqs, cre, cim, scale):
        npts = jgrid.shape[0]
        nterms = freqs.shape[0]
        dim = jgrid.shape[1]
        out = np.empty(npts)
        for p in range(npts):
            acc = 0.0
            for t in range(nterms):
                ph = 0.0
                for d in range(dim):
                    ph += jgrid[p, d] * freqs[t, d]
                ph *= scale
                acc += cre[t] * np.cos(ph) - cim[t] * np.sin(ph)
            out[p] = acc
        return out

    _NUMBA_KERNEL = kernel
    return kernel


def active_backend() -> str:
    """The backend grid evaluation will actually use."""
    choice = os.environ.get("SCLAB_BACKEND", "auto").lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if _build_numba_kernel() is None:
            raise RuntimeError("SCLAB_BACKEND=numba but numba is not importable")
        return "numba"
    return "numba" if _build_numba_kernel() is not None else "numpy"


def _term_arrays(f: TrigScalar):
    n = len(f.terms)
    freqs = np.zeros((n, f.dim), dtype=np.int64)
    cre = np.zeros(n)
    cim = np.zeros(n)
    for row, (m, c) in enumerate(sorted(f.terms.items())):
        freqs[row] = m
        z = complex(c)
        cre[row] = z.real
        cim[row] = z.imag
    return freqs, cre, cim


def _grid_coords(dim: int, n_axis: int):
    axes = np.arange(n_axis, dtype=np.int64)
    mesh = np.meshgrid(*([axes] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def eval_grid(f: TrigScalar, n_axis: int, backend: str | None = None) -> np.ndarray:
    """Values of the field on the uniform n_axis^dim grid, flattened."""
    if not f.terms:
        return np.zeros(n_axis**f.dim)
    freqs, cre, cim = _term_arrays(f)
    jgrid = _grid_coords(f.dim, n_axis)
    scale = 2.0 * np.pi / n_axis
    backend = backend or active_backend()
    if backend == "numba":
        kernel = _build_numba_kernel()
        if kernel is None:
            raise RuntimeError("numba backend requested but unavailable")
        return kernel(jgrid, freqs, cre, cim, scale)
    phases = scale * (jgrid @ freqs.T)
    return (np.cos(phases) @ cre) - (np.sin(phases) @ cim)


def grid_points(dim: int, n_axis: int) -> int:
    return n_axis**dim


def default_grid_size(band: int) -> int:
    """Grid edge used for integrating a field of the given band; exceeds the
    band, so the trapezoid average is spectrally exact."""
    return 4 * band + 4


def grid_mean(f: TrigScalar, n_axis: int | None = None) -> float:
    """Torus mean by the periodic trapezoid rule on the default grid."""
    if not f.terms:
        return 0.0
    if n_axis is None:
        n_axis = default_grid_size(f.band())
    return float(eval_grid(f, n_axis).mean())
