"""Finite-difference stencils on uniform grids.

Two boundary treatments are supported: reflection across the endpoints with a
declared parity (used for colatitude, where smooth axisymmetric quantities are
even or odd about each pole) and one-sided stencils (used for the collar
parameter ``s`` and anything else with genuine ends).
"""

from functools import lru_cache

import numpy as np


def fornberg_weights(x0, xs, order):
    """Weights for the ``order``-th derivative at ``x0`` from nodes ``xs``."""
    xs = np.asarray(xs)
    dtype = np.result_type(xs.dtype, np.float64)
    xs = xs.astype(dtype)
    x0 = dtype.type(x0)
    n = len(xs)
    c = np.zeros((n, order + 1), dtype=dtype)
    c1 = dtype.type(1)
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


# weights are built in the dtype of the data so extended precision survives
@lru_cache(maxsize=None)
def _central(deriv, accuracy, dtype=np.dtype(np.float64)):
    half = (deriv + 1) // 2 - 1 + accuracy // 2
    offsets = np.arange(-half, half + 1)
    return offsets, fornberg_weights(0.0, offsets.astype(dtype), deriv)


@lru_cache(maxsize=None)
def _one_sided_table(deriv, accuracy, dtype=np.dtype(np.float64)):
    # weights for the first/last `half` rows, each using `width` nearest nodes
    half = (deriv + 1) // 2 - 1 + accuracy // 2
    width = deriv + accuracy
    nodes = np.arange(width).astype(dtype)
    rows = [fornberg_weights(i, nodes, deriv) for i in range(half)]
    return half, width, np.array(rows)


def _as_float(values):
    u = np.asarray(values)
    return u.astype(np.result_type(u.dtype, np.float64), copy=False)


def diff_parity(values, spacing, deriv=1, accuracy=6, parity=1, axis=-1):
    """Central difference with reflected ghost points.

    ``parity`` is +1 for an even function about both endpoints and -1 for odd.
    The derivative of order ``deriv`` then has parity ``parity * (-1)**deriv``.
    """
    u = np.moveaxis(_as_float(values), axis, -1)
    offsets, w = _central(deriv, accuracy, u.dtype)
    g = offsets.max()
    if u.shape[-1] <= g:
        raise ValueError("grid too short for stencil")
    left = parity * u[..., g:0:-1]
    right = parity * u[..., -2:-g - 2:-1]
    ext = np.concatenate([left, u, right], axis=-1)
    n = u.shape[-1]
    out = np.zeros_like(u)
    for off, wk in zip(offsets, w):
        out += wk * ext[..., g + off:g + off + n]
    return np.moveaxis(out / spacing**deriv, -1, axis)


def diff_open(values, spacing, deriv=1, accuracy=4, axis=-1):
    """Central difference in the interior, one-sided near both ends."""
    u = np.moveaxis(_as_float(values), axis, -1)
    n = u.shape[-1]
    offsets, w = _central(deriv, accuracy, u.dtype)
    half, width, table = _one_sided_table(deriv, accuracy, u.dtype)
    if n < max(width, 2 * half + 1):
        raise ValueError("grid too short for stencil")
    out = np.zeros_like(u)
    inner = slice(half, n - half)
    for off, wk in zip(offsets, w):
        out[..., inner] += wk * u[..., half + off:n - half + off]
    for i in range(half):
        out[..., i] = u[..., :width] @ table[i]
        # mirrored stencil at the far end; odd derivatives flip sign
        out[..., n - 1 - i] = (-1) ** deriv * (u[..., ::-1][..., :width] @ table[i])
    return np.moveaxis(out / spacing**deriv, -1, axis)
