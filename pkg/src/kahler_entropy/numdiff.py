"""Finite-difference derivatives of real functions of complex vectors.

Used as the independent side of the analytic-derivative cross-checks; keep
these free of the series-differentiation code paths they validate.
"""

from __future__ import annotations

import numpy as np


def _basis(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e


def complex_gradient_fd(f, z, h: float = 1e-6) -> np.ndarray:
    """d f / d z_i = (d_x - i d_y) f / 2 by central differences."""
    z = np.asarray(z, dtype=complex)
    n = z.size
    out = np.empty(n, dtype=complex)
    for i in range(n):
        e = _basis(n, i)
        dx = (f(z + h * e) - f(z - h * e)) / (2.0 * h)
        dy = (f(z + 1j * h * e) - f(z - 1j * h * e)) / (2.0 * h)
        out[i] = 0.5 * (dx - 1j * dy)
    return out


def complex_hessian_fd(f, z, h: float | None = None) -> np.ndarray:
    """4-point central complex Hessian d^2 f / d z_i d zbar_j.

    Uses d_i d_jbar = ( d_{x_i x_j} + d_{y_i y_j} + i (d_{x_i y_j} - d_{y_i x_j}) ) / 4
    with real-direction step h; default step shrinks with the distance to the
    boundary to balance truncation against the metric blow-up.
    """
    z = np.asarray(z, dtype=complex)
    n = z.size
    if h is None:
        h = 5e-4 * max(1e-3, 1.0 - float(np.vdot(z, z).real))
    f0 = f(z)

    def second(da, db):
        if np.array_equal(da, db):
            return (f(z + h * da) - 2.0 * f0 + f(z - h * da)) / (h * h)
        return (
            f(z + h * (da + db)) - f(z + h * (da - db)) - f(z + h * (db - da)) + f(z - h * (da + db))
        ) / (4.0 * h * h)

    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            ex_i, ey_i = _basis(n, i), 1j * _basis(n, i)
            ex_j, ey_j = _basis(n, j), 1j * _basis(n, j)
            xx = second(ex_i, ex_j)
            yy = second(ey_i, ey_j)
            xy = second(ex_i, ey_j)
            yx = second(ey_i, ex_j)
            out[i, j] = 0.25 * (xx + yy + 1j * (xy - yx))
    return out
