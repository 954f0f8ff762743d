"""Polynomial roots from companion-matrix eigenvalues."""

from __future__ import annotations

import numpy as np


def companion(coeffs) -> np.ndarray:
    """Companion matrix of ``sum coeffs[k] z**k`` (lowest degree first).

    Trailing exact zeros are stripped; the leading coefficient must then
    be nonzero.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=np.complex128), "b")
    n = c.size - 1
    if n < 1:
        return np.zeros((0, 0), dtype=np.complex128)
    mat = np.zeros((n, n), dtype=np.complex128)
    mat[1:, :-1] = np.eye(n - 1)
    mat[:, -1] = -c[:-1] / c[-1]
    return mat


def poly_roots(coeffs) -> np.ndarray:
    mat = companion(coeffs)
    if mat.size == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.linalg.eigvals(mat)
