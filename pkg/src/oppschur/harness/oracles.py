"""Slow, independent reference computations used to cross-check the library."""

from __future__ import annotations

import itertools
import math

import numpy as np


def cofactor_det(m) -> complex:
    """Laplace expansion along the first row."""
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return complex(m[0, 0])
    total = 0j
    for j in range(n):
        if m[0, j] == 0:
            continue
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * cofactor_det(minor)
    return total


def elementary_by_enumeration(a) -> tuple[float, float]:
    """Both sides of the elementary inequality as sums of ``p^alpha``, ``p = a - 1``.

    The left side sums over 0/1 patterns with no all-ones row, the right
    side over patterns with at least one all-zero column.
    """
    a = np.asarray(a, dtype=float)
    n, m = a.shape
    p = a - 1.0
    lhs = rhs = 0.0
    for bits in itertools.product((0, 1), repeat=n * m):
        alpha = np.array(bits).reshape(n, m)
        term = math.prod(p[i, j] for i in range(n) for j in range(m) if alpha[i, j])
        if not alpha.all(axis=1).any():
            lhs += term
        if not alpha.any(axis=0).all():
            rhs += term
    return lhs, rhs


def normal_equations_solve(gram, b) -> tuple[np.ndarray, float]:
    """Coefficients and norm for a nonsingular Gram via ``G* G c = G* b``."""
    g = np.asarray(gram, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128).ravel()
    c = np.linalg.solve(g.conj().T @ g, g.conj().T @ b)
    return c, math.sqrt(max(float(np.vdot(b, c).real), 0.0))
