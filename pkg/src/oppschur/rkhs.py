"""Finite-dimensional RKHS realized as the operator range of a PSD matrix.

For a PSD kernel ``A`` on ``C^n`` the space ``H_A`` is ``ran A`` with
``<A x, A y>_{H_A} = y* A x``.  Inner products are evaluated through the
Moore-Penrose inverse, ``<f, g> = g* A^+ f``, which agrees with any choice
of preimages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, OutOfRangeError
from .linalg import (
    BlockPartition,
    as_matrix,
    as_vector,
    moore_penrose,
    require_psd,
)

RANGE_TOL = 1e-8


class RkhsSpace:
    """The RKHS ``H_A`` with reproducing kernel ``A``.

    Immutable after construction; the pseudoinverse is computed once.
    """

    def __init__(self, kernel, partition: Optional[BlockPartition | Sequence[int]] = None,
                 range_tol: float = RANGE_TOL):
        kernel = require_psd(kernel, "kernel")
        kernel = 0.5 * (kernel + kernel.conj().T)
        if partition is not None and not isinstance(partition, BlockPartition):
            partition = BlockPartition(tuple(partition))
        if partition is not None and partition.dim != kernel.shape[0]:
            raise DimensionError("partition does not match kernel dimension")
        self._kernel = kernel
        self._kernel.flags.writeable = False
        self._pinv = moore_penrose(kernel)
        self._pinv.flags.writeable = False
        self.partition = partition
        self.range_tol = range_tol

    @classmethod
    def tensor(cls, spaces: Sequence[RkhsSpace], range_tol: float = RANGE_TOL) -> RkhsSpace:
        """Tensor product space with kernel ``A^1 x ... x A^m`` (Kronecker).

        Uses ``(A x B)^+ = A^+ x B^+`` instead of re-diagonalizing.
        """
        obj = cls.__new__(cls)
        kernel = spaces[0].kernel
        pinv = spaces[0].pinv
        for sp in spaces[1:]:
            kernel = np.kron(kernel, sp.kernel)
            pinv = np.kron(pinv, sp.pinv)
        obj._kernel = kernel
        obj._kernel.flags.writeable = False
        obj._pinv = pinv
        obj._pinv.flags.writeable = False
        obj.partition = None
        obj.range_tol = range_tol
        return obj

    @property
    def kernel(self) -> np.ndarray:
        return self._kernel

    @property
    def pinv(self) -> np.ndarray:
        return self._pinv

    @property
    def dim(self) -> int:
        return self._kernel.shape[0]

    def residual(self, v) -> float:
        """Distance of ``v`` from ``ran A`` via the projector ``A A^+``."""
        v = as_vector(v)
        return float(np.linalg.norm(self._kernel @ (self._pinv @ v) - v))

    def contains(self, v) -> bool:
        v = as_vector(v)
        if v.shape[0] != self.dim:
            return False
        return self.residual(v) <= self.range_tol * (1.0 + float(np.linalg.norm(v)))

    def element(self, v) -> RkhsElement:
        return RkhsElement(as_vector(v), self)

    def _checked(self, v) -> np.ndarray:
        if isinstance(v, RkhsElement):
            if v.space is not self:
                raise ConfigurationError("element belongs to a different space")
            return v.vector
        v = as_vector(v)
        if v.shape[0] != self.dim:
            raise DimensionError(f"vector has length {v.shape[0]}, space has dim {self.dim}")
        if not self.contains(v):
            raise OutOfRangeError(
                f"vector is outside ran(kernel): residual {self.residual(v):.3e}"
            )
        return v


@dataclass(frozen=True, eq=False)
class RkhsElement:
    vector: np.ndarray
    space: RkhsSpace

    def __post_init__(self):
        v = as_vector(self.vector)
        if v.shape[0] != self.space.dim:
            raise DimensionError("element dimension does not match its space")
        if not self.space.contains(v):
            raise OutOfRangeError(
                f"vector is outside ran(kernel): residual {self.space.residual(v):.3e}"
            )
        object.__setattr__(self, "vector", v)


def rkhs_inner(space: RkhsSpace, f, g) -> complex:
    """``<f, g>_{H_A}``, linear in ``f`` and conjugate-linear in ``g``."""
    f = space._checked(f)
    g = space._checked(g)
    return complex(np.vdot(g, space.pinv @ f))


def rkhs_norm(space: RkhsSpace, v) -> float:
    v = space._checked(v)
    return math.sqrt(max(float(np.vdot(v, space.pinv @ v).real), 0.0))


def kernel_column(space: RkhsSpace, i: int) -> np.ndarray:
    """Block column ``k_i = A i_i`` of the kernel (``n x n_i``), ``i`` 1-based."""
    if space.partition is None:
        raise ConfigurationError("space has no block partition")
    return space.kernel[:, space.partition.span(i)]


def gram_matrix(vectors: Sequence[RkhsElement]) -> np.ndarray:
    """``G[i, j] = <a_j, a_i>`` for elements of a single space."""
    if not vectors:
        raise DimensionError("gram_matrix needs at least one vector")
    space = vectors[0].space
    if any(v.space is not space for v in vectors):
        raise ConfigurationError("vectors belong to different spaces")
    cols = np.column_stack([v.vector for v in vectors])
    return cols.conj().T @ space.pinv @ cols


@dataclass(frozen=True)
class SumCheck:
    lhs: float
    rhs: float
    equality: bool
    witness: Optional[np.ndarray]


def rkhs_sum_check(a, b, f, g, tol: float = RANGE_TOL) -> SumCheck:
    """Compare ``||f + g||^2_{H_{A+B}}`` with ``||f||^2_{H_A} + ||g||^2_{H_B}``.

    A witness ``z`` with ``f = A z`` and ``g = B z`` is searched by least
    squares on the stacked system ``[A; B] z = [f; g]``.
    """
    a = as_matrix(a, name="A")
    b = as_matrix(b, name="B")
    if a.shape != b.shape:
        raise DimensionError("A and B must have the same shape")
    ha, hb, hab = RkhsSpace(a), RkhsSpace(b), RkhsSpace(a + b)
    f = ha._checked(f)
    g = hb._checked(g)
    lhs = rkhs_norm(hab, f + g) ** 2
    rhs = rkhs_norm(ha, f) ** 2 + rkhs_norm(hb, g) ** 2

    stacked = np.vstack([ha.kernel, hb.kernel])
    target = np.concatenate([f, g])
    z = moore_penrose(stacked) @ target
    resid = float(np.linalg.norm(stacked @ z - target))
    scale = 1.0 + float(np.linalg.norm(target))
    witness = z if resid <= tol * scale else None
    equality = abs(lhs - rhs) <= tol * (1.0 + rhs)
    return SumCheck(lhs=lhs, rhs=rhs, equality=equality, witness=witness)

