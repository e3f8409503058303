"""Dense complex linear algebra primitives.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``; vectors are
1-D ``complex128`` arrays.  Real input is promoted to complex.  Block
structure is carried separately by :class:`BlockPartition`.

Tolerances are relative and scaled by ``1 + magnitude`` unless a docstring
says otherwise.
"""

from __future__ import annotations

import enum
import functools
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, PreconditionError

DEFAULT_TOL = 1e-9
PSD_CUTOFF = 1e-10
HERMITIAN_TOL = 1e-10


def as_matrix(x, *, name: str = "matrix") -> np.ndarray:
    """Coerce ``x`` to a 2-D complex array with at least one row and column."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must have rows, cols >= 1, got {a.shape}")
    return a


def as_vector(x, *, name: str = "vector") -> np.ndarray:
    """Coerce ``x`` to a 1-D complex array (an ``n x 1`` matrix is flattened)."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim == 2 and v.shape[1] == 1:
        v = v[:, 0]
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"{name} must be a nonempty column, got shape {v.shape}")
    return v


def _require_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got {m.shape}")


def frobenius(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


# --------------------------------------------------------------------------
# block structure


@dataclass(frozen=True)
class BlockPartition:
    """Symmetric partition ``(n_1, ..., n_s)`` of a square matrix."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.sizes)
        if not sizes:
            raise DimensionError("partition needs at least one block")
        if any(k < 1 for k in sizes):
            raise DimensionError(f"block sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def scalar(cls, n: int) -> BlockPartition:
        return cls((1,) * n)

    @classmethod
    def uniform(cls, s: int, t: int) -> BlockPartition:
        return cls((t,) * s)

    @property
    def s(self) -> int:
        return len(self.sizes)

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for k in self.sizes:
            out.append(out[-1] + k)
        return tuple(out)

    def span(self, i: int) -> slice:
        """Index slice of block ``i`` (1-based)."""
        if not 1 <= i <= self.s:
            raise IndexError(f"block index {i} outside 1..{self.s}")
        off = self.offsets
        return slice(off[i - 1], off[i])

    def is_uniform(self) -> bool:
        return len(set(self.sizes)) == 1


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """A square matrix together with a symmetric block partition."""

    data: np.ndarray
    partition: BlockPartition

    def __post_init__(self):
        data = as_matrix(self.data)
        _require_square(data)
        part = self.partition
        if not isinstance(part, BlockPartition):
            part = BlockPartition(tuple(part))
        if data.shape[0] != part.dim:
            raise DimensionError(
                f"partition {part.sizes} sums to {part.dim}, matrix is {data.shape[0]}"
            )
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "partition", part)

    @property
    def s(self) -> int:
        return self.partition.s

    def block(self, i: int, j: int) -> np.ndarray:
        """Block ``(i, j)`` with 1-based block indices."""
        return self.data[self.partition.span(i), self.partition.span(j)]

    def is_block_diagonal(self, tol: float = DEFAULT_TOL) -> bool:
        scale = tol * (1.0 + frobenius(self.data))
        for i in range(1, self.s + 1):
            for j in range(i + 1, self.s + 1):
                if frobenius(self.block(i, j)) > scale:
                    return False
        return True


def leading_principal_block(x: BlockMatrix, i: int) -> np.ndarray:
    """Top-left submatrix spanning blocks ``1..i``; ``[[1]]`` for ``i = 0``."""
    if not 0 <= i <= x.s:
        raise IndexError(f"leading block count {i} outside 0..{x.s}")
    if i == 0:
        return np.ones((1, 1), dtype=np.complex128)
    k = x.partition.offsets[i]
    return x.data[:k, :k]


def block_diag(blocks: Sequence) -> np.ndarray:
    mats = [as_matrix(b) for b in blocks]
    rows = sum(b.shape[0] for b in mats)
    cols = sum(b.shape[1] for b in mats)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for b in mats:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


# --------------------------------------------------------------------------
# Hermitian structure and eigensolver


def hermitian_check(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    _require_square(m)
    dev = np.max(np.abs(m - m.conj().T))
    return bool(dev <= tol * (1.0 + frobenius(m)))


def _require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    _require_square(m)
    if not hermitian_check(m, tol):
        raise PreconditionError("matrix is not Hermitian to tolerance")


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unit columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@functools.lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # Circle-method tournament: each round is a set of disjoint (p, q) pairs
    # and every pair appears exactly once per sweep.
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        ps, qs = [], []
        for k in range(size // 2):
            a, b = players[k], players[size - 1 - k]
            if a < 0 or b < 0:
                continue
            ps.append(min(a, b))
            qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_eigh(m, *, max_sweeps: int = 60, tol: float = 1e-15) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for Hermitian matrices.

    Disjoint rotations of each round-robin step are applied together, which
    is exact because they act on disjoint index pairs.  Each complex rotation
    is a phase fix ``diag(1, e^{-i phi})`` followed by the real symmetric
    Jacobi rotation that annihilates ``|a_pq|``.

    Eigenvalues come back ascending; ties keep the order in which the
    converged diagonal holds them (a stable sort).
    """
    a = as_matrix(m).copy()
    _require_hermitian(a)
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    eye = np.eye(n, dtype=np.complex128)
    v = eye.copy()
    fro = frobenius(a)
    if n > 1 and fro > 0.0:
        rounds = _round_robin(n)
        off_mask = ~np.eye(n, dtype=bool)
        for _ in range(max_sweeps):
            off = math.sqrt(float(np.sum(np.abs(a[off_mask]) ** 2)))
            if off <= tol * fro:
                break
            for p, q in rounds:
                b = a[p, q]
                absb = np.abs(b)
                live = absb > 0.0
                if not live.any():
                    continue
                safe = np.where(live, absb, 1.0)
                theta = (a[q, q].real - a[p, p].real) / (2.0 * safe)
                t = np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t[~live] = 0.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                phase = np.where(live, np.conj(b) / safe, 1.0)
                r = eye.copy()
                r[p, p] = c
                r[p, q] = s
                r[q, p] = -s * phase
                r[q, q] = c * phase
                a = r.conj().T @ a @ r
                a[p, q] = 0.0
                a[q, p] = 0.0
                v = v @ r
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


_EIG_CACHE: "OrderedDict[bytes, EigenDecomposition]" = OrderedDict()
_EIG_CACHE_SIZE = 512


def eigh(m) -> EigenDecomposition:
    """Jacobi decomposition, memoized on the exact bytes of ``m``.

    PSD checks hit the same matrix many times; a hit returns fresh copies so
    callers can never alias cached state.
    """
    m = as_matrix(m)
    key = repr(m.shape).encode() + m.tobytes()
    hit = _EIG_CACHE.get(key)
    if hit is None:
        hit = jacobi_eigh(m)
        _EIG_CACHE[key] = hit
        if len(_EIG_CACHE) > _EIG_CACHE_SIZE:
            _EIG_CACHE.popitem(last=False)
    else:
        _EIG_CACHE.move_to_end(key)
    return EigenDecomposition(hit.eigenvalues.copy(), hit.eigenvectors.copy())


class Definiteness(str, enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    INDEFINITE = "Indefinite"


def psd_check(m, tol: float = PSD_CUTOFF) -> Definiteness:
    m = as_matrix(m)
    _require_hermitian(m)
    lo = float(eigh(m).eigenvalues[0])
    cut = tol * frobenius(m)
    if lo > cut:
        return Definiteness.POSITIVE_DEFINITE
    if lo < -cut:
        return Definiteness.INDEFINITE
    return Definiteness.POSITIVE_SEMIDEFINITE


def require_pd(m, name: str = "matrix") -> np.ndarray:
    m = as_matrix(m, name=name)
    if psd_check(m) is not Definiteness.POSITIVE_DEFINITE:
        raise PreconditionError(f"{name} is not positive definite")
    return m


def require_psd(m, name: str = "matrix") -> np.ndarray:
    m = as_matrix(m, name=name)
    if psd_check(m) is Definiteness.INDEFINITE:
        raise PreconditionError(f"{name} is not positive semidefinite")
    return m


# --------------------------------------------------------------------------
# determinants, pseudoinverse, Kronecker


def determinant(m) -> complex:
    """Determinant by LU with partial pivoting (LAPACK ``getrf``)."""
    m = as_matrix(m)
    _require_square(m)
    return complex(np.linalg.det(m))


def real_determinant(m) -> float:
    """Determinant of a Hermitian matrix, imaginary round-off discarded."""
    d = determinant(m)
    if abs(d.imag) > 1e-10 * (1.0 + abs(d)):
        raise PreconditionError(f"determinant has imaginary part {d.imag:.3e}")
    return d.real


def ldl_determinant(m) -> float:
    """Determinant of a Hermitian PD matrix as the product of LDL* pivots."""
    a = as_matrix(m).copy()
    _require_hermitian(a)
    n = a.shape[0]
    d = np.zeros(n)
    low = np.eye(n, dtype=np.complex128)
    for j in range(n):
        d[j] = (a[j, j] - np.sum(np.abs(low[j, :j]) ** 2 * d[:j])).real
        if d[j] <= 0.0:
            raise PreconditionError("LDL* pivot is not positive; matrix is not PD")
        for i in range(j + 1, n):
            low[i, j] = (a[i, j] - np.sum(low[i, :j] * np.conj(low[j, :j]) * d[:j])) / d[j]
    return float(np.prod(d))


def moore_penrose(m, tol: float = PSD_CUTOFF) -> np.ndarray:
    """Moore-Penrose inverse built on the Hermitian eigensolver.

    Hermitian input is inverted on its own spectrum.  Otherwise the Hermitian
    dilation ``[[0, M], [M*, 0]]`` is diagonalized: its positive eigenvalues
    are the singular values of ``M`` and each eigenvector ``(x, y)`` carries
    ``u/sqrt(2), v/sqrt(2)``.  Eigenvalues at or below ``tol * ||M||_F`` are
    treated as zero.
    """
    m = as_matrix(m)
    cut = tol * frobenius(m)
    r, c = m.shape
    if r == c and hermitian_check(m, 1e-14):
        dec = eigh(0.5 * (m + m.conj().T))
        w = dec.eigenvalues
        keep = np.abs(w) > cut
        v = dec.eigenvectors[:, keep]
        return (v / w[keep]) @ v.conj().T
    dil = np.zeros((r + c, r + c), dtype=np.complex128)
    dil[:r, r:] = m
    dil[r:, :r] = m.conj().T
    dec = eigh(dil)
    keep = dec.eigenvalues > cut
    x = dec.eigenvectors[:r, keep]
    y = dec.eigenvectors[r:, keep]
    return (2.0 * y / dec.eigenvalues[keep]) @ x.conj().T


def kronecker(*mats) -> np.ndarray:
    """Kronecker product of one or more matrices; block ``(i, j)`` is ``A[i, j] B``."""
    if not mats:
        raise DimensionError("kronecker needs at least one factor")
    out = as_matrix(mats[0])
    for b in mats[1:]:
        out = np.kron(out, as_matrix(b))
    return out


def kron_vectors(*vecs) -> np.ndarray:
    out = as_vector(vecs[0])
    for v in vecs[1:]:
        out = np.kron(out, as_vector(v))
    return out


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    n = u.shape[0]
    return frobenius(u.conj().T @ u - np.eye(n)) <= tol * n
