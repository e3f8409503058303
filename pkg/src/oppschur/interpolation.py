"""Inner-product interpolation problems and their minimum-norm solutions.

An interpolation instance is posed against the Gram matrix of an ordered
family ``a_1, ..., a_n``: find ``f`` with ``<f, a_i> = b_i``.  The
minimum-norm solution lies in the span of the family, so it is carried as
coefficients ``c`` with ``f = sum_k c_k a_k`` and ``G c = b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError, RankError
from .linalg import (
    BlockMatrix,
    as_matrix,
    as_vector,
    block_diag,
    eigh,
    frobenius,
    hermitian_check,
    is_unitary,
    leading_principal_block,
    moore_penrose,
    real_determinant,
    require_pd,
    require_psd,
)

FEASIBILITY_TOL = 1e-8
EQUALITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class IpipProblem:
    gram: np.ndarray
    data: np.ndarray
    order: Optional[int] = None

    def __post_init__(self):
        g = require_psd(self.gram, "gram")
        b = as_vector(self.data, name="data")
        if b.shape[0] != g.shape[0]:
            raise DimensionError("data length must equal the Gram dimension")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "data", b)

    @classmethod
    def canonical(cls, gram, order: int) -> IpipProblem:
        """Data ``b_1 = ... = b_{k-1} = 0, b_k = 1`` on the leading ``k x k`` Gram."""
        g = as_matrix(gram)
        if not 1 <= order <= g.shape[0]:
            raise IndexError(f"order {order} outside 1..{g.shape[0]}")
        b = np.zeros(order, dtype=np.complex128)
        b[-1] = 1.0
        return cls(g[:order, :order], b, order)


@dataclass(frozen=True, eq=False)
class IpipSolution:
    coefficients: Optional[np.ndarray]
    norm: float
    feasible: bool


def solve_ipip(problem: IpipProblem) -> IpipSolution:
    g, b = problem.gram, problem.data
    c = moore_penrose(g) @ b
    if np.linalg.norm(g @ c - b) > FEASIBILITY_TOL * (1.0 + np.linalg.norm(b)):
        return IpipSolution(None, math.inf, False)
    sq = float(np.vdot(b, c).real)
    return IpipSolution(c, math.sqrt(max(sq, 0.0)), True)


def min_norm_bordered(gram, b) -> float:
    """Squared minimum norm as ``-det([[0, b*], [b, G]]) / det(G)``."""
    g = as_matrix(gram, name="gram")
    b = as_vector(b, name="b")
    if not hermitian_check(g):
        raise PreconditionError("Gram matrix must be Hermitian")
    if b.shape[0] != g.shape[0]:
        raise DimensionError("data length must equal the Gram dimension")
    w = eigh(g).eigenvalues
    if np.min(np.abs(w)) <= 1e-10 * frobenius(g):
        raise PreconditionError("Gram matrix is singular; family is not independent")
    n = g.shape[0]
    bordered = np.zeros((n + 1, n + 1), dtype=np.complex128)
    bordered[0, 1:] = b.conj()
    bordered[1:, 0] = b
    bordered[1:, 1:] = g
    return -real_determinant(bordered) / real_determinant(g)


def lambda_sequence(gram) -> list[float]:
    """``lambda_k = sqrt(|G_{k-1}| / |G_k|)`` over leading principal minors."""
    g = require_pd(gram, "gram")
    minors = [1.0] + [real_determinant(g[:k, :k]) for k in range(1, g.shape[0] + 1)]
    return [math.sqrt(minors[k - 1] / minors[k]) for k in range(1, len(minors))]


def ipip_lambdas(gram) -> list[float]:
    """Minimum norms of the canonical problems of every order, by direct solve."""
    g = require_pd(gram, "gram")
    return [solve_ipip(IpipProblem.canonical(g, k)).norm for k in range(1, g.shape[0] + 1)]


@dataclass(frozen=True)
class LambdaDetCheck:
    product: float
    inv_sqrt_det: float
    agree: bool


def lambda_det_identity_check(t, tol: float = 1e-8) -> LambdaDetCheck:
    """Product of the minimum norms against ``det(T)^{-1/2}``.

    The minimum norms come from solving each canonical problem, so the
    comparison is between two independent computations.
    """
    t = require_pd(t, "T")
    prod = float(np.prod(ipip_lambdas(t)))
    inv = real_determinant(t) ** -0.5
    return LambdaDetCheck(prod, inv, abs(prod - inv) <= tol * abs(inv))


def block_basis(bases: Sequence) -> np.ndarray:
    """Unitary of the CONS ``{u_ij}`` in lexicographic order from per-block bases."""
    return block_diag(bases)


def eigen_cons(x: BlockMatrix) -> list[np.ndarray]:
    """Per-block eigenvector bases of the diagonal blocks, ascending eigenvalues."""
    return [eigh(x.block(i, i)).eigenvectors for i in range(1, x.s + 1)]


def scalarize(t, u) -> np.ndarray:
    """Matrix ``U* T U`` representing ``T`` in the orthonormal basis ``U``."""
    t = as_matrix(t, name="T")
    u = as_matrix(u, name="U")
    if not is_unitary(u):
        raise PreconditionError("basis is not unitary")
    if u.shape[0] != t.shape[0]:
        raise DimensionError("basis and T differ in dimension")
    a = u.conj().T @ t @ u
    return 0.5 * (a + a.conj().T)


def _check_bases(x: BlockMatrix, bases: Sequence) -> list[np.ndarray]:
    if len(bases) != x.s:
        raise DimensionError(f"need {x.s} block bases, got {len(bases)}")
    out = []
    for i, b in enumerate(bases, start=1):
        b = as_matrix(b)
        n_i = x.partition.sizes[i - 1]
        if b.shape != (n_i, n_i):
            raise DimensionError(f"basis of block {i} must be {n_i}x{n_i}")
        if not is_unitary(b):
            raise PreconditionError(f"basis of block {i} is not orthonormal")
        out.append(b)
    return out


@dataclass(frozen=True)
class BlockLambdaProduct:
    block: int
    product: float
    minor_ratio: float
    agree: bool


def block_lambda_products(t: BlockMatrix, bases: Sequence, tol: float = 1e-8) -> list[BlockLambdaProduct]:
    """Per-block products of minimum norms against ``(|T_{i-1}| / |T_i|)^{1/2}``."""
    require_pd(t.data, "T")
    u = block_basis(_check_bases(t, bases))
    lams = ipip_lambdas(scalarize(t.data, u))
    out = []
    off = t.partition.offsets
    for i in range(1, t.s + 1):
        prod = float(np.prod(lams[off[i - 1] : off[i]]))
        prev = real_determinant(leading_principal_block(t, i - 1))
        cur = real_determinant(leading_principal_block(t, i))
        ratio = math.sqrt(prev / cur)
        out.append(BlockLambdaProduct(i, prod, ratio, abs(prod - ratio) <= tol * ratio))
    return out


@dataclass(frozen=True, eq=False)
class BlockIpipResult:
    solution: IpipSolution
    lam: float
    lower_bound: float
    equality: bool
    minimizer: np.ndarray  # ambient vector f in ran A
    upper_components_zero: bool  # blocks 1..i-1 of A u_ij vanish


def lex_position(x: BlockMatrix, index: tuple[int, int]) -> int:
    i, j = index
    if not 1 <= i <= x.s:
        raise IndexError(f"block index {i} outside 1..{x.s}")
    n_i = x.partition.sizes[i - 1]
    if not 1 <= j <= n_i:
        raise IndexError(f"position {j} outside 1..{n_i} in block {i}")
    return x.partition.offsets[i - 1] + j - 1


def block_ipip_min_norm(a: BlockMatrix, bases: Sequence, index: tuple[int, int],
                        tol: float = EQUALITY_TOL) -> BlockIpipResult:
    """Order-``(i, j)`` problem over the family ``{A u_{i'j'}}`` in lexicographic order.

    The minimum norm is bounded below by ``<A_ii u_ij, u_ij>^{-1/2}``, with
    equality exactly when the minimizer is a multiple of ``A u_ij``.
    """
    require_pd(a.data, "A")
    u = block_basis(_check_bases(a, bases))
    pos = lex_position(a, index)
    cols = u[:, : pos + 1]
    gram = cols.conj().T @ a.data @ cols
    sol = solve_ipip(IpipProblem.canonical(gram, pos + 1))
    f = a.data @ (cols @ sol.coefficients)

    i, _ = index
    u_ij = u[:, pos]
    xi = float(np.vdot(u_ij, a.data @ u_ij).real)
    bound = 1.0 / math.sqrt(xi)
    equality = abs(sol.norm - bound) <= tol * bound

    k_ij = a.data @ u_ij
    upper = k_ij[: a.partition.offsets[i - 1]]
    vanish = float(np.linalg.norm(upper)) <= 1e-8 * (1.0 + float(np.linalg.norm(k_ij)))
    return BlockIpipResult(sol, sol.norm, bound, equality, f, vanish)


def gram_schmidt(vectors: Sequence, tol: float = 1e-10) -> list[np.ndarray]:
    """Modified Gram-Schmidt in the ambient Euclidean inner product."""
    out: list[np.ndarray] = []
    for k, v in enumerate(vectors):
        v = as_vector(v).copy()
        ref = float(np.linalg.norm(v))
        for q in out:
            v = v - np.vdot(q, v) * q
        nv = float(np.linalg.norm(v))
        if nv <= tol * max(ref, 1.0):
            raise RankError(f"vector {k + 1} depends on its predecessors")
        out.append(v / nv)
    return out

