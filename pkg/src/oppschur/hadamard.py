"""Khatri-Rao products and the Hadamard product of block-matrix RKHSs.

Elements of the tensor space ``C^1 x ... x C^m`` are flat vectors in
Kronecker order (the first factor varies slowest).  The Hadamard-product
space lives on ``(+)_i C^1_i x ... x C^m_i``; its kernel is the Khatri-Rao
product, and the diagonal pullback selects the entries whose factor indices
all sit in the same block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError
from .interpolation import BlockIpipResult, block_ipip_min_norm, eigen_cons
from .linalg import (
    BlockMatrix,
    BlockPartition,
    as_vector,
    frobenius,
    kron_vectors,
    kronecker,
    moore_penrose,
    require_pd,
    require_psd,
)
from .rkhs import RkhsSpace, rkhs_norm

BOUND_TOL = 1e-7
EXTREMAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BlockFamily:
    """Block matrices ``A^1, ..., A^m`` sharing the block count ``s``."""

    factors: tuple[BlockMatrix, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise DimensionError("a family needs at least one factor")
        s = factors[0].s
        if any(f.s != s for f in factors):
            raise DimensionError("all factors must have the same number of blocks")
        for p, f in enumerate(factors, start=1):
            require_psd(f.data, f"factor {p}")
        object.__setattr__(self, "factors", factors)

    @property
    def m(self) -> int:
        return len(self.factors)

    @property
    def s(self) -> int:
        return self.factors[0].s

    def block_sizes(self, i: int) -> tuple[int, ...]:
        return tuple(f.partition.sizes[i - 1] for f in self.factors)

    def require_pd(self) -> None:
        for p, f in enumerate(self.factors, start=1):
            require_pd(f.data, f"factor {p}")


@dataclass(frozen=True)
class TensorIndex:
    """``gamma = (i j_1, ..., i j_m)``: shared block ``i``, positions ``j_p`` (1-based)."""

    i: int
    js: tuple[int, ...]

    def validate(self, family: BlockFamily) -> None:
        if not 1 <= self.i <= family.s:
            raise IndexError(f"block index {self.i} outside 1..{family.s}")
        sizes = family.block_sizes(self.i)
        if len(self.js) != family.m:
            raise DimensionError(f"need {family.m} positions, got {len(self.js)}")
        for j, n in zip(self.js, sizes):
            if not 1 <= j <= n:
                raise IndexError(f"position {j} outside 1..{n}")

    def flat(self, family: BlockFamily) -> int:
        """1-based position of ``(j_1, ..., j_m)`` inside block ``i``, lexicographic."""
        sizes = family.block_sizes(self.i)
        return int(np.ravel_multi_index(tuple(j - 1 for j in self.js), sizes)) + 1


def khatri_rao(family: BlockFamily) -> BlockMatrix:
    s = family.s
    sizes = tuple(int(np.prod(family.block_sizes(i))) for i in range(1, s + 1))
    part = BlockPartition(sizes)
    out = np.zeros((part.dim, part.dim), dtype=np.complex128)
    for i in range(1, s + 1):
        for j in range(1, s + 1):
            out[part.span(i), part.span(j)] = kronecker(*(f.block(i, j) for f in family.factors))
    return BlockMatrix(out, part)


def pullback_indices(family: BlockFamily) -> np.ndarray:
    """Flat tensor indices that the diagonal pullback keeps, in output order."""
    dims = tuple(f.partition.dim for f in family.factors)
    picks = []
    for i in range(1, family.s + 1):
        ranges = [np.arange(f.partition.dim)[f.partition.span(i)] for f in family.factors]
        grids = np.meshgrid(*ranges, indexing="ij")
        picks.append(np.ravel_multi_index(tuple(g.ravel() for g in grids), dims))
    return np.concatenate(picks)


def tensor_pullback(family: BlockFamily, tensor) -> np.ndarray:
    tensor = as_vector(tensor, name="tensor")
    total = int(np.prod([f.partition.dim for f in family.factors]))
    if tensor.shape[0] != total:
        raise DimensionError(f"tensor must have length {total}")
    return tensor[pullback_indices(family)]


def diagonal_pullback(family: BlockFamily, factors: Sequence) -> np.ndarray:
    """Hadamard product ``f_1 * ... * f_m``: block ``i`` is ``f_1(i) x ... x f_m(i)``."""
    if len(factors) != family.m:
        raise DimensionError(f"need {family.m} factors, got {len(factors)}")
    vecs = []
    for f, a in zip(factors, family.factors):
        f = as_vector(f)
        if f.shape[0] != a.partition.dim:
            raise DimensionError("factor length does not match its ambient space")
        vecs.append(f)
    segs = []
    for i in range(1, family.s + 1):
        segs.append(kron_vectors(*(v[a.partition.span(i)] for v, a in zip(vecs, family.factors))))
    return np.concatenate(segs)


def _spaces(family: BlockFamily) -> tuple[RkhsSpace, RkhsSpace]:
    factor_spaces = [RkhsSpace(f.data, f.partition) for f in family.factors]
    kr = khatri_rao(family)
    return RkhsSpace.tensor(factor_spaces), RkhsSpace(kr.data, kr.partition)


@dataclass(frozen=True)
class RestrictionCheck:
    tensor_norm: float
    pullback_norm: float
    holds: bool
    extremal: bool


def restriction_inequality_check(family: BlockFamily, tensor, tol: float = EXTREMAL_TOL,
                                 *, spaces: Optional[tuple[RkhsSpace, RkhsSpace]] = None
                                 ) -> RestrictionCheck:
    """``||phi* f||`` in the Hadamard-product space against ``||f||`` in the tensor space."""
    tensor_space, kr_space = spaces or _spaces(family)
    tensor = as_vector(tensor, name="tensor")
    tn = rkhs_norm(tensor_space, tensor)
    pn = rkhs_norm(kr_space, tensor_pullback(family, tensor))
    holds = pn <= tn * (1.0 + 1e-9) + 1e-12
    extremal = family.m >= 2 and abs(tn * tn - pn * pn) <= tol * tn * tn
    return RestrictionCheck(tn, pn, holds, extremal)


@dataclass(frozen=True)
class ExtremalCheck:
    extremal: bool
    witness_block: Optional[int]
    tensor_norm: float
    pullback_norm: float
    norm_extremal: bool

    @property
    def agree(self) -> bool:
        return self.extremal == self.norm_extremal


def in_block_range(a: BlockMatrix, i: int, f, tol: float = EXTREMAL_TOL) -> bool:
    """Whether ``f`` lies in ``ran k_i``, the span of the ``i``-th block column."""
    f = as_vector(f)
    k = a.data[:, a.partition.span(i)]
    proj = k @ (moore_penrose(k) @ f)
    return float(np.linalg.norm(proj - f)) <= tol * float(np.linalg.norm(f))


def extremal_simple_tensor_check(family: BlockFamily, factors: Sequence,
                                 tol: float = EXTREMAL_TOL) -> ExtremalCheck:
    """Structural extremality of ``f_1 x ... x f_m``: a common block ``i`` with every
    ``f_p`` in ``ran k_i^p``.  Cross-checked against norm equality under the pullback."""
    family.require_pd()
    if family.m < 2:
        raise PreconditionError("extremality needs at least two factors")
    vecs = [as_vector(f) for f in factors]
    if len(vecs) != family.m:
        raise DimensionError(f"need {family.m} factors, got {len(vecs)}")
    for p, v in enumerate(vecs, start=1):
        if float(np.linalg.norm(v)) == 0.0:
            raise PreconditionError(f"factor {p} is zero")
    witness = None
    for i in range(1, family.s + 1):
        if all(in_block_range(a, i, v, tol) for a, v in zip(family.factors, vecs)):
            witness = i
            break
    rc = restriction_inequality_check(family, kron_vectors(*vecs), tol)
    return ExtremalCheck(witness is not None, witness, rc.tensor_norm, rc.pullback_norm, rc.extremal)


@dataclass(frozen=True, eq=False)
class ProductBound:
    lam: float
    upper_bound: float
    equality: bool
    holds: bool
    minimizer: Optional[np.ndarray]
    candidate: np.ndarray
    candidate_norm: float
    constraint_residual: float
    factor_results: tuple[BlockIpipResult, ...]
    alphas: tuple[float, ...]


def _check_orthogonal_system(family: BlockFamily, bases) -> None:
    for p, (a, bs) in enumerate(zip(family.factors, bases), start=1):
        for i in range(1, a.s + 1):
            u = np.asarray(bs[i - 1], dtype=np.complex128)
            g = u.conj().T @ a.block(i, i) @ u
            off = g - np.diag(np.diag(g))
            if frobenius(off) > 1e-8 * (1.0 + frobenius(g)):
                raise PreconditionError(
                    f"basis of block {i} in factor {p} does not give an orthogonal system"
                )


def product_bound_min_norm(family: BlockFamily, gamma: TensorIndex,
                          bases: Optional[Sequence] = None,
                          tol: float = BOUND_TOL) -> ProductBound:
    """Minimum norm ``lambda_gamma`` for the Khatri-Rao kernel against its product bound.

    ``bases[p][i-1]`` is an orthonormal basis of block ``i`` of factor ``p``
    made of eigenvectors of the diagonal block (eigen-CONS by default).  The
    candidate ``h / D`` built from the per-factor minimizers always solves the
    order-``gamma`` problem; it is the minimizer exactly when the bound is
    attained.
    """
    family.require_pd()
    if family.m < 2:
        raise PreconditionError("the product bound needs at least two factors")
    gamma.validate(family)
    if bases is None:
        bases = [eigen_cons(a) for a in family.factors]
    bases = [[np.asarray(b, dtype=np.complex128) for b in bs] for bs in bases]
    _check_orthogonal_system(family, bases)
    i = gamma.i

    kr = khatri_rao(family)
    kr_bases = [kronecker(*(bs[l - 1] for bs in bases)) for l in range(1, family.s + 1)]
    kr_res = block_ipip_min_norm(kr, kr_bases, (i, gamma.flat(family)))
    lam = kr_res.lam

    results, alphas, kcols, lams = [], [], [], []
    for a, bs, j in zip(family.factors, bases, gamma.js):
        r = block_ipip_min_norm(a, bs, (i, j))
        c = np.zeros(a.partition.dim, dtype=np.complex128)
        c[a.partition.span(i)] = bs[i - 1][:, j - 1]
        xi = float(np.vdot(c, a.data @ c).real)
        results.append(r)
        lams.append(r.lam)
        alphas.append(r.lam**2 * xi)
        kcols.append(a.data @ c)
    denom = float(np.prod(alphas) - np.prod([al - 1.0 for al in alphas]))
    bound = float(np.prod(lams)) / math.sqrt(denom)

    g = [l**2 * k for l, k in zip(lams, kcols)]
    h = diagonal_pullback(family, g) - diagonal_pullback(
        family, [gp - r.minimizer for gp, r in zip(g, results)]
    )
    candidate = h / denom

    kr_space = RkhsSpace(kr.data, kr.partition)
    u_kr = np.zeros_like(kr.data)
    for l in range(1, family.s + 1):
        sp = kr.partition.span(l)
        u_kr[sp, sp] = kr_bases[l - 1]
    pos = kr.partition.offsets[i - 1] + gamma.flat(family)
    target = np.zeros(pos, dtype=np.complex128)
    target[-1] = 1.0
    residual = float(np.linalg.norm(u_kr[:, :pos].conj().T @ candidate - target))
    cand_norm = rkhs_norm(kr_space, candidate)

    equality = abs(lam - bound) <= tol * bound
    holds = lam <= bound * (1.0 + tol)
    return ProductBound(
        lam=lam,
        upper_bound=bound,
        equality=equality,
        holds=holds,
        minimizer=candidate if equality else None,
        candidate=candidate,
        candidate_norm=cand_norm,
        constraint_residual=residual,
        factor_results=tuple(results),
        alphas=tuple(alphas),
    )
