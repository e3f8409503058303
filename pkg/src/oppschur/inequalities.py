"""Determinant inequalities for PSD matrices and their Hadamard products.

Every checker returns an :class:`InequalityReport`.  Reports are oriented so
that ``margin = lhs - rhs`` is nonnegative when the inequality holds, and the
tolerance is relative to a ``scale`` that bounds the magnitude of the terms
being compared (a Hadamard-type product of diagonal data).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, GenerationError, PreconditionError
from .hadamard import BlockFamily, khatri_rao
from .harness.rng import Xoshiro256
from .linalg import (
    BlockMatrix,
    BlockPartition,
    DEFAULT_TOL,
    Definiteness,
    eigh,
    frobenius,
    leading_principal_block,
    psd_check,
    real_determinant,
    require_psd,
)

BLOCK_TOL = 1e-7
ZERO_BLOCK_TOL = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    margin: float
    scale: float
    holds: bool
    equality: bool
    equality_case: Optional[str]
    tol_used: float
    extra: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        out = {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "scale": self.scale,
            "holds": self.holds,
            "equality": self.equality,
            "equality_case": self.equality_case,
            "tol_used": self.tol_used,
        }
        out.update(self.extra)
        return out


def _report(name, lhs, rhs, scale, tol, case=None, **extra) -> InequalityReport:
    margin = lhs - rhs
    holds = margin >= -tol * scale
    equality = abs(margin) <= tol * scale
    return InequalityReport(name, float(lhs), float(rhs), float(margin), float(scale),
                            bool(holds), bool(equality), case, tol, dict(extra))


# --------------------------------------------------------------------------
# elementary product inequality


def elementary_sides(a) -> tuple[float, float]:
    """``(prod_i {prod_j a_ij - prod_j (a_ij - 1)},  prod a - prod_j (prod_i a_ij - 1))``."""
    a = np.asarray(a, dtype=float)
    lhs = float(np.prod(np.prod(a, axis=1) - np.prod(a - 1.0, axis=1)))
    rhs = float(np.prod(a) - np.prod(np.prod(a, axis=0) - 1.0))
    return lhs, rhs


def elementary_equality_case(a, tol: float = 1e-12) -> Optional[str]:
    a = np.asarray(a, dtype=float)
    n, m = a.shape
    if m == 1 or n == 1:
        return "(i)"
    ones = np.abs(a - 1.0) <= tol
    if ones.all(axis=0).any():
        return "(ii)"
    row_ones = ones.all(axis=1)
    for i0 in range(n):
        if np.delete(row_ones, i0).all():
            return "(iii)"
    return None


def elementary_inequality(a, tol: float = DEFAULT_TOL) -> InequalityReport:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise DimensionError("expected a nonempty n x m array")
    if (a < 1.0 - 1e-12).any():
        raise PreconditionError("every entry must be >= 1")
    lhs, rhs = elementary_sides(a)
    scale = 1.0 + float(np.prod(a))
    return _report("elementary", lhs, rhs, scale, tol, elementary_equality_case(a))


# --------------------------------------------------------------------------
# scalar inequalities


def _diag_prod(m: np.ndarray) -> float:
    return float(np.prod(np.diag(m).real))


def _psd_pair(a, b):
    a = require_psd(a, "A")
    b = require_psd(b, "B")
    if a.shape != b.shape:
        raise DimensionError("A and B must have the same dimension")
    return a, b


def hadamard_inequality(a, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``a_11 ... a_nn >= |A|``."""
    a = require_psd(a, "A")
    lhs = _diag_prod(a)
    rhs = real_determinant(a)
    case = "diagonal" if np.count_nonzero(np.abs(a - np.diag(np.diag(a))) > 0) == 0 else None
    return _report("hadamard", lhs, rhs, 1.0 + lhs, tol, case)


def oppenheim(a, b, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``|A o B| >= |A| b_11 ... b_nn``."""
    a, b = _psd_pair(a, b)
    lhs = real_determinant(a * b)
    rhs = real_determinant(a) * _diag_prod(b)
    return _report("oppenheim", lhs, rhs, 1.0 + _diag_prod(a) * _diag_prod(b), tol)


def oppenheim_schur(a, b, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``|A o B| + |A||B| >= |A| prod b_ii + |B| prod a_ii``."""
    a, b = _psd_pair(a, b)
    da, db = real_determinant(a), real_determinant(b)
    pa, pb = _diag_prod(a), _diag_prod(b)
    lhs = real_determinant(a * b) + da * db
    rhs = da * pb + db * pa
    return _report("oppenheim_schur", lhs, rhs, 1.0 + pa * pb, tol)


def fischer(a: BlockMatrix, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``prod_i |A_ii| >= |A|``."""
    require_psd(a.data, "A")
    lhs = float(np.prod([real_determinant(a.block(i, i)) for i in range(1, a.s + 1)]))
    rhs = real_determinant(a.data)
    case = "(block diagonal)" if a.is_block_diagonal(ZERO_BLOCK_TOL) else None
    return _report("fischer", lhs, rhs, 1.0 + lhs, tol, case)


def fischer_ratios(a: BlockMatrix) -> list[tuple[float, float]]:
    """Per block ``(|A_ii|, |(A)_i| / |(A)_{i-1}|)``; the first dominates the second."""
    out = []
    prev = 1.0
    for i in range(1, a.s + 1):
        cur = real_determinant(leading_principal_block(a, i))
        out.append((real_determinant(a.block(i, i)), cur / prev))
        prev = cur
    return out


# --------------------------------------------------------------------------
# block inequalities


@dataclass(frozen=True)
class ExponentProfile:
    sigma_p: Optional[tuple[int, ...]]  # None unless every factor is uniform
    sigma_ip: tuple[tuple[int, ...], ...]  # indexed [i-1][p-1]


def exponent_profile(family: BlockFamily) -> ExponentProfile:
    sigma_ip = []
    for i in range(1, family.s + 1):
        sizes = family.block_sizes(i)
        total = math.prod(sizes)
        sigma_ip.append(tuple(total // n for n in sizes))
    sigma_p = None
    if all(f.partition.is_uniform() for f in family.factors):
        ts = [f.partition.sizes[0] for f in family.factors]
        total = math.prod(ts)
        sigma_p = tuple(total // t for t in ts)
    return ExponentProfile(sigma_p, tuple(sigma_ip))


def _pd_flags(family: BlockFamily) -> bool:
    return all(psd_check(f.data) is Definiteness.POSITIVE_DEFINITE for f in family.factors)


def _zero(block: np.ndarray, whole: np.ndarray) -> bool:
    return frobenius(block) <= ZERO_BLOCK_TOL * (1.0 + frobenius(whole))


def _ratio_case(family: BlockFamily, i: int) -> Optional[str]:
    if family.m == 1 or i == 1:
        return "(a)"
    for a in family.factors:
        if all(_zero(a.block(l, i), a.data) for l in range(1, i)):
            return "(b)"
    if all(n == 1 for n in family.block_sizes(i)):
        for i0 in range(1, i):
            ok = True
            for a in family.factors:
                d = a.block(i0, i0)
                w = eigh(d).eigenvalues
                if w[0] <= 1e-10 * frobenius(d):
                    return None
                inv = np.linalg.inv(d)
                for l in range(1, i):
                    pred = a.block(l, i0) @ inv @ a.block(i0, i)
                    if not _zero(a.block(l, i) - pred, a.data):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return "(c)"
    return None


def block_ratio_inequality(family: BlockFamily, i: int, tol: float = BLOCK_TOL) -> InequalityReport:
    """Per-block ratio form:

    ``|(oA)_i| / |(oA)_{i-1}| >= prod_p |A^p_ii|^s_ip - prod_p (|A^p_ii|^s_ip - r_p^s_ip)``

    with ``r_p = |(A^p)_i| / |(A^p)_{i-1}|`` and ``s_ip = prod_q n_iq / n_ip``.
    """
    family.require_pd()
    if not 1 <= i <= family.s:
        raise IndexError(f"block index {i} outside 1..{family.s}")
    kr = khatri_rao(family)
    lhs = real_determinant(leading_principal_block(kr, i)) / real_determinant(
        leading_principal_block(kr, i - 1)
    )
    sig = exponent_profile(family).sigma_ip[i - 1]
    dpow, rpow = [], []
    for a, e in zip(family.factors, sig):
        r = real_determinant(leading_principal_block(a, i)) / real_determinant(
            leading_principal_block(a, i - 1)
        )
        dpow.append(real_determinant(a.block(i, i)) ** e)
        rpow.append(r**e)
    first = float(np.prod(dpow))
    rhs = first - float(np.prod([d - r for d, r in zip(dpow, rpow)]))
    return _report(f"block_ratio[i={i}]", lhs, rhs, 1.0 + first, tol, _ratio_case(family, i),
                   block=i, sigma=list(sig))


def _uniform_sizes(family: BlockFamily) -> list[int]:
    ts = []
    for p, f in enumerate(family.factors, start=1):
        if not f.partition.is_uniform():
            raise DimensionError(f"factor {p} does not have uniform block size")
        ts.append(f.partition.sizes[0])
    return ts


def _offdiag_support(a: np.ndarray) -> set[tuple[int, int]]:
    cut = ZERO_BLOCK_TOL * (1.0 + frobenius(a))
    n = a.shape[0]
    return {(r, c) for r in range(n) for c in range(r + 1, n) if abs(a[r, c]) > cut or abs(a[c, r]) > cut}


def _block_case(family: BlockFamily, ts: Sequence[int]) -> Optional[str]:
    if family.m == 1 or family.s == 1:
        return "(a)"
    if any(f.is_block_diagonal(ZERO_BLOCK_TOL) for f in family.factors):
        return "(b)"
    if all(t == 1 for t in ts):
        support = set()
        for f in family.factors:
            support |= _offdiag_support(f.data)
        if len(support) <= 1:
            return "(c)"
    return None


def block_oppenheim_schur(family: BlockFamily, tol: float = BLOCK_TOL) -> InequalityReport:
    """``|oA| >= prod_p P_p^s_p - prod_p (P_p^s_p - |A^p|^s_p)`` with ``P_p = prod_i |A^p_ii|``.

    PSD factors are evaluated as they are; the equality case is only
    classified when every factor is positive definite.
    """
    ts = _uniform_sizes(family)
    sig = exponent_profile(family).sigma_p
    lhs = real_determinant(khatri_rao(family).data)
    ppow, dpow = [], []
    for a, e in zip(family.factors, sig):
        diag = float(np.prod([real_determinant(a.block(i, i)) for i in range(1, a.s + 1)]))
        ppow.append(diag**e)
        dpow.append(real_determinant(a.data) ** e)
    first = float(np.prod(ppow))
    rhs = first - float(np.prod([pp - d for pp, d in zip(ppow, dpow)]))
    case = _block_case(family, ts) if _pd_flags(family) else None
    return _report("block_oppenheim_schur", lhs, rhs, 1.0 + first, tol, case,
                   sigma=list(sig), t=list(ts))


@dataclass(frozen=True)
class ChainReport:
    det_hadamard: float
    chained_bound: float  # product over blocks of the per-block right sides
    final_rhs: float
    scale: float

    def ordered(self, tol: float = BLOCK_TOL) -> bool:
        slack = tol * self.scale
        return self.det_hadamard >= self.chained_bound - slack and self.chained_bound >= self.final_rhs - slack


def chained_ratio_bound(family: BlockFamily) -> ChainReport:
    """The intermediate bound obtained by multiplying the per-block ratio inequalities."""
    _uniform_sizes(family)
    family.require_pd()
    ratios = [block_ratio_inequality(family, i) for i in range(1, family.s + 1)]
    final = block_oppenheim_schur(family)
    return ChainReport(
        det_hadamard=final.lhs,
        chained_bound=float(np.prod([r.rhs for r in ratios])),
        final_rhs=final.rhs,
        scale=final.scale,
    )


# --------------------------------------------------------------------------
# fixtures realizing the equality cases


def _random_pd(rng: Xoshiro256, n: int, eps: float = 0.1) -> np.ndarray:
    b = rng.complex_normal((n, n))
    g = b.conj().T @ b
    g = 0.5 * (g + g.conj().T)
    return g + eps * frobenius(g) / n * np.eye(n)


def _ensure_pd(m: np.ndarray) -> bool:
    return psd_check(m) is Definiteness.POSITIVE_DEFINITE


def equality_case_constructor(kind: str, *, m: int = 2, s: int = 2, t: int = 1,
                              pair: tuple[int, int] = (1, 2), i0: int = 1,
                              seed: int = 0, max_tries: int = 50) -> BlockFamily:
    """Build a PD family that satisfies one named equality case.

    ``block_diagonal``: the last factor is block diagonal (case (b)).
    ``arrow_pair``: scalar factors whose only off-diagonal entries sit at the
    shared ``pair`` (case (c) of the determinant inequality).
    ``schur_complement_chain``: scalar factors whose last column satisfies
    ``a_ls = a_l,i0 a_i0,s / a_i0,i0`` for every ``l < s`` (case (c) of the
    ratio inequality at ``i = s``).
    """
    rng = Xoshiro256(seed)
    for _ in range(max_tries):
        if kind == "block_diagonal":
            part = BlockPartition.uniform(s, t)
            mats = [_random_pd(rng, s * t) for _ in range(m - 1)]
            last = np.zeros((s * t, s * t), dtype=np.complex128)
            for i in range(1, s + 1):
                sp = part.span(i)
                last[sp, sp] = _random_pd(rng, t)
            mats.append(last)
        elif kind == "arrow_pair":
            i, j = sorted(pair)
            if not (1 <= i < j <= s):
                raise DimensionError(f"pair {pair} is not an off-diagonal position in 1..{s}")
            part = BlockPartition.scalar(s)
            mats = []
            for _ in range(m):
                d = 0.5 + np.array([rng.uniform() for _ in range(s)]) * 2.0
                a = np.diag(d).astype(np.complex128)
                z = rng.complex_normal(())
                z = z / max(abs(z), 1e-12) * rng.uniform() * 0.95 * math.sqrt(d[i - 1] * d[j - 1])
                a[i - 1, j - 1] = z
                a[j - 1, i - 1] = np.conj(z)
                mats.append(a)
        elif kind == "schur_complement_chain":
            if not 1 <= i0 < s:
                raise DimensionError(f"i0 must lie in 1..{s - 1}")
            part = BlockPartition.scalar(s)
            mats = []
            for _ in range(m):
                a = _random_pd(rng, s)
                for l in range(s - 1):
                    if l != i0 - 1:
                        a[l, s - 1] = a[l, i0 - 1] * a[i0 - 1, s - 1] / a[i0 - 1, i0 - 1]
                        a[s - 1, l] = np.conj(a[l, s - 1])
                # lift the last pivot so the Schur complement stays positive
                head = a[: s - 1, : s - 1]
                col = a[: s - 1, s - 1]
                need = float(np.vdot(col, np.linalg.solve(head, col)).real)
                a[s - 1, s - 1] = need + 0.5 + rng.uniform()
                mats.append(a)
        else:
            raise ValueError(f"unknown fixture kind {kind!r}")
        if all(_ensure_pd(a) for a in mats):
            return BlockFamily(tuple(BlockMatrix(a, part) for a in mats))
    raise GenerationError(f"could not build a PD {kind} fixture in {max_tries} tries")
