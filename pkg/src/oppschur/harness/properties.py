"""Randomized property checks.

Each property draws its own instance from a seeded generator and returns an
:class:`Outcome`.  ``margin`` is signed slack: nonnegative means the check
passed with that much room (in the units of the check's tolerance).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import hadamard as hp
from .. import inequalities as ineq
from .. import interpolation as ip
from ..linalg import BlockMatrix, BlockPartition, determinant, moore_penrose, frobenius
from ..rkhs import rkhs_sum_check
from . import oracles
from .generate import random_block, random_family, random_pd, random_psd
from .rng import Xoshiro256


@dataclass(frozen=True)
class Outcome:
    ok: bool
    margin: float
    digest: str


class _Inputs:
    """Collects the arrays an instance was built from and hashes them."""

    def __init__(self):
        self._h = hashlib.sha256()

    def add(self, *xs):
        for x in xs:
            if isinstance(x, BlockMatrix):
                self._h.update(repr(x.partition.sizes).encode())
                x = x.data
            if isinstance(x, hp.BlockFamily):
                self.add(*x.factors)
                continue
            a = np.ascontiguousarray(np.asarray(x, dtype=np.complex128))
            self._h.update(repr(a.shape).encode())
            self._h.update(a.tobytes())
        return self

    def digest(self) -> str:
        return self._h.hexdigest()[:16]


def _cap(max_dim: int, hi: int) -> int:
    return max(2, min(hi, max_dim))


def _random_unitary(rng: Xoshiro256, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.complex_normal((n, n)))
    d = np.diag(r)
    return q * (d / np.where(np.abs(d) > 0, np.abs(d), 1.0))


def _random_partition(rng: Xoshiro256, total_max: int) -> tuple[int, ...]:
    sizes = []
    remaining = rng.integers(2, max(2, total_max))
    while remaining > 0:
        k = rng.integers(1, min(3, remaining))
        sizes.append(k)
        remaining -= k
    return tuple(sizes)


def _random_bases(rng: Xoshiro256, a: BlockMatrix) -> list[np.ndarray]:
    if rng.uniform() < 0.5:
        return ip.eigen_cons(a)
    return [_random_unitary(rng, k) for k in a.partition.sizes]


def _family_shape(rng: Xoshiro256, max_dim: int, m_choices=(2, 3)) -> list[tuple[int, ...]]:
    m = rng.choice(m_choices)
    s = rng.choice((2, 3))
    ts = [rng.choice((1, 2)) for _ in range(m)]
    if s * max(ts) > max_dim:
        ts = [1] * m
    s = min(s, max(max_dim, 2))
    return [(t,) * s for t in ts]


# --------------------------------------------------------------------------
# interpolation


def prop_lambda_det(rng, max_dim):
    t = random_pd(rng, rng.integers(2, _cap(max_dim, 8)))
    chk = ip.lambda_det_identity_check(t)
    err = abs(chk.product**2 * ip.real_determinant(t) - 1.0)
    return Outcome(err <= 1e-7, 1e-7 - err, _Inputs().add(t).digest())


def prop_bordered(rng, max_dim):
    n = rng.integers(1, _cap(max_dim, 8))
    g = random_pd(rng, n)
    b = rng.complex_normal((n,))
    direct = ip.solve_ipip(ip.IpipProblem(g, b)).norm ** 2
    rel = abs(ip.min_norm_bordered(g, b) - direct) / direct
    return Outcome(rel <= 1e-8, 1e-8 - rel, _Inputs().add(g, b).digest())


def prop_block_lambda(rng, max_dim):
    a = random_block(rng, _random_partition(rng, _cap(max_dim, 8)))
    res = ip.block_lambda_products(a, _random_bases(rng, a), tol=1e-7)
    worst = max(abs(r.product - r.minor_ratio) / r.minor_ratio for r in res)
    return Outcome(all(r.agree for r in res), 1e-7 - worst, _Inputs().add(a).digest())


def prop_block_lower_bound(rng, max_dim):
    a = random_block(rng, _random_partition(rng, _cap(max_dim, 8)))
    eigen = rng.uniform() < 0.5
    bases = ip.eigen_cons(a) if eigen else [_random_unitary(rng, k) for k in a.partition.sizes]
    ok, margin = True, math.inf
    for i in range(1, a.s + 1):
        for j in range(1, a.partition.sizes[i - 1] + 1):
            r = ip.block_ipip_min_norm(a, bases, (i, j))
            margin = min(margin, r.lam - r.lower_bound + 1e-10)
            ok &= r.lam >= r.lower_bound - 1e-10
            if eigen:
                # with eigenvector bases equality means the upper blocks vanish
                ok &= r.equality == r.upper_components_zero
    return Outcome(bool(ok), margin, _Inputs().add(a).digest())


def prop_block_lower_bound_fixture(rng, max_dim):
    part = BlockPartition(_random_partition(rng, _cap(max_dim, 8)))
    data = np.zeros((part.dim, part.dim), dtype=np.complex128)
    for i in range(1, part.s + 1):
        data[part.span(i), part.span(i)] = random_pd(rng, part.sizes[i - 1])
    a = BlockMatrix(data, part)
    bases = ip.eigen_cons(a)
    worst = 0.0
    ok = True
    for i in range(1, a.s + 1):
        for j in range(1, part.sizes[i - 1] + 1):
            r = ip.block_ipip_min_norm(a, bases, (i, j))
            ok &= r.equality
            worst = max(worst, abs(r.lam - r.lower_bound) / r.lower_bound)
    return Outcome(bool(ok), ip.EQUALITY_TOL - worst, _Inputs().add(a).digest())


def prop_ipip_oracle(rng, max_dim):
    n = rng.integers(1, _cap(max_dim, 4))
    g = random_pd(rng, n, epsilon=0.05)
    b = rng.complex_normal((n,))
    sol = ip.solve_ipip(ip.IpipProblem(g, b))
    c, norm = oracles.normal_equations_solve(g, b)
    rel = max(np.linalg.norm(sol.coefficients - c) / np.linalg.norm(c), abs(sol.norm - norm) / norm)
    return Outcome(bool(rel <= 1e-8), 1e-8 - rel, _Inputs().add(g, b).digest())


# --------------------------------------------------------------------------
# matrix core and RKHS


def prop_det_cofactor(rng, max_dim):
    n = rng.integers(1, _cap(max_dim, 4))
    m = rng.complex_normal((n, n))
    d, ref = determinant(m), oracles.cofactor_det(m)
    rel = abs(d - ref) / max(abs(ref), 1e-300)
    return Outcome(rel <= 1e-10, 1e-10 - rel, _Inputs().add(m).digest())


def prop_pinv_penrose(rng, max_dim):
    r, c = rng.integers(1, _cap(max_dim, 6)), rng.integers(1, _cap(max_dim, 6))
    k = rng.integers(1, min(r, c))
    m = rng.complex_normal((r, k)) @ rng.complex_normal((k, c))
    x = moore_penrose(m)
    scale = 1.0 + frobenius(m) * frobenius(x)
    errs = [
        frobenius(m @ x @ m - m) / (1.0 + frobenius(m)),
        frobenius(x @ m @ x - x) / (1.0 + frobenius(x)),
        frobenius((m @ x).conj().T - m @ x) / scale,
        frobenius((x @ m).conj().T - x @ m) / scale,
    ]
    worst = max(errs)
    return Outcome(worst <= 1e-8, 1e-8 - worst, _Inputs().add(m).digest())


def prop_rkhs_sum(rng, max_dim):
    n = rng.integers(2, _cap(max_dim, 5))
    a = random_psd(rng, n, rng.integers(1, n))
    b = random_psd(rng, n, rng.integers(1, n))
    inp = _Inputs().add(a, b)
    if rng.uniform() < 0.5:
        z = rng.complex_normal((n,))
        f, g = a @ z, b @ z
        inp.add(z)
        res = rkhs_sum_check(a, b, f, g)
        ok = res.equality and res.witness is not None
    else:
        f = a @ rng.complex_normal((n,))
        g = b @ rng.complex_normal((n,))
        inp.add(f, g)
        res = rkhs_sum_check(a, b, f, g)
        ok = res.lhs <= res.rhs + 1e-8 * (1.0 + res.rhs) and (res.witness is None or res.equality)
    return Outcome(bool(ok), res.rhs - res.lhs, inp.digest())


# --------------------------------------------------------------------------
# scalar inequalities


def prop_elementary_oracle(rng, max_dim):
    n, m = rng.integers(1, 3), rng.integers(1, 3)
    a = rng.uniform_array((n, m), 1.0, 4.0)
    rep = ineq.elementary_inequality(a)
    lo, ro = oracles.elementary_by_enumeration(a)
    rel = max(abs(rep.lhs - lo) / max(abs(lo), 1.0), abs(rep.rhs - ro) / max(abs(ro), 1.0))
    return Outcome(bool(rel <= 1e-9 and rep.holds), min(1e-9 - rel, rep.margin),
                   _Inputs().add(a).digest())


def elementary_case_fixture(rng: Xoshiro256, case: str) -> np.ndarray:
    """Random array realizing equality case ``(i)``, ``(ii)`` or ``(iii)``."""
    if case == "(i)":
        k = rng.integers(1, 3)
        shape = (1, k) if rng.uniform() < 0.5 else (k, 1)
        return rng.uniform_array(shape, 1.0, 4.0) + 1e-3
    n, m = rng.integers(2, 3), rng.integers(2, 3)
    a = rng.uniform_array((n, m), 1.0, 4.0) + 1e-3
    if case == "(ii)":
        a[:, rng.integers(0, m - 1)] = 1.0
    elif case == "(iii)":
        keep = rng.integers(0, n - 1)
        for i in range(n):
            if i != keep:
                a[i, :] = 1.0
    else:
        raise ValueError(case)
    return a


def prop_elementary_cases(rng, max_dim):
    case = rng.choice(("(i)", "(ii)", "(iii)"))
    a = elementary_case_fixture(rng, case)
    rep = ineq.elementary_inequality(a)
    return Outcome(rep.equality and rep.equality_case == case, -abs(rep.margin),
                   _Inputs().add(a).digest())


def prop_oppenheim_schur(rng, max_dim):
    n = rng.integers(2, _cap(max_dim, 6))
    a = random_psd(rng, n, rng.integers(1, n))
    b = random_psd(rng, n, rng.integers(1, n))
    reps = [ineq.oppenheim_schur(a, b), ineq.oppenheim(a, b), ineq.hadamard_inequality(a)]
    margin = min(r.margin / (r.tol_used * r.scale) for r in reps)
    return Outcome(all(r.holds for r in reps), margin, _Inputs().add(a, b).digest())


def prop_oppenheim_schur_2x2(rng, max_dim):
    a, b = random_pd(rng, 2), random_pd(rng, 2)
    rep = ineq.oppenheim_schur(a, b)
    return Outcome(rep.equality, -abs(rep.margin) / rep.scale, _Inputs().add(a, b).digest())


# --------------------------------------------------------------------------
# block inequalities


def prop_block_oppenheim_schur(rng, max_dim):
    fam = random_family(rng, _family_shape(rng, max_dim))
    inp = _Inputs().add(fam)
    rep = ineq.block_oppenheim_schur(fam)
    ok = rep.holds
    margin = rep.margin / (rep.tol_used * rep.scale)
    rhs_prod = 1.0
    for i in range(1, fam.s + 1):
        r = ineq.block_ratio_inequality(fam, i)
        ok &= r.holds
        if i == 1:
            ok &= r.equality and r.equality_case == "(a)"
        margin = min(margin, r.margin / (r.tol_used * r.scale))
        rhs_prod *= r.rhs
    slack = ineq.BLOCK_TOL * rep.scale
    ok &= rep.lhs >= rhs_prod - slack and rhs_prod >= rep.rhs - slack
    for f in fam.factors:
        fr = ineq.fischer(f)
        ok &= fr.holds
        for d, ratio in ineq.fischer_ratios(f):
            ok &= d >= ratio * (1.0 - 1e-9)
    return Outcome(bool(ok), margin, inp.digest())


def prop_block_scalar_agreement(rng, max_dim):
    n = rng.integers(2, _cap(max_dim, 6))
    a, b = random_pd(rng, n), random_pd(rng, n)
    part = BlockPartition.scalar(n)
    fam = hp.BlockFamily((BlockMatrix(a, part), BlockMatrix(b, part)))
    blk = ineq.block_oppenheim_schur(fam)
    os_ = ineq.oppenheim_schur(a, b)
    diff = abs(blk.margin - os_.margin) / os_.scale
    return Outcome(diff <= 1e-12 and blk.holds == os_.holds, 1e-12 - diff,
                   _Inputs().add(a, b).digest())


_FIXTURES = (
    ("block_diagonal", "(b)"),
    ("arrow_pair", "(c)"),
    ("schur_complement_chain", "(c)"),
)


def prop_equality_fixtures(rng, max_dim):
    kind, label = rng.choice(_FIXTURES)
    m = rng.choice((2, 3))
    seed = rng.next_u64()
    if kind == "block_diagonal":
        s, t = rng.choice((2, 3)), rng.choice((1, 2))
        if s * t > max(max_dim, 2):
            s, t = 2, 1
        fam = ineq.equality_case_constructor(kind, m=m, s=s, t=t, seed=seed)
        rep = ineq.block_oppenheim_schur(fam)
    elif kind == "arrow_pair":
        s = rng.integers(2, _cap(max_dim, 5))
        i = rng.integers(1, s - 1)
        j = rng.integers(i + 1, s)
        fam = ineq.equality_case_constructor(kind, m=m, s=s, pair=(i, j), seed=seed)
        rep = ineq.block_oppenheim_schur(fam)
    else:
        s = rng.integers(3, max(3, _cap(max_dim, 5)))
        i0 = rng.integers(1, s - 1)
        fam = ineq.equality_case_constructor(kind, m=m, s=s, i0=i0, seed=seed)
        rep = ineq.block_ratio_inequality(fam, s)
    ok = rep.equality and rep.equality_case == label
    return Outcome(bool(ok), -abs(rep.margin) / rep.scale, _Inputs().add(fam).digest())


# --------------------------------------------------------------------------
# Hadamard-product RKHS


def _small_family(rng, max_dim):
    m = rng.choice((2, 3))
    cap = _cap(max_dim, 6) if m == 2 else _cap(max_dim, 4)
    s = rng.integers(1, 3)
    parts = []
    for _ in range(m):
        while True:
            p = tuple(rng.integers(1, 2) for _ in range(s))
            if sum(p) <= cap:
                break
        parts.append(p)
    return random_family(rng, parts)


def prop_extremal_agreement(rng, max_dim):
    fam = _small_family(rng, max_dim)
    mode = rng.choice(("common", "mixed", "generic"))
    vecs = []
    blocks = [rng.integers(1, fam.s) for _ in range(fam.m)]
    if mode == "common":
        blocks = [blocks[0]] * fam.m
    for a, i in zip(fam.factors, blocks):
        if mode == "generic":
            vecs.append(a.data @ rng.complex_normal((a.partition.dim,)))
        else:
            k = a.data[:, a.partition.span(i)]
            vecs.append(k @ rng.complex_normal((k.shape[1],)))
    chk = hp.extremal_simple_tensor_check(fam, vecs)
    rc = hp.restriction_inequality_check(fam, hp.kron_vectors(*vecs))
    ok = chk.agree and rc.holds
    if mode == "common":
        ok &= chk.extremal
    return Outcome(bool(ok), rc.tensor_norm - rc.pullback_norm, _Inputs().add(fam, *vecs).digest())


def prop_product_bound(rng, max_dim):
    fam = _small_family(rng, max_dim)
    i = rng.integers(1, fam.s)
    js = tuple(rng.integers(1, n) for n in fam.block_sizes(i))
    bases = None
    if rng.uniform() < 0.5:
        # eigenvector bases in reversed order with random column phases
        bases = []
        for a in fam.factors:
            bs = []
            for u in ip.eigen_cons(a):
                ph = np.exp(2j * np.pi * rng.uniform_array((u.shape[1],)))
                bs.append(u[:, ::-1] * ph)
            bases.append(bs)
    res = hp.product_bound_min_norm(fam, hp.TensorIndex(i, js), bases)
    ok = res.holds and res.constraint_residual <= 1e-8
    if i == 1:
        ok &= res.equality
    if res.equality:
        ok &= abs(res.candidate_norm - res.lam) <= 1e-7 * max(res.lam, 1.0)
    margin = (res.upper_bound - res.lam) / res.upper_bound + hp.BOUND_TOL
    return Outcome(bool(ok), margin, _Inputs().add(fam).digest())


PROPERTIES: dict[str, Callable[[Xoshiro256, int], Outcome]] = {
    "lambda_det": prop_lambda_det,
    "bordered_norm": prop_bordered,
    "block_lambda_products": prop_block_lambda,
    "block_lower_bound": prop_block_lower_bound,
    "block_lower_bound_fixture": prop_block_lower_bound_fixture,
    "ipip_oracle": prop_ipip_oracle,
    "det_cofactor": prop_det_cofactor,
    "pinv_penrose": prop_pinv_penrose,
    "rkhs_sum": prop_rkhs_sum,
    "elementary_oracle": prop_elementary_oracle,
    "elementary_cases": prop_elementary_cases,
    "oppenheim_schur_psd": prop_oppenheim_schur,
    "oppenheim_schur_2x2": prop_oppenheim_schur_2x2,
    "block_oppenheim_schur": prop_block_oppenheim_schur,
    "block_scalar_agreement": prop_block_scalar_agreement,
    "equality_fixtures": prop_equality_fixtures,
    "extremal_agreement": prop_extremal_agreement,
    "product_bound": prop_product_bound,
}
