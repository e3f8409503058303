import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oppschur.errors import DimensionError, GenerationError, PreconditionError
from oppschur.hadamard import BlockFamily
from oppschur.harness.generate import random_block, random_family, random_pd, random_psd
from oppschur.harness.oracles import elementary_by_enumeration
from oppschur.harness.rng import Xoshiro256
from oppschur.inequalities import (
    block_oppenheim_schur,
    block_ratio_inequality,
    chained_ratio_bound,
    elementary_inequality,
    equality_case_constructor,
    exponent_profile,
    fischer,
    fischer_ratios,
    hadamard_inequality,
    oppenheim,
    oppenheim_schur,
)
from oppschur.linalg import BlockMatrix, BlockPartition

from strategies import seeds

A = np.array([[2.0, 1.0], [1.0, 2.0]])
B = np.array([[3.0, 1.0], [1.0, 3.0]])
C3 = np.ones((3, 3)) + np.eye(3)


class TestElementary:
    # lhs/rhs frozen from the enumeration oracle
    @pytest.mark.parametrize(
        "a, lhs, rhs, case",
        [
            ([[2, 2], [2, 2]], 9.0, 7.0, None),
            ([[1, 2], [1, 3]], 6.0, 6.0, "(ii)"),
            ([[2, 3], [1, 1]], 4.0, 4.0, "(iii)"),
            ([[2, 3, 4]], 18.0, 18.0, "(i)"),
        ],
    )
    def test_examples(self, a, lhs, rhs, case):
        assert elementary_by_enumeration(a) == pytest.approx((lhs, rhs))
        rep = elementary_inequality(a)
        assert (rep.lhs, rep.rhs) == pytest.approx((lhs, rhs))
        assert rep.equality_case == case
        assert rep.equality == (case is not None)

    def test_entry_below_one(self):
        with pytest.raises(PreconditionError):
            elementary_inequality([[0.5, 2.0]])

    @settings(max_examples=80, deadline=None)
    @given(
        st.integers(1, 3).flatmap(
            lambda n: st.integers(1, 3).flatmap(
                lambda m: st.lists(
                    st.lists(st.floats(1.0, 4.0), min_size=m, max_size=m), min_size=n, max_size=n
                )
            )
        )
    )
    def test_against_enumeration(self, a):
        rep = elementary_inequality(a)
        lo, ro = elementary_by_enumeration(a)
        assert rep.lhs == pytest.approx(lo, rel=1e-9, abs=1e-12)
        assert rep.rhs == pytest.approx(ro, rel=1e-9, abs=1e-12)
        assert rep.holds
        if rep.equality_case is not None:
            assert rep.equality


class TestScalar:
    def test_hadamard_examples(self):
        assert hadamard_inequality(np.eye(4)).equality
        rep = hadamard_inequality(A)
        assert (rep.lhs, rep.rhs) == pytest.approx((4, 3)) and not rep.equality
        rep = hadamard_inequality(np.diag([3.0, 5.0]))
        assert rep.lhs == pytest.approx(15) and rep.equality

    def test_oppenheim_examples(self):
        rep = oppenheim(A, np.eye(2))
        assert rep.lhs == pytest.approx(4) and rep.rhs == pytest.approx(3)
        rep = oppenheim(A, B)
        assert (rep.lhs, rep.rhs) == pytest.approx((35, 27))
        rep = oppenheim(np.eye(2), B)
        assert rep.lhs == pytest.approx(9) and rep.equality

    def test_oppenheim_schur_examples(self):
        rep = oppenheim_schur(np.eye(3), np.eye(3))
        assert (rep.lhs, rep.rhs) == pytest.approx((2, 2)) and rep.equality
        rep = oppenheim_schur(A, B)
        assert (rep.lhs, rep.rhs) == pytest.approx((59, 59)) and rep.equality
        rep = oppenheim_schur(C3, C3)
        assert (rep.lhs, rep.rhs) == pytest.approx((70, 64)) and not rep.equality

    def test_errors(self):
        with pytest.raises(DimensionError):
            oppenheim(np.eye(2), np.eye(3))
        with pytest.raises(PreconditionError):
            oppenheim_schur(np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2))

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_psd_pairs(self, seed):
        rng = Xoshiro256(seed)
        n = rng.integers(2, 6)
        a, b = random_psd(rng, n, rng.integers(1, n)), random_psd(rng, n, rng.integers(1, n))
        for rep in (oppenheim_schur(a, b), oppenheim(a, b), hadamard_inequality(a)):
            assert rep.margin >= -1e-9 * rep.scale and rep.holds

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_two_by_two_equality(self, seed):
        rng = Xoshiro256(seed)
        assert oppenheim_schur(random_pd(rng, 2), random_pd(rng, 2)).equality

    def test_report_invariants(self):
        rep = oppenheim_schur(C3, C3)
        assert rep.margin == rep.lhs - rep.rhs
        assert rep.holds == (rep.margin >= -rep.tol_used * rep.scale)
        d = rep.as_dict()
        assert d["name"] == "oppenheim_schur" and d["tol_used"] == 1e-9


class TestFischer:
    def test_block_diagonal_equality(self):
        m = np.zeros((3, 3))
        m[:2, :2] = A
        m[2, 2] = 4.0
        rep = fischer(BlockMatrix(m, (2, 1)))
        assert rep.equality and rep.equality_case is not None

    def test_scalar_partition_is_hadamard(self):
        rng = Xoshiro256(3)
        a = random_pd(rng, 4)
        f = fischer(BlockMatrix(a, BlockPartition.scalar(4)))
        h = hadamard_inequality(a)
        assert (f.lhs, f.rhs) == pytest.approx((h.lhs, h.rhs))

    def test_example(self):
        rep = fischer(BlockMatrix(A, (1, 1)))
        assert (rep.lhs, rep.rhs) == pytest.approx((4, 3)) and not rep.equality

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_random(self, seed):
        a = random_block(Xoshiro256(seed), (2, 1, 2))
        assert fischer(a).holds and not fischer(a).equality
        ratios = fischer_ratios(a)
        assert all(d >= r * (1 - 1e-12) for d, r in ratios)
        assert math.prod(r for _, r in ratios) == pytest.approx(fischer(a).rhs)


class TestExponents:
    def test_profile(self):
        rng = Xoshiro256(1)
        f = random_family(rng, [(2, 2), (1, 1), (3, 3)])
        prof = exponent_profile(f)
        assert prof.sigma_p == (3, 6, 2)
        assert prof.sigma_ip == ((3, 6, 2), (3, 6, 2))

    def test_non_uniform(self):
        rng = Xoshiro256(2)
        f = random_family(rng, [(1, 2), (2, 1)])
        prof = exponent_profile(f)
        assert prof.sigma_p is None
        assert prof.sigma_ip == ((2, 1), (1, 2))
        with pytest.raises(DimensionError):
            block_oppenheim_schur(f)


class TestBlockRatio:
    def test_first_block_case_a(self):
        rep = block_ratio_inequality(random_family(Xoshiro256(3), [(2, 1), (1, 2)]), 1)
        assert rep.equality and rep.equality_case == "(a)"

    def test_block_diagonal_factor_case_b(self):
        fam = equality_case_constructor("block_diagonal", m=2, s=3, t=2, seed=4)
        for i in (2, 3):
            rep = block_ratio_inequality(fam, i)
            assert rep.equality and rep.equality_case == "(b)"

    def test_generic_strict(self):
        fam = random_family(Xoshiro256(5), [(1, 1, 1), (1, 1, 1)])
        rep = block_ratio_inequality(fam, 3)
        assert rep.holds and not rep.equality and rep.equality_case is None

    def test_schur_chain_case_c(self):
        fam = equality_case_constructor("schur_complement_chain", s=3, i0=1, seed=0)
        rep = block_ratio_inequality(fam, 3)
        assert rep.equality and rep.equality_case == "(c)"

    def test_errors(self):
        fam = random_family(Xoshiro256(6), [(1, 1), (1, 1)])
        with pytest.raises(IndexError):
            block_ratio_inequality(fam, 3)
        p = BlockPartition.scalar(2)
        psd = BlockFamily((BlockMatrix(np.ones((2, 2)), p), BlockMatrix(np.eye(2), p)))
        with pytest.raises(PreconditionError):
            block_ratio_inequality(psd, 2)


class TestBlockOppenheimSchur:
    def test_reduces_to_scalar(self):
        p = BlockPartition.scalar(2)
        blk = block_oppenheim_schur(BlockFamily((BlockMatrix(A, p), BlockMatrix(B, p))))
        sc = oppenheim_schur(A, B)
        assert blk.margin == pytest.approx(sc.margin, abs=1e-12 * sc.scale)
        assert blk.lhs + np.linalg.det(A) * np.linalg.det(B) == pytest.approx(sc.lhs, rel=1e-12)

    def test_single_block_case_a(self):
        fam = random_family(Xoshiro256(7), [(2,), (3,), (1,)])
        rep = block_oppenheim_schur(fam)
        assert rep.equality and rep.equality_case == "(a)"

    def test_fixtures(self):
        rep = block_oppenheim_schur(equality_case_constructor("block_diagonal", m=2, s=2, t=2, seed=7))
        assert rep.equality and rep.equality_case == "(b)"
        rep = block_oppenheim_schur(equality_case_constructor("block_diagonal", m=2, s=3, t=2, seed=1))
        assert rep.equality and rep.equality_case == "(b)"
        rep = block_oppenheim_schur(equality_case_constructor("arrow_pair", s=4, pair=(1, 3), seed=0))
        assert rep.equality and rep.equality_case == "(c)"
        assert abs(rep.margin) <= 1e-7 * rep.scale

    def test_different_pairs_are_strict(self):
        p = BlockPartition.scalar(3)
        a = np.eye(3) * 2
        a[0, 1] = a[1, 0] = 1.0
        b = np.eye(3) * 2
        b[1, 2] = b[2, 1] = 1.0
        rep = block_oppenheim_schur(BlockFamily((BlockMatrix(a, p), BlockMatrix(b, p))))
        assert rep.holds and not rep.equality and rep.equality_case is None

    def test_psd_evaluated_not_classified(self):
        p = BlockPartition.uniform(2, 1)
        fam = BlockFamily((BlockMatrix(np.ones((2, 2)), p), BlockMatrix(B, p)))
        rep = block_oppenheim_schur(fam)
        assert rep.holds and rep.equality_case is None

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_random_and_chain(self, seed):
        rng = Xoshiro256(seed)
        m, s = rng.choice((2, 3)), rng.choice((2, 3))
        fam = random_family(rng, [(rng.choice((1, 2)),) * s for _ in range(m)])
        rep = block_oppenheim_schur(fam)
        assert rep.margin >= -1e-7 * rep.scale
        assert chained_ratio_bound(fam).ordered()


class TestConstructor:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            equality_case_constructor("nope")

    def test_bad_pair(self):
        with pytest.raises(DimensionError):
            equality_case_constructor("arrow_pair", s=3, pair=(2, 2))

    def test_exhausted_resampling(self, monkeypatch):
        import oppschur.inequalities as mod

        monkeypatch.setattr(mod, "_ensure_pd", lambda m: False)
        with pytest.raises(GenerationError):
            equality_case_constructor("block_diagonal", max_tries=3)

    def test_deterministic(self):
        a = equality_case_constructor("arrow_pair", m=3, s=4, pair=(2, 4), seed=11)
        b = equality_case_constructor("arrow_pair", m=3, s=4, pair=(2, 4), seed=11)
        for x, y in zip(a.factors, b.factors):
            np.testing.assert_array_equal(x.data, y.data)
