import io as pyio
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oppschur.errors import DimensionError, InputFormatError
from oppschur.hadamard import BlockFamily
from oppschur.harness import io
from oppschur.harness.cli import main
from oppschur.harness.generate import GenSpec, generate
from oppschur.harness.oracles import cofactor_det, elementary_by_enumeration, normal_equations_solve
from oppschur.harness.properties import PROPERTIES
from oppschur.harness.rng import Xoshiro256, derive_seed, splitmix64
from oppschur.harness.suite import reproduce, run_suite
from oppschur.linalg import BlockMatrix, Definiteness, eigh, psd_check


class TestRng:
    def test_splitmix_reference(self):
        # published first outputs of SplitMix64 from state 0
        state, out = splitmix64(0)
        assert out == 0xE220A8397B1DCDAF
        _, out = splitmix64(state)
        assert out == 0x6E789E6AA1B965F4

    def test_deterministic_stream(self):
        a, b = Xoshiro256(42), Xoshiro256(42)
        assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]
        assert Xoshiro256(1).next_u64() != Xoshiro256(2).next_u64()

    def test_uniform_range_and_integers(self):
        r = Xoshiro256(3)
        u = [r.uniform() for _ in range(2000)]
        assert min(u) >= 0.0 and max(u) < 1.0
        assert abs(np.mean(u) - 0.5) < 0.03
        ks = {r.integers(2, 4) for _ in range(200)}
        assert ks == {2, 3, 4}

    def test_complex_normal_moments(self):
        z = Xoshiro256(4).complex_normal((4000,))
        assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.08
        assert abs(np.mean(z)) < 0.05

    def test_seed_bounds(self):
        with pytest.raises(ValueError):
            Xoshiro256(-1)
        Xoshiro256(2**64 - 1).next_u64()

    def test_derived_seeds_differ(self):
        assert derive_seed(1, "a") != derive_seed(1, "b") != derive_seed(2, "a")


class TestGenerate:
    def test_pd(self):
        a = generate(GenSpec("pd", n=3, seed=1))
        assert psd_check(a) is Definiteness.POSITIVE_DEFINITE

    def test_psd_rank(self):
        a = generate(GenSpec("psd", n=4, rank=2, seed=5))
        w = eigh(a).eigenvalues
        assert int(np.sum(w > 1e-10 * np.linalg.norm(a))) == 2

    def test_deterministic(self):
        spec = GenSpec("pd_block", partition=((1, 2), (2, 1)), m=2, seed=9)
        a, b = generate(spec), generate(spec)
        assert isinstance(a, BlockFamily)
        for x, y in zip(a.factors, b.factors):
            np.testing.assert_array_equal(x.data, y.data)

    def test_block_and_fixture(self):
        assert isinstance(generate(GenSpec("pd_block", partition=(2, 2), seed=1)), BlockMatrix)
        fam = generate(GenSpec("equality_fixture", fixture="arrow_pair", m=2, seed=1,
                               fixture_args={"s": 3, "pair": (1, 3)}))
        assert fam.m == 2 and fam.s == 3

    @pytest.mark.parametrize(
        "spec",
        [GenSpec("pd", n=0), GenSpec("psd", n=3, rank=4), GenSpec("cube", n=2),
         GenSpec("pd_block", partition=((1,), (1,)), m=3), GenSpec("equality_fixture")],
    )
    def test_invalid(self, spec):
        with pytest.raises(DimensionError):
            generate(spec)


class TestOracles:
    def test_cofactor(self):
        assert cofactor_det(np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]])) == pytest.approx(4)
        assert cofactor_det(np.array([[0, 1], [1, 0]])) == pytest.approx(-1)

    def test_enumeration(self):
        assert elementary_by_enumeration([[2, 2], [2, 2]]) == pytest.approx((9, 7))

    def test_normal_equations(self):
        c, norm = normal_equations_solve([[1, 1], [1, 2]], [0, 1])
        np.testing.assert_allclose(c, [-1, 1], atol=1e-12)
        assert norm == pytest.approx(1)


complex_entry = st.tuples(
    st.floats(allow_nan=False, allow_infinity=False, width=64),
    st.floats(allow_nan=False, allow_infinity=False, width=64),
)


class TestIo:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(complex_entry, min_size=n, max_size=n), min_size=1, max_size=4)))
    def test_round_trip(self, rows):
        obj = {"rows": len(rows), "cols": len(rows[0]),
               "entries": [[[re, im] for re, im in row] for row in rows]}
        text = io.dumps(obj)
        again = io.dumps(io.matrix_to_obj(io.matrix_from_obj(io.loads(text))))
        assert again == io.dumps(io.matrix_to_obj(io.matrix_from_obj(io.loads(again))))
        assert again == io.dumps({**obj, "entries": [[[float(a), float(b)] for a, b in r] for r in obj["entries"]]})

    def test_partition_round_trip(self):
        bm = generate(GenSpec("pd_block", partition=(1, 2), seed=2))
        obj = io.matrix_to_obj(bm)
        back = io.matrix_from_obj(io.loads(io.dumps(obj)))
        assert back.partition.sizes == (1, 2)
        np.testing.assert_array_equal(back.data, bm.data)

    @pytest.mark.parametrize(
        "obj",
        [
            [],
            {"rows": 1, "cols": 1},
            {"rows": 1, "cols": 1, "entries": [[[1, 0]]], "extra": 1},
            {"rows": 2, "cols": 1, "entries": [[[1, 0]]]},
            {"rows": 1, "cols": 1, "entries": [[[1]]]},
            {"rows": 1, "cols": 1, "entries": [[["a", 0]]]},
            {"rows": 1, "cols": 1, "entries": [[[True, 0]]]},
            {"rows": 0, "cols": 1, "entries": []},
            {"rows": 2, "cols": 2, "partition": [1, 2], "entries": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
        ],
    )
    def test_rejects_malformed(self, obj):
        with pytest.raises(InputFormatError):
            io.matrix_from_obj(obj)

    def test_family_validation(self):
        with pytest.raises(InputFormatError):
            io.family_from_obj({"factors": [{"rows": 1, "cols": 1, "entries": [[[1, 0]]]}]})
        a = io.matrix_to_obj(BlockMatrix(np.eye(2), (1, 1)))
        b = io.matrix_to_obj(BlockMatrix(np.eye(2), (2,)))
        with pytest.raises(InputFormatError):
            io.family_from_obj({"factors": [a, b]})

    def test_bad_json(self):
        with pytest.raises(InputFormatError):
            io.loads("{")


class TestSuite:
    def test_small_run(self):
        res = run_suite(1, seed=0, max_dim=2)
        assert res.trials == 1 and res.passed and res.checks == len(PROPERTIES)
        assert set(res.as_dict()) == {"trials", "checks", "passed", "failures", "wall_time"}

    def test_failures_are_reproducible(self, monkeypatch):
        import oppschur.harness.properties as props

        original = props.PROPERTIES["det_cofactor"]

        def flaky(rng, max_dim):
            out = original(rng, max_dim)
            return props.Outcome(rng.uniform() < 0.5, -1.0, out.digest)

        monkeypatch.setitem(props.PROPERTIES, "det_cofactor", flaky)
        res = run_suite(20, seed=5, max_dim=4, properties=["det_cofactor"])
        assert res.failures and not res.passed
        assert [f.seed for f in res.failures] == sorted(f.seed for f in res.failures)
        for f in res.failures:
            assert reproduce(f.property, f.seed, 4) == f

    def test_workers_match_serial(self):
        a = run_suite(4, seed=11, max_dim=3)
        b = run_suite(4, seed=11, max_dim=3, workers=2)
        assert a.failures == b.failures and a.checks == b.checks

    def test_invalid(self):
        with pytest.raises(ValueError):
            run_suite(0)
        with pytest.raises(ValueError):
            run_suite(1, properties=["missing"])


def _run(argv):
    out, err = pyio.StringIO(), pyio.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _mat(m, partition=None):
    x = BlockMatrix(np.asarray(m, dtype=complex), partition) if partition else np.asarray(m)
    return io.matrix_to_obj(x)


class TestCli:
    def test_check_scalar(self, tmp_path):
        a = _write(tmp_path, "a.json", _mat([[2, 1], [1, 2]]))
        b = _write(tmp_path, "b.json", _mat([[3, 1], [1, 3]]))
        code, out, _ = _run(["check", "scalar", "--op", "oppenheim-schur", "--a", a, "--b", b])
        doc = json.loads(out)
        assert code == 0 and doc["equality"]
        assert doc["lhs"] == pytest.approx(59) and doc["rhs"] == pytest.approx(59)
        code, out, _ = _run(["check", "scalar", "--op", "hadamard", "--a", a])
        assert code == 0 and json.loads(out)["rhs"] == pytest.approx(3)

    def test_violation_exit_code(self, tmp_path):
        a = _write(tmp_path, "a.json", _mat([[2, 1], [1, 2]]))
        b = _write(tmp_path, "b.json", _mat([[3, 1], [1, 3]]))
        # an absurd negative tolerance turns an equality into a reported violation
        code, out, _ = _run(["--tol", "-1", "check", "scalar", "--op", "oppenheim", "--a", a, "--b", b])
        assert code == 1 and not json.loads(out)["holds"]

    def test_lambda(self, tmp_path):
        g = _write(tmp_path, "g.json", _mat([[1, 1], [1, 2]]))
        code, out, _ = _run(["lambda", "--matrix", g])
        assert code == 0 and json.loads(out)["lambdas"] == pytest.approx([1, 1])

    def test_interp(self, tmp_path):
        g = _write(tmp_path, "g.json", _mat([[1, 1], [1, 1]]))
        b = _write(tmp_path, "b.json", _mat([[0], [1]]))
        code, out, _ = _run(["interp", "--gram", g, "--b", b])
        doc = json.loads(out)
        assert code == 0 and not doc["feasible"] and doc["bordered_norm_sq"] is None

    def test_block_ratio_and_extremal(self, tmp_path):
        code, out, _ = _run(["gen", "--kind", "pd_block", "--m", "2", "--partition", "1,2", "--seed", "4"])
        fam = _write(tmp_path, "f.json", json.loads(out))
        code, out, _ = _run(["check", "ratio", "--family", fam, "--i", "1", "--seed", "4"])
        assert code == 0 and json.loads(out)["equality_case"] == "(a)"
        code, out, _ = _run(["check", "block", "--family", fam])
        assert code == 2  # non-uniform blocks
        vecs = _write(tmp_path, "v.json", {"vectors": [_mat([[1], [0], [0]]), _mat([[1], [0], [0]])]})
        code, out, _ = _run(["extremal", "--family", fam, "--factors", vecs])
        assert code == 0 and json.loads(out)["agree"]

    def test_gen_fixture(self):
        code, out, _ = _run(["gen", "--kind", "equality_fixture", "--fixture", "arrow_pair",
                             "--s", "4", "--pair", "1,3", "--m", "2"])
        fam = io.family_from_obj(json.loads(out))
        assert code == 0 and fam.s == 4

    def test_global_flags_either_side(self):
        a = _run(["--seed", "3", "gen", "--kind", "pd", "--n", "2"])
        b = _run(["gen", "--kind", "pd", "--n", "2", "--seed", "3"])
        c = _run(["gen", "--kind", "pd", "--n", "2"])
        assert a == b and a[1] != c[1]

    def test_suite(self):
        code, out, _ = _run(["suite", "--trials", "2", "--seed", "7", "--max-dim", "3"])
        doc = json.loads(out)
        assert code == 0 and doc["passed"] and doc["seed"] == 7

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["check"],
            ["check", "scalar", "--op", "oppenheim", "--a", "missing.json", "--b", "missing.json"],
            ["lambda", "--matrix", "/nonexistent/g.json"],
            ["gen", "--kind", "pd"],
            ["gen", "--kind", "equality_fixture"],
            ["suite", "--trials", "0"],
            ["--seed", "-4", "gen", "--kind", "pd", "--n", "2"],
        ],
    )
    def test_usage_errors(self, argv):
        code, out, err = _run(argv)
        assert code == 2 and out == "" and err

    def test_malformed_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, out, err = _run(["lambda", "--matrix", str(p)])
        assert code == 2 and "malformed" in err

    def test_non_psd_input(self, tmp_path):
        a = _write(tmp_path, "a.json", _mat([[1, 2], [2, 1]]))
        code, _, err = _run(["check", "scalar", "--op", "hadamard", "--a", a])
        assert code == 2 and "positive semidefinite" in err
