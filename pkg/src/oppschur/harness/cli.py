"""Command-line interface.  Every invocation prints exactly one JSON document.

Exit codes: 0 success / inequality holds, 1 violation or suite failure,
2 usage or input error (diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from .. import hadamard as hp
from .. import inequalities as ineq
from .. import interpolation as ip
from ..errors import (
    ConfigurationError,
    DimensionError,
    GenerationError,
    InputFormatError,
    OutOfRangeError,
    PreconditionError,
)
from ..linalg import BlockMatrix, DEFAULT_TOL
from . import io
from .generate import GenSpec, generate
from .suite import run_suite

INPUT_ERRORS = (InputFormatError, DimensionError, PreconditionError, OutOfRangeError,
                ConfigurationError, GenerationError, IndexError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    # Registered on the root parser and on every subcommand so the flags may
    # appear on either side of the subcommand name.
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--tol", type=float, default=d if suppress else DEFAULT_TOL)
    p.add_argument("--seed", type=_u64, default=d if suppress else 0)


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="oppschur", description="Determinant inequality and RKHS checks.")
    _globals(root, suppress=False)
    sub = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="evaluate a determinant inequality")
    _globals(check, suppress=True)
    csub = check.add_subparsers(dest="target", required=True, parser_class=_Parser)
    sc = csub.add_parser("scalar")
    _globals(sc, suppress=True)
    sc.add_argument("--op", required=True, choices=("hadamard", "oppenheim", "oppenheim-schur"))
    sc.add_argument("--a", required=True)
    sc.add_argument("--b")
    bl = csub.add_parser("block")
    _globals(bl, suppress=True)
    bl.add_argument("--family", required=True)
    ra = csub.add_parser("ratio")
    _globals(ra, suppress=True)
    ra.add_argument("--family", required=True)
    ra.add_argument("--i", type=int, required=True)

    it = sub.add_parser("interp", help="minimum-norm interpolation from a Gram matrix")
    _globals(it, suppress=True)
    it.add_argument("--gram", required=True)
    grp = it.add_mutually_exclusive_group(required=True)
    grp.add_argument("--b")
    grp.add_argument("--order", type=int)

    la = sub.add_parser("lambda", help="minimum norms of the canonical problems")
    _globals(la, suppress=True)
    la.add_argument("--matrix", required=True)

    ex = sub.add_parser("extremal", help="extremality of a simple tensor")
    _globals(ex, suppress=True)
    ex.add_argument("--family", required=True)
    ex.add_argument("--factors", required=True)

    ge = sub.add_parser("gen", help="generate a random instance")
    _globals(ge, suppress=True)
    ge.add_argument("--kind", required=True, choices=("psd", "pd", "pd_block", "equality_fixture"))
    ge.add_argument("--n", type=int)
    ge.add_argument("--rank", type=int)
    ge.add_argument("--partition", type=_ints)
    ge.add_argument("--m", type=int, default=1)
    ge.add_argument("--epsilon", type=float, default=1e-3)
    ge.add_argument("--fixture", choices=("block_diagonal", "arrow_pair", "schur_complement_chain"))
    ge.add_argument("--s", type=int, default=2)
    ge.add_argument("--t", type=int, default=1)
    ge.add_argument("--pair", type=_ints, default=(1, 2))
    ge.add_argument("--i0", type=int, default=1)

    su = sub.add_parser("suite", help="run the randomized property suite")
    _globals(su, suppress=True)
    su.add_argument("--trials", type=int, default=100)
    su.add_argument("--max-dim", type=int, default=6)
    su.add_argument("--workers", type=int, default=1)
    return root


def _matrix(path: str):
    m = io.matrix_from_obj(io.read_json(path), path)
    return m.data if isinstance(m, BlockMatrix) else m


def _vector(path: str) -> np.ndarray:
    m = _matrix(path)
    if 1 not in m.shape:
        raise InputFormatError(f"{path}: expected a single row or column")
    return m.ravel()


def _family(path: str) -> hp.BlockFamily:
    return io.family_from_obj(io.read_json(path))


def _complex_list(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


def _report_exit(rep: ineq.InequalityReport) -> int:
    return 0 if rep.holds else 1


def cmd_check(args) -> tuple[dict, int]:
    tol = args.tol
    if args.target == "scalar":
        a = _matrix(args.a)
        if args.op == "hadamard":
            rep = ineq.hadamard_inequality(a, tol)
        else:
            if args.b is None:
                raise UsageError(f"--b is required for --op {args.op}")
            b = _matrix(args.b)
            fn = ineq.oppenheim if args.op == "oppenheim" else ineq.oppenheim_schur
            rep = fn(a, b, tol)
    elif args.target == "block":
        rep = ineq.block_oppenheim_schur(_family(args.family), tol)
    else:
        rep = ineq.block_ratio_inequality(_family(args.family), args.i, tol)
    return rep.as_dict(), _report_exit(rep)


def cmd_interp(args) -> tuple[dict, int]:
    g = _matrix(args.gram)
    if args.order is not None:
        prob = ip.IpipProblem.canonical(g, args.order)
    else:
        prob = ip.IpipProblem(g, _vector(args.b))
    sol = ip.solve_ipip(prob)
    out = {"feasible": sol.feasible, "norm": sol.norm if sol.feasible else None,
           "coefficients": _complex_list(sol.coefficients) if sol.feasible else None}
    try:
        out["bordered_norm_sq"] = ip.min_norm_bordered(prob.gram, prob.data)
    except PreconditionError:
        out["bordered_norm_sq"] = None
    return out, 0


def cmd_lambda(args) -> tuple[dict, int]:
    t = _matrix(args.matrix)
    chk = ip.lambda_det_identity_check(t, max(args.tol, 1e-12))
    return {
        "lambdas": ip.lambda_sequence(t),
        "lambdas_by_solve": ip.ipip_lambdas(t),
        "product": chk.product,
        "inv_sqrt_det": chk.inv_sqrt_det,
        "agree": chk.agree,
    }, 0 if chk.agree else 1


def cmd_extremal(args) -> tuple[dict, int]:
    fam = _family(args.family)
    vecs = io.vectors_from_obj(io.read_json(args.factors))
    chk = hp.extremal_simple_tensor_check(fam, vecs, args.tol)
    rc = hp.restriction_inequality_check(fam, hp.kron_vectors(*vecs), args.tol)
    out = {
        "extremal": chk.extremal,
        "witness_block": chk.witness_block,
        "norm_extremal": chk.norm_extremal,
        "agree": chk.agree,
        "tensor_norm": chk.tensor_norm,
        "pullback_norm": chk.pullback_norm,
        "restriction_holds": rc.holds,
    }
    return out, 0 if (chk.agree and rc.holds) else 1


def cmd_gen(args) -> tuple[dict, int]:
    fixture_args = {}
    if args.kind == "equality_fixture":
        if args.fixture is None:
            raise UsageError("--fixture is required for --kind equality_fixture")
        fixture_args = {"s": args.s}
        if args.fixture == "block_diagonal":
            fixture_args["t"] = args.t
        elif args.fixture == "arrow_pair":
            if len(args.pair) != 2:
                raise UsageError("--pair takes two indices i,j")
            fixture_args["pair"] = args.pair
        else:
            fixture_args["i0"] = args.i0
    spec = GenSpec(kind=args.kind, n=args.n, partition=args.partition, rank=args.rank,
                   seed=args.seed, epsilon=args.epsilon, m=args.m, fixture=args.fixture,
                   fixture_args=fixture_args)
    obj = generate(spec)
    if isinstance(obj, hp.BlockFamily):
        return io.family_to_obj(obj), 0
    return io.matrix_to_obj(obj), 0


def cmd_suite(args) -> tuple[dict, int]:
    if args.trials < 1 or args.max_dim < 2:
        raise UsageError("--trials must be >= 1 and --max-dim >= 2")
    res = run_suite(args.trials, args.seed, args.max_dim, workers=args.workers)
    out = res.as_dict()
    out.update({"seed": args.seed, "max_dim": args.max_dim})
    return out, 0 if res.passed else 1


COMMANDS = {
    "check": cmd_check,
    "interp": cmd_interp,
    "lambda": cmd_lambda,
    "extremal": cmd_extremal,
    "gen": cmd_gen,
    "suite": cmd_suite,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        doc, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=err)
        return 2
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=err)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    out.write(io.dumps(doc) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
