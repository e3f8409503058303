"""Seeded random instances: PSD/PD matrices, block matrices, families, fixtures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import DimensionError
from ..hadamard import BlockFamily
from ..inequalities import equality_case_constructor
from ..linalg import BlockMatrix, BlockPartition, frobenius
from .rng import Xoshiro256

KINDS = ("psd", "pd", "pd_block", "equality_fixture")


def random_psd(rng: Xoshiro256, n: int, rank: Optional[int] = None) -> np.ndarray:
    """``B* B`` with ``B`` of shape ``rank x n``."""
    r = n if rank is None else rank
    if n < 1 or not 0 <= r <= n:
        raise DimensionError(f"invalid psd size n={n}, rank={r}")
    b = rng.complex_normal((r, n)) if r else np.zeros((0, n), dtype=np.complex128)
    a = b.conj().T @ b
    return 0.5 * (a + a.conj().T)


def random_pd(rng: Xoshiro256, n: int, epsilon: float = 1e-3) -> np.ndarray:
    """``B* B + eps ||B* B||_F I`` with square ``B``."""
    if epsilon <= 0:
        raise DimensionError("epsilon must be positive")
    a = random_psd(rng, n)
    return a + epsilon * frobenius(a) * np.eye(n)


def random_block(rng: Xoshiro256, partition: Sequence[int], epsilon: float = 1e-3) -> BlockMatrix:
    part = BlockPartition(tuple(partition))
    return BlockMatrix(random_pd(rng, part.dim, epsilon), part)


def random_family(rng: Xoshiro256, partitions: Sequence[Sequence[int]],
                  epsilon: float = 1e-3) -> BlockFamily:
    return BlockFamily(tuple(random_block(rng, p, epsilon) for p in partitions))


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: Optional[int] = None
    partition: Optional[tuple] = None  # one partition, or one per factor
    rank: Optional[int] = None
    seed: int = 0
    epsilon: float = 1e-3
    m: int = 1
    fixture: Optional[str] = None
    fixture_args: dict = field(default_factory=dict, hash=False)


def _partitions(spec: GenSpec) -> list[tuple[int, ...]]:
    p = spec.partition
    if p is None:
        if spec.n is None:
            raise DimensionError("pd_block needs a partition or n")
        p = (1,) * spec.n
    if p and isinstance(p[0], (list, tuple)):
        parts = [tuple(int(k) for k in q) for q in p]
        if len(parts) != spec.m:
            raise DimensionError(f"got {len(parts)} partitions for m={spec.m}")
    else:
        parts = [tuple(int(k) for k in p)] * spec.m
    return parts


def generate(spec: GenSpec) -> Union[np.ndarray, BlockMatrix, BlockFamily]:
    if spec.kind not in KINDS:
        raise DimensionError(f"unknown kind {spec.kind!r}; expected one of {KINDS}")
    if spec.m < 1:
        raise DimensionError("m must be >= 1")
    rng = Xoshiro256(spec.seed)
    if spec.kind in ("psd", "pd"):
        if spec.n is None or spec.n < 1:
            raise DimensionError("n must be a positive integer")
        if spec.kind == "psd":
            return random_psd(rng, spec.n, spec.rank)
        return random_pd(rng, spec.n, spec.epsilon)
    if spec.kind == "pd_block":
        parts = _partitions(spec)
        if spec.m == 1:
            return random_block(rng, parts[0], spec.epsilon)
        return random_family(rng, parts, spec.epsilon)
    if spec.fixture is None:
        raise DimensionError("equality_fixture needs a fixture name")
    return equality_case_constructor(spec.fixture, m=max(spec.m, 2), seed=spec.seed,
                                     **spec.fixture_args)
