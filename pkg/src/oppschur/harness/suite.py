"""Property suite driver.

Trial ``k`` of a run with seed ``S`` draws property ``P`` from the seed
``derive_seed(derive_seed(S, "trial", k), P)``; that seed is what a failure
records, and :func:`reproduce` replays it in isolation.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .properties import PROPERTIES, Outcome
from .rng import Xoshiro256, derive_seed


@dataclass(frozen=True)
class Failure:
    property: str
    seed: int
    digest: str
    margin: Optional[float]
    error: Optional[str] = None

    def as_dict(self) -> dict:
        out = {"property": self.property, "seed": self.seed, "digest": self.digest,
               "margin": self.margin}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class SuiteResult:
    trials: int
    failures: list = field(default_factory=list)
    wall_time: float = 0.0
    checks: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "checks": self.checks,
            "passed": self.passed,
            "failures": [f.as_dict() for f in self.failures],
            "wall_time": self.wall_time,
        }


def run_property(name: str, seed: int, max_dim: int) -> Optional[Failure]:
    """Run one property on one seed; ``None`` when it passes."""
    fn = PROPERTIES[name]
    try:
        out: Outcome = fn(Xoshiro256(seed), max_dim)
    except Exception as exc:  # a crash is a failure of that instance
        return Failure(name, seed, "", None, f"{type(exc).__name__}: {exc}")
    if out.ok:
        return None
    margin = out.margin if math.isfinite(out.margin) else None
    return Failure(name, seed, out.digest, margin)


reproduce = run_property


def _run_trials(args) -> list[Failure]:
    seed, ks, max_dim, names = args
    fails = []
    for k in ks:
        tseed = derive_seed(seed, "trial", k)
        for name in names:
            f = run_property(name, derive_seed(tseed, name), max_dim)
            if f is not None:
                fails.append(f)
    return fails


def run_suite(trials: int, seed: int = 0, max_dim: int = 6, *, workers: int = 1,
              properties: Optional[Sequence[str]] = None) -> SuiteResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if max_dim < 2:
        raise ValueError("max_dim must be >= 2")
    names = list(properties) if properties is not None else sorted(PROPERTIES)
    unknown = set(names) - set(PROPERTIES)
    if unknown:
        raise ValueError(f"unknown properties {sorted(unknown)}")
    start = time.perf_counter()
    if workers <= 1:
        fails = _run_trials((seed, range(trials), max_dim, names))
    else:
        shards = [(seed, range(w, trials, workers), max_dim, names) for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fails = [f for part in pool.map(_run_trials, shards) for f in part]
    fails.sort(key=lambda f: (f.seed, f.property))
    return SuiteResult(trials, fails, time.perf_counter() - start, trials * len(names))
