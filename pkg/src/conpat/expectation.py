"""Expected number of distinct consecutive patterns, exact and by Monte Carlo.

Monte Carlo runs are split into fixed blocks of ``MC_BLOCK`` samples, block
``b`` drawing from ``rng.derive(b)``. Blocks are merged as integer sums in
block order, so a result depends on (seed, samples) and nothing else; the
thread count only changes how fast it arrives.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from conpat import kernels
from conpat.core import PatternError, RandomSource, validate_permutation

EXACT_CAP = 10
PSI_CAP = 20
MC_BLOCK = 4096


@dataclass(frozen=True)
class ExpectationResult:
    n: int
    mode: str
    value: Fraction | None = None
    mean: float | None = None
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None
    per_length: tuple[Fraction | float, ...] | None = None

    @property
    def estimate(self) -> float:
        return float(self.value) if self.mode == "exact" else self.mean


@dataclass(frozen=True)
class PairExpectation:
    n: int
    k_min: int
    samples: int
    seed: int | None
    lengths: tuple[int, ...]
    mean_z: tuple[float, ...]
    mean_y: tuple[float, ...]
    stderr_z: tuple[float, ...]
    stderr_y: tuple[float, ...]
    # samples where y_k <= z_k failed, per length (always zero if the counting is right)
    violations: tuple[int, ...]


@dataclass(frozen=True)
class PsiResult:
    n: int
    mode: str
    value: Fraction | None = None
    mean: float | None = None
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def ratio_to_2n(self) -> float:
        est = float(self.value) if self.mode == "exact" else self.mean
        return est / 2**self.n


def _mean_stderr(total: int, total_sq: int, count: int) -> tuple[float, float]:
    mean = Fraction(total, count)
    if count < 2:
        return float(mean), float("nan")
    var = Fraction(total_sq * count - total * total, count * (count - 1))
    return float(mean), math.sqrt(var / count)


def _run_blocks(samples: int, threads: int, work: Callable[[int, int], object]) -> list:
    sizes = [min(MC_BLOCK, samples - s) for s in range(0, samples, MC_BLOCK)]
    jobs = list(enumerate(sizes))
    if threads <= 1 or len(jobs) == 1:
        return [work(b, size) for b, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: work(*job), jobs))


def exact_expected_phi(n: int, *, threads: int = 1, cap: int = EXACT_CAP) -> ExpectationResult:
    """E(phi) over S_n as an exact rational, with per-length E(X_k).

    >>> exact_expected_phi(3).value
    Fraction(11, 3)
    """
    if n < 1:
        raise PatternError("n must be >= 1")
    if n > cap:
        raise PatternError(f"exact enumeration capped at n={cap}; use --samples for Monte Carlo")
    x_tot = _exact_sums(n, threads)[0]
    nf = math.factorial(n)
    per = tuple(Fraction(int(v), nf) for v in x_tot)
    return ExpectationResult(n, "exact", value=sum(per, Fraction(0)), per_length=per)


def _exact_sums(n: int, threads: int) -> tuple[np.ndarray, np.ndarray]:
    firsts = range(1, n + 1)
    if threads <= 1:
        parts = [kernels.profile_sums_first(n, f) for f in firsts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda f: kernels.profile_sums_first(n, f), firsts))
    x = np.zeros(n, dtype=np.int64)
    z = np.zeros(n, dtype=np.int64)
    for px, pz in parts:
        x += px
        z += pz
    return x, z


def exact_expected_pairs(n: int, k_min: int = 1, *, cap: int = EXACT_CAP) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Exact per-length E(Z_k) and E(Y_k) for k >= k_min over all of S_n."""
    if n > cap:
        raise PatternError(f"exact enumeration capped at n={cap}")
    x, z = _exact_sums(n, 1)
    nf = math.factorial(n)
    ks = range(k_min, n + 1)
    ez = tuple(Fraction(int(z[k - 1]), nf) for k in ks)
    ey = tuple((n - k + 1) - Fraction(int(x[k - 1]), nf) for k in ks)
    return ez, ey


def mc_expected_phi(
    n: int,
    samples: int,
    rng: RandomSource,
    *,
    threads: int = 1,
    per_length: bool = False,
) -> ExpectationResult:
    if n < 1:
        raise PatternError("n must be >= 1")
    if samples < 2:
        raise PatternError("samples must be >= 2")

    def block(b: int, size: int):
        xs, _ = kernels.batch_profile_counts(rng.derive(b).permutations(n, size))
        phis = xs.sum(axis=1)
        return int(phis.sum()), int((phis * phis).sum()), xs.sum(axis=0)

    parts = _run_blocks(samples, threads, block)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean, stderr = _mean_stderr(total, total_sq, samples)
    per = None
    if per_length:
        col = np.zeros(n, dtype=np.int64)
        for p in parts:
            col += p[2]
        per = tuple(int(v) / samples for v in col)
    return ExpectationResult(n, "monte-carlo", mean=mean, stderr=stderr, samples=samples, seed=rng.seed, per_length=per)


def expected_pair_counts(
    n: int,
    k_min: int,
    samples: int,
    rng: RandomSource,
    *,
    threads: int = 1,
) -> PairExpectation:
    if samples < 2:
        raise PatternError("samples must be >= 2")
    if not 1 <= k_min <= n:
        raise PatternError(f"k_min must lie in 1..{n}")
    windows = np.arange(n, 0, -1, dtype=np.int64)

    def block(b: int, size: int):
        xs, zs = kernels.batch_profile_counts(rng.derive(b).permutations(n, size))
        ys = windows - xs
        bad = np.count_nonzero(ys > zs, axis=0) + np.count_nonzero((ys >= 1) != (zs >= 1), axis=0)
        return zs.sum(axis=0), (zs * zs).sum(axis=0), ys.sum(axis=0), (ys * ys).sum(axis=0), bad

    parts = _run_blocks(samples, threads, block)
    sums = [np.sum([p[i] for p in parts], axis=0) for i in range(5)]
    ks = tuple(range(k_min, n + 1))
    mz, sz, my, sy = [], [], [], []
    for k in ks:
        m, s = _mean_stderr(int(sums[0][k - 1]), int(sums[1][k - 1]), samples)
        mz.append(m)
        sz.append(s)
        m, s = _mean_stderr(int(sums[2][k - 1]), int(sums[3][k - 1]), samples)
        my.append(m)
        sy.append(s)
    return PairExpectation(
        n=n,
        k_min=k_min,
        samples=samples,
        seed=getattr(rng, "seed", None),
        lengths=ks,
        mean_z=tuple(mz),
        mean_y=tuple(my),
        stderr_z=tuple(sz),
        stderr_y=tuple(sy),
        violations=tuple(int(sums[4][k - 1]) for k in ks),
    )


def psi(p: Sequence[int], *, cap: int = PSI_CAP) -> int:
    """Distinct (not necessarily consecutive) patterns of ``p``, counting the empty one.

    >>> psi((2, 1))
    3
    """
    perm = validate_permutation(p)
    if len(perm) > cap:
        raise PatternError(f"psi enumerates 2^n subsets; n capped at {cap}")
    return kernels.psi_count(perm)


def exact_expected_psi(n: int, *, cap: int = 8) -> PsiResult:
    if not 1 <= n <= cap:
        raise PatternError(f"exact E(psi) needs 1 <= n <= {cap}")
    total = sum(kernels.psi_count(p) for p in itertools.permutations(range(1, n + 1)))
    return PsiResult(n, "exact", value=Fraction(total, math.factorial(n)))


def mc_expected_psi(n: int, samples: int, rng: RandomSource, *, threads: int = 1) -> PsiResult:
    if not 1 <= n <= PSI_CAP:
        raise PatternError(f"psi enumerates 2^n subsets; n capped at {PSI_CAP}")
    if samples < 2:
        raise PatternError("samples must be >= 2")

    def block(b: int, size: int):
        vals = [kernels.psi_count(row) for row in rng.derive(b).permutations(n, size)]
        return sum(vals), sum(v * v for v in vals)

    parts = _run_blocks(samples, threads, block)
    mean, stderr = _mean_stderr(sum(p[0] for p in parts), sum(p[1] for p in parts), samples)
    return PsiResult(n, "monte-carlo", mean=mean, stderr=stderr, samples=samples, seed=rng.seed)

