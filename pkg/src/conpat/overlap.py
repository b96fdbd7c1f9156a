"""Probability that two overlapping windows of a random permutation share a pattern.

Two windows of length ``k`` that overlap in ``l`` positions span
``m = 2k - l`` entries. For ``l = 0`` they are taken adjacent. Exact values
come from a pruned enumeration of S_m; Monte Carlo covers larger ``m``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from conpat import kernels
from conpat.core import PatternError, RandomSource, identity, pattern_rank, prefix_code_to_pattern, reverse

ENUMERATION_LIMIT = 10
MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class OverlapStat:
    k: int
    l: int
    mode: str
    numerator: int | None = None
    denominator: int | None = None
    estimate: float | None = None
    stderr: float | None = None
    samples: int | None = None

    @property
    def probability(self) -> Fraction | float:
        if self.mode == "exact":
            return Fraction(self.numerator, self.denominator)
        return self.estimate


@dataclass(frozen=True)
class GoodSet:
    """Patterns of length k that can be shared by two windows overlapping in l places.

    ``members`` holds Lehmer codes; ``witnesses`` maps each code to the
    number of permutations of S_{2k-l} realising it.
    """

    k: int
    l: int
    members: frozenset[int]
    witnesses: dict[int, int] = field(compare=False, repr=False)

    @property
    def count(self) -> int:
        return len(self.members)

    def patterns(self) -> list[tuple[int, ...]]:
        from conpat.core import pattern_unrank

        return [pattern_unrank(self.k, c) for c in sorted(self.members)]


@dataclass(frozen=True)
class LemmaCheck:
    k: int
    l: int
    lemma: str
    probability: Fraction | float
    bound: float
    passed: bool
    mode: str
    stderr: float | None = None


@dataclass(frozen=True)
class BoundBreakdown:
    n: int
    k: int
    term_disjoint: float
    term_full_overlap: float
    term_small_overlap: float
    term_large_overlap: float
    z_bound: float
    y_bound: float
    # (l, ((k-l)!)^(-l/(k-l)), 0.96^k) for the large-overlap terms
    large_overlap_terms: tuple[tuple[int, float, float], ...] = ()


def _check_shape(k: int, l: int) -> None:
    if k < 1:
        raise PatternError("k must be >= 1")
    if not 0 <= l <= k - 1:
        raise PatternError(f"l must lie in 0..{k - 1}")


def _check_budget(k: int, l: int, limit: int) -> None:
    _check_shape(k, l)
    if 2 * k - l > limit:
        raise PatternError("enumeration budget exceeded; use MC")


def _shard_prefixes(m: int, threads: int) -> list[tuple[int, ...]]:
    depth = 0
    shards = 1
    while shards < 4 * threads and depth < min(m, 4):
        depth += 1
        shards *= depth
    out: list[tuple[int, ...]] = [()]
    for p in range(depth):
        out = [pre + (c,) for pre in out for c in range(p + 1)]
    return out


@lru_cache(maxsize=None)
def _witness_counts(k: int, l: int, threads: int = 1) -> tuple[int, np.ndarray]:
    if threads <= 1:
        total, counts = kernels.overlap_witnesses(k, l)
    else:
        prefixes = _shard_prefixes(2 * k - l, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda pre: kernels.overlap_witnesses(k, l, pre), prefixes))
        total = sum(t for t, _ in parts)
        counts = np.sum([c for _, c in parts], axis=0)
    counts.setflags(write=False)
    return total, counts


def exact_overlap_probability(k: int, l: int, *, threads: int = 1, limit: int = ENUMERATION_LIMIT) -> OverlapStat:
    _check_budget(k, l, limit)
    m = 2 * k - l
    numerator, _ = _witness_counts(k, l, max(1, threads))
    return OverlapStat(k, l, "exact", numerator=numerator, denominator=math.factorial(m))


def _window_patterns(block: np.ndarray) -> np.ndarray:
    return np.argsort(np.argsort(block, axis=1), axis=1)


def mc_overlap_probability(k: int, l: int, samples: int, rng: RandomSource) -> OverlapStat:
    """Frequency estimate over ``samples`` uniform permutations of S_{2k-l}.

    Samples are drawn in fixed-size blocks, block ``b`` from ``rng.derive(b)``,
    so the result depends only on the seed and the sample count.
    """
    _check_shape(k, l)
    if samples < 1:
        raise PatternError("samples must be >= 1")
    m = 2 * k - l
    s = k - l
    hits = 0
    for b, start in enumerate(range(0, samples, MC_BLOCK)):
        size = min(MC_BLOCK, samples - start)
        sigma = rng.derive(b).permutations(m, size)
        first = _window_patterns(sigma[:, :k])
        second = _window_patterns(sigma[:, s : s + k])
        hits += int(np.count_nonzero((first == second).all(axis=1)))
    p_hat = hits / samples
    stderr = math.sqrt(p_hat * (1 - p_hat) / samples)
    return OverlapStat(k, l, "monte-carlo", numerator=hits, estimate=p_hat, stderr=stderr, samples=samples)


def enumerate_good(k: int, l: int, *, threads: int = 1, limit: int = ENUMERATION_LIMIT) -> GoodSet:
    _check_budget(k, l, limit)
    _, counts = _witness_counts(k, l, max(1, threads))
    witnesses = {}
    for code in np.flatnonzero(counts):
        pattern = prefix_code_to_pattern(k, int(code))
        witnesses[pattern_rank(pattern)[1]] = int(counts[code])
    return GoodSet(k, l, frozenset(witnesses), dict(sorted(witnesses.items())))


def lemma_bound(k: int, l: int) -> tuple[str, float]:
    """Which upper bound applies to P(windows isomorphic) at (k, l), and its value.

    At even k the boundary l = k/2 takes the small-overlap bound.
    """
    _check_shape(k, l)
    if l == 0:
        return "disjoint", 1 / math.factorial(k)
    if l == k - 1:
        return "monotone", 2 / math.factorial(k + 1)
    if 2 * l <= k:
        return "small-overlap", 3**k / math.factorial(k)
    r = k - l
    return "large-overlap", (1 / math.factorial(r)) ** (k / r - 1)


def _exact_within(lemma: str, k: int, l: int, p: Fraction) -> bool:
    if lemma == "disjoint":
        return p <= Fraction(1, math.factorial(k))
    if lemma == "monotone":
        return p <= Fraction(2, math.factorial(k + 1))
    if lemma == "small-overlap":
        return p <= Fraction(3**k, math.factorial(k))
    # p <= (1/r!)^(l/r)  <=>  p^r * (r!)^l <= 1
    r = k - l
    return p**r * math.factorial(r) ** l <= 1


def check_lemma_bounds(
    k: int,
    l: int,
    *,
    samples: int = 1_000_000,
    rng: RandomSource | None = None,
    limit: int = ENUMERATION_LIMIT,
) -> LemmaCheck:
    """Compare P(windows isomorphic) with the applicable upper bound.

    Exact when 2k - l fits the enumeration limit, compared in rational
    arithmetic. Otherwise Monte Carlo, and the bound counts as passed unless
    the estimate exceeds it by more than three standard errors.
    """
    lemma, bound = lemma_bound(k, l)
    if 2 * k - l <= limit:
        stat = exact_overlap_probability(k, l, limit=limit)
        p = stat.probability
        return LemmaCheck(k, l, lemma, p, bound, _exact_within(lemma, k, l, p), "exact")
    stat = mc_overlap_probability(k, l, samples, rng if rng is not None else RandomSource(0))
    passed = stat.estimate - 3 * stat.stderr <= bound
    return LemmaCheck(k, l, lemma, stat.estimate, bound, passed, "monte-carlo", stat.stderr)


def bound_breakdown(n: int, k: int) -> BoundBreakdown:
    if not n >= k >= 2:
        raise PatternError("need n >= k >= 2")
    fk = math.factorial(k)
    large = []
    for l in range(math.ceil(k / 2), k - 1):
        r = k - l
        large.append((l, (1 / math.factorial(r)) ** (l / r), 0.96**k))
    return BoundBreakdown(
        n=n,
        k=k,
        term_disjoint=n**3 / fk,
        term_full_overlap=2 * n**2 / math.factorial(k + 1),
        term_small_overlap=n**2 * k * 3**k / fk,
        term_large_overlap=n**2 * sum(v for _, v, _ in large),
        z_bound=6 * n**3 * 0.96**k,
        y_bound=3 * n**5 * 0.96**k,
        large_overlap_terms=tuple(large),
    )


@dataclass(frozen=True)
class ProbeTable:
    d: int
    ks: tuple[int, ...]
    counts: tuple[int, ...]
    differences: tuple[tuple[int, ...], ...]
    omitted: tuple[int, ...]

    @property
    def vanishes(self) -> bool | None:
        """Whether the (d+1)-th difference is identically zero, if it exists."""
        if len(self.differences) <= self.d + 1 or not self.differences[self.d + 1]:
            return None
        return all(v == 0 for v in self.differences[self.d + 1])


def good_count_probe(d: int, k_values: Iterable[int], *, limit: int = ENUMERATION_LIMIT) -> ProbeTable:
    """G(k, k-d) over ``k_values`` with its iterated finite differences.

    Values of k whose enumeration would exceed the limit are skipped and
    listed in ``omitted``. Differences are only taken over a contiguous run.
    """
    if d < 1:
        raise PatternError("d must be >= 1")
    ks, counts, omitted = [], [], []
    for k in k_values:
        if k < d or k + d > limit or k < 1:
            omitted.append(k)
            continue
        ks.append(k)
        counts.append(enumerate_good(k, k - d, limit=limit).count)
    diffs = [tuple(counts)]
    contiguous = all(b - a == 1 for a, b in zip(ks, ks[1:]))
    if contiguous:
        while len(diffs[-1]) > 1:
            prev = diffs[-1]
            diffs.append(tuple(b - a for a, b in zip(prev, prev[1:])))
    return ProbeTable(d, tuple(ks), tuple(counts), tuple(diffs), tuple(omitted))


def monotone_codes(k: int) -> frozenset[int]:
    return frozenset({pattern_rank(identity(k))[1], pattern_rank(reverse(identity(k)))[1]})
