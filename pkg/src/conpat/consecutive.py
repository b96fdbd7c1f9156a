"""Distinct consecutive-pattern statistics of a single permutation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from conpat import kernels
from conpat.core import Perm, PatternError, reduce_window, validate_permutation


@dataclass(frozen=True)
class PatternProfile:
    """Distinct consecutive patterns of one permutation, by length.

    ``x[k-1]`` is the number of distinct patterns of length ``k``.
    """

    n: int
    x: tuple[int, ...]

    @property
    def phi(self) -> int:
        return sum(self.x)


@dataclass(frozen=True)
class PairCounts:
    """Repeat counts ``y`` and ordered isomorphic window-pair counts ``z``.

    Both are indexed by ``k - k_min``; ``lengths`` names the k for each slot.
    """

    n: int
    k_min: int
    z: tuple[int, ...]
    y: tuple[int, ...]
    lengths: tuple[int, ...] = field(default=())

    def at(self, k: int) -> tuple[int, int]:
        i = k - self.k_min
        return self.y[i], self.z[i]


def profile(p: Sequence[int]) -> PatternProfile:
    perm = validate_permutation(p)
    x, _ = kernels.profile_counts(perm)
    return PatternProfile(len(perm), tuple(x))


def phi(p: Sequence[int]) -> int:
    """Number of distinct consecutive patterns of lengths 1..n.

    >>> phi((1, 4, 3, 2, 5))
    9
    """
    return profile(p).phi


def pair_counts(p: Sequence[int], k_min: int = 1) -> PairCounts:
    perm = validate_permutation(p)
    n = len(perm)
    if not 1 <= k_min <= n:
        raise PatternError(f"k_min must lie in 1..{n}")
    x, z = kernels.profile_counts(perm)
    ks = tuple(range(k_min, n + 1))
    return PairCounts(
        n=n,
        k_min=k_min,
        z=tuple(z[k - 1] for k in ks),
        y=tuple((n - k + 1) - x[k - 1] for k in ks),
        lengths=ks,
    )


def distinct_patterns(p: Sequence[int]) -> dict[int, list[Perm]]:
    """The distinct patterns themselves, per length, in order of first occurrence."""
    perm = validate_permutation(p)
    n = len(perm)
    out: dict[int, list[Perm]] = {}
    for k in range(1, n + 1):
        seen: dict[Perm, None] = {}
        for j in range(n - k + 1):
            seen.setdefault(reduce_window(perm[j : j + k]), None)
        out[k] = list(seen)
    return out
