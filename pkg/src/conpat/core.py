"""Permutation and pattern primitives.

Permutations and patterns are plain tuples of 1-based integers. A pattern is
a permutation in reduced form, so two windows are order isomorphic exactly
when their reductions compare equal.
"""
from __future__ import annotations

import math
import re
from typing import Iterable, Sequence

import numpy as np

MAX_RANK_K = 20

Perm = tuple[int, ...]


class PatternError(ValueError):
    """Raised on a precondition violation (bad input, exhausted budget)."""


def validate_permutation(values: Sequence[int]) -> Perm:
    """Return ``values`` as a tuple, raising unless it is a bijection on 1..n."""
    perm = tuple(int(v) for v in values)
    if not perm:
        raise PatternError("empty permutation")
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise PatternError(f"not a permutation of 1..{len(perm)}: {perm}")
    return perm


def parse_permutation(text: str) -> Perm:
    """Parse ``"1,4,3,2,5"`` or ``"1 4 3 2 5"``.

    A compact single-token form such as ``"14325"`` is accepted when n < 10.
    """
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    if len(tokens) == 1 and len(tokens[0]) > 1 and tokens[0].isdigit():
        tokens = list(tokens[0])
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise PatternError(f"cannot parse permutation {text!r}") from exc
    return validate_permutation(values)


def format_permutation(perm: Iterable[int]) -> str:
    return ",".join(str(v) for v in perm)


def reduce_window(window: Sequence[int]) -> Perm:
    """Reduce a window of distinct values to its pattern.

    >>> reduce_window((5, 2, 8))
    (2, 1, 3)
    """
    if len(window) == 0:
        raise PatternError("empty window")
    order = sorted(range(len(window)), key=window.__getitem__)
    out = [0] * len(window)
    prev = None
    for r, i in enumerate(order, start=1):
        v = window[i]
        if v == prev:
            raise PatternError("not injective")
        prev = v
        out[i] = r
    return tuple(out)


def is_order_isomorphic(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) == 0 or len(b) == 0:
        raise PatternError("empty window")
    ra, rb = reduce_window(a), reduce_window(b)
    return len(a) == len(b) and ra == rb


def reverse(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(reversed(w))


def complement(w: Sequence[int]) -> tuple[int, ...]:
    hi, lo = max(w), min(w)
    return tuple(hi + lo - v for v in w)


def identity(n: int) -> Perm:
    return tuple(range(1, n + 1))


def pattern_rank(p: Sequence[int]) -> tuple[int, int]:
    """Lehmer rank of a pattern in lexicographic order, as ``(k, code)``.

    >>> pattern_rank((2, 1, 3))
    (3, 2)
    """
    k = len(p)
    if k > MAX_RANK_K:
        raise PatternError("rank overflow")
    code = 0
    for i in range(k):
        smaller = sum(1 for j in range(i + 1, k) if p[j] < p[i])
        code = code * (k - i) + smaller
    return k, code


def pattern_unrank(k: int, code: int) -> Perm:
    if k < 1 or k > MAX_RANK_K:
        raise PatternError("rank overflow" if k > MAX_RANK_K else "k must be >= 1")
    if not 0 <= code < math.factorial(k):
        raise PatternError(f"code {code} out of range for k={k}")
    digits = []
    for radix in range(1, k + 1):
        code, d = divmod(code, radix)
        digits.append(d)
    digits.reverse()
    pool = list(range(1, k + 1))
    return tuple(pool.pop(d) for d in digits)


def prefix_code_to_pattern(k: int, code: int) -> Perm:
    """Decode a factorial-base prefix-rank code (see the kernels) to a pattern.

    Digit ``i`` (weight ``i!``) is the number of earlier entries smaller
    than entry ``i``.
    """
    ranks: list[int] = []
    for i in range(k):
        code, c = divmod(code, i + 1)
        ranks = [r + 1 if r >= c else r for r in ranks]
        ranks.append(c)
    return tuple(r + 1 for r in ranks)


class RandomSource:
    """Seeded stream of uniform permutations.

    Child streams from :meth:`derive` depend only on ``(seed, index)``, which
    is what lets sharded Monte Carlo runs stay reproducible.
    """

    def __init__(self, seed: int = 0, _seq: np.random.SeedSequence | None = None):
        if not 0 <= seed < 2**64:
            raise PatternError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self._seq = _seq if _seq is not None else np.random.SeedSequence(seed)
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    def derive(self, index: int) -> "RandomSource":
        seq = np.random.SeedSequence(self._seq.entropy, spawn_key=self._seq.spawn_key + (index,))
        return RandomSource(self.seed, _seq=seq)

    def permutation(self, n: int) -> Perm:
        return tuple(int(v) for v in self._gen.permutation(n) + 1)

    def permutations(self, n: int, count: int) -> np.ndarray:
        """``count`` independent uniform permutations of 1..n, one per row."""
        base = np.tile(np.arange(1, n + 1, dtype=np.int64), (count, 1))
        return self._gen.permuted(base, axis=1)


def random_permutation(n: int, rng: RandomSource) -> Perm:
    if n < 1:
        raise PatternError("n must be >= 1")
    return rng.permutation(n)
