"""The counting bound sum_k min(n-k+1, k!) and the search for permutations that reach it."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

from conpat.consecutive import phi
from conpat.core import Perm, PatternError, reduce_window


@dataclass(frozen=True)
class BoundTable:
    n: int
    terms: tuple[int, ...]
    crossover: int

    @property
    def total(self) -> int:
        return sum(self.terms)


@dataclass(frozen=True)
class AsymptoticParams:
    n: int
    a_n: float
    k0: int
    lower_bound: int


def _capped_factorial(k: int, cap: int) -> int:
    # k! grows fast; stop multiplying once it passes cap
    f = 1
    for i in range(2, k + 1):
        f *= i
        if f > cap:
            return f
    return f


def bound_table(n: int) -> BoundTable:
    """Per-length caps min(n-k+1, k!) on the number of distinct patterns.

    >>> bound_table(5).terms
    (1, 2, 3, 2, 1)
    """
    if n < 1:
        raise PatternError("n must be >= 1")
    terms = []
    crossover = None
    for k in range(1, n + 1):
        windows = n - k + 1
        f = _capped_factorial(k, windows)
        terms.append(min(windows, f))
        if crossover is None and f >= windows:
            crossover = k
    return BoundTable(n, tuple(terms), crossover if crossover is not None else n)


def asymptotic_params(n: int) -> AsymptoticParams:
    if n < 3:
        raise PatternError("asymptotic parameters need n >= 3")
    ln = math.log(n)
    a_n = ln / math.log(ln)
    start = max(1, math.ceil(a_n))
    lower = sum(n - k + 1 for k in range(start, n + 1))
    return AsymptoticParams(n=n, a_n=a_n, k0=math.ceil(200 * ln), lower_bound=lower)


def search_attaining(n: int, time_budget: float = 60.0) -> Perm | None:
    """Depth-first search for a permutation with phi equal to the bound.

    Extensions that add the most new patterns are tried first. A branch is
    cut when even filling every remaining window with a new pattern cannot
    reach the bound. Returns ``None`` if ``time_budget`` seconds run out.
    """
    if n < 1:
        raise PatternError("n must be >= 1")
    table = bound_table(n)
    target = table.total
    caps = table.terms
    fact = [_capped_factorial(k, n + 1) for k in range(n + 1)]
    deadline = time.monotonic() + time_budget
    seen: list[set[Perm]] = [set() for _ in range(n + 1)]
    prefix: list[int] = []
    used = [False] * (n + 1)

    def new_patterns(v: int) -> list[tuple[int, Perm]]:
        w = prefix + [v]
        m = len(w)
        return [(m - j, reduce_window(w[j:])) for j in range(m)]

    def optimistic(m: int) -> int:
        total = 0
        for k in range(1, n + 1):
            done = max(0, m - k + 1)
            rem = (n - k + 1) - done
            got = len(seen[k])
            total += min(caps[k - 1], got + min(rem, fact[k] - got))
        return total

    class _Timeout(Exception):
        pass

    def extend() -> Perm | None:
        if time.monotonic() > deadline:
            raise _Timeout
        m = len(prefix)
        if m == n:
            return tuple(prefix)
        scored = []
        for v in range(1, n + 1):
            if used[v]:
                continue
            pats = new_patterns(v)
            fresh = sum(1 for k, pat in pats if pat not in seen[k])
            scored.append((-fresh, v, pats))
        scored.sort(key=lambda t: (t[0], t[1]))
        for _, v, pats in scored:
            added = []
            for k, pat in pats:
                if pat not in seen[k]:
                    seen[k].add(pat)
                    added.append((k, pat))
            prefix.append(v)
            used[v] = True
            if optimistic(m + 1) >= target:
                found = extend()
                if found is not None:
                    return found
            prefix.pop()
            used[v] = False
            for k, pat in added:
                seen[k].discard(pat)
        return None

    try:
        found = extend()
    except _Timeout:
        return None
    if found is not None and phi(found) != target:
        raise AssertionError(f"search produced {found} with phi != {target}")
    return found
