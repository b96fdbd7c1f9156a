"""Pure-Python kernels. Same algorithms and signatures as ``_ckernels``.

Window classes are refined one length at a time: the pattern of
``p[j:j+k]`` is fixed by the pattern of ``p[j:j+k-1]`` together with the
number of its entries below ``p[j+k-1]``. Relabelling those pairs gives
exact class ids at every length with no overflow, in O(n^2) total.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def profile_counts(p):
    """Return ``(x, z)``: distinct-pattern and isomorphic-pair counts per length."""
    n = len(p)
    x = [0] * n
    z = [0] * n
    if n == 0:
        return x, z
    x[0] = 1
    z[0] = n * (n - 1) // 2
    cls = [0] * n
    # below[e][j] = #{i in [j, e) : p[i] < p[e]}
    below = []
    for e in range(n):
        row = [0] * (e + 1)
        acc = 0
        pe = p[e]
        for j in range(e - 1, -1, -1):
            if p[j] < pe:
                acc += 1
            row[j] = acc
        below.append(row)
    for k in range(2, n + 1):
        labels: dict[tuple[int, int], int] = {}
        mult: list[int] = []
        for j in range(n - k + 1):
            key = (cls[j], below[j + k - 1][j])
            lab = labels.get(key)
            if lab is None:
                lab = len(mult)
                labels[key] = lab
                mult.append(0)
            mult[lab] += 1
            cls[j] = lab
        x[k - 1] = len(mult)
        z[k - 1] = sum(m * (m - 1) // 2 for m in mult)
    return x, z


def batch_profile_counts(perms):
    perms = np.asarray(perms, dtype=np.int64)
    count, n = perms.shape
    xs = np.zeros((count, n), dtype=np.int64)
    zs = np.zeros((count, n), dtype=np.int64)
    for r in range(count):
        x, z = profile_counts(perms[r].tolist())
        xs[r] = x
        zs[r] = z
    return xs, zs


def profile_sums_first(n, first):
    """Sum of per-length X_k and Z_k over every p in S_n with p[0] == first."""
    xs = [0] * n
    zs = [0] * n
    rest = [v for v in range(1, n + 1) if v != first]
    for tail in itertools.permutations(rest):
        x, z = profile_counts((first,) + tail)
        for i in range(n):
            xs[i] += x[i]
            zs[i] += z[i]
    return np.array(xs, dtype=np.int64), np.array(zs, dtype=np.int64)


def overlap_witnesses(k, l, prefix=()):
    """Count sigma in S_{2k-l} whose windows at 0 and k-l are order isomorphic.

    sigma is built by inserting entry ``p`` with rank ``c`` among the entries
    already placed. The second window is checked as soon as each of its
    entries lands, so dead branches are cut early. ``prefix`` forces the
    first few ranks (used for sharding).

    Returns ``(numerator, counts)`` where ``counts[code]`` is the number of
    witnesses whose shared pattern has factorial-base prefix-rank ``code``.
    """
    m = 2 * k - l
    s = k - l
    fact = [math.factorial(i) for i in range(k + 1)]
    counts = np.zeros(fact[k], dtype=np.int64)
    rank = [0] * m
    crank = [0] * m
    total = 0

    def place(p, code):
        nonlocal total
        if p == m:
            total += 1
            counts[code] += 1
            return
        choices = (prefix[p],) if p < len(prefix) else range(p + 1)
        for c in choices:
            if c > p:
                continue
            if p >= s:
                need = crank[p - s]
                got = 0
                for u in range(s, p):
                    if rank[u] < c:
                        got += 1
                if got != need:
                    continue
            for u in range(p):
                if rank[u] >= c:
                    rank[u] += 1
            rank[p] = c
            crank[p] = c
            place(p + 1, code + c * fact[p] if p < k else code)
            for u in range(p):
                if rank[u] > c:
                    rank[u] -= 1

    place(0, 0)
    return total, counts


def psi_count(p):
    """Distinct subsequence patterns of ``p``, the empty one included."""
    n = len(p)
    vals = [int(v) - 1 for v in p]
    fact = [math.factorial(i) for i in range(n + 1)]
    seen: list[set[int]] = [set() for _ in range(n + 1)]

    def grow(i, mask, length, code):
        for j in range(i, n):
            v = vals[j]
            c = (mask & ((1 << v) - 1)).bit_count()
            nc = code + c * fact[length]
            seen[length + 1].add(nc)
            grow(j + 1, mask | (1 << v), length + 1, nc)

    grow(0, 0, 0, 0)
    return 1 + sum(len(s) for s in seen)
