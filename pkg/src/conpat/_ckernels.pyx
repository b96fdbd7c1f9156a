# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled kernels. Mirrors ``_pykernels`` one to one."""

import numpy as np

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport malloc, calloc, free
from libcpp.vector cimport vector
from libcpp.unordered_set cimport unordered_set


cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil


cdef struct Workspace:
    int n
    int* below      # n*n, row e holds #{i in [j, e) : p[i] < p[e]} at column j
    int* labels     # n*n, -1 when unused
    int* cls
    int* touched
    int64_t* mult


cdef int ws_init(Workspace* ws, int n) noexcept nogil:
    cdef size_t nn = <size_t>n * <size_t>n
    cdef size_t i
    ws.n = n
    ws.below = <int*>malloc(nn * sizeof(int))
    ws.labels = <int*>malloc(nn * sizeof(int))
    ws.cls = <int*>malloc(n * sizeof(int))
    ws.touched = <int*>malloc(n * sizeof(int))
    ws.mult = <int64_t*>malloc(n * sizeof(int64_t))
    if not ws.below or not ws.labels or not ws.cls or not ws.touched or not ws.mult:
        return -1
    for i in range(nn):
        ws.labels[i] = -1
    return 0


cdef void ws_free(Workspace* ws) noexcept nogil:
    free(ws.below)
    free(ws.labels)
    free(ws.cls)
    free(ws.touched)
    free(ws.mult)


cdef void profile_into(Workspace* ws, const int64_t* p, int64_t* x, int64_t* z) noexcept nogil:
    cdef int n = ws.n
    cdef int e, j, k, acc, key, lab, nlab, c
    cdef int64_t pe, m, zz
    cdef int* row
    if n == 0:
        return
    x[0] = 1
    z[0] = (<int64_t>n * (n - 1)) // 2
    for e in range(n):
        row = ws.below + <size_t>e * n
        acc = 0
        pe = p[e]
        j = e - 1
        while j >= 0:
            if p[j] < pe:
                acc += 1
            row[j] = acc
            j -= 1
        ws.cls[e] = 0
    for k in range(2, n + 1):
        nlab = 0
        for j in range(n - k + 1):
            c = ws.below[<size_t>(j + k - 1) * n + j]
            key = ws.cls[j] * n + c
            lab = ws.labels[key]
            if lab < 0:
                lab = nlab
                ws.labels[key] = lab
                ws.touched[nlab] = key
                ws.mult[nlab] = 0
                nlab += 1
            ws.mult[lab] += 1
            ws.cls[j] = lab
        zz = 0
        for j in range(nlab):
            m = ws.mult[j]
            zz += m * (m - 1) // 2
            ws.labels[ws.touched[j]] = -1
        x[k - 1] = nlab
        z[k - 1] = zz


def profile_counts(p):
    cdef int64_t[::1] arr = np.ascontiguousarray(p, dtype=np.int64)
    cdef int n = arr.shape[0]
    cdef int64_t[::1] x = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] z = np.zeros(n, dtype=np.int64)
    cdef Workspace ws
    if n == 0:
        return [], []
    if ws_init(&ws, n) != 0:
        ws_free(&ws)
        raise MemoryError()
    with nogil:
        profile_into(&ws, &arr[0], &x[0], &z[0])
    ws_free(&ws)
    return [int(v) for v in x], [int(v) for v in z]


def batch_profile_counts(perms):
    cdef int64_t[:, ::1] arr = np.ascontiguousarray(perms, dtype=np.int64)
    cdef Py_ssize_t count = arr.shape[0]
    cdef int n = arr.shape[1]
    xs_np = np.zeros((count, n), dtype=np.int64)
    zs_np = np.zeros((count, n), dtype=np.int64)
    cdef int64_t[:, ::1] xs = xs_np
    cdef int64_t[:, ::1] zs = zs_np
    cdef Workspace ws
    cdef Py_ssize_t r
    if count == 0 or n == 0:
        return xs_np, zs_np
    if ws_init(&ws, n) != 0:
        ws_free(&ws)
        raise MemoryError()
    with nogil:
        for r in range(count):
            profile_into(&ws, &arr[r, 0], &xs[r, 0], &zs[r, 0])
    ws_free(&ws)
    return xs_np, zs_np


cdef bint next_permutation(int64_t* a, int lo, int hi) noexcept nogil:
    # lexicographic successor of a[lo:hi]; False once the last one is passed
    cdef int i = hi - 2
    cdef int j
    cdef int64_t t
    while i >= lo and a[i] >= a[i + 1]:
        i -= 1
    if i < lo:
        return False
    j = hi - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]; a[i] = a[j]; a[j] = t
    i += 1
    j = hi - 1
    while i < j:
        t = a[i]; a[i] = a[j]; a[j] = t
        i += 1
        j -= 1
    return True


def profile_sums_first(int n, int first):
    xs_np = np.zeros(n, dtype=np.int64)
    zs_np = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] xs = xs_np
    cdef int64_t[::1] zs = zs_np
    cdef int64_t[::1] p = np.array([first] + [v for v in range(1, n + 1) if v != first], dtype=np.int64)
    cdef int64_t[::1] x = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] z = np.zeros(n, dtype=np.int64)
    cdef Workspace ws
    cdef int i
    if ws_init(&ws, n) != 0:
        ws_free(&ws)
        raise MemoryError()
    with nogil:
        while True:
            profile_into(&ws, &p[0], &x[0], &z[0])
            for i in range(n):
                xs[i] += x[i]
                zs[i] += z[i]
            if not next_permutation(&p[0], 1, n):
                break
    ws_free(&ws)
    return xs_np, zs_np


cdef struct OverlapState:
    int m
    int s
    int k
    int nprefix
    int* prefix
    int* rank
    int* crank
    int64_t* fact
    int64_t* counts
    int64_t total


cdef void overlap_place(OverlapState* st, int p, int64_t code) noexcept nogil:
    cdef int c, lo, hi, u, got
    if p == st.m:
        st.total += 1
        st.counts[code] += 1
        return
    if p < st.nprefix:
        lo = st.prefix[p]
        hi = lo
        if lo > p:
            return
    else:
        lo = 0
        hi = p
    for c in range(lo, hi + 1):
        if p >= st.s:
            got = 0
            for u in range(st.s, p):
                if st.rank[u] < c:
                    got += 1
            if got != st.crank[p - st.s]:
                continue
        for u in range(p):
            if st.rank[u] >= c:
                st.rank[u] += 1
        st.rank[p] = c
        st.crank[p] = c
        if p < st.k:
            overlap_place(st, p + 1, code + c * st.fact[p])
        else:
            overlap_place(st, p + 1, code)
        for u in range(p):
            if st.rank[u] > c:
                st.rank[u] -= 1


def overlap_witnesses(int k, int l, prefix=()):
    cdef OverlapState st
    cdef int i
    cdef int64_t f = 1
    st.m = 2 * k - l
    st.s = k - l
    st.k = k
    st.nprefix = len(prefix)
    st.total = 0
    fact_np = np.ones(k + 1, dtype=np.int64)
    for i in range(1, k + 1):
        f *= i
        fact_np[i] = f
    counts_np = np.zeros(f, dtype=np.int64)
    cdef int64_t[::1] fact = fact_np
    cdef int64_t[::1] counts = counts_np
    pre_np = np.array(list(prefix) + [0], dtype=np.intc)
    cdef int[::1] pre = pre_np
    rank_np = np.zeros(st.m + 1, dtype=np.intc)
    crank_np = np.zeros(st.m + 1, dtype=np.intc)
    cdef int[::1] rank = rank_np
    cdef int[::1] crank = crank_np
    st.prefix = &pre[0]
    st.rank = &rank[0]
    st.crank = &crank[0]
    st.fact = &fact[0]
    st.counts = &counts[0]
    with nogil:
        overlap_place(&st, 0, 0)
    return int(st.total), counts_np


cdef struct PsiState:
    int n
    int64_t* vals
    uint64_t* fact
    vector[unordered_set[uint64_t]]* seen


cdef void psi_grow(PsiState* st, int i, uint64_t mask, int length, uint64_t code) noexcept nogil:
    cdef int j, c
    cdef int64_t v
    cdef uint64_t nc
    for j in range(i, st.n):
        v = st.vals[j]
        c = popcount64(mask & ((<uint64_t>1 << v) - 1))
        nc = code + <uint64_t>c * st.fact[length]
        st.seen[0][length + 1].insert(nc)
        psi_grow(st, j + 1, mask | (<uint64_t>1 << v), length + 1, nc)


def psi_count(p):
    cdef int64_t[::1] vals = np.ascontiguousarray(p, dtype=np.int64) - 1
    cdef int n = vals.shape[0]
    cdef vector[unordered_set[uint64_t]] seen
    cdef PsiState st
    cdef int i
    cdef uint64_t f = 1
    fact_np = np.ones(n + 1, dtype=np.uint64)
    for i in range(1, n + 1):
        f *= i
        fact_np[i] = f
    cdef uint64_t[::1] fact = fact_np
    cdef size_t total = 1
    if n == 0:
        return 1
    seen.resize(n + 1)
    st.n = n
    st.vals = &vals[0]
    st.fact = &fact[0]
    st.seen = &seen
    with nogil:
        psi_grow(&st, 0, 0, 0, 0)
        for i in range(n + 1):
            total += seen[i].size()
    return int(total)
