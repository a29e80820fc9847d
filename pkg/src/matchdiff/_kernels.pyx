# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled counting kernels (machine-word fast path).

Matching counts use uint64 accumulators with overflow detection; on
overflow the caller falls back to the arbitrary-precision pure-Python
kernels, so results are always exact.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t
from libc.string cimport memset

BACKEND = "cython"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

cdef uint64_t U64MAX = <uint64_t> 0xFFFFFFFFFFFFFFFF


def match_poly_counts(neigh):
    """Matching counts m_0..m_n via the subset DP (see _kernels_py)."""
    cdef int n = len(neigh)
    if n > 26:
        raise ValueError("side size too large for the subset DP kernel")
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << n
    cdef int total_nb = 0
    for nb in neigh:
        total_nb += len(nb)
    cdef int *off = <int *> malloc((n + 1) * sizeof(int))
    cdef uint64_t *bits = <uint64_t *> malloc(max(total_nb, 1) * sizeof(uint64_t))
    cdef uint64_t *a = <uint64_t *> malloc(size * sizeof(uint64_t))
    if off == NULL or bits == NULL or a == NULL:
        free(off); free(bits); free(a)
        raise MemoryError()
    cdef int v, k, e
    cdef Py_ssize_t s
    cdef uint64_t acc, x, bit
    try:
        e = 0
        off[0] = 0
        for v in range(n):
            for u in neigh[v]:
                bits[e] = (<uint64_t> 1) << <int> u
                e += 1
            off[v + 1] = e
        memset(a, 0, size * sizeof(uint64_t))
        a[0] = 1
        for v in range(n):
            for s in range(size - 1, -1, -1):
                acc = 0
                for k in range(off[v], off[v + 1]):
                    bit = bits[k]
                    if s & bit:
                        x = a[s ^ bit]
                        acc += x
                        if acc < x:
                            raise OverflowError("uint64 overflow in matching DP")
                if acc:
                    if a[s] > U64MAX - acc:
                        raise OverflowError("uint64 overflow in matching DP")
                    a[s] += acc
        m = [0] * (n + 1)
        for s in range(size):
            k = __builtin_popcountll(<unsigned long long> s)
            x = a[s]
            m[k] = m[k] + x
        return m
    finally:
        free(off); free(bits); free(a)


cdef struct UptoCtx:
    int ne
    int j_max
    int *eu
    int *ev
    char *used
    uint64_t *m


cdef void _upto_rec(UptoCtx *ctx, int start, int depth) noexcept nogil:
    cdef int e, u, v, nxt
    nxt = depth + 1
    for e in range(start, ctx.ne):
        u = ctx.eu[e]
        v = ctx.ev[e]
        if ctx.used[u] == 0 and ctx.used[v] == 0:
            ctx.m[nxt] += 1
            if nxt < ctx.j_max:
                ctx.used[u] = 1
                ctx.used[v] = 1
                _upto_rec(ctx, e + 1, nxt)
                ctx.used[u] = 0
                ctx.used[v] = 0


def match_upto_counts(edges, int nverts, int j_max):
    """Counts m_0..m_j_max by ordered-edge DFS (see _kernels_py)."""
    cdef int ne = len(edges)
    cdef UptoCtx ctx
    ctx.ne = ne
    ctx.j_max = j_max
    ctx.eu = <int *> malloc(max(ne, 1) * sizeof(int))
    ctx.ev = <int *> malloc(max(ne, 1) * sizeof(int))
    ctx.used = <char *> malloc(max(nverts, 1) * sizeof(char))
    ctx.m = <uint64_t *> malloc((j_max + 1) * sizeof(uint64_t))
    if ctx.eu == NULL or ctx.ev == NULL or ctx.used == NULL or ctx.m == NULL:
        free(ctx.eu); free(ctx.ev); free(ctx.used); free(ctx.m)
        raise MemoryError()
    cdef int i
    try:
        for i in range(ne):
            ctx.eu[i] = edges[i][0]
            ctx.ev[i] = edges[i][1]
        memset(ctx.used, 0, nverts * sizeof(char))
        for i in range(j_max + 1):
            ctx.m[i] = 0
        ctx.m[0] = 1
        if j_max > 0 and ne > 0:
            with nogil:
                _upto_rec(&ctx, 0, 0)
        return [ctx.m[i] for i in range(j_max + 1)]
    finally:
        free(ctx.eu); free(ctx.ev); free(ctx.used); free(ctx.m)


cdef struct CensusCtx:
    int nv
    int s_max
    int *adj
    int *deg
    int stride
    char *visited
    uint64_t *counts


cdef void _census_walk(CensusCtx *ctx, int root, int u, int nedges) noexcept nogil:
    cdef int k, w
    ctx.visited[u] = 1
    for k in range(ctx.deg[u]):
        w = ctx.adj[u * ctx.stride + k]
        if w == root:
            if nedges >= 2:
                ctx.counts[nedges + 1] += 1
        elif w > root and ctx.visited[w] == 0 and nedges + 1 < ctx.s_max:
            _census_walk(ctx, root, w, nedges + 1)
    ctx.visited[u] = 0


def cycle_census_counts(adj, int s_max):
    """Exact s-cycle counts for 3 <= s <= s_max (see _kernels_py)."""
    cdef int nv = len(adj)
    cdef int stride = 0
    for row in adj:
        if len(row) > stride:
            stride = len(row)
    cdef CensusCtx ctx
    ctx.nv = nv
    ctx.s_max = s_max
    ctx.stride = max(stride, 1)
    ctx.adj = <int *> malloc(max(nv * ctx.stride, 1) * sizeof(int))
    ctx.deg = <int *> malloc(max(nv, 1) * sizeof(int))
    ctx.visited = <char *> malloc(max(nv, 1) * sizeof(char))
    ctx.counts = <uint64_t *> malloc((s_max + 2) * sizeof(uint64_t))
    if ctx.adj == NULL or ctx.deg == NULL or ctx.visited == NULL or ctx.counts == NULL:
        free(ctx.adj); free(ctx.deg); free(ctx.visited); free(ctx.counts)
        raise MemoryError()
    cdef int i, k, root, w
    try:
        for i in range(nv):
            ctx.deg[i] = len(adj[i])
            for k in range(len(adj[i])):
                ctx.adj[i * ctx.stride + k] = adj[i][k]
        memset(ctx.visited, 0, nv * sizeof(char))
        for i in range(s_max + 2):
            ctx.counts[i] = 0
        if s_max >= 3:
            with nogil:
                for root in range(nv):
                    ctx.visited[root] = 1
                    for k in range(ctx.deg[root]):
                        w = ctx.adj[root * ctx.stride + k]
                        if w > root:
                            _census_walk(&ctx, root, w, 1)
                    ctx.visited[root] = 0
        return {s: ctx.counts[s] // 2 for s in range(3, s_max + 1)}
    finally:
        free(ctx.adj); free(ctx.deg); free(ctx.visited); free(ctx.counts)
