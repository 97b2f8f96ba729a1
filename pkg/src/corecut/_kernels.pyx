# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`corecut._kernels_py`."""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


def scaled_matvec(const int64_t[::1] indptr, const int64_t[::1] indices,
                  const double[::1] data, const double[::1] scale,
                  const double[::1] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, p
    cdef double acc
    cdef cnp.ndarray[double, ndim=1] sx = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] y = np.empty(n)
    cdef double[::1] sxv = sx
    cdef double[::1] yv = y
    for i in range(n):
        sxv[i] = scale[i] * x[i]
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * sxv[indices[p]]
        yv[i] = scale[i] * acc
    return y


def sweep_cuts(const int64_t[::1] indptr, const int64_t[::1] indices,
               const double[::1] data, const int64_t[::1] order):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t k, p, i
    cdef double cut = 0.0, inside, total
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] member = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] mv = member
    cdef cnp.ndarray[double, ndim=1] cuts = np.empty(n)
    cdef double[::1] cv = cuts
    for k in range(n):
        i = order[k]
        inside = 0.0
        total = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            total += data[p]
            if mv[indices[p]]:
                inside += data[p]
        mv[i] = 1
        cut += total - 2.0 * inside
        cv[k] = cut
    return cuts


def bridge_forest(const int64_t[::1] indptr, const int64_t[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[int64_t, ndim=1] parent = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] root = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] size = np.ones(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] degsum = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] bridge = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] par = parent
    cdef int64_t[::1] rt = root
    cdef int64_t[::1] sz = size
    cdef int64_t[::1] ds = degsum
    cdef cnp.uint8_t[::1] br = bridge
    cdef int64_t[::1] disc = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] low = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] nxt = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] stack = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t top, s, u, v, p
    cdef int64_t timer = 0
    for s in range(n):
        ds[s] = indptr[s + 1] - indptr[s]
    for s in range(n):
        if disc[s] >= 0:
            continue
        disc[s] = timer
        low[s] = timer
        timer += 1
        rt[s] = s
        nxt[s] = indptr[s]
        stack[0] = s
        top = 1
        while top > 0:
            u = stack[top - 1]
            if nxt[u] < indptr[u + 1]:
                v = indices[nxt[u]]
                nxt[u] += 1
                if disc[v] < 0:
                    par[v] = u
                    rt[v] = s
                    disc[v] = timer
                    low[v] = timer
                    timer += 1
                    nxt[v] = indptr[v]
                    stack[top] = v
                    top += 1
                elif v != par[u]:
                    if disc[v] < low[u]:
                        low[u] = disc[v]
            else:
                top -= 1
                p = par[u]
                if p >= 0:
                    if low[u] < low[p]:
                        low[p] = low[u]
                    if low[u] > disc[p]:
                        br[u] = 1
                    sz[p] += sz[u]
                    ds[p] += ds[u]
    return parent, root, size, degsum, bridge.astype(bool)


def subset_cut_volume(const int64_t[::1] indptr, const int64_t[::1] indices,
                      const double[::1] data, const double[::1] degrees):
    # masks over nodes 0..n-2; node n-1 always on the complement side.
    # Each mask extends mask & (mask - 1) by its lowest set node.
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = (<Py_ssize_t>1) << (n - 1)
    cdef cnp.ndarray[double, ndim=1] cut = np.zeros(m)
    cdef cnp.ndarray[double, ndim=1] vol = np.zeros(m)
    cdef double[::1] cv = cut
    cdef double[::1] vv = vol
    cdef Py_ssize_t mask, prev, i, p, j
    cdef double c
    cdef uint64_t low
    for mask in range(1, m):
        prev = mask & (mask - 1)
        low = <uint64_t>(mask ^ prev)
        i = 0
        while (low >> i) != 1:
            i += 1
        c = cv[prev]
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if (prev >> j) & 1:
                c -= data[p]
            else:
                c += data[p]
        cv[mask] = c
        vv[mask] = vv[prev] + degrees[i]
    return cut, vol
