"""Pure numpy/Python versions of the compiled kernels in ``_kernels.pyx``.

Every function takes CSR arrays (``indptr``, ``indices`` as int64, ``data`` as
float64) of a symmetric adjacency without self-loops.
"""
import numpy as np


def _row_ids(indptr):
    return np.repeat(np.arange(len(indptr) - 1, dtype=np.int64), np.diff(indptr))


def scaled_matvec(indptr, indices, data, scale, x):
    """Return ``scale * (A @ (scale * x))``."""
    sx = scale * x
    y = np.bincount(_row_ids(indptr), weights=data * sx[indices], minlength=len(indptr) - 1)
    return scale * y


def sweep_cuts(indptr, indices, data, order):
    """Cut weight of every prefix ``order[:k+1]``.

    An edge crosses exactly the prefixes that contain its earlier endpoint but
    not its later one, so a difference array over ranks gives all cuts at once.
    """
    n = len(indptr) - 1
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    ri = rank[_row_ids(indptr)]
    rj = rank[indices]
    keep = ri < rj
    delta = np.zeros(n + 1)
    np.add.at(delta, ri[keep], data[keep])
    np.add.at(delta, rj[keep], -data[keep])
    return np.cumsum(delta[:n])


def bridge_forest(indptr, indices):
    """Iterative Tarjan DFS over every component.

    Returns ``(parent, root, subtree_size, subtree_degree_count, is_bridge)``
    where ``is_bridge[v]`` marks the tree edge ``(parent[v], v)``.
    """
    n = len(indptr) - 1
    indptr = indptr.tolist()
    indices = indices.tolist()
    parent = [-1] * n
    root = [-1] * n
    size = [1] * n
    degsum = [indptr[i + 1] - indptr[i] for i in range(n)]
    bridge = [False] * n
    disc = [-1] * n
    low = [0] * n
    nxt = indptr[:-1]
    timer = 0
    for s in range(n):
        if disc[s] >= 0:
            continue
        disc[s] = low[s] = timer
        timer += 1
        root[s] = s
        stack = [s]
        while stack:
            u = stack[-1]
            if nxt[u] < indptr[u + 1]:
                v = indices[nxt[u]]
                nxt[u] += 1
                if disc[v] < 0:
                    parent[v] = u
                    root[v] = s
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append(v)
                elif v != parent[u] and disc[v] < low[u]:
                    low[u] = disc[v]
            else:
                stack.pop()
                p = parent[u]
                if p >= 0:
                    if low[u] < low[p]:
                        low[p] = low[u]
                    if low[u] > disc[p]:
                        bridge[u] = True
                    size[p] += size[u]
                    degsum[p] += degsum[u]
    as64 = lambda a: np.asarray(a, dtype=np.int64)
    return as64(parent), as64(root), as64(size), as64(degsum), np.asarray(bridge, dtype=bool)


def subset_cut_volume(indptr, indices, data, degrees):
    """Cut and volume of every subset of nodes ``0..n-2`` (bitmask order)."""
    n = len(indptr) - 1
    masks = np.arange(1 << (n - 1), dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    vol = bits[:, : n - 1].astype(np.float64) @ degrees[: n - 1]
    rows = _row_ids(indptr)
    upper = rows < indices
    cut = np.zeros(len(masks))
    for i, j, w in zip(rows[upper], indices[upper], data[upper]):
        cut += w * (bits[:, i] != bits[:, j])
    return cut, vol
