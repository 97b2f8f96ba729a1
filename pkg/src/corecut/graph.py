"""Immutable sparse undirected weighted graphs and cut primitives.

Nodes are dense ``0..n-1`` integers. Adjacency is stored in CSR form with
each row sorted by neighbor id; every undirected edge appears in both rows.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


@dataclass(frozen=True, eq=False)
class Graph:
    """Sparse undirected weighted graph.

    Build instances with :func:`build_graph` (or :meth:`from_csr` for arrays
    that are already symmetric and loop-free); the constructor does not
    validate.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    degrees: np.ndarray = field(init=False)
    total_volume: float = field(init=False)

    def __post_init__(self):
        n = len(self.indptr) - 1
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        degrees = np.bincount(rows, weights=self.weights, minlength=n).astype(np.float64)
        for arr in (self.indptr, self.indices, self.weights, degrees):
            arr.setflags(write=False)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "total_volume", float(degrees.sum()))

    @classmethod
    def from_csr(cls, indptr, indices, weights):
        return cls(
            np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int64),
            np.ascontiguousarray(weights, dtype=np.float64),
        )

    @property
    def n(self):
        return len(self.indptr) - 1

    @property
    def n_edges(self):
        """Number of undirected edges."""
        return len(self.indices) // 2

    def neighbors(self, i):
        """Sorted neighbor ids and weights of node ``i`` (read-only views)."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def row_ids(self):
        return np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))

    def edge_array(self):
        """Undirected edges as ``(i, j, w)`` arrays with ``i < j``, sorted."""
        rows = self.row_ids()
        upper = rows < self.indices
        return rows[upper], self.indices[upper], self.weights[upper]

    def edge_list(self):
        return [(int(i), int(j), float(w)) for i, j, w in zip(*self.edge_array())]

    def to_scipy(self):
        return sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))

    def to_dense(self):
        return self.to_scipy().toarray()

    def is_connected(self):
        if self.n == 0:
            return False
        ncomp, _ = connected_components(self.to_scipy(), directed=False)
        return ncomp == 1

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges}, volume={self.total_volume:g})"


@dataclass(frozen=True)
class CutStats:
    cut: float
    vol_s: float
    vol_sc: float
    conductance: float


def build_graph(edges, n, symmetrize=True, drop_self_loops=True):
    """Build a :class:`Graph` from ``(i, j, weight)`` triples.

    ``edges`` may also be an ``(m, 2)`` array of unweighted pairs. With
    ``symmetrize`` the input is read as directed arcs: repeated arcs are summed
    and the undirected weight of ``{i, j}`` is ``max(w(i->j), w(j->i))``, so a
    reciprocated pair collapses to one edge. Without it each entry is an
    undirected edge and repeated pairs (in either orientation) are summed.

    Raises:
        ValueError: node id outside ``[0, n)`` or negative weight.
    """
    arr = np.asarray(edges, dtype=np.float64)
    if arr.size == 0:
        arr = np.zeros((0, 3))
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError("edges must be (i, j) or (i, j, weight) rows")
    src = arr[:, 0]
    dst = arr[:, 1]
    w = arr[:, 2] if arr.shape[1] == 3 else np.ones(len(arr))
    if np.any(src != np.floor(src)) or np.any(dst != np.floor(dst)):
        raise ValueError("node ids must be integers")
    src = src.astype(np.int64)
    dst = dst.astype(np.int64)
    bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise ValueError(f"node id out of range [0, {n}) in edge {k}: ({src[k]}, {dst[k]})")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("edge weights must be finite and nonnegative")
    if drop_self_loops:
        keep = src != dst
        src, dst, w = src[keep], dst[keep], w[keep]
    if symmetrize:
        arcs = sp.coo_matrix((w, (src, dst)), shape=(n, n)).tocsr()
        arcs.sum_duplicates()
        adj = arcs.maximum(arcs.T).tocsr()
    else:
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        upper = sp.coo_matrix((w, (lo, hi)), shape=(n, n)).tocsr()
        upper.sum_duplicates()
        diag = upper.diagonal()
        adj = (upper + upper.T).tocsr()
        if np.any(diag):
            adj.setdiag(diag)
    adj.eliminate_zeros()
    adj.sort_indices()
    return Graph.from_csr(adj.indptr, adj.indices, adj.data)


def as_node_set(s, n, proper=False):
    """Validate and normalize a node subset to a sorted unique int64 array."""
    members = np.unique(np.asarray(s, dtype=np.int64).ravel())
    if members.size and (members[0] < 0 or members[-1] >= n):
        raise ValueError(f"node ids must lie in [0, {n})")
    if proper and (members.size == 0 or members.size == n):
        raise ValueError("node set must be non-empty and proper")
    return members


def indicator(s, n):
    mask = np.zeros(n, dtype=bool)
    mask[s] = True
    return mask


def cut_weight(g, mask):
    """Total weight of edges with exactly one endpoint in ``mask``."""
    crossing = mask[g.row_ids()] & ~mask[g.indices]
    return float(g.weights[crossing].sum())


def conductance_from(cut, vol_s, vol_sc):
    smaller = min(vol_s, vol_sc)
    if smaller <= 0:
        # zero-volume side: every incident edge is crossing by convention
        return 1.0
    # cut <= smaller side volume exactly; clamp summation round-off
    return min(cut / smaller, 1.0)


def cut_stats(g, s):
    """Cut, both volumes and conductance of the partition ``(s, V \\ s)``.

    Each crossing edge is counted once; conductance divides by the
    smaller-volume side.
    """
    members = as_node_set(s, g.n, proper=True)
    mask = indicator(members, g.n)
    cut = cut_weight(g, mask)
    vol_s = float(g.degrees[mask].sum())
    vol_sc = float(g.degrees[~mask].sum())
    return CutStats(cut, vol_s, vol_sc, conductance_from(cut, vol_s, vol_sc))


def conductance(g, s):
    return cut_stats(g, s).conductance


def _subgraph(g, members):
    old_to_new = np.full(g.n, -1, dtype=np.int64)
    old_to_new[members] = np.arange(len(members))
    sub = g.to_scipy()[members][:, members].tocsr()
    sub.sort_indices()
    return Graph.from_csr(sub.indptr, sub.indices, sub.data), old_to_new


def induced_subgraph(g, s):
    """Subgraph on ``s`` with nodes relabelled ``0..len(s)-1`` in id order."""
    members = as_node_set(s, g.n)
    return _subgraph(g, members)[0]


def component_labels(g):
    """Component label per node, labels numbered by smallest member id."""
    _, labels = connected_components(g.to_scipy(), directed=False)
    # relabel so component order follows first occurrence
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(np.argsort(first))
    return order[labels]


def largest_connected_component(g):
    """Largest component and an old-to-new id map (``-1`` for dropped nodes).

    Ties between equal-size components go to the one holding the smallest
    node id.
    """
    if g.n == 0:
        raise ValueError("graph has no nodes")
    labels = component_labels(g)
    sizes = np.bincount(labels)
    best = int(np.argmax(sizes))  # first max = smallest min-id
    members = np.flatnonzero(labels == best)
    return _subgraph(g, members)


def same_partition(a, b, n):
    """Whether ``a`` and ``b`` split ``range(n)`` the same way (either side)."""
    ma = indicator(as_node_set(a, n), n)
    mb = indicator(as_node_set(b, n), n)
    return bool(np.array_equal(ma, mb) or np.array_equal(ma, ~mb))
