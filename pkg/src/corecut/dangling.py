"""Dangling sets: detection, enumeration and their spectral footprint.

A g-dangling set is a set of g nodes that induces a tree and is joined to the
rest of the graph by exactly one edge. The optional component clause further
requires the containing connected component to have at least ``10 g`` nodes.

Such a set is always one side of a bridge, so enumeration runs one bridge
search (Tarjan low-link DFS) and inspects both sides of every bridge.
"""
import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from corecut import kernels
from corecut.graph import as_node_set, component_labels, indicator


def _edge_counts(g, mask):
    rows = g.row_ids()
    inside = mask[rows]
    internal = int(np.count_nonzero(inside & mask[g.indices])) // 2
    crossing = int(np.count_nonzero(inside & ~mask[g.indices]))
    return internal, crossing


def is_g_dangling(g, s, size, enforce_component_clause=False):
    """Whether ``s`` is a ``size``-dangling set of ``g``.

    Edges are counted, not weighted.
    """
    members = as_node_set(s, g.n)
    if len(members) != size or size == 0:
        return False
    mask = indicator(members, g.n)
    internal, crossing = _edge_counts(g, mask)
    if internal != size - 1 or crossing != 1:
        return False
    # g-1 internal edges form a tree iff the members are connected among themselves
    sub = g.to_scipy()[members][:, members]
    if connected_components(sub, directed=False)[0] != 1:
        return False
    if enforce_component_clause:
        labels = component_labels(g)
        comp_size = int(np.count_nonzero(labels == labels[members[0]]))
        if comp_size < 10 * size:
            return False
    return True


@dataclass
class DanglingCensus:
    """Counts (and member lists) of g-dangling sets for ``g = 2..g_max``."""

    counts: dict
    n: int
    component_clause: bool
    seed: object = None
    sets: dict = field(default_factory=dict)

    def rows(self):
        return [
            {"g": g, "count": self.counts[g], "n": self.n, "seed": "" if self.seed is None else self.seed}
            for g in sorted(self.counts)
        ]

    def write_csv(self, path_or_file, header=True):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            writer = csv.DictWriter(fh, fieldnames=["g", "count", "n", "seed"], lineterminator="\n")
            if header:
                writer.writeheader()
            writer.writerows(self.rows())
        finally:
            if own:
                fh.close()


def _bridge_sides(g):
    """Both sides of every bridge: sizes and internal edge counts."""
    parent, root, size, degsum, bridge = kernels.bridge_forest(g.indptr, g.indices)
    comp_size = np.zeros(g.n, dtype=np.int64)
    comp_deg = np.zeros(g.n, dtype=np.int64)
    roots = parent < 0
    comp_size[roots] = size[roots]
    comp_deg[roots] = degsum[roots]
    children = np.flatnonzero(bridge)
    sub_size = size[children]
    # edges inside the hanging subtree: its adjacency entries minus the bridge, halved
    sub_edges = (degsum[children] - 1) // 2
    rest_size = comp_size[root[children]] - sub_size
    rest_edges = (comp_deg[root[children]] - degsum[children] - 1) // 2
    return parent, root, children, sub_size, sub_edges, rest_size, rest_edges, comp_size


def _subtree_members(g, parent, child):
    """Nodes of the DFS subtree under ``child`` (walk the child lists)."""
    members = [child]
    stack = [child]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u)[0]:
            if parent[v] == u:
                members.append(int(v))
                stack.append(int(v))
    return members


def enumerate_dangling(g, g_max, enforce_component_clause=True, seed=None, g_min=2):
    """All g-dangling sets for ``g_min <= g <= g_max``.

    Returns a :class:`DanglingCensus` whose ``sets[g]`` lists sorted member
    arrays.
    """
    if g_max < 2:
        raise ValueError("g_max must be >= 2")
    found = {size: [] for size in range(g_min, g_max + 1)}
    parent, root, children, sub_size, sub_edges, rest_size, rest_edges, comp_size = _bridge_sides(g)
    for c, s_size, s_edges, r_size, r_edges in zip(
        children.tolist(), sub_size.tolist(), sub_edges.tolist(), rest_size.tolist(), rest_edges.tolist()
    ):
        total = s_size + r_size
        for side, size, edges in (("sub", s_size, s_edges), ("rest", r_size, r_edges)):
            if not g_min <= size <= g_max or edges != size - 1:
                continue
            if enforce_component_clause and total < 10 * size:
                continue
            sub = _subtree_members(g, parent, c)
            if side == "sub":
                members = np.sort(np.asarray(sub, dtype=np.int64))
            else:
                comp = np.flatnonzero(root == root[c])
                members = np.setdiff1d(comp, sub)
            found[size].append(members)
    counts = {k: len(v) for k, v in found.items()}
    return DanglingCensus(counts, g.n, enforce_component_clause, seed, found)


def dangling_identifier(g, s):
    """Unit vector with ``sqrt(d_i / vol(S))`` on ``S`` and zero elsewhere."""
    members = as_node_set(s, g.n)
    vol = float(g.degrees[members].sum())
    if vol <= 0:
        raise ValueError("identifier needs a set with positive volume")
    f = np.zeros(g.n)
    f[members] = np.sqrt(g.degrees[members] / vol)
    return f


def count_small_eigenvalues(spectrum, threshold):
    """Eigenvalues below ``threshold``; round-off negatives count as 0."""
    values = spectrum.eigenvalues if hasattr(spectrum, "eigenvalues") else spectrum
    return int(np.count_nonzero(np.maximum(np.asarray(values), 0.0) < threshold))


def rest_volume(g, sets):
    """Volume of the complement of the union of ``sets``."""
    mask = np.ones(g.n, dtype=bool)
    for s in sets:
        mask[np.asarray(s)] = False
    return float(g.degrees[mask].sum())
