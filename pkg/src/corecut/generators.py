"""Seeded random graph models and dangling-set planting.

Randomness comes from numpy's PCG64. Each sub-model draws from its own child
stream ``SeedSequence(seed, spawn_key=(stream,))`` so that, for example,
changing the periphery does not perturb the core sample. Stream ids are the
``STREAM_*`` constants below.
"""
import heapq
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from corecut.graph import build_graph, component_labels

STREAM_CORE = 0
STREAM_PERIPHERY = 1
STREAM_CROSS = 2
STREAM_DANGLING = 3

_CHUNK = 1 << 22


def rng_for(seed, stream=0):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


@dataclass(frozen=True)
class BlockProbabilities:
    sizes: tuple
    matrix: tuple

    def labels(self):
        return np.repeat(np.arange(len(self.sizes)), self.sizes)


@dataclass
class InhomogeneousSpec:
    """Independent-edge random graph on ``n`` nodes.

    ``probability`` is a scalar (Erdos-Renyi), an ``(n, n)`` symmetric matrix
    with zero diagonal, or a :class:`BlockProbabilities`. ``floor`` and the
    peripheral parameters only feed :meth:`validate`; sampling ignores them.
    """

    n: int
    probability: object
    floor: float = None
    peripheral_fraction: float = None
    peripheral_bound: float = None

    def rows(self, lo, hi):
        """Dense probability rows ``lo:hi`` (columns ``lo:n``)."""
        p = self.probability
        if np.isscalar(p):
            return np.full((hi - lo, self.n - lo), float(p))
        if isinstance(p, BlockProbabilities):
            z = p.labels()
            b = np.asarray(p.matrix, dtype=np.float64)
            return b[np.ix_(z[lo:hi], z[lo:])]
        return np.asarray(p, dtype=np.float64)[lo:hi, lo:]

    def validate(self):
        p = self.probability
        if isinstance(p, BlockProbabilities):
            b = np.asarray(p.matrix, dtype=np.float64)
            if sum(p.sizes) != self.n or b.shape != (len(p.sizes),) * 2:
                raise ValueError("block sizes / matrix do not match n")
            if not np.allclose(b, b.T):
                raise ValueError("block matrix must be symmetric")
            lo, hi = b.min(), b.max()
        elif np.isscalar(p):
            lo = hi = float(p)
        else:
            full = np.asarray(p, dtype=np.float64)
            if full.shape != (self.n, self.n):
                raise ValueError("probability matrix must be n x n")
            if not np.allclose(full, full.T) or np.any(np.diag(full) != 0):
                raise ValueError("probability matrix must be symmetric with zero diagonal")
            off = full[~np.eye(self.n, dtype=bool)]
            lo, hi = (off.min(), off.max()) if off.size else (0.0, 0.0)
        if lo < 0 or hi > 1 or not np.isfinite(hi):
            raise ValueError("edge probabilities must lie in [0, 1]")
        if self.floor is not None and lo <= self.floor:
            raise ValueError(f"probabilities must exceed the floor {self.floor}")
        if self.peripheral_bound is not None and self.peripheral_fraction is not None:
            frac = float(np.mean(self.peripheral_nodes()))
            if frac <= self.peripheral_fraction:
                raise ValueError(
                    f"peripheral fraction {frac:.3f} does not exceed {self.peripheral_fraction}"
                )

    def peripheral_nodes(self):
        """Mask of nodes whose every edge probability is below ``b/N``."""
        bound = self.peripheral_bound / self.n
        peripheral = np.zeros(self.n, dtype=bool)
        step = max(1, _CHUNK // max(self.n, 1))
        for lo in range(0, self.n, step):
            hi = min(lo + step, self.n)
            rows = self._full_rows(lo, hi)
            rows[np.arange(hi - lo), np.arange(lo, hi)] = 0.0
            peripheral[lo:hi] = rows.max(axis=1) < bound
        return peripheral

    def _full_rows(self, lo, hi):
        p = self.probability
        if np.isscalar(p):
            return np.full((hi - lo, self.n), float(p))
        if isinstance(p, BlockProbabilities):
            z = p.labels()
            return np.asarray(p.matrix, dtype=np.float64)[np.ix_(z[lo:hi], z)]
        return np.array(np.asarray(p, dtype=np.float64)[lo:hi])


def _sample_upper(n, rows, rng):
    """Bernoulli-sample every pair ``i < j``; ``rows(lo, hi)`` gives ``P[lo:hi, lo:]``."""
    src, dst = [], []
    lo = 0
    while lo < n:
        step = max(1, _CHUNK // max(n - lo, 1))
        hi = min(n, lo + step)
        p = rows(lo, hi)
        u = rng.random(p.shape)
        cols = np.arange(lo, n)
        hit = (u < p) & (cols[None, :] > np.arange(lo, hi)[:, None])
        r, c = np.nonzero(hit)
        src.append(r + lo)
        dst.append(c + lo)
        lo = hi
    if not src:
        return np.zeros((0, 2), dtype=np.int64)
    return np.column_stack([np.concatenate(src), np.concatenate(dst)])


def _graph_from_pairs(pairs, n):
    edges = np.column_stack([pairs, np.ones(len(pairs))]) if len(pairs) else np.zeros((0, 3))
    return build_graph(edges, n, symmetrize=False)


def sample_inhomogeneous(spec, seed, stream=STREAM_CORE):
    """Sample every unordered pair independently with probability ``p_ij``."""
    spec.validate()
    pairs = _sample_upper(spec.n, spec.rows, rng_for(seed, stream))
    return _graph_from_pairs(pairs, spec.n)


def erdos_renyi(n, p, seed, stream=STREAM_CORE):
    return sample_inhomogeneous(InhomogeneousSpec(n, float(p)), seed, stream)


@dataclass
class DcSbmSpec:
    """Degree-corrected block model: ``P_ij = scale * theta_i theta_j B[z_i, z_j]``.

    With ``target_average_degree`` set, ``scale`` makes the expected average
    degree equal the target; otherwise ``scale = 1``.
    """

    block_sizes: tuple
    block_matrix: tuple
    theta: tuple = None
    target_average_degree: float = None

    @property
    def n(self):
        return int(sum(self.block_sizes))

    def labels(self):
        return np.repeat(np.arange(len(self.block_sizes)), self.block_sizes)

    def theta_array(self):
        if self.theta is None:
            return np.ones(self.n)
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.shape != (self.n,) or np.any(theta < 0):
            raise ValueError("theta must hold one nonnegative value per node")
        return theta

    def scale(self):
        b = np.asarray(self.block_matrix, dtype=np.float64)
        if self.target_average_degree is None:
            return 1.0
        theta = self.theta_array()
        z = self.labels()
        mass = np.bincount(z, weights=theta, minlength=len(self.block_sizes))
        sq = np.bincount(z, weights=theta**2, minlength=len(self.block_sizes))
        expected_sum = mass @ b @ mass - sq @ np.diag(b)
        if expected_sum <= 0:
            raise ValueError("block model has no edges to rescale")
        return self.target_average_degree * self.n / expected_sum

    def validate(self):
        b = np.asarray(self.block_matrix, dtype=np.float64)
        k = len(self.block_sizes)
        if b.shape != (k, k) or not np.allclose(b, b.T) or np.any(b < 0):
            raise ValueError("block matrix must be a symmetric nonnegative K x K matrix")
        if any(int(s) <= 0 for s in self.block_sizes):
            raise ValueError("block sizes must be positive")
        theta = self.theta_array()
        pmax = self.scale() * theta.max() ** 2 * b.max()
        if pmax > 1:
            raise ValueError(f"edge probability {pmax:.3f} exceeds 1 after rescaling")

    def rows(self, lo, hi):
        b = np.asarray(self.block_matrix, dtype=np.float64) * self.scale()
        z = self.labels()
        theta = self.theta_array()
        p = theta[lo:hi, None] * theta[None, lo:] * b[np.ix_(z[lo:hi], z[lo:])]
        return np.minimum(p, 1.0)

    def to_dict(self):
        d = asdict(self)
        d["block_sizes"] = [int(s) for s in self.block_sizes]
        d["block_matrix"] = [list(map(float, row)) for row in self.block_matrix]
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(d["block_sizes"]),
            tuple(tuple(r) for r in d["block_matrix"]),
            None if d.get("theta") is None else tuple(d["theta"]),
            d.get("target_average_degree"),
        )


def planted_partition(n_blocks, block_size, within, between, **kwargs):
    b = np.full((n_blocks, n_blocks), float(between))
    np.fill_diagonal(b, within)
    return DcSbmSpec((block_size,) * n_blocks, tuple(map(tuple, b)), **kwargs)


def sample_dcsbm(spec, seed, stream=STREAM_CORE):
    """Sample a DC-SBM graph. Returns ``(graph, block_labels)``."""
    spec.validate()
    pairs = _sample_upper(spec.n, spec.rows, rng_for(seed, stream))
    return _graph_from_pairs(pairs, spec.n), spec.labels()


@dataclass
class CorePeripherySpec:
    core: DcSbmSpec
    periphery_n: int = 100
    periphery_avg_degree: float = 3.0
    cross_expected_degree: float = 0.002

    def to_dict(self):
        return {
            "core": self.core.to_dict(),
            "periphery_n": self.periphery_n,
            "periphery_avg_degree": self.periphery_avg_degree,
            "cross_expected_degree": self.cross_expected_degree,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            DcSbmSpec.from_dict(d["core"]),
            int(d.get("periphery_n", 100)),
            float(d.get("periphery_avg_degree", 3.0)),
            float(d.get("cross_expected_degree", 0.002)),
        )


def desk_scale_core(n=2000, avg_degree=25.0):
    """Four equal blocks, ``B`` with 0.8 on the diagonal and 0.2 off it."""
    return planted_partition(4, n // 4, 0.8, 0.2, target_average_degree=avg_degree)


def core_periphery_instance(core, periphery_n, periphery_avg_degree, cross_expected_degree, seed):
    """DC-SBM core plus an Erdos-Renyi periphery joined by sparse cross edges.

    Core nodes are ``0..n_core-1`` and periphery nodes follow. Each
    core/periphery pair is linked with probability
    ``cross_expected_degree / n_core``, so a periphery node's expected number
    of core neighbours is ``cross_expected_degree``.

    Returns ``(graph, labels, periphery_ids)`` with label ``-1`` on the
    periphery.
    """
    if periphery_n < 0 or periphery_avg_degree < 0 or cross_expected_degree < 0:
        raise ValueError("periphery size and rates must be nonnegative")
    core.validate()
    n_core = core.n
    n = n_core + periphery_n
    core_pairs = _sample_upper(n_core, core.rows, rng_for(seed, STREAM_CORE))
    parts = [core_pairs]
    if periphery_n > 1:
        p = periphery_avg_degree / (periphery_n - 1)
        if p > 1:
            raise ValueError("periphery average degree too large for its size")
        per = _sample_upper(
            periphery_n, lambda lo, hi: np.full((hi - lo, periphery_n - lo), p),
            rng_for(seed, STREAM_PERIPHERY),
        )
        parts.append(per + n_core)
    if periphery_n and cross_expected_degree > 0:
        pc = cross_expected_degree / n_core
        if pc > 1:
            raise ValueError("cross degree too large")
        hit = rng_for(seed, STREAM_CROSS).random((periphery_n, n_core)) < pc
        r, c = np.nonzero(hit)
        parts.append(np.column_stack([c, r + n_core]))
    pairs = np.vstack([q.reshape(-1, 2) for q in parts]).astype(np.int64)
    labels = np.concatenate([core.labels(), np.full(periphery_n, -1)])
    return _graph_from_pairs(pairs, n), labels, np.arange(n_core, n)


def core_periphery_from_spec(spec, seed):
    return core_periphery_instance(
        spec.core, spec.periphery_n, spec.periphery_avg_degree, spec.cross_expected_degree, seed
    )


def prufer_to_edges(sequence, g):
    """Edges of the labelled tree on ``0..g-1`` encoded by a Prufer sequence."""
    if g == 1:
        return []
    if g == 2:
        return [(0, 1)]
    degree = [1] * g
    for x in sequence:
        degree[x] += 1
    leaves = [i for i in range(g) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in sequence:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def random_tree(g, rng):
    seq = rng.integers(0, g, size=max(g - 2, 0)).tolist()
    return prufer_to_edges(seq, g)


@dataclass
class DanglingRecord:
    g: int
    members: np.ndarray
    attach_node: int
    bridge_edge: tuple = field(default=None)


def plant_dangling(host, g, count, seed):
    """Attach ``count`` uniformly random labelled trees on ``g`` fresh nodes.

    Each tree hangs by one edge from a uniformly random node of the host's
    largest component (which must have at least ``10 g`` nodes) through a
    uniformly random tree node. New nodes are numbered after the host's.

    Returns ``(graph, records)``.
    """
    if g < 1 or count < 0:
        raise ValueError("need g >= 1 and count >= 0")
    if count == 0:
        return host, []
    labels = component_labels(host)
    sizes = np.bincount(labels)
    best = int(np.argmax(sizes))
    if sizes[best] < 10 * g:
        raise ValueError(f"host largest component has {sizes[best]} < {10 * g} nodes")
    anchors = np.flatnonzero(labels == best)
    rng = rng_for(seed, STREAM_DANGLING)
    src, dst, w = host.edge_array()
    new_edges = [np.column_stack([src, dst, w])]
    records = []
    base = host.n
    for t in range(count):
        offset = base + t * g
        tree = np.array(random_tree(g, rng), dtype=np.int64).reshape(-1, 2) + offset
        attach = int(anchors[rng.integers(len(anchors))])
        inner = offset + int(rng.integers(g))
        new_edges.append(np.column_stack([tree, np.ones(len(tree))]))
        new_edges.append(np.array([[inner, attach, 1.0]]))
        records.append(DanglingRecord(g, np.arange(offset, offset + g), attach, (inner, attach)))
    n = base + count * g
    graph = build_graph(np.vstack(new_edges), n, symmetrize=False)
    return graph, records


def small_core_periphery(seed, block_size=100, within=0.3, between=0.01, n_sets=5, set_size=5):
    """Two dense blocks plus ``n_sets`` small trees, each hanging by one edge.

    A toy core-periphery graph for CoreCut comparisons. Returns
    ``(graph, blocks, peripheral_sets)`` with node ids as lists.
    """
    core, _ = sample_dcsbm(planted_partition(2, block_size, within, between), seed)
    if not core.is_connected():
        raise ValueError("core sample is disconnected; use denser blocks")
    g, records = plant_dangling(core, set_size, n_sets, seed)
    left, right = list(range(block_size)), list(range(block_size, 2 * block_size))
    return g, [left, right], [rec.members.tolist() for rec in records]


def write_edge_list(g, path, header=None):
    """SNAP-style edge list: ``#`` comments, then one ``i<TAB>j`` per undirected edge."""
    src, dst, w = g.edge_array()
    with open(path, "w") as fh:
        fh.write(f"# nodes: {g.n} edges: {g.n_edges}\n")
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        weighted = np.any(w != 1.0)
        for i, j, x in zip(src.tolist(), dst.tolist(), w.tolist()):
            fh.write(f"{i}\t{j}\t{x:.17g}\n" if weighted else f"{i}\t{j}\n")


def load_spec(path):
    with open(path) as fh:
        return json.load(fh)


__all__ = [
    "BlockProbabilities",
    "CorePeripherySpec",
    "DanglingRecord",
    "DcSbmSpec",
    "InhomogeneousSpec",
    "core_periphery_instance",
    "desk_scale_core",
    "erdos_renyi",
    "plant_dangling",
    "planted_partition",
    "sample_dcsbm",
    "sample_inhomogeneous",
]
