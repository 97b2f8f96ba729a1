"""Held-out-edge overfitting protocol, block recovery study, brute-force oracles."""
import csv
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from corecut import kernels
from corecut.generators import core_periphery_instance, rng_for
from corecut.graph import (
    as_node_set,
    build_graph,
    cut_stats,
    induced_subgraph,
    largest_connected_component,
    same_partition,
)
from corecut.regularization import VANILLA, RegularizationConfig, Variant, corecut
from corecut.spectral import (
    dense_spectrum,
    eigengap,
    inverse_participation_ratio,
    spectral_partition,
)

STREAM_SPLIT = 4
BRUTE_FORCE_LIMIT = 20

REPORT_COLUMNS = (
    "method",
    "seed",
    "n_train",
    "smaller_side_size",
    "train_conductance",
    "test_conductance",
    "catastrophic",
    "matvec_count",
    "wall_time_ms",
    "tau",
)


@dataclass
class EdgeSplit:
    """Random exact split of the undirected edges.

    ``train`` is the largest component of the kept edges; ``train_nodes[k]``
    is the original id of train node ``k``. Edge arrays hold ``(i, j, w)``
    rows in original ids.
    """

    train: object
    train_nodes: np.ndarray
    train_edges: np.ndarray
    test_edges: np.ndarray
    seed: object
    kept_fraction: float
    n: int

    def test_graph(self):
        """Test edges among train nodes, relabelled to train ids (no trimming)."""
        to_train = np.full(self.n, -1, dtype=np.int64)
        to_train[self.train_nodes] = np.arange(len(self.train_nodes))
        i = to_train[self.test_edges[:, 0].astype(np.int64)]
        j = to_train[self.test_edges[:, 1].astype(np.int64)]
        keep = (i >= 0) & (j >= 0)
        edges = np.column_stack([i[keep], j[keep], self.test_edges[keep, 2]])
        return build_graph(edges, len(self.train_nodes), symmetrize=False)


def split_edges(g, fraction=0.5, seed=0):
    """Keep a uniformly random ``round(fraction * m)`` of the edges for training."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    src, dst, w = g.edge_array()
    edges = np.column_stack([src, dst, w])
    m = len(edges)
    perm = rng_for(seed, STREAM_SPLIT).permutation(m)
    n_train = int(round(fraction * m))
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    kept = build_graph(edges[train_idx], g.n, symmetrize=False)
    if kept.n_edges == 0:
        raise ValueError("training graph has no edges")
    train, old_to_new = largest_connected_component(kept)
    train_nodes = np.flatnonzero(old_to_new >= 0)
    return EdgeSplit(train, train_nodes, edges[train_idx], edges[test_idx], seed, fraction, g.n)


def brute_force_min_conductance(g, tau=None):
    """Exact minimum conductance (or CoreCut with ``tau``) over all proper sets.

    Scans ``2^(n-1)`` subsets, one per partition. The returned set is the
    smaller-volume side of the minimizer; ties go to the lexicographically
    smallest member list.
    """
    n = g.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got {n}")
    if n < 2:
        raise ValueError("need at least two nodes")
    cut, vol = kernels.subset_cut_volume(g.indptr, g.indices, g.weights, g.degrees)
    masks = np.arange(len(cut), dtype=np.int64)
    size = np.zeros(len(cut))
    for b in range(n - 1):
        size += (masks >> b) & 1
    vol_c = g.total_volume - vol
    if tau:
        cut = cut + tau / n * size * (n - size)
        vol = vol + tau * size
        vol_c = vol_c + tau * (n - size)
    small = np.minimum(vol, vol_c)
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(small > 0, cut / np.where(small > 0, small, 1.0), 1.0)
    score[0] = np.inf  # empty set
    best = score.min()
    ties = np.flatnonzero(score <= best + 1e-12 * max(best, 1.0))
    candidates = []
    nodes = np.arange(n)
    for mask in ties.tolist():
        inside = ((mask >> nodes) & 1).astype(bool)
        a, b = nodes[inside], nodes[~inside]
        if vol[mask] < vol_c[mask]:
            candidates.append(a.tolist())
        elif vol[mask] > vol_c[mask]:
            candidates.append(b.tolist())
        else:
            candidates.append(min(a.tolist(), b.tolist()))
    return np.asarray(min(candidates), dtype=np.int64), float(best)


@dataclass
class ExperimentReport:
    method: str
    seed: object
    n_train: int
    smaller_side_size: int
    train_conductance: float
    test_conductance: float
    catastrophic: bool
    matvec_count: int
    wall_time_ms: float
    tau: float
    converged: bool = True
    members: np.ndarray = field(default=None, repr=False)
    variants_agree: object = None

    def row(self):
        return {k: getattr(self, k) for k in REPORT_COLUMNS}


def write_reports(reports, path_or_file):
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.DictWriter(fh, fieldnames=list(REPORT_COLUMNS), lineterminator="\n")
        writer.writeheader()
        for r in reports:
            row = r.row()
            row["catastrophic"] = int(bool(row["catastrophic"]))
            for key in ("train_conductance", "test_conductance", "wall_time_ms", "tau"):
                row[key] = f"{float(row[key]):.12g}"
            writer.writerow(row)
    finally:
        if own:
            fh.close()


def _report(method, split, test, partition, spectrum, wall, tau, seed):
    members = partition.set
    test_phi = cut_stats(test, members).conductance
    return ExperimentReport(
        method=method,
        seed=seed,
        n_train=split.train.n,
        smaller_side_size=int(partition.smaller_side_size),
        train_conductance=float(partition.stats.conductance),
        test_conductance=float(test_phi),
        catastrophic=bool(test_phi >= 1.0),
        matvec_count=int(spectrum.matvec_count),
        wall_time_ms=wall,
        tau=float(tau),
        converged=spectrum.converged,
        members=members,
    )


def run_overfit_experiment(g, cfg=None, seed=0, fraction=0.5, scoring="raw", tol=1e-10,
                           max_iterations=None, timings=True):
    """Held-out-edge comparison of vanilla and regularized spectral clustering.

    Half the edges (by default) train; on the train graph's largest component
    both methods sweep their second eigenvector, scored on the raw train graph
    unless ``scoring="regularized"``. Both partitions are then scored on the
    held-out edges. Tau is resolved on the train graph. The regularized report
    records in ``variants_agree`` whether the edge-wise and degree-only
    regularizers gave the same node set.

    Returns ``(vanilla_report, regularized_report)``. Solver non-convergence is
    not an error; it shows up as ``converged=False``.
    """
    cfg = cfg or RegularizationConfig()
    if not g.is_connected():
        g = largest_connected_component(g)[0]
    split = split_edges(g, fraction, seed)
    train = split.train
    test = split.test_graph()
    tau = cfg.resolve(train)
    clock = time.perf_counter if timings else (lambda: 0.0)

    t0 = clock()
    part_v, spec_v = spectral_partition(train, VANILLA, "raw", tol, seed, max_iterations)
    t1 = clock()
    reg_cfg = RegularizationConfig(tau, cfg.variant)
    part_r, spec_r = spectral_partition(train, reg_cfg, scoring, tol, seed, max_iterations)
    t2 = clock()

    other = Variant.DEGREE_ONLY if cfg.variant is Variant.EDGE_WISE else Variant.EDGE_WISE
    part_o, _ = spectral_partition(train, RegularizationConfig(tau, other), scoring, tol, seed, max_iterations)

    vanilla = _report("vanilla", split, test, part_v, spec_v, (t1 - t0) * 1e3, 0.0, seed)
    regularized = _report("regularized", split, test, part_r, spec_r, (t2 - t1) * 1e3, tau, seed)
    regularized.variants_agree = same_partition(part_r.set, part_o.set, train.n)
    return vanilla, regularized


def kmeans(x, k, restarts=20, seed=0, max_iter=300):
    """Lloyd's algorithm with k-means++ starts; best of ``restarts`` by inertia."""
    x = np.asarray(x, dtype=np.float64)
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = np.empty((k, x.shape[1]))
        centers[0] = x[rng.integers(len(x))]
        d2 = np.sum((x - centers[0]) ** 2, axis=1)
        for c in range(1, k):
            total = d2.sum()
            idx = rng.choice(len(x), p=d2 / total) if total > 0 else rng.integers(len(x))
            centers[c] = x[idx]
            d2 = np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1))
        labels = None
        for _ in range(max_iter):
            dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new = dist.argmin(axis=1)
            if labels is not None and np.array_equal(new, labels):
                break
            labels = new
            for c in range(k):
                pts = x[labels == c]
                if len(pts):
                    centers[c] = pts.mean(axis=0)
        inertia = float(((x - centers[labels]) ** 2).sum())
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels, best_inertia


def adjusted_rand_index(a, b):
    _, a = np.unique(a, return_inverse=True)
    _, b = np.unique(b, return_inverse=True)
    table = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(table, (a, b), 1)
    comb = lambda x: x * (x - 1) / 2.0
    index = comb(table).sum()
    rows = comb(table.sum(axis=1)).sum()
    cols = comb(table.sum(axis=0)).sum()
    expected = rows * cols / comb(len(a))
    top = (rows + cols) / 2.0
    if top == expected:
        return 1.0
    return float((index - expected) / (top - expected))


@dataclass
class RecoveryResult:
    ari_vanilla: float
    ari_regularized: float
    ipr_vanilla: list
    ipr_regularized: list
    eigengap_vanilla: float
    eigengap_regularized: float
    eigenvalues_vanilla: list
    eigenvalues_regularized: list
    tau: float
    n_analyzed: int
    isolated_dropped: int
    variants_agree: object = None
    seed: object = None

    def to_dict(self):
        return asdict(self)


def run_recovery_experiment(core, periphery_n=100, periphery_avg_degree=3.0, cross_expected_degree=0.002,
                            cfg=None, seed=0, k=4, restarts=20, check_variants=True, max_n=5000):
    """Recover the planted core blocks from the ``k`` leading eigenvectors.

    Isolated nodes are dropped first (the vanilla Laplacian is undefined on
    them); both methods then use the same graph. Core rows of the eigenvector
    matrix are clustered with :func:`kmeans` and scored by adjusted Rand index
    against the planted labels. With ``check_variants`` the edge-wise and
    degree-only sweep partitions of ``v_2`` are compared on the largest
    component.
    """
    cfg = cfg or RegularizationConfig()
    graph, labels, _ = core_periphery_instance(
        core, periphery_n, periphery_avg_degree, cross_expected_degree, seed
    )
    keep = np.flatnonzero(graph.degrees > 0)
    sub = induced_subgraph(graph, keep)
    sub_labels = labels[keep]
    core_rows = sub_labels >= 0
    tau = cfg.resolve(sub)
    reg_cfg = RegularizationConfig(tau, cfg.variant)

    vanilla = dense_spectrum(sub, VANILLA, k=k + 1, max_n=max_n)
    regular = dense_spectrum(sub, reg_cfg, k=k + 1, max_n=max_n)

    def ari(spectrum):
        x = spectrum.eigenvectors[core_rows, :k]
        pred, _ = kmeans(x, k, restarts=restarts, seed=seed)
        return adjusted_rand_index(sub_labels[core_rows], pred)

    agree = None
    if check_variants:
        lcc = largest_connected_component(sub)[0]
        a, _ = spectral_partition(lcc, RegularizationConfig(tau, Variant.EDGE_WISE), seed=seed)
        b, _ = spectral_partition(lcc, RegularizationConfig(tau, Variant.DEGREE_ONLY), seed=seed)
        agree = same_partition(a.set, b.set, lcc.n)

    return RecoveryResult(
        ari_vanilla=ari(vanilla),
        ari_regularized=ari(regular),
        ipr_vanilla=[inverse_participation_ratio(vanilla.vector(i)) for i in range(1, k + 1)],
        ipr_regularized=[inverse_participation_ratio(regular.vector(i)) for i in range(1, k + 1)],
        eigengap_vanilla=eigengap(vanilla.eigenvalues, k),
        eigengap_regularized=eigengap(regular.eigenvalues, k),
        eigenvalues_vanilla=vanilla.eigenvalues.tolist(),
        eigenvalues_regularized=regular.eigenvalues.tolist(),
        tau=float(tau),
        n_analyzed=sub.n,
        isolated_dropped=int(graph.n - sub.n),
        variants_agree=agree,
        seed=seed,
    )


def corecut_table(g, sets, tau, names=None):
    """Raw conductance next to CoreCut for each set (one dict per set)."""
    rows = []
    for idx, s in enumerate(sets):
        members = as_node_set(s, g.n, proper=True)
        rows.append(
            {
                "set": names[idx] if names else f"S{idx + 1}",
                "size": len(members),
                "conductance": cut_stats(g, members).conductance,
                "corecut": corecut(g, tau, members),
                "tau": tau,
            }
        )
    return rows
