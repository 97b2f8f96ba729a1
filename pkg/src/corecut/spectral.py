"""Normalized Laplacian operators, eigensolvers and sweep cuts.

All solvers work on ``M = D_tau^{-1/2} A_tau D_tau^{-1/2}``; the smallest
eigenpairs of ``L_tau = I - M`` are the largest of ``M``.

For the edge-wise regularizer the rank-one part of ``A_tau`` is applied as
``(tau/N) u (u^T x)`` with ``u = D_tau^{-1/2} 1``. Writing the correction as
``(tau/N) 1 (1^T x)`` without the degree scalings does not give ``L_tau``.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from corecut import kernels
from corecut.graph import CutStats, component_labels, conductance_from
from corecut.regularization import VANILLA, RegularizationConfig, Variant

log = logging.getLogger(__name__)

DENSE_LIMIT = 2000


class LaplacianOperator:
    """Implicit ``L_tau`` for a graph and regularization config.

    Raises:
        ValueError: a node has zero (regularized) degree, which leaves the
            normalized Laplacian undefined; take the largest component or use
            ``tau > 0``.
    """

    def __init__(self, graph, cfg=VANILLA):
        self.graph = graph
        self.tau = float(cfg.resolve(graph))
        self.variant = cfg.variant
        self.n = graph.n
        deg = graph.degrees + self.tau
        if np.any(deg <= 0):
            bad = int(np.flatnonzero(deg <= 0)[0])
            raise ValueError(
                f"node {bad} has zero degree; normalized Laplacian undefined "
                "(extract the largest component or use tau > 0)"
            )
        self.inv_sqrt_degree = 1.0 / np.sqrt(deg)
        self.matvec_count = 0

    @property
    def edge_wise(self):
        return self.variant is Variant.EDGE_WISE and self.tau > 0

    @property
    def config(self):
        return RegularizationConfig(self.tau, self.variant)

    def normalized_adjacency(self, x):
        """``M x`` in O(edges + n)."""
        g = self.graph
        self.matvec_count += 1
        x = np.ascontiguousarray(x, dtype=np.float64)
        y = kernels.scaled_matvec(g.indptr, g.indices, g.weights, self.inv_sqrt_degree, x)
        if self.edge_wise:
            u = self.inv_sqrt_degree
            y += (self.tau / self.n) * u * (u @ x)
        return y

    def matvec(self, x):
        return x - self.normalized_adjacency(x)

    __call__ = matvec

    def kernel_vector(self):
        """Unit ``D_tau^{1/2} 1``; the null vector when ``L_tau`` has one."""
        v = 1.0 / self.inv_sqrt_degree
        return v / np.linalg.norm(v)

    def dense(self):
        """Materialized ``L_tau`` (small graphs only)."""
        a = self.graph.to_dense()
        if self.edge_wise:
            a = a + self.tau / self.n
        s = self.inv_sqrt_degree
        return np.eye(self.n) - s[:, None] * a * s[None, :]


def laplacian_matvec(op, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (op.n,):
        raise ValueError(f"vector length {x.shape} does not match n={op.n}")
    return op.matvec(x)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    matvec_count: int
    iterations: int
    converged: bool
    residuals: np.ndarray

    def vector(self, i):
        """Eigenvector of the ``i``-th smallest eigenvalue (1-based)."""
        return self.eigenvectors[:, i - 1]


def _fix_signs(vectors):
    # largest-magnitude entry positive (first one on ties)
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _residuals(op, values, vectors):
    out = np.empty(len(values))
    for i, lam in enumerate(values):
        v = vectors[:, i]
        out[i] = np.linalg.norm(op.matvec(v) - lam * v)
    return out


def smallest_eigenpairs(op, k=2, tol=1e-10, max_iterations=None, seed=0):
    """The ``k`` smallest eigenpairs of ``op`` by Lanczos on ``M = I - L``.

    Full (two-pass) reorthogonalization, no restarts; the start vector is a
    seeded Gaussian. Stops once every estimated residual
    ``|beta_j * y_i[-1]|`` is below ``tol``. Reported residuals are recomputed
    explicitly. If ``max_iterations`` runs out the best Ritz pairs come back
    with ``converged=False``.
    """
    n = op.n
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if max_iterations is None:
        max_iterations = min(n, 10 * k + 300)
    max_iterations = max(min(max_iterations, n), k)
    rng = np.random.default_rng(seed)
    start_count = op.matvec_count

    basis = np.empty((max_iterations, n))
    alpha = np.empty(max_iterations)
    beta = np.empty(max_iterations)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    steps = 0
    ritz_vals = ritz_vecs = None
    done = False
    for j in range(max_iterations):
        basis[j] = q
        w = op.normalized_adjacency(q)
        alpha[j] = q @ w
        w -= alpha[j] * q
        if j > 0:
            w -= beta[j - 1] * basis[j - 1]
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
        beta[j] = np.linalg.norm(w)
        steps = j + 1
        if steps >= k:
            ritz_vals, ritz_vecs = la.eigh_tridiagonal(
                alpha[:steps], beta[: steps - 1], select="i", select_range=(steps - k, steps - 1)
            )
            est = np.abs(beta[j] * ritz_vecs[-1])
            if np.all(est <= tol) or steps == n:
                done = True
                break
        if steps == max_iterations:
            break
        if beta[j] <= 1e-12:
            # invariant subspace: continue from a fresh orthogonal direction
            w = rng.standard_normal(n)
            for _ in range(2):
                w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
            beta[j] = 0.0
            q = w / np.linalg.norm(w)
        else:
            q = w / beta[j]

    order = np.argsort(-ritz_vals)
    values = 1.0 - ritz_vals[order]
    vectors = basis[:steps].T @ ritz_vecs[:, order]
    vectors /= np.linalg.norm(vectors, axis=0)
    vectors = _fix_signs(vectors)
    residuals = _residuals(op, values, vectors)
    converged = bool(done and np.all(residuals <= tol))
    if not converged:
        log.warning("Lanczos stopped after %d iterations without reaching tol=%g", steps, tol)
    return SpectrumResult(
        values, vectors, op.matvec_count - start_count, steps, converged, residuals
    )


def _dense_block(op, members, k):
    lap = op.dense() if members is None else None
    if lap is None:
        s = op.inv_sqrt_degree[members]
        a = op.graph.to_scipy()[members][:, members].toarray()
        lap = np.eye(len(members)) - s[:, None] * a * s[None, :]
    size = lap.shape[0]
    if k is None or k >= size:
        return la.eigh(lap)
    return la.eigh(lap, subset_by_index=[0, k - 1])


def dense_spectrum(g, cfg=VANILLA, k=None, max_n=DENSE_LIMIT):
    """Eigendecomposition of the materialized ``L_tau`` (``k`` smallest or all).

    When the operator is block diagonal (vanilla or degree-only on a
    disconnected graph) each component is solved separately; eigenvectors are
    then supported on single components and equal eigenvalues (to 1e-10) are
    ordered by the component's smallest node id.
    """
    if g.n > max_n:
        raise ValueError(f"dense spectrum limited to n <= {max_n}, got {g.n}")
    op = LaplacianOperator(g, cfg)
    if op.edge_wise:
        values, vectors = _dense_block(op, None, k)
    else:
        labels = component_labels(g)
        n_comp = int(labels.max()) + 1 if g.n else 0
        if n_comp == 1:
            values, vectors = _dense_block(op, None, k)
        else:
            vals, vecs, comp, local = [], [], [], []
            for c in range(n_comp):
                members = np.flatnonzero(labels == c)
                lv, lx = _dense_block(op, members, k)
                full = np.zeros((g.n, len(lv)))
                full[members] = lx
                vals.append(lv)
                vecs.append(full)
                comp.append(np.full(len(lv), c))
                local.append(np.arange(len(lv)))
            vals = np.concatenate(vals)
            order = np.lexsort((np.concatenate(local), np.concatenate(comp), np.round(vals, 10)))
            if k is not None:
                order = order[:k]
            values = vals[order]
            vectors = np.hstack(vecs)[:, order]
    vectors = _fix_signs(np.array(vectors))
    residuals = _residuals(op, values, vectors)
    return SpectrumResult(np.asarray(values), vectors, 0, 0, True, residuals)


@dataclass
class PartitionResult:
    set: np.ndarray
    stats: CutStats
    corecut_value: float
    smaller_side_size: int
    scoring_graph: str
    score: float
    prefix_size: int
    degenerate: bool = False


def sweep_profile(g, v, tau=None):
    """Order and score of every sweep prefix.

    Nodes are sorted by ``v`` descending, ties by id ascending. Returns
    ``(order, cuts, vols, scores)`` for the ``n-1`` proper prefixes; scores are
    raw conductance, or CoreCut when ``tau`` is given.
    """
    n = g.n
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,) or n < 2:
        raise ValueError("need a length-n vector with n >= 2")
    order = np.lexsort((np.arange(n), -v))
    cuts = kernels.sweep_cuts(g.indptr, g.indices, g.weights, order)[: n - 1]
    vols = np.cumsum(g.degrees[order])[: n - 1]
    vols_c = g.total_volume - vols
    sizes = np.arange(1, n, dtype=np.float64)
    if tau:
        cut_s = cuts + tau / n * sizes * (n - sizes)
        small = np.minimum(vols + tau * sizes, vols_c + tau * (n - sizes))
    else:
        cut_s = cuts
        small = np.minimum(vols, vols_c)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(small > 0, cut_s / np.where(small > 0, small, 1.0), 1.0)
    return order, cuts, vols, scores


def sweep_cut(g, v, tau=None):
    """Minimum-score prefix of the sweep over ``v``, reported as its smaller side.

    ``tau=None`` scores raw conductance on ``g``; a number scores CoreCut, the
    conductance of the edge-wise regularized graph. A constant ``v`` returns
    the first prefix with ``degenerate=True``.
    """
    n = g.n
    order, cuts, vols, scores = sweep_profile(g, v, tau)
    degenerate = bool(np.ptp(np.asarray(v, dtype=np.float64)) == 0)
    best = 0 if degenerate else int(np.argmin(scores))
    size = best + 1
    prefix = np.sort(order[:size])
    vol = float(vols[best])
    vol_c = g.total_volume - vol
    if tau:
        use_prefix = vol + tau * size <= vol_c + tau * (n - size)
    else:
        use_prefix = vol <= vol_c
    if use_prefix:
        members = prefix
        stats = CutStats(float(cuts[best]), vol, vol_c, conductance_from(float(cuts[best]), vol, vol_c))
    else:
        members = np.sort(order[size:])
        stats = CutStats(float(cuts[best]), vol_c, vol, conductance_from(float(cuts[best]), vol_c, vol))
    corecut_value = float(scores[best]) if tau else stats.conductance
    return PartitionResult(
        members,
        stats,
        corecut_value,
        min(size, n - size),
        "regularized" if tau else "raw",
        float(scores[best]),
        size,
        degenerate,
    )


def eigengap(values, k):
    """``values[k] - values[k-1]``: gap after the ``k``-th smallest eigenvalue."""
    values = np.asarray(values)
    if not 1 <= k < len(values):
        raise ValueError(f"k must satisfy 1 <= k < {len(values)}, got {k}")
    return float(values[k] - values[k - 1])


def inverse_participation_ratio(v):
    """``sum(v_i^4)`` of a unit vector: ``1/n`` when spread evenly, 1 on a spike."""
    v = np.asarray(v, dtype=np.float64)
    if abs(np.linalg.norm(v) - 1.0) > 1e-8:
        raise ValueError("inverse participation ratio needs a unit vector")
    return float(np.sum(v**4))


def spectral_partition(g, cfg=VANILLA, scoring="raw", tol=1e-10, seed=0, max_iterations=None):
    """Sweep cut of ``v_2`` of ``L_tau`` (Lanczos, ``k=2``).

    Returns ``(PartitionResult, SpectrumResult)``. ``scoring`` is ``"raw"``
    (conductance on ``g``) or ``"regularized"`` (CoreCut with the resolved tau).
    """
    if scoring not in ("raw", "regularized"):
        raise ValueError(f"scoring must be 'raw' or 'regularized', got {scoring!r}")
    op = LaplacianOperator(g, cfg)
    spectrum = smallest_eigenpairs(op, k=2, tol=tol, max_iterations=max_iterations, seed=seed)
    tau = op.tau if scoring == "regularized" else None
    return sweep_cut(g, spectrum.vector(2), tau=tau), spectrum
