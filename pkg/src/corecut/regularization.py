"""Regularized graph view, CoreCut, and the tau-window bound checker.

Two regularizers are supported. ``EDGE_WISE`` adds ``tau/N`` to every entry of
the adjacency matrix (diagonal included), so row sums become ``d_i + tau``.
``DEGREE_ONLY`` leaves the adjacency alone and only shifts degrees by ``tau``.
"""
import enum
from dataclasses import dataclass, field

import numpy as np

from corecut.graph import as_node_set, conductance_from, cut_weight, indicator

AVERAGE_DEGREE = "average-degree"


class Variant(enum.Enum):
    EDGE_WISE = "edge-wise"
    DEGREE_ONLY = "degree-only"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"edgewise": "edge-wise", "degreeonly": "degree-only"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class RegularizationConfig:
    """``tau`` is a nonnegative number or :data:`AVERAGE_DEGREE`."""

    tau: object = AVERAGE_DEGREE
    variant: Variant = Variant.DEGREE_ONLY

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        tau = self.tau
        if isinstance(tau, str):
            if tau.strip().lower() in ("average-degree", "avg-degree", "avg"):
                object.__setattr__(self, "tau", AVERAGE_DEGREE)
                return
            try:
                tau = float(tau)
            except ValueError:
                raise ValueError(f"tau must be a number or 'avg-degree', got {self.tau!r}") from None
        tau = float(tau)
        if not np.isfinite(tau) or tau < 0:
            raise ValueError(f"tau must be finite and >= 0, got {tau}")
        object.__setattr__(self, "tau", tau)

    def resolve(self, g):
        """Numeric tau for graph ``g`` (the sentinel becomes its average degree)."""
        return average_degree(g) if self.tau == AVERAGE_DEGREE else self.tau

    def resolved(self, g):
        return RegularizationConfig(self.resolve(g), self.variant)


VANILLA = RegularizationConfig(0.0, Variant.DEGREE_ONLY)


def average_degree(g):
    if g.n < 1:
        raise ValueError("average degree of an empty graph")
    return g.total_volume / g.n


def regularized_weight(g, cfg, i, j):
    """Entry ``(i, j)`` of the regularized adjacency without densifying."""
    tau = cfg.resolve(g)
    idx, w = g.neighbors(i)
    pos = np.searchsorted(idx, j)
    base = float(w[pos]) if pos < len(idx) and idx[pos] == j else 0.0
    if cfg.variant is Variant.EDGE_WISE:
        return base + tau / g.n
    return base


def _check_tau(tau):
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")


def corecut_with_side(g, tau, s):
    """CoreCut of ``s`` and whether the complement had to be used.

    The set scored is whichever of ``s`` / ``V \\ s`` has the smaller volume in
    the regularized graph (``s`` itself on ties).
    """
    _check_tau(tau)
    members = as_node_set(s, g.n, proper=True)
    mask = indicator(members, g.n)
    n = g.n
    size = len(members)
    cut = cut_weight(g, mask)
    vol = float(g.degrees[mask].sum())
    vol_c = float(g.degrees[~mask].sum())
    if tau == 0:
        return conductance_from(cut, vol, vol_c), vol > vol_c
    cut_tau = cut + tau / n * size * (n - size)
    vol_tau = vol + tau * size
    vol_c_tau = vol_c + tau * (n - size)
    if vol_tau <= vol_c_tau:
        return cut_tau / vol_tau, False
    return cut_tau / vol_c_tau, True


def set_corecut(g, tau, mask):
    """CoreCut formula on exactly the set ``mask`` (no side switching)."""
    n = g.n
    size = int(mask.sum())
    cut = cut_weight(g, mask)
    vol = float(g.degrees[mask].sum())
    return (cut + tau / n * size * (n - size)) / (vol + tau * size)


def corecut(g, tau, s):
    """``(cut + tau/N |S||S^c|) / (vol + tau |S|)`` on the smaller regularized side."""
    return corecut_with_side(g, tau, s)[0]


def dense_regularized_adjacency(g, tau):
    """Materialized edge-wise regularized adjacency (small graphs only)."""
    return g.to_dense() + tau / g.n


def mean_degree(g, mask):
    return float(g.degrees[mask].sum()) / int(mask.sum())


@dataclass
class CorollaryCheck:
    """Outcome of :func:`check_corollary_bounds`.

    ``verified`` is ``None`` when the tau window is empty (nothing to check).
    """

    assumptions: dict
    tau_interval: tuple
    verified: object
    delta: float
    grid: np.ndarray = field(default_factory=lambda: np.zeros(0))
    periphery_corecut: np.ndarray = field(default_factory=lambda: np.zeros(0))
    core_corecut: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def assumptions_hold(self):
        return all(self.assumptions.values())


def check_corollary_bounds(g, s_eps, s, alpha, epsilon, grid_points=11):
    """Evaluate the core-vs-periphery tau window on a concrete graph.

    Checks the three assumption clauses for the peripheral set ``s_eps`` and
    core set ``s``, forms the window ``[alpha*dbar(s_eps), delta*dbar(s)]`` with
    ``delta = alpha(1-eps)/(1+alpha) - phi(s)``, and on ``grid_points`` interior
    points of the window tests the periphery lower bound, the core upper bound
    and the strict ordering ``CoreCut(s) < CoreCut(s_eps)``.
    """
    if not 0 < epsilon < 1 or alpha <= 0:
        raise ValueError("need 0 < epsilon < 1 and alpha > 0")
    n = g.n
    pe = indicator(as_node_set(s_eps, n, proper=True), n)
    pc = indicator(as_node_set(s, n, proper=True), n)
    dbar_eps = mean_degree(g, pe)
    dbar_s = mean_degree(g, pc)
    vol_eps = float(g.degrees[pe].sum())
    phi_s = set_corecut(g, 0.0, pc)
    threshold = alpha * (1 - epsilon) / (1 + alpha)
    assumptions = {
        "small_periphery": bool(pe.sum() < epsilon * n and vol_eps < epsilon * g.total_volume),
        "dense_core": bool(dbar_eps < (1 - epsilon) / (2 * (1 + alpha)) * dbar_s),
        "good_core_cut": bool(phi_s < threshold),
    }
    delta = threshold - phi_s
    lo, hi = alpha * dbar_eps, delta * dbar_s
    if delta <= 0 or lo >= hi:
        return CorollaryCheck(assumptions, (lo, hi), None, delta)
    grid = np.linspace(lo, hi, grid_points + 2)[1:-1]
    # the bounds are statements about these two sets, so no side switching
    cc_eps = np.array([set_corecut(g, t, pe) for t in grid])
    cc_s = np.array([set_corecut(g, t, pc) for t in grid])
    ok = (cc_eps > threshold) & (cc_s < phi_s + delta) & (cc_s < cc_eps)
    return CorollaryCheck(assumptions, (lo, hi), bool(ok.all()), delta, grid, cc_eps, cc_s)
