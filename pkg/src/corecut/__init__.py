"""Regularized spectral clustering and CoreCut on sparse graphs."""
from corecut.graph import (
    CutStats,
    Graph,
    build_graph,
    conductance,
    cut_stats,
    induced_subgraph,
    largest_connected_component,
    same_partition,
)
from corecut.kernels import BACKEND
from corecut.regularization import (
    AVERAGE_DEGREE,
    VANILLA,
    RegularizationConfig,
    Variant,
    check_corollary_bounds,
    corecut,
)
from corecut.spectral import (
    LaplacianOperator,
    dense_spectrum,
    smallest_eigenpairs,
    spectral_partition,
    sweep_cut,
)
from corecut.dangling import enumerate_dangling, is_g_dangling
from corecut.experiments import (
    brute_force_min_conductance,
    run_overfit_experiment,
    run_recovery_experiment,
    split_edges,
)

__version__ = "0.1.0"
