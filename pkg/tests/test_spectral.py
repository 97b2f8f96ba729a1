import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import barbell, complete, edges_graph, random_connected
from corecut.experiments import brute_force_min_conductance
from corecut.generators import plant_dangling
from corecut.graph import build_graph, conductance
from corecut.regularization import VANILLA, RegularizationConfig, Variant
from corecut.spectral import (
    LaplacianOperator,
    dense_spectrum,
    eigengap,
    inverse_participation_ratio,
    laplacian_matvec,
    smallest_eigenpairs,
    spectral_partition,
    sweep_cut,
)

CONFIGS = [
    VANILLA,
    RegularizationConfig(1.7, Variant.EDGE_WISE),
    RegularizationConfig(1.7, Variant.DEGREE_ONLY),
    RegularizationConfig("avg-degree", Variant.EDGE_WISE),
]


def reference_laplacian(g, cfg):
    """L_tau written out from its definition, independent of the operator class."""
    tau = cfg.resolve(g)
    a = g.to_dense()
    d = a.sum(axis=1) + tau
    if cfg.variant is Variant.EDGE_WISE:
        a = a + tau / g.n
    s = np.diag(1 / np.sqrt(d))
    return np.eye(g.n) - s @ a @ s


@pytest.mark.parametrize("cfg", CONFIGS)
def test_matvec_matches_dense(cfg):
    rng = np.random.default_rng(0)
    for _ in range(5):
        g = random_connected(rng, 5, 50)
        op = LaplacianOperator(g, cfg)
        ref = reference_laplacian(g, cfg)
        for _ in range(100):
            x = rng.normal(size=g.n)
            assert np.max(np.abs(laplacian_matvec(op, x) - ref @ x)) <= 1e-12


def test_vanilla_kernel():
    g = barbell()
    op = LaplacianOperator(g)
    x = np.sqrt(g.degrees)
    assert np.allclose(op.matvec(x / np.linalg.norm(x)), 0, atol=1e-14)


def test_edge_wise_kernel():
    g = barbell()
    op = LaplacianOperator(g, RegularizationConfig(2.0, Variant.EDGE_WISE))
    x = np.sqrt(g.degrees + 2.0)
    assert np.allclose(op.matvec(x), 0, atol=1e-13)


def test_zero_degree_rejected():
    g = build_graph([(0, 1)], 3)
    with pytest.raises(ValueError):
        LaplacianOperator(g)
    LaplacianOperator(g, RegularizationConfig(1.0))


def test_matvec_length_checked():
    with pytest.raises(ValueError):
        laplacian_matvec(LaplacianOperator(barbell()), np.ones(3))


@given(st.integers(0, 10_000), st.sampled_from(CONFIGS))
def test_operator_symmetric_with_spectrum_in_range(seed, cfg):
    rng = np.random.default_rng(seed)
    g = random_connected(rng, 3, 200, 0.01, 0.3)
    op = LaplacianOperator(g, cfg)
    x, y = rng.normal(size=(2, g.n))
    assert abs(x @ op.matvec(y) - op.matvec(x) @ y) <= 1e-10
    vals = np.linalg.eigvalsh(op.dense())
    assert vals.min() >= -1e-10 and vals.max() <= 2 + 1e-10


def test_k2_spectrum():
    assert np.allclose(dense_spectrum(edges_graph([(0, 1)])).eigenvalues, [0.0, 2.0], atol=1e-14)


def test_path_p3_spectrum():
    vals = dense_spectrum(edges_graph([(0, 1), (1, 2)]), k=3).eigenvalues
    assert np.allclose(vals, [0.0, 1.0, 2.0], atol=1e-14)


def test_dense_guard():
    with pytest.raises(ValueError):
        dense_spectrum(complete(5), max_n=4)


def test_lanczos_k1_kernel():
    g = barbell()
    op = LaplacianOperator(g, RegularizationConfig(1.0, Variant.EDGE_WISE))
    res = smallest_eigenpairs(op, k=1)
    assert res.converged
    assert abs(res.eigenvalues[0]) <= 1e-10
    assert abs(abs(res.vector(1) @ op.kernel_vector()) - 1) <= 1e-10


@given(st.integers(0, 10_000), st.sampled_from(CONFIGS))
def test_lanczos_matches_dense(seed, cfg):
    rng = np.random.default_rng(seed)
    g = random_connected(rng, 4, 300, 0.005, 0.1)
    res = smallest_eigenpairs(LaplacianOperator(g, cfg), k=2, seed=seed)
    ref = dense_spectrum(g, cfg, k=2)
    assert res.converged
    assert np.max(np.abs(res.eigenvalues - ref.eigenvalues)) <= 1e-8
    assert np.all(res.residuals <= 1e-9)
    assert abs(res.eigenvectors[:, 0] @ res.eigenvectors[:, 1]) <= 1e-8
    assert np.all(np.diff(res.eigenvalues) >= 0)


def test_lanczos_reproducible():
    rng = np.random.default_rng(3)
    g = random_connected(rng, 100, 100, 0.05, 0.05)
    a = smallest_eigenpairs(LaplacianOperator(g), k=2, seed=11)
    b = smallest_eigenpairs(LaplacianOperator(g), k=2, seed=11)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
    assert a.matvec_count == b.matvec_count


def test_lanczos_nonconvergence_flagged():
    rng = np.random.default_rng(4)
    g = random_connected(rng, 200, 200, 0.02, 0.02)
    res = smallest_eigenpairs(LaplacianOperator(g), k=2, max_iterations=4)
    assert not res.converged
    assert res.eigenvectors.shape == (200, 2)


def test_lanczos_needs_k_below_n():
    with pytest.raises(ValueError):
        smallest_eigenpairs(LaplacianOperator(complete(3)), k=3)


def test_barbell_sweep():
    g = barbell()
    part = sweep_cut(g, dense_spectrum(g, k=2).vector(2))
    assert part.stats.conductance == pytest.approx(1 / 7, abs=1e-15)
    assert part.set.tolist() in ([0, 1, 2], [3, 4, 5])
    members, h = brute_force_min_conductance(g)
    assert h == pytest.approx(part.stats.conductance)


def test_sweep_on_dangling_indicator(er_host):
    g, records = plant_dangling(er_host, 6, 1, seed=9)
    v = -np.ones(g.n)
    v[records[0].members] = 1.0
    part = sweep_cut(g, v)
    assert part.set.tolist() == records[0].members.tolist()
    assert part.stats.conductance == pytest.approx(1 / 11, abs=1e-12)


def test_sweep_two_nodes():
    part = sweep_cut(edges_graph([(0, 1)]), np.array([0.3, -0.1]))
    assert part.smaller_side_size == 1 and part.stats.conductance == 1.0


def test_sweep_constant_vector_degenerate():
    part = sweep_cut(barbell(), np.ones(6))
    assert part.degenerate and part.prefix_size == 1


def test_sweep_ties_by_id():
    g = barbell()
    v = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    assert sweep_cut(g, v).set.tolist() == [0, 1, 2]


@given(st.integers(0, 10_000))
def test_sweep_matches_prefix_recount(seed):
    rng = np.random.default_rng(seed)
    g = random_connected(rng, 3, 30)
    v = rng.normal(size=g.n)
    part = sweep_cut(g, v)
    order = np.lexsort((np.arange(g.n), -v))
    best = min(conductance(g, order[: k + 1]) for k in range(g.n - 1))
    assert part.stats.conductance == pytest.approx(best, abs=1e-12)
    assert conductance(g, part.set) == pytest.approx(best, abs=1e-12)
    assert part.smaller_side_size == min(len(part.set), g.n - len(part.set))


def test_sweep_regularized_scoring():
    g = barbell()
    part = sweep_cut(g, dense_spectrum(g, k=2).vector(2), tau=2.0)
    assert part.scoring_graph == "regularized"
    assert part.score == pytest.approx(part.corecut_value)


def test_eigengap():
    assert eigengap([0, 0.1, 0.5], 2) == pytest.approx(0.4)
    vals = dense_spectrum(barbell()).eigenvalues
    assert eigengap(vals, 1) == pytest.approx(vals[1])
    with pytest.raises(ValueError):
        eigengap([0, 1], 2)


def test_ipr():
    assert inverse_participation_ratio(np.full(100, 0.1)) == pytest.approx(0.01)
    assert inverse_participation_ratio(np.eye(5)[2]) == 1.0
    with pytest.raises(ValueError):
        inverse_participation_ratio(np.ones(3))


def test_spectral_partition_scoring_switch():
    g = barbell()
    raw, _ = spectral_partition(g, RegularizationConfig(1.0), scoring="raw")
    reg, _ = spectral_partition(g, RegularizationConfig(1.0), scoring="regularized")
    assert raw.scoring_graph == "raw" and reg.scoring_graph == "regularized"
    with pytest.raises(ValueError):
        spectral_partition(g, scoring="both")


def test_dense_disconnected_blocks_ordered():
    g = build_graph([(0, 1), (2, 3), (3, 4), (2, 4)], 5)
    res = dense_spectrum(g)
    assert np.allclose(res.eigenvalues[:2], 0)
    assert np.all(res.vector(1)[2:] == 0) and np.all(res.vector(2)[:2] == 0)
