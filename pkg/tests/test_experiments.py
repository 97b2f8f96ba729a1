import io
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import barbell, complete, random_connected
from corecut.experiments import (
    REPORT_COLUMNS,
    adjusted_rand_index,
    brute_force_min_conductance,
    corecut_table,
    kmeans,
    run_overfit_experiment,
    run_recovery_experiment,
    split_edges,
    write_reports,
)
from corecut.generators import (
    core_periphery_instance,
    desk_scale_core,
    erdos_renyi,
    plant_dangling,
    random_tree,
    small_core_periphery,
)
from corecut.graph import build_graph, largest_connected_component
from corecut.regularization import corecut
from corecut.spectral import dense_spectrum, sweep_cut


def edge_multiset(rows):
    return sorted((int(min(i, j)), int(max(i, j)), float(w)) for i, j, w in rows)


def test_split_exact_half():
    g = erdos_renyi(60, 0.2, seed=1)
    g = build_graph(np.array(g.edge_list()[:100]), 60)
    split = split_edges(g, 0.5, seed=3)
    assert len(split.train_edges) == 50 and len(split.test_edges) == 50


def test_split_deterministic_and_conserving():
    g = erdos_renyi(200, 0.05, seed=2)
    a, b = split_edges(g, 0.5, seed=9), split_edges(g, 0.5, seed=9)
    assert np.array_equal(a.train_edges, b.train_edges)
    assert edge_multiset(np.vstack([a.train_edges, a.test_edges])) == edge_multiset(g.edge_list())
    assert not np.array_equal(a.train_edges, split_edges(g, 0.5, seed=10).train_edges)


def test_split_tree_shatters():
    rng = np.random.default_rng(0)
    tree = build_graph(np.array(random_tree(200, rng)), 200)
    assert split_edges(tree, 0.5, seed=1).train.n < 200


def test_split_rejects_bad_fraction():
    with pytest.raises(ValueError):
        split_edges(barbell(), 1.0)


def test_test_graph_restricted_to_train_nodes():
    g = erdos_renyi(300, 0.01, seed=4)
    split = split_edges(g, 0.5, seed=0)
    test = split.test_graph()
    assert test.n == split.train.n
    inside = np.isin(split.test_edges[:, 0], split.train_nodes) & np.isin(split.test_edges[:, 1], split.train_nodes)
    assert test.n_edges == int(inside.sum())


def test_brute_barbell():
    s, h = brute_force_min_conductance(barbell())
    assert s.tolist() == [0, 1, 2] and h == pytest.approx(1 / 7)


def test_brute_k4():
    s, h = brute_force_min_conductance(complete(4))
    assert h == pytest.approx(2 / 3) and s.tolist() == [0, 1]


def test_brute_guard():
    with pytest.raises(ValueError):
        brute_force_min_conductance(complete(21))


def test_brute_large_tau_balances():
    g = random_connected(np.random.default_rng(5), 9, 9)
    s, _ = brute_force_min_conductance(g, tau=1e9)
    assert len(s) in (g.n // 2, g.n - g.n // 2)


def exhaustive(g, tau=None):
    best = np.inf
    for size in range(1, g.n):
        for s in itertools.combinations(range(g.n), size):
            best = min(best, corecut(g, tau or 0.0, list(s)))
    return best


@given(st.integers(0, 10_000), st.sampled_from([None, 0.5, 3.0]))
def test_brute_matches_exhaustive(seed, tau):
    g = random_connected(np.random.default_rng(seed), 3, 9)
    s, h = brute_force_min_conductance(g, tau)
    assert h == pytest.approx(exhaustive(g, tau), abs=1e-12)
    assert corecut(g, tau or 0.0, s) == pytest.approx(h, abs=1e-12)


@given(st.integers(0, 10_000))
def test_cheeger_and_sweep_above_optimum(seed):
    g = random_connected(np.random.default_rng(seed), 3, 14)
    _, h = brute_force_min_conductance(g)
    spec = dense_spectrum(g, k=2)
    lam2 = spec.eigenvalues[1]
    assert h**2 / 2 <= lam2 + 1e-12
    assert lam2 <= 2 * h + 1e-12
    assert sweep_cut(g, spec.vector(2)).stats.conductance >= h - 1e-12


def overfit_graph(seed, core_n=800):
    g, _, _ = core_periphery_instance(desk_scale_core(core_n, 20), 60, 3.0, 0.002, seed)
    g, _ = plant_dangling(g, 4, 12, seed)
    return largest_connected_component(g)[0]


def test_overfit_reports():
    g = overfit_graph(0)
    van, reg = run_overfit_experiment(g, seed=0, timings=False)
    assert van.method == "vanilla" and reg.method == "regularized"
    assert van.tau == 0.0 and reg.tau > 0
    assert van.n_train == reg.n_train
    assert van.train_conductance <= reg.train_conductance
    assert reg.variants_agree in (True, False)
    assert van.wall_time_ms == 0 and reg.wall_time_ms == 0
    assert van.catastrophic == (van.test_conductance >= 1.0)


def test_overfit_reproducible():
    g = overfit_graph(1)
    a = run_overfit_experiment(g, seed=1, timings=False)
    b = run_overfit_experiment(g, seed=1, timings=False)
    assert [r.row() for r in a] == [r.row() for r in b]


def test_report_csv_schema():
    g = overfit_graph(2)
    buf = io.StringIO()
    write_reports(run_overfit_experiment(g, seed=2, timings=False), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].split(",") == list(REPORT_COLUMNS)
    assert all(len(line.split(",")) == len(REPORT_COLUMNS) for line in lines[1:])


def test_kmeans_separated_blobs():
    rng = np.random.default_rng(0)
    centers = np.array([[0, 0], [10, 0], [0, 10]])
    x = np.vstack([c + rng.normal(size=(50, 2)) for c in centers])
    truth = np.repeat(np.arange(3), 50)
    labels, _ = kmeans(x, 3, seed=1)
    assert adjusted_rand_index(truth, labels) == 1.0


def test_ari_against_sklearn():
    metrics = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = rng.integers(0, 4, 200), rng.integers(0, 5, 200)
        assert adjusted_rand_index(a, b) == pytest.approx(metrics.adjusted_rand_score(a, b), abs=1e-12)
    assert adjusted_rand_index([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0


def test_recovery_small_instance():
    res = run_recovery_experiment(desk_scale_core(800, 20), 60, 3.0, 0.002, seed=0, restarts=5)
    assert res.ari_regularized > 0.8
    assert len(res.ipr_vanilla) == 4 and len(res.eigenvalues_regularized) == 5
    assert res.n_analyzed + res.isolated_dropped == 860


def test_corecut_table_periphery_vs_core():
    g, blocks, sets = small_core_periphery(seed=1, between=0.1)
    rows = corecut_table(g, sets + blocks, tau=2.0)
    for r in rows[:5]:
        assert r["corecut"] > 4 * r["conductance"]
    for r in rows[5:]:
        assert r["corecut"] == pytest.approx(r["conductance"], rel=0.15)
