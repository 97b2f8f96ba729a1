import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corecut.dangling import is_g_dangling
from corecut.generators import (
    BlockProbabilities,
    CorePeripherySpec,
    DcSbmSpec,
    InhomogeneousSpec,
    core_periphery_instance,
    desk_scale_core,
    erdos_renyi,
    load_spec,
    plant_dangling,
    planted_partition,
    prufer_to_edges,
    random_tree,
    sample_dcsbm,
    sample_inhomogeneous,
    small_core_periphery,
)
from corecut.graph import build_graph, conductance, largest_connected_component


def test_zero_probability_empty():
    assert sample_inhomogeneous(InhomogeneousSpec(10, 0.0), seed=1).n_edges == 0


def test_unit_probability_complete():
    g = sample_inhomogeneous(InhomogeneousSpec(4, 1.0), seed=1)
    assert g.n_edges == 6 and g.degrees.tolist() == [3.0] * 4


def test_matrix_and_block_sources_agree():
    blocks = BlockProbabilities((3, 2), ((0.5, 0.1), (0.1, 0.9)))
    z = blocks.labels()
    full = np.asarray(blocks.matrix)[np.ix_(z, z)]
    np.fill_diagonal(full, 0.0)
    a = sample_inhomogeneous(InhomogeneousSpec(5, blocks), seed=3)
    b = sample_inhomogeneous(InhomogeneousSpec(5, full), seed=3)
    assert a == b


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_invalid_probability(p):
    with pytest.raises(ValueError):
        sample_inhomogeneous(InhomogeneousSpec(5, p), seed=0)


def test_asymmetric_matrix_rejected():
    p = np.zeros((3, 3))
    p[0, 1] = 0.5
    with pytest.raises(ValueError):
        InhomogeneousSpec(3, p).validate()


def test_peripheral_nodes_and_floor():
    spec = InhomogeneousSpec(100, 1.5 / 100, floor=1.0 / 100, peripheral_fraction=0.5, peripheral_bound=2.0)
    spec.validate()
    assert spec.peripheral_nodes().all()
    with pytest.raises(ValueError):
        InhomogeneousSpec(100, 0.5 / 100, floor=1.0 / 100).validate()


def test_er_mean_degree():
    n, lam = 4000, 1.5
    means = [erdos_renyi(n, lam / n, seed=s).total_volume / n for s in range(20)]
    assert abs(np.mean(means) - lam) <= 0.1


def test_deterministic_and_seed_sensitive():
    assert erdos_renyi(300, 0.02, seed=5) == erdos_renyi(300, 0.02, seed=5)
    assert erdos_renyi(300, 0.02, seed=5) != erdos_renyi(300, 0.02, seed=6)


def test_single_block_is_erdos_renyi():
    g, labels = sample_dcsbm(DcSbmSpec((300,), ((0.02,),)), seed=8)
    assert g == erdos_renyi(300, 0.02, seed=8)
    assert set(labels.tolist()) == {0}


def test_block_conductance_two_block():
    phis = []
    for seed in range(20):
        g, labels = sample_dcsbm(planted_partition(2, 500, 0.1, 0.01), seed)
        phis.append(conductance(g, np.flatnonzero(labels == 0)))
    assert abs(np.mean(phis) - 1 / 11) <= 0.02


def test_desk_scale_core_mean_degree():
    spec = desk_scale_core()
    degrees = [sample_dcsbm(spec, s)[0].total_volume / spec.n for s in range(3)]
    assert all(abs(d - 25) <= 2 for d in degrees)


def test_rescale_above_one_rejected():
    with pytest.raises(ValueError):
        DcSbmSpec((10, 10), ((0.8, 0.2), (0.2, 0.8)), target_average_degree=30).validate()


def test_theta_scales_degrees():
    theta = np.r_[np.full(200, 2.0), np.full(200, 0.5)]
    spec = DcSbmSpec((400,), ((0.02,),), theta=tuple(theta))
    g, _ = sample_dcsbm(spec, seed=2)
    assert g.degrees[:200].mean() > 3 * g.degrees[200:].mean()


def test_spec_dict_roundtrip(tmp_path):
    spec = CorePeripherySpec(desk_scale_core(400, 10), 50, 3.0, 0.5)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert CorePeripherySpec.from_dict(load_spec(path)) == spec


def test_core_periphery_without_cross_edges():
    g, labels, periphery = core_periphery_instance(desk_scale_core(400, 10), 100, 3.0, 0.0, seed=1)
    core = labels >= 0
    src, dst, _ = g.edge_array()
    assert not np.any(core[src] != core[dst])
    assert periphery.tolist() == list(range(400, 500))


def test_periphery_mean_degree():
    means = []
    for seed in range(20):
        g, _, periphery = core_periphery_instance(desk_scale_core(400, 10), 100, 3.0, 0.0, seed)
        means.append(g.degrees[periphery].mean())
    assert abs(np.mean(means) - 3.0) <= 0.5


def test_cross_degree_expectation():
    totals = []
    for seed in range(10):
        g, labels, periphery = core_periphery_instance(desk_scale_core(400, 10), 100, 0.0, 2.0, seed)
        totals.append(g.degrees[periphery].mean())
    assert abs(np.mean(totals) - 2.0) <= 0.2


def test_core_unchanged_by_periphery():
    core = desk_scale_core(400, 10)
    a, _, _ = core_periphery_instance(core, 0, 0.0, 0.0, seed=4)
    b, _, _ = core_periphery_instance(core, 100, 3.0, 0.5, seed=4)
    sub = build_graph(np.array([e for e in b.edge_list() if e[0] < 400 and e[1] < 400]), 400)
    assert sub == a


@given(st.integers(1, 9), st.integers(0, 10_000))
def test_prufer_gives_tree(g, seed):
    edges = random_tree(g, np.random.default_rng(seed))
    assert len(edges) == g - 1
    if g > 1:
        t = build_graph(np.array(edges), g)
        assert t.is_connected()


def test_prufer_decoding_known():
    assert sorted(map(tuple, map(sorted, prufer_to_edges([3, 3, 3], 5)))) == [(0, 3), (1, 3), (2, 3), (3, 4)]


def test_random_trees_uniform():
    # 4^2 = 16 labelled trees on 4 nodes
    rng = np.random.default_rng(0)
    counts = Counter(tuple(sorted(tuple(sorted(e)) for e in random_tree(4, rng))) for _ in range(16000))
    assert len(counts) == 16
    assert max(counts.values()) < 1.15 * 1000 and min(counts.values()) > 0.85 * 1000


def test_plant_dangling_records(er_host):
    g, records = plant_dangling(er_host, 3, 1, seed=0)
    assert g.n == er_host.n + 3
    rec = records[0]
    assert is_g_dangling(g, rec.members, 3, enforce_component_clause=True)
    assert rec.bridge_edge[1] == rec.attach_node and rec.bridge_edge[0] in rec.members


def test_plant_six(er_host):
    g, records = plant_dangling(er_host, 6, 5, seed=3)
    for rec in records:
        assert conductance(g, rec.members) == pytest.approx(1 / 11, abs=1e-12)
        assert is_g_dangling(g, rec.members, 6, enforce_component_clause=True)


def test_plant_zero_is_identity(er_host):
    g, records = plant_dangling(er_host, 4, 0, seed=3)
    assert g == er_host and records == []


def test_plant_host_too_small():
    host = build_graph([(0, 1), (1, 2)], 3)
    with pytest.raises(ValueError):
        plant_dangling(host, 4, 1, seed=0)


def test_small_core_periphery_shape():
    g, blocks, sets = small_core_periphery(seed=0)
    assert g.n == 225 and len(sets) == 5
    for s in sets:
        assert is_g_dangling(g, s, 5)
    assert largest_connected_component(g)[0].n == g.n
