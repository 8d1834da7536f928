import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clde.decode import (PersistenceController, adapt_tau, cc_oracle, decode_basins,
                         default_k_target, rank_crowding_height, single_basin)
from clde.exceptions import ContractViolation
from clde.graph import NeighborGraph, knn_graph

from oracles import oracle_components

PATH = NeighborGraph(n=3, k=1, adjacency=((1,), (0, 2), (1,)))


def test_path_two_basins_survive_small_tau():
    d = decode_basins(PATH, [1.0, 0.2, 0.9], tau=0.5)
    assert d.K == 2
    assert d.representatives == [0, 2]


def test_path_basins_merge_large_tau():
    d = decode_basins(PATH, [1.0, 0.2, 0.9], tau=0.8)
    assert d.K == 1
    assert d.representatives == [0]
    assert d.basin_members == [[0, 1, 2]]


def test_infinite_tau_gives_connected_components():
    g = NeighborGraph(n=5, k=1, adjacency=((1,), (0,), (3,), (2,), ()))
    d = decode_basins(g, [0.1, 0.5, 0.9, 0.3, 0.0], tau=math.inf)
    assert d.partition() == {frozenset({0, 1}), frozenset({2, 3}), frozenset({4})}


def test_length_mismatch_and_bad_tau():
    with pytest.raises(ContractViolation):
        decode_basins(PATH, [1.0, 0.5], tau=0.1)
    with pytest.raises(ContractViolation):
        decode_basins(PATH, [1.0, 0.5, 0.2], tau=-1.0)


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 65))
    k = int(rng.choice([3, 5, 10]))
    graph = knn_graph(rng.random((n, 2)), k)
    return graph, rng.random(n), rng


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.0, 1.0))
def test_decomposition_is_partition_with_peak_representatives(seed, tau):
    graph, h, _ = _random_instance(seed)
    d = decode_basins(graph, h, tau)
    covered = sorted(i for m in d.basin_members for i in m)
    assert covered == list(range(graph.n))
    for k, (rep, members) in enumerate(zip(d.representatives, d.basin_members)):
        assert h[rep] == h[members].max()
        assert np.all(d.labels[members] == k)
    # basin 0 holds the global peak
    assert d.representatives[0] == int(np.argmax(h))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_raising_tau_never_adds_basins(seed):
    graph, h, _ = _random_instance(seed)
    counts = [decode_basins(graph, h, t).K for t in (0.0, 0.05, 0.1, 0.3, 1.0, math.inf)]
    assert counts == sorted(counts, reverse=True)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_level_cut_matches_oracles(seed):
    graph, h, rng = _random_instance(seed)
    level = float(rng.choice(h))
    got = decode_basins(graph, h, math.inf, level=level)
    assert got.partition() == oracle_components(graph.adjacency, h, level)
    assert got.partition() == cc_oracle(graph, h, level)
    assert np.all(got.labels[h < level] == -1)


def test_cc_oracle_edge_levels():
    graph, h, _ = _random_instance(4)
    assert cc_oracle(graph, h, h.max() + 1.0) == set()
    assert cc_oracle(graph, h, h.min()) == decode_basins(graph, h, math.inf).partition()


def test_single_basin():
    d = single_basin([0.2, 0.9, 0.9])
    assert d.K == 1 and d.representatives == [1] and d.basin_members == [[0, 1, 2]]


def test_default_k_target():
    assert default_k_target(200) == 14
    assert default_k_target(100) == 10
    assert default_k_target(4) == 2


def test_tau_unchanged_at_target():
    ctrl = PersistenceController(tau=0.1, k_target=10)
    assert adapt_tau(ctrl, 10).tau == 0.1


def test_tau_worked_value():
    ctrl = PersistenceController(tau=0.10, gamma=0.2, k_target=7)
    assert abs(adapt_tau(ctrl, 14).tau - 0.10 * math.exp(0.2)) < 1e-9
    assert abs(adapt_tau(ctrl, 14).tau - 0.1221402758) < 1e-9


def test_tau_upper_clip():
    ctrl = PersistenceController(tau=0.29, k_target=2)
    assert adapt_tau(ctrl, 200).tau == 0.30


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 0.5), st.floats(0.0, 0.5),
       st.floats(0.0, 2.0), st.integers(1, 60), st.integers(1, 120))
def test_tau_sign_and_clip(tau, a, b, gamma, k_tar, k):
    lo, hi = min(a, b), max(a, b)
    ctrl = PersistenceController(tau=tau, tau_min=lo, tau_max=hi, gamma=gamma, k_target=k_tar)
    new = adapt_tau(ctrl, k).tau
    assert lo <= new <= hi
    if k > k_tar:
        assert new >= ctrl.tau
    elif k < k_tar:
        assert new <= ctrl.tau


def test_rank_crowding_single_front_depends_on_crowding_only():
    F = np.array([[0.0, 4.0], [1.0, 2.0], [3.0, 1.0], [4.0, 0.0]])
    q = rank_crowding_height(F, kappa=1.0)
    np.testing.assert_allclose(q[[0, 3]], q[0])
    assert np.all(q <= 1.0 + 1e-12)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 3.0])
def test_rank_crowding_dominant_point_higher(kappa):
    q = rank_crowding_height(np.array([[1.0, 1.0], [2.0, 2.0]]), kappa)
    assert q[0] > q[1]


def test_rank_crowding_hand_values():
    # front 1: A, B, C, G; front 2: D, E
    F = np.array([[0, 4], [1, 2], [3, 1], [4, 0], [3, 3], [2, 5]], dtype=float)
    eps = 1e-12
    # interior crowding: B = 3/4 + 3/4, C = 3/4 + 2/4; boundary members take the max (1.5)
    crowd = np.array([1.5, 1.5, 1.25, 1.5, 1.5, 1.5])
    cbar = (crowd - 1.25) / (0.25 + eps)
    rank_term = np.array([1, 1, 1, 1, 0, 0]) / (1 + eps)
    np.testing.assert_allclose(rank_crowding_height(F, 1.0), rank_term + cbar, rtol=0, atol=1e-12)


def test_rank_crowding_empty_rejected():
    with pytest.raises(ContractViolation):
        rank_crowding_height(np.zeros((0, 2)))


def test_canvas_work_time_budget():
    # brute-force kNN is quadratic; a 1000-node canvas must still decode quickly
    rng = np.random.default_rng(0)
    pts, h = rng.random((1000, 5)), rng.random(1000)
    t0 = time.perf_counter()
    decode_basins(knn_graph(pts, 10, "mutual"), h, 0.1)
    assert time.perf_counter() - t0 < 2.0
