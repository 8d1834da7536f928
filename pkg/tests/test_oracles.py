import itertools

from oracles import oracle_components, oracle_igd, oracle_pareto_peel


def test_components_empty_superlevel_set():
    assert oracle_components([[1], [0]], [0.2, 0.4], 0.5) == set()


def test_components_complete_graph_one_component():
    adj = [[j for j in range(5) if j != i] for i in range(5)]
    assert oracle_components(adj, [0.3, 0.1, 0.9, 0.5, 0.2], 0.1) == {frozenset(range(5))}


def test_components_cut_path():
    adj = [[1], [0, 2], [1]]
    assert oracle_components(adj, [1.0, 0.2, 0.9], 0.5) == {frozenset({0}), frozenset({2})}


def test_peel_chain_and_antichain():
    assert oracle_pareto_peel([[i, i] for i in range(5)]) == [1, 2, 3, 4, 5]
    assert oracle_pareto_peel([[i, 4 - i] for i in range(5)]) == [1] * 5


def test_peel_equal_vectors_share_rank():
    assert oracle_pareto_peel([[1, 1], [1, 1], [2, 2]]) == [1, 1, 2]


def test_igd_identity_and_singleton():
    pts = [list(p) for p in itertools.product([0.0, 1.0], repeat=2)]
    assert oracle_igd(pts, pts) == 0.0
    assert oracle_igd([[3.0, 4.0], [10.0, 0.0]], [[0.0, 0.0]]) == 5.0
