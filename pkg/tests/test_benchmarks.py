import numpy as np
import pytest

from clde.benchmarks import (evaluate, evaluate_batch, get_problem, known_optima, list_problems,
                             simplex_lattice)
from clde.benchmarks.derive import gradient_norm
from clde.exceptions import ContractViolation, NoGroundTruth, UnknownProblem


def test_equal_maxima_peak_value():
    assert evaluate(get_problem("f2"), [0.1])[0] == pytest.approx(1.0, abs=1e-12)


def test_himmelblau_optima_heights_and_gradient():
    p = get_problem("f4_himmelblau")
    opt = known_optima(p)
    assert opt.shape == (4, 2)
    np.testing.assert_allclose(evaluate_batch(p, opt)[:, 0], 200.0, atol=1e-9)
    for x in opt:
        assert gradient_norm("f4", x) < 1e-8


def test_dtlz2_unit_sphere_when_distance_vars_centered():
    p = get_problem("dtlz2_d12_m3")
    rng = np.random.default_rng(1)
    for _ in range(5):
        x = np.full(p.dim, 0.5)
        x[:2] = rng.random(2)
        assert np.linalg.norm(evaluate(p, x)) == pytest.approx(1.0, abs=1e-12)


def test_equal_maxima_optima_locations():
    np.testing.assert_allclose(known_optima(get_problem("f2"))[:, 0], [0.1, 0.3, 0.5, 0.7, 0.9],
                               atol=1e-12)


def test_six_hump_camel_optima_point_symmetric():
    opt = known_optima(get_problem("f5"))
    assert opt.shape == (2, 2)
    np.testing.assert_allclose(opt[0], -opt[1], atol=1e-9)


@pytest.mark.parametrize("pid, count", [("f1", 2), ("f3", 1), ("f6", 18), ("f7", 36),
                                        ("f8", 81), ("f9", 216), ("f10", 12)])
def test_optimum_counts(pid, count):
    p = get_problem(pid)
    opt = known_optima(p)
    assert opt.shape[0] == count
    assert len(np.unique(np.round(opt, 9), axis=0)) == count
    vals = evaluate_batch(p, opt)[:, 0]
    np.testing.assert_allclose(vals, p.peak_height, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("pid", ["f6", "f8"])
def test_shubert_fixture_stationary(pid):
    for x in known_optima(get_problem(pid)):
        assert gradient_norm(pid, x) < 1e-6


def test_table_heights_agree_after_rounding():
    for pid in list_problems():
        p = get_problem(pid)
        if p.table_peak_height is not None:
            assert abs(p.peak_height - p.table_peak_height) < 5e-4


def test_out_of_bounds_and_wrong_length_rejected():
    p = get_problem("f4")
    with pytest.raises(ContractViolation):
        evaluate(p, [7.0, 0.0])
    with pytest.raises(ContractViolation):
        evaluate(p, [0.0, 0.0, 0.0])


def test_no_ground_truth_for_multiobjective():
    with pytest.raises(NoGroundTruth):
        known_optima(get_problem("two_basin"))


def test_unknown_problem():
    with pytest.raises(UnknownProblem):
        get_problem("f99")


def test_dtlz_ids_built_on_demand():
    p = get_problem("dtlz1_d5_m2")
    assert (p.dim, p.n_obj) == (5, 2)
    assert p.pareto_front_ref.shape[1] == 2


def test_simplex_lattice_rows_sum_to_one():
    pts = simplex_lattice(3, 12)
    assert pts.shape == (91, 3)
    np.testing.assert_allclose(pts.sum(axis=1), 1.0)


def test_two_basin_pareto_set_maps_onto_front():
    p = get_problem("two_basin")
    F = evaluate_batch(p, p.pareto_set_ref)
    np.testing.assert_allclose(F.sum(axis=1), 1.0, atol=1e-12)
