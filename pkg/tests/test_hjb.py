import csv

import numpy as np
import pytest

from conftest import drift_diffusion_set, random_controls
from smtransport import GridSpec
from smtransport.grid import GridError
from smtransport.hjb import (CFLViolation, Scheme, check_cfl, one_step_matrix, solve_backward, solve_frozen,
                             write_controls_csv, write_lambda0_csv)
from smtransport.model import ControlSet, WeightedDiffusionCost, diffusion_cost


def zero_cost(t, x, a, b):
    return 0.0 * (t + x + a + b)


def test_cfl_benchmark_parameters(toy_grid, toy_controls):
    chk = check_cfl(toy_grid, toy_controls)
    assert chk.ok
    assert chk.margin == pytest.approx(0.75)


def test_cfl_violation(toy_grid):
    chk = check_cfl(toy_grid, ControlSet([0.5], [0.0]))
    assert not chk.ok and chk.worst == (0.5, 0.0)
    assert 1 - chk.margin == pytest.approx(1.25)
    with pytest.raises(CFLViolation, match=r"\(0\.5, 0\.0\)"):
        solve_backward(toy_grid, ControlSet([0.0, 0.5], [0.0, 0.0]), diffusion_cost, np.zeros(21))


def test_cfl_zero_control(toy_grid):
    chk = check_cfl(toy_grid, ControlSet([0.0], [0.0]))
    assert chk.ok and chk.margin == 1.0


def test_grid_snapping():
    g = GridSpec.from_steps(1.0, 0.1, 0.025)
    assert (g.r, g.l, g.n_nodes) == (10, 40, 21)
    assert g.x[g.center] == 0.0 and g.x[-1] == 1.0
    with pytest.raises(GridError):
        GridSpec.from_steps(1.0, 0.3, 0.025)
    with pytest.raises(GridError):
        GridSpec.from_steps(1.0, 2.0, 0.025)
    assert GridSpec.from_steps(1.0, 1.0, 0.5).n_nodes == 3


def test_identity_dynamics(toy_grid, rng):
    lam1 = rng.normal(size=toy_grid.n_nodes)
    res = solve_backward(toy_grid, ControlSet([0.0], [0.0]), zero_cost, lam1)
    np.testing.assert_array_equal(res.lambda0, lam1)


def test_concave_parabola_is_stationary(toy_grid, toy_controls):
    # D^2(-x^2) = -2, so a = 0.1 costs 0.1 * (1 - 1) = 0: no running accumulation
    lam1 = -toy_grid.x**2
    res = solve_backward(toy_grid, toy_controls, diffusion_cost, lam1)
    np.testing.assert_allclose(res.lambda0, lam1, atol=1e-12)


def test_exact_tie_resolves_to_first_candidate():
    # binary-exact grid: D^2 is exactly -2 and both candidates give exactly 0
    grid = GridSpec.from_steps(1.0, 0.125, 1 / 64)
    res = solve_backward(grid, ControlSet([0.0, 0.1], [0.0, 0.0]), diffusion_cost, -grid.x**2)
    assert np.all(res.controls[:, 1:-1] == 0)
    np.testing.assert_array_equal(res.lambda0, -grid.x**2)


def test_zero_terminal(toy_grid, toy_controls):
    res = solve_backward(toy_grid, toy_controls, diffusion_cost, np.zeros(toy_grid.n_nodes))
    np.testing.assert_array_equal(res.lambda0, 0.0)
    assert np.all(res.controls[:, 1:-1] == 0)
    assert np.all(res.controls[:, [0, -1]] == -1)


def test_surface_boundary_rows(toy_grid, toy_controls, rng):
    lam1 = rng.normal(size=toy_grid.n_nodes)
    res = solve_backward(toy_grid, toy_controls, diffusion_cost, lam1, keep_surface=True)
    surf = res.full_surface
    assert surf.shape == (toy_grid.l + 1, toy_grid.n_nodes)
    np.testing.assert_array_equal(surf[-1], lam1)
    np.testing.assert_array_equal(surf[:, 0], lam1[0])
    np.testing.assert_array_equal(surf[:, -1], lam1[-1])
    np.testing.assert_array_equal(surf[0], res.lambda0)


def test_frozen_optimal_controls_reproduce_solve(rng):
    grid = GridSpec.from_steps(1.0, 0.1, 0.0025)
    cs = drift_diffusion_set(grid, 5)
    cost = WeightedDiffusionCost("linear")
    for _ in range(5):
        lam1 = rng.normal(size=grid.n_nodes)
        res = solve_backward(grid, cs, cost, lam1)
        frz = solve_frozen(grid, cs, cost, res.controls, lam1, include_cost=True)
        np.testing.assert_array_equal(frz.lambda0, res.lambda0)


def test_frozen_identity_delta(toy_grid):
    cs = ControlSet([0.0, 0.1], [0.0, 0.0])
    zero = np.zeros((toy_grid.l, toy_grid.n_nodes), dtype=int)
    for j in (0, 5, 20):
        delta = np.eye(toy_grid.n_nodes)[j]
        res = solve_frozen(toy_grid, cs, diffusion_cost, zero, delta, include_cost=False)
        np.testing.assert_array_equal(res.lambda0, delta)


def test_frozen_fundamental_solutions_match_dense_product(rng):
    grid = GridSpec.from_steps(1.0, 0.5, 0.05)  # 5 nodes, 20 levels
    cs = drift_diffusion_set(grid, 4)
    controls = random_controls(rng, len(cs), grid)
    G = np.eye(grid.n_nodes)
    for k in range(grid.l):
        G = G @ one_step_matrix(grid, cs, controls[k])
    assert np.all(G >= 0)
    np.testing.assert_allclose(G.sum(axis=1), 1.0, atol=1e-13)
    for j in range(grid.n_nodes):
        g0 = solve_frozen(grid, cs, diffusion_cost, controls, np.eye(grid.n_nodes)[j], include_cost=False).lambda0
        np.testing.assert_allclose(g0, G[:, j], atol=1e-14)
        assert np.all(g0 >= 0)


def test_monotone_and_shift_covariant(rng):
    grid = GridSpec.from_steps(1.0, 0.1, 0.0025)
    cs = drift_diffusion_set(grid, 5)
    scheme = Scheme(grid, cs, WeightedDiffusionCost("linear"))
    for _ in range(20):
        lam = rng.normal(size=grid.n_nodes)
        bump = lam + rng.random(grid.n_nodes)
        lo, hi = scheme.solve(lam).lambda0, scheme.solve(bump).lambda0
        assert np.all(lo <= hi + 1e-12)
        c = rng.normal()
        np.testing.assert_allclose(scheme.solve(lam + c).lambda0, lo + c, atol=1e-12, rtol=0)


def test_comparison_with_arbitrary_frozen_controls(rng):
    grid = GridSpec.from_steps(1.0, 0.1, 0.0025)
    cs = drift_diffusion_set(grid, 5)
    scheme = Scheme(grid, cs, WeightedDiffusionCost("linear"))
    for _ in range(10):
        lam = rng.normal(size=grid.n_nodes)
        opt = scheme.solve(lam).lambda0
        other = scheme.solve_frozen(random_controls(rng, len(cs), grid), lam).lambda0
        assert np.all(opt <= other)


def test_nonnegative_data_gives_nonnegative_value(toy_grid, toy_controls, rng):
    res = solve_backward(toy_grid, toy_controls, diffusion_cost, rng.random(toy_grid.n_nodes))
    assert np.all(res.lambda0 >= 0)


def test_rejects_bad_terminal(toy_grid, toy_controls):
    bad = np.zeros(toy_grid.n_nodes)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        solve_backward(toy_grid, toy_controls, diffusion_cost, bad)
    with pytest.raises(ValueError):
        solve_backward(toy_grid, toy_controls, diffusion_cost, np.zeros(5))


def test_single_interior_node():
    grid = GridSpec.from_steps(1.0, 1.0, 0.5)
    res = solve_backward(grid, ControlSet([0.0, 0.5], [0.0, 0.0]), diffusion_cost, np.array([1.0, 0.0, 1.0]))
    # each step: min(0, 0.5 * (1 + 0.5 * 2)) over a; value stays 0
    np.testing.assert_array_equal(res.lambda0, [1.0, 0.0, 1.0])


def test_csv_dumps(tmp_path, toy_grid, toy_controls):
    res = solve_backward(toy_grid, toy_controls, diffusion_cost, -toy_grid.x**2)
    write_lambda0_csv(tmp_path / "l0.csv", toy_grid, res)
    write_controls_csv(tmp_path / "u.csv", toy_grid, toy_controls, res)
    rows = list(csv.reader(open(tmp_path / "l0.csv")))
    assert rows[0] == ["i", "x_i", "value"] and len(rows) == 22
    assert rows[1][0] == "-10"
    rows = list(csv.reader(open(tmp_path / "u.csv")))
    assert rows[0] == ["k", "i", "a", "b"] and len(rows) == 1 + 40 * 19
