"""Acceptance suite: one test per criterion, each at its stated tolerance.

Criteria 1-3 run the full 10^5-iteration ascent through the command line
entry point (about 8 s each). Every test records a PASS/FAIL line that is
printed in the pytest terminal summary.
"""

import csv
import math
from pathlib import Path

import numpy as np
import pytest

from conftest import drift_diffusion_set, random_atoms, random_controls, record_criterion
from smtransport import ControlSet, GridSpec, Scheme, WeightedDiffusionCost, diffusion_cost, solve_backward
from smtransport.ascent import DualProblem
from smtransport.cli import EXIT_OK, main
from smtransport.lipproj import from_increments, in_lipschitz_set, norm_R, project, to_increments
from smtransport.measures import Gaussian
from smtransport.oracles import toy_benchmark, variance_swap_benchmark
from smtransport.sensitivity import supergradient_adjoint, supergradient_direct

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"
ACCEPT_RNG_SEED = 7_250_611


def _rng():
    return np.random.default_rng(ACCEPT_RNG_SEED)


def _read_report(path):
    out = {}
    for line in path.read_text().splitlines():
        if ": " in line and not line.startswith(" "):
            k, v = line.split(": ", 1)
            out[k] = v
    return out


def _read_trace(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["value"]) for r in rows]), np.array([float(r["gradient_norm_R"]) for r in rows])


def _solve(name, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    assert main(["solve", str(CONFIGS / f"{name}.toml"), "--output-dir", str(out_dir)]) == EXIT_OK
    rep = _read_report(out_dir / f"{name}_report.txt")
    values, norms = _read_trace(out_dir / f"{name}_trace.csv")
    return {"best": float(rep["best_value"]), "time": float(rep["wall_time_s"]), "norms": norms,
            "trace": (out_dir / f"{name}_trace.csv").read_bytes(), "n": len(values) - 1}


@pytest.fixture(scope="module")
def full_runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("acceptance")
    return {
        "toy": _solve("toy", base / "toy_a"),
        "toy_repeat": _solve("toy", base / "toy_b"),
        "swap_const": _solve("swap_const", base / "swap_const"),
        "swap_linear": _solve("swap_linear", base / "swap_linear"),
    }


def _check_benchmark(n, run, bench, budget_s):
    lo, hi = bench.accept
    ok = lo <= run["best"] <= hi and run["n"] == 100_000 and run["time"] < budget_s
    detail = (f"best {run['best']:.7f} in [{lo}, {hi}], exact {bench.exact_value:.6g}, published {bench.published_value}, "
              f"{run['n']} iters in {run['time']:.1f} s < {budget_s} s")
    assert record_criterion(n, bench.name, ok, detail)


def test_criterion_01_toy(full_runs):
    _check_benchmark(1, full_runs["toy"], toy_benchmark(), 60)


def test_criterion_02_swap_const(full_runs):
    _check_benchmark(2, full_runs["swap_const"], variance_swap_benchmark("const"), 150)


def test_criterion_03_swap_linear(full_runs):
    _check_benchmark(3, full_runs["swap_linear"], variance_swap_benchmark("linear"), 150)


# -- random instances -------------------------------------------------------

def _random_problem(rng, r_max=20, l_max=40):
    R = float(rng.uniform(0.5, 2.5))
    grid = GridSpec(R, int(rng.integers(1, r_max + 1)), int(rng.integers(1, l_max + 1)))
    cs = drift_diffusion_set(grid, n=int(rng.integers(1, 6)), frac=float(rng.uniform(0.3, 1.0)))
    cost = diffusion_cost if rng.random() < 0.5 else WeightedDiffusionCost("linear", float(rng.uniform(0.5, 2)))
    m0 = random_atoms(rng, grid, n=int(rng.integers(1, 8)))
    m1 = random_atoms(rng, grid, n=int(rng.integers(1, 8))) if rng.random() < 0.5 else \
        Gaussian(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.05, 1.0)))
    return grid, cs, cost, m0, m1


def test_criterion_04_adjoint_equals_direct():
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        grid, cs, cost, m0, m1 = _random_problem(rng)
        controls = random_controls(rng, len(cs), grid)
        d = supergradient_direct(grid, cs, cost, m0, m1, controls)
        a = supergradient_adjoint(grid, cs, cost, m0, m1, controls)
        worst = max(worst, float(np.abs(d - a).max()))
    assert record_criterion(4, "adjoint vs direct gradient", worst <= 1e-10,
                            f"max discrepancy {worst:.2e} <= 1e-10 over 20 instances")


def test_criterion_05_supergradient_inequality():
    rng = _rng()
    worst = -np.inf
    for _ in range(100):
        grid, cs, cost, m0, m1 = _random_problem(rng)
        prob = DualProblem(grid, cs, cost, m0, m1)
        K = float(rng.uniform(0.1, 3.0))
        lam = project(rng.normal(size=grid.n_nodes) * rng.choice([0.1, 1, 5]), K, grid.dx)
        delta = rng.normal(size=grid.n_nodes) * rng.choice([1e-3, 0.1, 1, 10])
        v, g = prob.value_and_gradient(lam)
        worst = max(worst, prob.value(lam + delta) - v - float(g @ delta))
    assert record_criterion(5, "super-gradient inequality", worst <= 1e-10,
                            f"max excess {worst:.2e} <= 1e-10 over 100 pairs")


def test_criterion_06_concavity():
    rng = _rng()
    worst = np.inf
    for _ in range(100):
        grid, cs, cost, m0, m1 = _random_problem(rng)
        prob = DualProblem(grid, cs, cost, m0, m1)
        scale = rng.choice([0.1, 1, 10])
        p1, p2 = rng.normal(size=(2, grid.n_nodes)) * scale
        worst = min(worst, prob.value(0.5 * (p1 + p2)) - 0.5 * (prob.value(p1) + prob.value(p2)))
    assert record_criterion(6, "concavity midpoints", worst >= -1e-10,
                            f"min slack {worst:.2e} >= -1e-10 over 100 midpoints")


def test_criterion_07_monotone_and_shift():
    rng = _rng()
    worst_mono, worst_shift = np.inf, 0.0
    for _ in range(100):
        grid, cs, cost, _, _ = _random_problem(rng)
        scheme = Scheme(grid, cs, cost)
        phi = rng.normal(size=grid.n_nodes) * rng.choice([0.1, 1, 5])
        psi = phi - np.abs(rng.normal(size=grid.n_nodes)) * (rng.random(grid.n_nodes) < 0.5)
        c = float(rng.normal() * 3)
        u, v = scheme.solve(phi).lambda0, scheme.solve(psi).lambda0
        worst_mono = min(worst_mono, float((u - v).min()))
        worst_shift = max(worst_shift, float(np.abs(scheme.solve(phi + c).lambda0 - u - c).max()))
    ok = worst_mono >= -1e-12 and worst_shift <= 1e-12
    assert record_criterion(7, "monotonicity and shift covariance", ok,
                            f"min(u - v) {worst_mono:.2e} >= -1e-12, shift error {worst_shift:.2e} <= 1e-12")


def test_criterion_08_lipschitz_and_gradient_bound(full_runs):
    rng = _rng()
    worst = -np.inf
    for _ in range(100):
        grid, cs, cost, m0, m1 = _random_problem(rng)
        prob = DualProblem(grid, cs, cost, m0, m1)
        p1 = rng.normal(size=grid.n_nodes) * rng.choice([0.1, 1, 10])
        p2 = p1 + rng.normal(size=grid.n_nodes) * rng.choice([1e-3, 0.1, 1])
        worst = max(worst, abs(prob.value(p1) - prob.value(p2)) - 2 * float(np.abs(p1 - p2).max()))
    bound_ok, ratios = True, []
    for key, bench in (("toy", toy_benchmark()), ("swap_const", variance_swap_benchmark("const")),
                       ("swap_linear", variance_swap_benchmark("linear"))):
        g = bench.grid
        bound = 2 * math.sqrt(g.R / g.dx + 1)
        norms = full_runs[key]["norms"]
        bound_ok &= bool(np.all(norms <= bound + 1e-10))
        ratios.append(float(norms.max() / bound))
    ok = worst <= 1e-10 and bound_ok
    assert record_criterion(8, "objective Lipschitz and gradient-norm bound", ok,
                            f"max excess {worst:.2e} <= 1e-10; max |grad|_R / bound = "
                            + ", ".join(f"{x:.3f}" for x in ratios))


def test_criterion_09_projection():
    rng = _rng()
    fails = {"idempotence": 0, "membership": 0, "roundtrip": 0}
    worst_nonexp, worst_float_rt = -np.inf, 0.0
    for _ in range(200):
        n = 2 * int(rng.integers(1, 41)) + 1
        K = float(rng.uniform(0.0, 3.0)) if rng.random() < 0.9 else 0.0
        dx = float(rng.choice([0.1, 0.05, 0.125, 0.3]))
        scale = float(rng.choice([1e-3, 0.1, 1.0, 10.0]))
        phi, other = rng.normal(size=(2, n)) * scale
        p = project(phi, K, dx)
        fails["idempotence"] += not np.array_equal(project(p, K, dx), p)
        fails["membership"] += not in_lipschitz_set(p, K, dx)
        worst_nonexp = max(worst_nonexp, norm_R(p - project(other, K, dx)) - norm_R(phi - other))
        # T_R is exact wherever the float arithmetic is (dyadic data); for
        # general floats a difference-then-sum roundtrip can only be exact
        # to rounding, which is reported alongside
        dyadic = np.round(phi * 2**10) / 2**10
        fails["roundtrip"] += not np.array_equal(from_increments(to_increments(dyadic)), dyadic)
        fails["roundtrip"] += not np.array_equal(to_increments(from_increments(dyadic)), dyadic)
        rt = np.abs(from_increments(to_increments(phi)) - phi).max() / max(np.abs(phi).max(), 1e-300)
        worst_float_rt = max(worst_float_rt, float(rt))
    ok = not any(fails.values()) and worst_nonexp <= 1e-12
    detail = (", ".join(f"{k} failures {v}" for k, v in fails.items())
              + f", nonexpansive excess {worst_nonexp:.2e}, float roundtrip rel. error {worst_float_rt:.1e}")
    assert record_criterion(9, "projection suite (200 inputs)", ok, detail)


def _zero_cost(t, x, a, b):
    return np.zeros(np.broadcast(t, x, a, b).shape)


def test_criterion_10_fd_consistency():
    a0, b0 = 0.1, 0.3
    exact = math.sin(b0) * math.exp(-a0 / 2)
    cs = ControlSet.from_pairs([(a0, b0)])
    errs = []
    for dx, dt in ((0.2, 0.04), (0.1, 0.01), (0.05, 0.0025)):
        grid = GridSpec.from_steps(3.0, dx, dt)
        lam0 = solve_backward(grid, cs, _zero_cost, np.sin(grid.x)).lambda0
        errs.append(abs(lam0[grid.center] - exact))
    order = math.log2(errs[1] / errs[2])
    assert record_criterion(10, "finite-difference consistency", order >= 0.9 and errs[2] < errs[1] < errs[0],
                            "errors " + ", ".join(f"{e:.2e}" for e in errs) + f", order in dx {order:.3f} >= 0.9")


def test_criterion_11_determinism(full_runs):
    same = full_runs["toy"]["trace"] == full_runs["toy_repeat"]["trace"]
    assert record_criterion(11, "byte-identical toy traces", same,
                            f"{len(full_runs['toy']['trace'])} bytes per trace")
