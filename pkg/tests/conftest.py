import numpy as np
import pytest

from smtransport import GridSpec, make_interval_set, make_log_martingale_set, diffusion_cost
from smtransport.measures import Atoms, Gaussian


@pytest.fixture
def toy_grid():
    return GridSpec.from_steps(1.0, 0.1, 0.025)


@pytest.fixture
def toy_controls():
    return make_interval_set(0.0, 0.1, 0.0, 0.0, 2, 1)


@pytest.fixture
def toy_marginals():
    return Gaussian(0.0, 0.1), Gaussian(0.0, 0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_atoms(rng, grid, n=5, spread=1.2):
    w = rng.random(n)
    return Atoms(rng.uniform(-spread * grid.R, spread * grid.R, n), w / w.sum())


def random_controls(rng, n_cand, grid):
    """Random frozen control field (candidate indices, -1 on the boundary)."""
    c = rng.integers(0, n_cand, size=(grid.l, grid.n_nodes))
    c[:, 0] = c[:, -1] = -1
    return c


def drift_diffusion_set(grid, n=4, frac=0.9):
    """Random-ish candidates with both signs of drift, all inside the CFL bound."""
    a = np.linspace(0.0, 1.0, n)
    b = np.linspace(-1.0, 1.0, n)[::-1]
    scale = frac / (grid.dt * (np.abs(b) / grid.dx + a / grid.dx**2)).max()
    from smtransport import ControlSet
    return ControlSet(a * scale, b * scale, "test")


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def record_criterion(n, title, ok, detail=""):
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append((n, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
