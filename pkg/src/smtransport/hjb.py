"""Explicit backward finite-difference scheme for the bounded-domain HJB equation.

On interior nodes, stepping from level ``k + 1`` to ``k``::

    w_k(x_i) = w_{k+1}(x_i) + dt * min_c [ l(t_{k+1}, x_i, a_c, b_c)
                   + b_c^+ D^+ w_{k+1} + b_c^- D^- w_{k+1} + a_c / 2 * D^2 w_{k+1} ]

with forward/backward differences ``D^+``, ``D^-`` and the centred second
difference ``D^2``. The terminal row and the two lateral nodes ``x = +-R`` are
pinned to the terminal multiplier. Under the CFL condition
``dt * (|b| / dx + a / dx^2) <= 1`` every one-step map is monotone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .grid import GridSpec
from .io import atomic_write_rows
from .model import ControlSet, CostFn, cost_table


class CFLViolation(ValueError):
    def __init__(self, candidate, ratio):
        self.candidate = candidate
        self.ratio = ratio
        super().__init__(
            f"CFL condition violated by candidate (a, b) = {candidate}: "
            f"dt*(|b|/dx + a/dx^2) = {ratio:.6g} > 1"
        )


@dataclass(frozen=True)
class CFLCheck:
    ok: bool
    margin: float
    worst: tuple[float, float]

    def raise_if_violated(self):
        if not self.ok:
            raise CFLViolation(self.worst, 1.0 - self.margin)


def check_cfl(grid: GridSpec, cs: ControlSet) -> CFLCheck:
    ratio = grid.dt * (np.abs(cs.b) / grid.dx + cs.a / grid.dx**2)
    c = int(np.argmax(ratio))
    return CFLCheck(bool(ratio[c] <= 1.0), float(1.0 - ratio[c]), cs[c])


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one backward sweep.

    ``controls[k, i]`` is the candidate index used at ``(t_k, x_i)`` for
    interior nodes and ``-1`` on the lateral boundary.
    """

    lambda0: np.ndarray
    controls: np.ndarray
    full_surface: Optional[np.ndarray] = None


class Scheme:
    """A grid, control set and running cost bundled for repeated solves.

    The cost table is evaluated once; every solve after that runs in the
    compiled kernels.
    """

    def __init__(self, grid: GridSpec, cs: ControlSet, cost: CostFn):
        check_cfl(grid, cs).raise_if_violated()
        self.grid = grid
        self.cs = cs
        self.cost = cost
        self.table = cost_table(grid, cs, cost)
        self._a = np.ascontiguousarray(cs.a)
        self._b = np.ascontiguousarray(cs.b)

    def _surface(self, keep):
        g = self.grid
        return np.empty((g.l + 1, g.n_nodes)) if keep else np.empty((0, g.n_nodes))

    def _terminal(self, lambda1):
        lambda1 = self.grid.check_function(lambda1, "lambda1")
        if not np.all(np.isfinite(lambda1)):
            raise ValueError("lambda1 must be finite")
        return np.ascontiguousarray(lambda1)

    def check_controls(self, controls):
        g = self.grid
        controls = np.asarray(controls)
        if controls.shape != (g.l, g.n_nodes):
            raise ValueError(f"controls must have shape {(g.l, g.n_nodes)}")
        inner = controls[:, 1:-1]
        if inner.size and (inner.min() < 0 or inner.max() >= len(self.cs)):
            raise ValueError("control index out of range")
        return np.ascontiguousarray(controls, dtype=np.int64)

    def solve(self, lambda1, keep_surface=False) -> SolveResult:
        lambda1 = self._terminal(lambda1)
        surface = self._surface(keep_surface)
        lam0, controls = _kernels.backward_min(
            lambda1, self._a, self._b, self.table, self.grid.dt, self.grid.dx, surface
        )
        return SolveResult(lam0, controls, surface if keep_surface else None)

    def solve_frozen(self, controls, lambda1, include_cost=True, keep_surface=False) -> SolveResult:
        lambda1 = self._terminal(lambda1)
        controls = self.check_controls(controls)
        surface = self._surface(keep_surface)
        lam0 = _kernels.backward_frozen(
            lambda1, self._a, self._b, self.table, controls,
            self.grid.dt, self.grid.dx, bool(include_cost), surface,
        )
        return SolveResult(lam0, controls, surface if keep_surface else None)


def solve_backward(grid, cs, cost, lambda1, keep_surface=False) -> SolveResult:
    return Scheme(grid, cs, cost).solve(lambda1, keep_surface)


def solve_frozen(grid, cs, cost, controls, lambda1, include_cost=True, keep_surface=False) -> SolveResult:
    return Scheme(grid, cs, cost).solve_frozen(controls, lambda1, include_cost, keep_surface)


def one_step_matrix(grid: GridSpec, cs: ControlSet, controls_k) -> np.ndarray:
    """Dense matrix of the frozen one-step map from level ``k + 1`` to ``k``.

    Only meant for small grids (tests, diagnostics).
    """
    n = grid.n_nodes
    A = np.eye(n)
    for i in range(1, n - 1):
        a, b = cs[int(controls_k[i])]
        right = grid.dt * (max(b, 0.0) / grid.dx + 0.5 * a / grid.dx**2)
        left = grid.dt * (max(-b, 0.0) / grid.dx + 0.5 * a / grid.dx**2)
        A[i, i - 1], A[i, i], A[i, i + 1] = left, 1.0 - left - right, right
    return A


def write_lambda0_csv(path, grid: GridSpec, result: SolveResult):
    rows = [(i, repr(float(x)), repr(float(v)))
            for i, x, v in zip(range(-grid.r, grid.r + 1), grid.x, result.lambda0)]
    atomic_write_rows(path, ("i", "x_i", "value"), rows)


def write_controls_csv(path, grid: GridSpec, cs: ControlSet, result: SolveResult):
    rows = []
    for k in range(grid.l):
        for pos in range(1, grid.n_nodes - 1):
            a, b = cs[int(result.controls[k, pos])]
            rows.append((k, pos - grid.r, repr(a), repr(b)))
    atomic_write_rows(path, ("k", "i", "a", "b"), rows)
