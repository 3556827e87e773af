"""Projected super-gradient ascent on the discrete dual objective.

The objective is

    v(lambda1) = mu0(Lin^R[lambda0]) - mu1(Lin^R[lambda1]),

with ``lambda0`` the backward HJB solve from terminal data ``lambda1``. It
is concave under the CFL condition, and the iteration

    lambda^{n+1} = P_K(lambda^n + gamma_n * grad v(lambda^n)),  lambda^0 = seed,

is run for a fixed number of steps while tracking the best value seen.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .grid import GridSpec
from .hjb import Scheme, SolveResult
from .io import atomic_write_rows
from .lipproj import norm_R, project
from .measures import Marginal
from .model import ControlSet, CostFn
from .sensitivity import adjoint_from_weights, direct_from_weights

class NumericAbort(RuntimeError):
    pass


@dataclass(frozen=True)
class DivergentSteps:
    """gamma_n = c / n**p with p in (1/2, 1].

    ``c=None`` picks ``K dx / sqrt(R/dx + 1)``.
    """

    c: Optional[float] = None
    p: float = 1.0

    def __post_init__(self):
        if not 0.5 < self.p <= 1.0:
            raise ValueError("exponent p must lie in (1/2, 1]")
        if self.c is not None and not self.c > 0:
            raise ValueError("c must be positive")

    def scale(self, grid: GridSpec, K: float) -> float:
        if self.c is not None:
            return self.c
        return K * grid.dx / math.sqrt(grid.R / grid.dx + 1)

    def gamma(self, n, grad_norm, grid, K):
        return self.scale(grid, K) / n**self.p


@dataclass(frozen=True)
class OptimalSteps:
    """gamma_n = sqrt(2 Pi) / (|grad|_R sqrt(n)), with Pi = 2 K^2 R dx."""

    def gamma(self, n, grad_norm, grid, K):
        if grad_norm == 0:
            return 0.0
        return math.sqrt(2 * diameter_sq(grid, K)) / (grad_norm * math.sqrt(n))


StepPolicy = Union[DivergentSteps, OptimalSteps]


@dataclass(frozen=True)
class AscentConfig:
    K: float
    n_iters: int
    stepsize: StepPolicy = field(default_factory=OptimalSteps)
    seed: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("K must be positive")
        if self.n_iters < 0:
            raise ValueError("n_iters must be >= 0")


def diameter_sq(grid: GridSpec, K: float) -> float:
    """Bound 2 K^2 R dx used for the squared diameter of the feasible set."""
    return 2.0 * K**2 * grid.R * grid.dx


class DualProblem:
    """Grid, controls, cost and marginals with the hat weights cached."""

    def __init__(self, grid: GridSpec, cs: ControlSet, cost: CostFn, m0: Marginal, m1: Marginal,
                 gradient_method="adjoint"):
        if gradient_method not in ("adjoint", "direct"):
            raise ValueError(f"unknown gradient method {gradient_method!r}")
        self.gradient_method = gradient_method
        self.scheme = Scheme(grid, cs, cost)
        self.grid = grid
        self.cs = cs
        self.cost = cost
        self.m0 = m0
        self.m1 = m1
        self.w0 = m0.hat_weights(grid)
        self.w1 = m1.hat_weights(grid)

    def solve(self, lambda1) -> tuple[float, SolveResult]:
        res = self.scheme.solve(lambda1)
        return float(np.dot(self.w0, res.lambda0) - np.dot(self.w1, lambda1)), res

    def value(self, lambda1) -> float:
        return self.solve(lambda1)[0]

    def gradient(self, controls) -> np.ndarray:
        if self.gradient_method == "direct":
            return direct_from_weights(self.scheme, self.w0, self.w1, controls)
        return adjoint_from_weights(self.scheme, self.w0, self.w1, controls)

    def value_and_gradient(self, lambda1):
        val, res = self.solve(lambda1)
        return val, self.gradient(res.controls)


def evaluate_dual(grid, cs, cost, m0, m1, lambda1) -> float:
    return DualProblem(grid, cs, cost, m0, m1).value(lambda1)


@dataclass
class AscentReport:
    best_value: float
    best_iterate: np.ndarray
    best_index: int
    value_trace: np.ndarray
    gradient_norm_trace: np.ndarray
    gamma_trace: np.ndarray
    theoretical_gap: float
    error_budget: "ErrorBudget"
    wall_time: float
    stopped_early: bool = False

    @property
    def n_iters(self) -> int:
        return len(self.gamma_trace)

    def trace_rows(self):
        running = np.maximum.accumulate(self.value_trace)
        for n, v in enumerate(self.value_trace):
            gamma = repr(float(self.gamma_trace[n])) if n < len(self.gamma_trace) else ""
            yield (n, repr(float(v)), repr(float(running[n])),
                   repr(float(self.gradient_norm_trace[n])), gamma)

    def write_trace_csv(self, path):
        atomic_write_rows(path, ("n", "value", "running_max", "gradient_norm_R", "gamma_n"),
                          self.trace_rows())


def run_ascent(grid, cs, cost, m0, m1, config: AscentConfig, problem: DualProblem = None) -> AscentReport:
    """Fixed-length projected ascent starting from ``config.seed`` (zero by default).

    Row ``n`` of the traces belongs to iterate ``lambda^n``; ``gamma_trace[n]``
    is the step taken from it. With the optimal step policy a zero gradient
    ends the run, since the iterate is then a maximizer.
    """
    start = time.perf_counter()
    if problem is None:
        problem = DualProblem(grid, cs, cost, m0, m1)
    K, dx = config.K, grid.dx
    lam = np.zeros(grid.n_nodes) if config.seed is None else grid.check_function(config.seed, "seed").copy()

    values = np.empty(config.n_iters + 1)
    norms = np.empty(config.n_iters + 1)
    gammas = np.empty(config.n_iters)
    best_value, best_lam, best_index = -np.inf, lam, 0
    stopped = False
    last = config.n_iters
    for n in range(config.n_iters + 1):
        val, grad = problem.value_and_gradient(lam)
        if not np.isfinite(val) or not np.all(np.isfinite(grad)):
            raise NumericAbort(f"non-finite dual value or gradient at iteration {n}")
        gnorm = norm_R(grad)
        values[n], norms[n] = val, gnorm
        if val > best_value:
            best_value, best_lam, best_index = val, lam, n
        if n == config.n_iters:
            break
        gamma = config.stepsize.gamma(n + 1, gnorm, grid, K)
        if gnorm == 0 and isinstance(config.stepsize, OptimalSteps):
            stopped, last = True, n
            break
        gammas[n] = gamma
        lam = project(lam + gamma * grad, K, dx)

    values, norms, gammas = values[:last + 1], norms[:last + 1], gammas[:last]
    gap = theoretical_gap(grid, config, len(gammas), norms[:len(gammas)], gammas) if len(gammas) else math.inf
    budget = error_budget(grid, cs, cost, m0, m1, K, ascent_gap=gap)
    return AscentReport(
        best_value=float(best_value),
        best_iterate=best_lam,
        best_index=best_index,
        value_trace=values,
        gradient_norm_trace=norms,
        gamma_trace=gammas,
        theoretical_gap=gap,
        error_budget=budget,
        wall_time=time.perf_counter() - start,
        stopped_early=stopped,
    )


# -- convergence bounds ----------------------------------------------------

def step_sizes(grid, config: AscentConfig, gradient_norms) -> np.ndarray:
    return np.array([config.stepsize.gamma(n, g, grid, config.K)
                     for n, g in enumerate(gradient_norms, start=1)])


def theoretical_gap(grid, config: AscentConfig, n: int, gradient_norms, gammas=None) -> float:
    """(Pi + sum gamma_n^2 |grad_n|^2) / sum gamma_n over the first ``n`` steps."""
    if n < 1:
        raise ValueError("need at least one step")
    g = np.asarray(gradient_norms, dtype=float)[:n]
    gam = step_sizes(grid, config, g) if gammas is None else np.asarray(gammas, dtype=float)[:n]
    total = gam.sum()
    if total == 0:
        return math.inf
    return float((diameter_sq(grid, config.K) + np.sum(gam**2 * g**2)) / total)


def closed_form_gap(grid, config: AscentConfig, gammas) -> float:
    """Trace-free bound using |grad|_R^2 <= 4 (R/dx + 1)."""
    gam = np.asarray(gammas, dtype=float)
    return float((diameter_sq(grid, config.K) + 4 * (grid.R / grid.dx + 1) * np.sum(gam**2)) / gam.sum())


def optimal_rate_shape(grid, K, n) -> float:
    """K (R + sqrt(R dx)) / sqrt(N); the true bound is this times an unknown constant."""
    return K * (grid.R + math.sqrt(grid.R * grid.dx)) / math.sqrt(n)


# -- error budget ----------------------------------------------------------

FD_RATE_NOTE = "L_{K,R} * (dt^(1/10) + dx^(1/5)) + K*dx, L_{K,R} = C*(1 + K + K*R) (constant C unknown)"
CONTROL_NOTE = ("finite candidate list; exact for costs affine in (a, b) over a box or segment, "
                "otherwise an unquantified control-discretization error")


@dataclass(frozen=True)
class ErrorBudget:
    """Computable parts of the gap between the discrete value and the true one."""

    M: float
    tail_integral: float
    domain_truncation: float
    fd_rate_known_part: float
    ascent_gap: float
    fd_rate: str = FD_RATE_NOTE
    control_resolution: str = CONTROL_NOTE

    def as_text(self) -> str:
        return "\n".join([
            "error_budget:",
            f"  M: {self.M!r}",
            f"  tail_integral: {self.tail_integral!r}",
            f"  domain_truncation: {self.domain_truncation!r} x C",
            f"  fd_rate: {self.fd_rate}",
            f"  fd_rate_known_part: {self.fd_rate_known_part!r}",
            f"  ascent_gap: {self.ascent_gap!r}",
            f"  control_resolution: {self.control_resolution}",
        ])


def bound_M(grid, cs: ControlSet, cost: CostFn) -> float:
    """sup of |u| + |l(t, 0, u)| + |d/dx l(t, x, u)| over grid times, grid nodes and candidates.

    The x-derivative is taken by finite differences between nodes, so this
    samples the supremum rather than bounding it.
    """
    t = grid.t[:, None, None]
    x = grid.x[None, :, None]
    a, b = cs.a[None, None, :], cs.b[None, None, :]
    shape = (grid.l + 1, grid.n_nodes, len(cs))
    vals = np.broadcast_to(np.asarray(cost(t, x, a, b), dtype=float), shape)
    at_zero = np.abs(vals[:, grid.center, :])
    grad_x = np.abs(np.diff(vals, axis=1)) / grid.dx
    u_norm = np.hypot(cs.a, cs.b)
    return float(np.max(u_norm + at_zero.max(axis=0) + grad_x.max(axis=(0, 1))))


def error_budget(grid, cs, cost, m0: Marginal, m1: Marginal, K, ascent_gap=math.nan) -> ErrorBudget:
    M = bound_M(grid, cs, cost)
    R = grid.R
    tail = m0.tail_integral(R / 2) + m1.tail_integral(R / 2)
    expo = math.exp(-R**2 / (8 * M) + R / 2) if M > 0 else 0.0
    return ErrorBudget(
        M=M,
        tail_integral=tail,
        domain_truncation=(1 + K) * (expo + tail),
        fd_rate_known_part=K * grid.dx,
        ascent_gap=ascent_gap,
    )
