"""Closed-form transport costs for the benchmark problems.

Toy problem: martingale transport with cost ``l = a`` between centred
Gaussians. Under any admissible plan ``E[int a dt] = E[X_1^2 - X_0^2]``, so
the value is ``sigma1^2 - sigma0^2``.

Weighted variance swap: ``X = log S`` with controls ``(a, -a/2)``, cost
``eta(x) a``, start ``delta_{x0}`` and terminal law ``N(x0 - a/2, a)``. With
``phi'' - phi' = 2 eta`` Ito's formula gives ``V = mu1(phi) - phi(x0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import GridSpec
from .measures import Atoms, Gaussian, Marginal
from .model import (ControlSet, CostFn, WeightedDiffusionCost, diffusion_cost,
                    make_interval_set, make_log_martingale_set)


class InfeasiblePlan(ValueError):
    pass


def toy_exact(sigma0: float, sigma1: float) -> float:
    if not 0 <= sigma0 <= sigma1:
        raise ValueError("need 0 <= sigma0 <= sigma1")
    return sigma1**2 - sigma0**2


def swap_potential(eta_kind: str, C1=0.0, C2=0.0):
    """A solution of phi'' - phi' = 2 eta, with free constants C1 (of e^x) and C2."""
    if eta_kind == "const":
        return lambda x: -2 * x + C1 * np.exp(x) + C2
    if eta_kind == "linear":
        return lambda x: -x**2 - 2 * x - C1 * np.exp(x) + C2
    raise ValueError(f"unknown weight {eta_kind!r}")


def variance_swap_exact(eta_kind: str, a: float, x0: float, C1: float = 0.0, C2: float = 0.0) -> float:
    """mu1(phi) - phi(x0) for mu1 = N(x0 - a/2, a), computed from Gaussian moments.

    The result does not depend on ``C1`` or ``C2``: ``E[e^X] = e^{x0}`` under
    ``mu1`` and constants cancel.
    """
    if a < 0:
        raise ValueError("a must be nonnegative")
    m = x0 - a / 2
    mean_x, mean_x2, mean_exp = m, a + m**2, math.exp(m + a / 2)
    if eta_kind == "const":
        mu1_phi = -2 * mean_x + C1 * mean_exp + C2
    elif eta_kind == "linear":
        mu1_phi = -mean_x2 - 2 * mean_x - C1 * mean_exp + C2
    else:
        raise ValueError(f"unknown weight {eta_kind!r}")
    return mu1_phi - float(swap_potential(eta_kind, C1, C2)(x0))


@dataclass
class Benchmark:
    name: str
    exact_value: float
    grid: GridSpec
    control_set: ControlSet
    cost: CostFn
    mu0: Marginal
    mu1: Marginal
    K: float
    published_value: Optional[float] = None
    accept: tuple[float, float] = (-math.inf, math.inf)
    plan: dict = field(default_factory=dict)


def toy_benchmark(sigma0=0.1, sigma1=0.2, a_max=0.1, K=1.5, R=1.0, dx=0.1, dt=0.025) -> Benchmark:
    return Benchmark(
        name="toy",
        exact_value=toy_exact(sigma0, sigma1),
        grid=GridSpec.from_steps(R, dx, dt),
        control_set=make_interval_set(0.0, a_max, 0.0, 0.0, 2, 1),
        cost=diffusion_cost,
        mu0=Gaussian(0.0, sigma0),
        mu1=Gaussian(0.0, sigma1),
        K=K,
        published_value=0.029705,
        accept=(0.0290, 0.0301),
        plan={"kind": "toy", "a": sigma1**2 - sigma0**2},
    )


def variance_swap_benchmark(eta_kind="const", a=0.04, x0=1.0, a_max=0.1, n_controls=2,
                            K=1.5, R=2.0, dx=0.1, dt=0.025) -> Benchmark:
    published = {"const": 0.0395311, "linear": 0.0391632}[eta_kind]
    accept = {"const": (0.0388, 0.0402), "linear": (0.0384, 0.0398)}[eta_kind]
    return Benchmark(
        name=f"variance_swap_{eta_kind}",
        exact_value=variance_swap_exact(eta_kind, a, x0),
        grid=GridSpec.from_steps(R, dx, dt),
        control_set=make_log_martingale_set(0.0, a_max, n_controls),
        cost=WeightedDiffusionCost(eta_kind),
        mu0=Atoms.point(x0),
        mu1=Gaussian(x0 - a / 2, math.sqrt(a)),
        K=K,
        published_value=published,
        accept=accept,
        plan={"kind": "swap", "eta": eta_kind, "a": a, "x0": x0},
    )


def reference_benchmarks() -> list[Benchmark]:
    return [toy_benchmark(), variance_swap_benchmark("const"), variance_swap_benchmark("linear")]


def feasible_primal_cost(bench: Benchmark) -> float:
    """Cost of the constant-control Gaussian plan joining the two marginals.

    Raises :class:`InfeasiblePlan` when that control is not in the control set.
    """
    plan = bench.plan
    a = plan["a"]
    cs = bench.control_set
    if not (cs.a.min() <= a <= cs.a.max()):
        raise InfeasiblePlan(f"constant plan needs a = {a!r}, outside [{cs.a.min()}, {cs.a.max()}]")
    if plan["kind"] == "toy":
        return a
    if plan["kind"] == "swap":
        # E[int eta(X_t) a dt] along X_t = x0 - a t / 2 + sqrt(a) W_t
        if plan["eta"] == "const":
            return a
        return a * (plan["x0"] - a / 4)
    raise ValueError(f"no constant plan for {plan['kind']!r}")
