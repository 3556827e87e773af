"""Control sets, running costs and the pointwise Hamiltonian.

The control set U is a finite list of candidates ``(a, b)`` with ``a >= 0``
the diffusion coefficient and ``b`` the drift. For running costs that are
affine in the control (all the benchmark problems) the infimum over a box or
segment is attained at its extreme points, so the endpoints are exact.

A running cost is any callable ``cost(t, x, a, b)`` that broadcasts over
numpy arrays and returns the cost value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

CostFn = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ControlSet:
    a: np.ndarray
    b: np.ndarray
    description: str = ""

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.ndim != 1 or a.shape != b.shape:
            raise ValueError("a and b must be 1-d arrays of equal length")
        if a.size == 0:
            raise ValueError("control set must be nonempty")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("control candidates must be finite")
        if np.any(a < 0):
            raise ValueError("diffusion coefficients must be nonnegative")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_pairs(cls, pairs, description="explicit_list") -> "ControlSet":
        pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(pairs[:, 0], pairs[:, 1], description)

    def __len__(self) -> int:
        return self.a.size

    def __getitem__(self, c: int) -> tuple[float, float]:
        return float(self.a[c]), float(self.b[c])

    @property
    def candidates(self) -> list[tuple[float, float]]:
        return [self[c] for c in range(len(self))]

    @property
    def a_max(self) -> float:
        return float(self.a.max())

    @property
    def b_max(self) -> float:
        return float(np.abs(self.b).max())

    def with_candidate(self, a: float, b: float) -> "ControlSet":
        return ControlSet(np.append(self.a, a), np.append(self.b, b), self.description)


def make_interval_set(a_min, a_max, b_min, b_max, n_a, n_b) -> ControlSet:
    """Uniform ``n_a x n_b`` product grid over the box ``[a_min, a_max] x [b_min, b_max]``."""
    if a_min < 0:
        raise ValueError("a_min must be nonnegative")
    if a_max < a_min or b_max < b_min:
        raise ValueError("empty interval")
    if n_a < 1 or n_b < 1:
        raise ValueError("need at least one point per axis")
    if (n_a == 1 and a_max != a_min) or (n_b == 1 and b_max != b_min):
        raise ValueError("a single point per axis only fits a degenerate interval")
    aa, bb = np.meshgrid(np.linspace(a_min, a_max, n_a), np.linspace(b_min, b_max, n_b), indexing="ij")
    return ControlSet(aa.ravel(), bb.ravel(), "interval")


def make_log_martingale_set(a_min, a_max, n) -> ControlSet:
    """Segment ``{(a, -a/2) : a in [a_min, a_max]}``, which keeps ``exp(X)`` a local martingale."""
    if a_min < 0:
        raise ValueError("a_min must be nonnegative")
    if a_max < a_min:
        raise ValueError("empty interval")
    if n < 1 or (n == 1 and a_max != a_min):
        raise ValueError("need n >= 2 points unless a_min == a_max")
    a = np.linspace(a_min, a_max, n)
    return ControlSet(a, -0.5 * a, "log_martingale")


# -- running costs ---------------------------------------------------------

def diffusion_cost(t, x, a, b):
    """l(t, x, a, b) = a."""
    return np.broadcast_to(a, np.broadcast_shapes(np.shape(t), np.shape(x), np.shape(a), np.shape(b))) * 1.0


@dataclass(frozen=True)
class WeightedDiffusionCost:
    """l(t, x, a, b) = eta(x) * a, with eta constant (``c``) or the identity."""

    eta: str = "const"
    c: float = 1.0

    def __post_init__(self):
        if self.eta not in ("const", "linear"):
            raise ValueError(f"unknown weight {self.eta!r}")

    def weight(self, x):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, self.c) if self.eta == "const" else x

    def __call__(self, t, x, a, b):
        shape = np.broadcast_shapes(np.shape(t), np.shape(x), np.shape(a), np.shape(b))
        return np.broadcast_to(self.weight(x) * a, shape) * 1.0


def cost_table(grid, cs: ControlSet, cost: CostFn) -> np.ndarray:
    """Running cost at every (time level, node, candidate).

    Row ``k`` holds ``cost(t_{k+1}, x_i, a_c, b_c)``, the value used when the
    scheme steps from level ``k + 1`` to level ``k``.
    """
    t = grid.t[1:, None, None]
    x = grid.x[None, :, None]
    a = cs.a[None, None, :]
    b = cs.b[None, None, :]
    shape = (grid.l, grid.n_nodes, len(cs))
    table = np.broadcast_to(np.asarray(cost(t, x, a, b), dtype=float), shape)
    if not np.all(np.isfinite(table)):
        raise ValueError("running cost is not finite on the grid")
    return np.ascontiguousarray(table)


# -- Hamiltonian -----------------------------------------------------------

class HamiltonianResult(NamedTuple):
    value: float
    argmin: int


def hamiltonian_objective(cs: ControlSet, cost: CostFn, t, x, p, gamma) -> np.ndarray:
    """``b p + a gamma / 2 + l(t, x, a, b)`` for every candidate."""
    return cs.b * p + 0.5 * cs.a * gamma + np.asarray(cost(t, x, cs.a, cs.b), dtype=float)


def hamiltonian(cs: ControlSet, cost: CostFn, t, x, p, gamma) -> HamiltonianResult:
    """H(t, x, p, gamma) = min over U of the objective.

    Ties go to the lowest candidate index.
    """
    obj = hamiltonian_objective(cs, cost, t, x, p, gamma)
    c = int(np.argmin(obj))
    return HamiltonianResult(float(obj[c]), c)
