"""Space-time lattice on [0, 1] x [-R, R]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SNAP_RTOL = 1e-9


class GridError(ValueError):
    pass


def _snap(ratio: float, name: str) -> int:
    n = int(round(ratio))
    if n < 1 or abs(n - ratio) > SNAP_RTOL * max(1.0, abs(ratio)):
        raise GridError(f"{name} = {ratio!r} is not (close to) a positive integer")
    return n


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with ``r * dx = R`` and ``l * dt = 1``.

    Spatial nodes are ``x_i = i * dx`` for ``i = -r..r`` and are stored at
    array position ``i + r``. Time levels are ``t_k = k * dt``, ``k = 0..l``.
    Build instances with :meth:`from_steps` so that the step sizes are
    snapped to exact divisors.
    """

    R: float
    r: int
    l: int

    def __post_init__(self):
        if self.r < 1:
            raise GridError("need at least one interior node (r >= 1)")
        if self.l < 1:
            raise GridError("need at least one time step (l >= 1)")
        if not self.R > 0:
            raise GridError("R must be positive")

    @classmethod
    def from_steps(cls, R: float, dx: float, dt: float) -> "GridSpec":
        if not (R > 0 and dx > 0 and dt > 0):
            raise GridError("R, dx and dt must be positive")
        return cls(R=float(R), r=_snap(R / dx, "R/dx"), l=_snap(1.0 / dt, "1/dt"))

    @property
    def dx(self) -> float:
        return self.R / self.r

    @property
    def dt(self) -> float:
        return 1.0 / self.l

    @property
    def n_nodes(self) -> int:
        return 2 * self.r + 1

    @property
    def center(self) -> int:
        """Array position of the node x_0 = 0."""
        return self.r

    @property
    def x(self) -> np.ndarray:
        return np.arange(-self.r, self.r + 1) * self.dx

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.l + 1) * self.dt

    def index(self, i: int) -> int:
        """Array position of node ``x_i``."""
        if not -self.r <= i <= self.r:
            raise IndexError(i)
        return i + self.r

    def check_function(self, phi, name="phi") -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (self.n_nodes,):
            raise ValueError(f"{name} must have {self.n_nodes} entries, got shape {phi.shape}")
        return phi

    def nodal(self, f) -> np.ndarray:
        """Values of ``f`` at the spatial nodes."""
        return np.asarray(f(self.x), dtype=float) * np.ones(self.n_nodes)
