"""Marginal laws on the real line and their pairing with grid interpolants.

``Lin^R[phi]`` is the piecewise-linear interpolant of nodal values on
``[-R, R]`` extended by zero outside. Its integral against a measure is a
dot product of ``phi`` with the hat-function weights ``mu(hat_i)``; the two
boundary nodes carry half-hats. Mass outside ``[-R, R]`` is dropped, not
renormalized.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .grid import GridSpec

log = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _pdf(z):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(z))


class Marginal:
    """Base class; subclasses implement the three moment-type integrals."""

    def hat_weights(self, grid: GridSpec) -> np.ndarray:
        raise NotImplementedError

    def tail_integral(self, c: float) -> float:
        """Integral of ``1 + |x|`` over ``|x| > c``."""
        raise NotImplementedError

    def expect(self, f) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(Marginal):
    mean: float
    stddev: float

    def __post_init__(self):
        if not self.stddev > 0:
            raise ValueError("stddev must be positive")

    def cell_moments(self, lo, hi):
        """Mass and first moment of each interval ``[lo, hi]``."""
        m, s = self.mean, self.stddev
        z0 = (np.asarray(lo) - m) / s
        z1 = (np.asarray(hi) - m) / s
        # upper-tail cells: difference of survival functions keeps precision
        mass = np.where(z0 > 0, ndtr(-z0) - ndtr(-z1), ndtr(z1) - ndtr(z0))
        first = m * mass + s * (_pdf(z0) - _pdf(z1))
        return mass, first

    def hat_weights(self, grid: GridSpec) -> np.ndarray:
        x = grid.x
        lo, hi = x[:-1], x[1:]
        mass, first = self.cell_moments(lo, hi)
        # on [x_i, x_{i+1}] the two hats are (x_{i+1} - x)/dx and (x - x_i)/dx
        down = (hi * mass - first) / grid.dx
        up = (first - lo * mass) / grid.dx
        w = np.zeros(grid.n_nodes)
        w[:-1] += down
        w[1:] += up
        # far-tail cells can cancel to -1e-20 or so
        return np.maximum(w, 0.0)

    def tail_integral(self, c: float) -> float:
        m, s = self.mean, self.stddev
        zp = (c - m) / s
        zm = (-c - m) / s
        upper_mass = ndtr(-zp)
        lower_mass = ndtr(zm)
        # E[X; X > c] and E[-X; X < -c]
        upper_first = m * upper_mass + s * _pdf(zp)
        lower_first = -m * lower_mass + s * _pdf(zm)
        return float(upper_mass + lower_mass + upper_first + lower_first)

    def expect(self, f, n=200) -> float:
        z, w = np.polynomial.hermite_e.hermegauss(n)
        return float(np.dot(w, f(self.mean + self.stddev * z)) / np.sqrt(2 * np.pi))


@dataclass(frozen=True)
class Atoms(Marginal):
    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.positions, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if p.shape != w.shape or p.ndim != 1 or p.size == 0:
            raise ValueError("positions and weights must be nonempty 1-d arrays of equal length")
        if np.any(w < 0):
            raise ValueError("atom weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"atom weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, x: float) -> "Atoms":
        return cls([x], [1.0])

    def hat_weights(self, grid: GridSpec) -> np.ndarray:
        out = np.zeros(grid.n_nodes)
        p, w = self.positions, self.weights
        inside = np.abs(p) <= grid.R
        s = (p[inside] + grid.R) / grid.dx
        cell = np.clip(np.floor(s).astype(int), 0, grid.n_nodes - 2)
        frac = s - cell
        # snap round-off so atoms on a node land on exactly one weight
        frac[np.abs(frac) < 1e-12] = 0.0
        frac[np.abs(frac - 1) < 1e-12] = 1.0
        np.add.at(out, cell, w[inside] * (1 - frac))
        np.add.at(out, cell + 1, w[inside] * frac)
        return out

    def tail_integral(self, c: float) -> float:
        far = np.abs(self.positions) > c
        return float(np.sum(self.weights[far] * (1 + np.abs(self.positions[far]))))

    def expect(self, f) -> float:
        return float(np.dot(self.weights, f(self.positions)))


def hat_weights(m: Marginal, grid: GridSpec) -> np.ndarray:
    """``weights[i] = mu(hat_i)`` for every node; entries are >= 0 and sum to <= 1."""
    return m.hat_weights(grid)


def integrate_linear(m: Marginal, grid: GridSpec, phi) -> float:
    """``mu(Lin^R[phi])``, exact for both marginal kinds."""
    phi = grid.check_function(phi)
    return float(np.dot(hat_weights(m, grid), phi))


def load_atoms_csv(path) -> Atoms:
    """Read ``position, weight`` rows; a non-numeric first row is taken as a header.

    Weights are renormalized, with a warning when their sum is off by more
    than 1e-6.
    """
    rows = []
    with open(path, newline="") as fh:
        for n, row in enumerate(csv.reader(fh)):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if n == 0:
                    continue
                raise ValueError(f"{path}: bad row {n + 1}: {row!r}")
    if not rows:
        raise ValueError(f"{path}: no atoms")
    p, w = np.array(rows).T
    total = w.sum()
    if not total > 0:
        raise ValueError(f"{path}: total weight is {total!r}")
    if abs(total - 1) > 1e-6:
        log.warning("%s: atom weights sum to %.12g; renormalizing", path, total)
    return Atoms(p, w / total)
