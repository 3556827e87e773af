"""Increment coordinates and projection onto discrete Lipschitz functions.

``to_increments`` maps nodal values to ``psi`` with ``psi_0 = phi(0)`` and
outward increments elsewhere::

    psi_i = phi(x_i) - phi(x_{i-1})   for i = 1..r
    psi_i = phi(x_i) - phi(x_{i+1})   for i = -1..-r

In these coordinates the set of K-Lipschitz grid functions vanishing at the
origin is the box ``psi_0 = 0, |psi_i| <= K dx``, so the Euclidean
projection is a clamp.
"""

import numpy as np

from ._kernels import tighten_steps


def to_increments(phi):
    phi = np.asarray(phi, dtype=float)
    r = (phi.size - 1) // 2
    psi = np.empty_like(phi)
    psi[r] = phi[r]
    psi[r + 1:] = np.diff(phi[r:])
    psi[:r] = phi[:r] - phi[1:r + 1]
    return psi


def from_increments(psi):
    psi = np.asarray(psi, dtype=float)
    r = (psi.size - 1) // 2
    phi = np.empty_like(psi)
    phi[r:] = np.cumsum(psi[r:])
    phi[:r + 1] = np.cumsum(psi[r::-1])[::-1]
    return phi


def norm_R(phi) -> float:
    """Euclidean norm of the increment vector."""
    return float(np.linalg.norm(to_increments(phi)))


def project(phi, K, dx):
    """Closest point of the K-Lipschitz set in the increment norm."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    h = K * dx
    phi = np.asarray(phi, dtype=float)
    if in_lipschitz_set(phi, K, dx):
        # members are fixed points; re-summing their increments could move them by an ulp
        return phi.copy()
    psi = np.clip(to_increments(phi), -h, h)
    psi[psi.size // 2] = 0.0
    out = from_increments(psi)
    if np.any(np.abs(np.diff(out)) > h):
        out = tighten_steps(out, h)
    return out


def in_lipschitz_set(phi, K, dx, atol=0.0) -> bool:
    phi = np.asarray(phi, dtype=float)
    return bool(phi[phi.size // 2] == 0.0 and np.all(np.abs(np.diff(phi)) <= K * dx + atol))
