"""Super-gradients of the discrete dual objective.

Freezing the minimizing controls of a backward sweep makes the terminal to
initial map linear, ``lambda0 = A_0 A_1 ... A_{l-1} lambda1 + const``. The
super-gradient component ``j`` is ``mu0(Lin^R[g_0^j]) - mu1(hat_j)`` where
``g^j`` solves the frozen system with terminal and boundary data ``delta_j``.

Two routes compute it:

* :func:`supergradient_direct` solves all ``2r + 1`` systems (the oracle);
* :func:`supergradient_adjoint` pushes the ``mu0`` hat weights forward once
  through the transposed one-step maps.
"""

import numpy as np

from . import _kernels
from .hjb import Scheme
from .io import atomic_write_rows
from .measures import Marginal


def _weights(m, grid):
    # a raw weight vector stands in for a measure (e.g. the zero measure)
    if isinstance(m, Marginal):
        return m.hat_weights(grid)
    return grid.check_function(m, "hat weights")


def direct_from_weights(scheme: Scheme, w0, w1, controls):
    grid = scheme.grid
    controls = scheme.check_controls(controls)
    grad = np.empty(grid.n_nodes)
    delta = np.zeros(grid.n_nodes)
    for j in range(grid.n_nodes):
        delta[:] = 0.0
        delta[j] = 1.0
        g0 = scheme.solve_frozen(controls, delta, include_cost=False).lambda0
        grad[j] = np.dot(w0, g0) - w1[j]
    return grad


def adjoint_from_weights(scheme: Scheme, w0, w1, controls):
    grid = scheme.grid
    controls = scheme.check_controls(controls)
    y = _kernels.adjoint_forward(
        np.ascontiguousarray(w0, dtype=float), scheme._a, scheme._b, controls, grid.dt, grid.dx
    )
    return y - w1


def supergradient_direct(grid, cs, cost, m0, m1, controls):
    """Reference super-gradient from one frozen solve per node (O(l r^2))."""
    scheme = Scheme(grid, cs, cost)
    return direct_from_weights(scheme, _weights(m0, grid), _weights(m1, grid), controls)


def supergradient_adjoint(grid, cs, cost, m0, m1, controls):
    """Same vector as :func:`supergradient_direct` in a single O(l r) pass."""
    scheme = Scheme(grid, cs, cost)
    return adjoint_from_weights(scheme, _weights(m0, grid), _weights(m1, grid), controls)


def write_gradient_csv(path, grid, grad):
    rows = [(j, repr(float(x)), repr(float(g)))
            for j, x, g in zip(range(-grid.r, grid.r + 1), grid.x, grad)]
    atomic_write_rows(path, ("j", "x_j", "component"), rows)
