"""
Finite-difference consistency
=============================

With a single control (a0, b0) and no running cost the scheme is a linear
upwind heat/drift step, and lambda0(x) should approach
E[lambda1(x + b0 + sqrt(a0) Z)] = sin(x + b0) exp(-a0/2) for lambda1 = sin.
Halving dx and quartering dt keeps the CFL ratio fixed; the upwind drift
term makes the error first order in dx.
"""

import math

import numpy as np

from smtransport import ControlSet, GridSpec, solve_backward
from smtransport.hjb import check_cfl

a0, b0 = 0.1, 0.3
cs = ControlSet.from_pairs([(a0, b0)])
exact = math.sin(b0) * math.exp(-a0 / 2)


def no_cost(t, x, a, b):
    return np.zeros(np.broadcast(t, x, a, b).shape)


prev = None
print("   dx        dt       cfl    lambda0(0)     error     order")
for k in range(5):
    dx, dt = 0.2 / 2**k, 0.04 / 4**k
    grid = GridSpec.from_steps(3.0, dx, dt)
    lam0 = solve_backward(grid, cs, no_cost, np.sin(grid.x)).lambda0[grid.center]
    err = abs(lam0 - exact)
    order = "" if prev is None else f"{math.log2(prev / err):.3f}"
    print(f"{dx:8.4f}  {dt:8.6f}  {1 - check_cfl(grid, cs).margin:.3f}  {lam0:.8f}  {err:.3e}  {order}")
    prev = err
print("exact", exact)
