"""Compiled inner loops of the explicit scheme and its adjoint.

Arrays use node position ``0..n-1`` (node ``x_{-r}`` at 0). Controls are
stored as candidate indices with ``-1`` on the two lateral boundary nodes.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def backward_min(lam1, a, b, cost, dt, dx, surface):
    """Nonlinear sweep; ``surface`` is filled when it has ``l + 1`` rows."""
    l = cost.shape[0]
    n = lam1.size
    nc = a.size
    inv_dx = 1.0 / dx
    inv_dx2 = 1.0 / (dx * dx)
    keep = surface.shape[0] == l + 1
    w = lam1.copy()
    new = lam1.copy()
    controls = np.full((l, n), -1, dtype=np.int64)
    if keep:
        surface[l, :] = w
    for k in range(l - 1, -1, -1):
        for i in range(1, n - 1):
            dp = (w[i + 1] - w[i]) * inv_dx
            dm = (w[i - 1] - w[i]) * inv_dx
            d2 = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv_dx2
            best = np.inf
            arg = 0
            for c in range(nc):
                bc = b[c]
                drift = bc * dp if bc > 0.0 else -bc * dm
                val = cost[k, i, c] + drift + 0.5 * a[c] * d2
                if val < best:
                    best = val
                    arg = c
            new[i] = w[i] + dt * best
            controls[k, i] = arg
        for i in range(1, n - 1):
            w[i] = new[i]
        if keep:
            surface[k, :] = w
    return w, controls


@njit(cache=True)
def backward_frozen(lam1, a, b, cost, controls, dt, dx, include_cost, surface):
    """Linear sweep with the candidate fixed per node."""
    l = controls.shape[0]
    n = lam1.size
    inv_dx = 1.0 / dx
    inv_dx2 = 1.0 / (dx * dx)
    keep = surface.shape[0] == l + 1
    w = lam1.copy()
    new = lam1.copy()
    if keep:
        surface[l, :] = w
    for k in range(l - 1, -1, -1):
        for i in range(1, n - 1):
            # same operation order as backward_min, so frozen optimal
            # controls reproduce its output bit for bit
            c = controls[k, i]
            dp = (w[i + 1] - w[i]) * inv_dx
            dm = (w[i - 1] - w[i]) * inv_dx
            d2 = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv_dx2
            bc = b[c]
            drift = bc * dp if bc > 0.0 else -bc * dm
            run = cost[k, i, c] if include_cost else 0.0
            new[i] = w[i] + dt * (run + drift + 0.5 * a[c] * d2)
        for i in range(1, n - 1):
            w[i] = new[i]
        if keep:
            surface[k, :] = w
    return w


@njit(cache=True)
def adjoint_forward(w0, a, b, controls, dt, dx):
    """Apply the transposed one-step operators A_0^T, ..., A_{l-1}^T to ``w0``.

    The lateral boundary rows of every A_k are identity rows, so mass that
    reaches a boundary node stays there.
    """
    l = controls.shape[0]
    n = w0.size
    inv_dx = 1.0 / dx
    inv_dx2 = 1.0 / (dx * dx)
    y = w0.copy()
    nxt = np.empty(n)
    for k in range(l):
        nxt[:] = 0.0
        nxt[0] = y[0]
        nxt[n - 1] = y[n - 1]
        for i in range(1, n - 1):
            c = controls[k, i]
            bc = b[c]
            half_a = 0.5 * a[c] * inv_dx2
            right = dt * ((bc if bc > 0.0 else 0.0) * inv_dx + half_a)
            left = dt * ((-bc if bc < 0.0 else 0.0) * inv_dx + half_a)
            yi = y[i]
            nxt[i - 1] += left * yi
            nxt[i + 1] += right * yi
            nxt[i] += (1.0 - left - right) * yi
        y, nxt = nxt, y
    return y


@njit(cache=True)
def _tighten(phi, i, j, h):
    d = phi[i] - phi[j]
    if abs(d) > h:
        # snap to the bound, then walk inward by ulps of the snapped value
        phi[i] = phi[j] + h if d > 0 else phi[j] - h
        while abs(phi[i] - phi[j]) > h:
            phi[i] = np.nextafter(phi[i], phi[j])


@njit(cache=True)
def tighten_steps(phi, h):
    """Pull values toward the center until every step is at most ``h``.

    Summing clipped increments can overshoot ``h`` by an ulp; each fix only
    touches the next step outward, so one sweep per side suffices.
    """
    n = phi.size
    r = (n - 1) // 2
    for i in range(r + 1, n):
        _tighten(phi, i, i - 1, h)
    for i in range(r - 1, -1, -1):
        _tighten(phi, i, i + 1, h)
    return phi
