"""Fixed-step integrators for the linear Lie-group equation y' y^-1 = xi(t).

The algebra samples xi are given on the grid nodes (leading batch axes
allowed, node axis third from the right for matrix groups). Midpoint values
needed by the 4th-order schemes come from order-4 interpolation of the node
samples, which preserves the overall order for smooth data.
"""
import numpy as np

from . import _kernels, numerics
from .errors import IntegratorDiverged

METHODS = ("rk4mk", "rk4proj", "euler")


def solve_linear_lie(group, xi_nodes, dt, y0, method="rk4mk", left=False):
    """Integrate y' y^-1 = xi(t) (or y^-1 y' = xi with left=True).

    xi_nodes: (..., N+1) + value_shape samples; y0 broadcastable initial
    value. Returns the trajectory (..., N+1) + value_shape.
    """
    xi_nodes = np.asarray(xi_nodes, dtype=float)
    if group.kind == "translation":
        # abelian: both invariant forms reduce to plain cumulative quadrature
        traj = numerics.cumulative_integral(xi_nodes, dt, axis=-2)
        return traj + np.asarray(y0, dtype=float)
    if left:
        w = solve_linear_lie(group, -xi_nodes, dt, group.inv(y0), method=method)
        return group.inv(w)
    if method == "rk4mk":
        mids = numerics.midpoints(xi_nodes, axis=-3)
        out = _kernels.rkmk4_scan(xi_nodes, mids, dt, y0)
    elif method == "euler":
        out = _kernels.euler_scan(xi_nodes, dt, y0)
    elif method == "rk4proj":
        out = _rk4proj(group, xi_nodes, dt, y0)
    else:
        raise ValueError("unknown integrator %r" % method)
    if not np.all(np.isfinite(out)):
        raise IntegratorDiverged("non-finite values in Lie ODE solution")
    return out


def _rk4proj(group, xi_nodes, dt, y0):
    # classical RK4 on the ambient matrix equation, re-projected per step
    mids = numerics.midpoints(xi_nodes, axis=-3)
    nsteps = xi_nodes.shape[-3] - 1
    out = np.empty_like(xi_nodes)
    y = np.broadcast_to(np.asarray(y0, dtype=float),
                        xi_nodes.shape[:-3] + xi_nodes.shape[-2:]).copy()
    out[..., 0, :, :] = y
    for i in range(nsteps):
        x0 = xi_nodes[..., i, :, :]
        xm = mids[..., i, :, :]
        x1 = xi_nodes[..., i + 1, :, :]
        k1 = x0 @ y
        k2 = xm @ (y + 0.5 * dt * k1)
        k3 = xm @ (y + 0.5 * dt * k2)
        k4 = x1 @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        y = group.project_group(y)
        out[..., i + 1, :, :] = y
    return out
