"""Pure numpy fallback for the Lie-group ODE stepping kernel.

Everything here works on stacked arrays: matrices occupy the last two axes
and any leading axes are batch axes. The scans integrate the right-invariant
linear equation y' y^-1 = xi(t) on a uniform grid, given the algebra samples
at the nodes and (for the 4th-order scheme) at the step midpoints.
"""
import numpy as np

IMPL = "pure"

_TAYLOR_TERMS = 14


def expm(X):
    """Matrix exponential of a stack of small matrices.

    Scaling and squaring with a Taylor core; accurate to ~1e-15 for the
    well-scaled inputs the integrators produce.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[-1]
    norms = np.abs(X).sum(axis=-1).max(axis=-1)  # max row sum, cheap bound
    nmax = float(norms.max()) if norms.size else 0.0
    squarings = 0
    if nmax > 0.25:
        squarings = int(np.ceil(np.log2(nmax / 0.25)))
    A = X / (2.0 ** squarings)
    eye = np.broadcast_to(np.eye(n), X.shape)
    out = eye + A / _TAYLOR_TERMS
    for k in range(_TAYLOR_TERMS - 1, 0, -1):
        out = eye + (A @ out) / k
    for _ in range(squarings):
        out = out @ out
    return out


def _bracket(a, b):
    return a @ b - b @ a


def _dexpinv(u, v):
    # truncated inverse-dexp series; enough terms for a 4th-order method
    w = _bracket(u, v)
    return v - 0.5 * w + (1.0 / 12.0) * _bracket(u, w)


def rkmk4_scan(xi_nodes, xi_mids, dt, y0):
    """4th-order Munthe-Kaas RK scan for y' y^-1 = xi(t).

    xi_nodes: (..., N+1, n, n), xi_mids: (..., N, n, n), y0: (..., n, n).
    Returns the trajectory (..., N+1, n, n).
    """
    xi_nodes = np.asarray(xi_nodes, dtype=float)
    xi_mids = np.asarray(xi_mids, dtype=float)
    nsteps = xi_mids.shape[-3]
    out = np.empty_like(xi_nodes)
    y = np.array(y0, dtype=float, copy=True)
    out[..., 0, :, :] = y
    for i in range(nsteps):
        k1 = xi_nodes[..., i, :, :]
        xm = xi_mids[..., i, :, :]
        k2 = _dexpinv(0.5 * dt * k1, xm)
        k3 = _dexpinv(0.5 * dt * k2, xm)
        k4 = _dexpinv(dt * k3, xi_nodes[..., i + 1, :, :])
        theta = (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        y = expm(theta) @ y
        out[..., i + 1, :, :] = y
    return out


def euler_scan(xi_nodes, dt, y0):
    """Lie-Euler scan (order 1) for y' y^-1 = xi(t)."""
    xi_nodes = np.asarray(xi_nodes, dtype=float)
    nsteps = xi_nodes.shape[-3] - 1
    out = np.empty_like(xi_nodes)
    y = np.array(y0, dtype=float, copy=True)
    out[..., 0, :, :] = y
    for i in range(nsteps):
        y = expm(dt * xi_nodes[..., i, :, :]) @ y
        out[..., i + 1, :, :] = y
    return out
