"""Grid numerics shared by the path and transport code.

Uniform-grid differentiation uses 5-point order-4 stencils (one-sided at the
ends); quadrature is composite Simpson with a trapezoid correction on a
trailing odd interval; the sitting-instant reparametrization is the C^5
polynomial smoothstep, exactly constant on the margins.
"""
import numpy as np
from scipy.integrate import cumulative_simpson


def deriv_grid(values, dx, axis=0):
    """Order-4 first derivative of samples on a uniform grid."""
    f = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 5:
        raise ValueError("need at least 5 nodes for the order-4 stencil")
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dx)
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dx)
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dx)
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * dx)
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * dx)
    return np.moveaxis(out, 0, axis)


def deriv_grid_o2(values, dx, axis=0):
    """Order-2 central first derivative (one-sided at the ends)."""
    f = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * dx)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dx)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * dx)
    return np.moveaxis(out, 0, axis)


def midpoints(values, axis=0):
    """Order-4 interpolation of node samples to step midpoints."""
    f = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 4:
        raise ValueError("need at least 4 nodes for midpoint interpolation")
    out = np.empty((n - 1,) + f.shape[1:], dtype=float)
    out[1:-1] = (-f[:-3] + 9 * f[1:-2] + 9 * f[2:-1] - f[3:]) / 16.0
    out[0] = (5 * f[0] + 15 * f[1] - 5 * f[2] + f[3]) / 16.0
    out[-1] = (f[-4] - 5 * f[-3] + 15 * f[-2] + 5 * f[-1]) / 16.0
    return np.moveaxis(out, 0, axis)


def quad_weights(n_nodes, dx):
    """Composite Simpson weights; trapezoid correction on a trailing interval."""
    n = n_nodes - 1  # interval count
    w = np.zeros(n_nodes)
    if n <= 0:
        return w
    if n == 1:
        w[:] = 0.5 * dx
        return w
    m = n if n % 2 == 0 else n - 1
    w[0] += dx / 3.0
    w[m] += dx / 3.0
    w[1:m:2] += 4.0 * dx / 3.0
    w[2:m:2] += 2.0 * dx / 3.0
    if n % 2 == 1:
        w[-2] += 0.5 * dx
        w[-1] += 0.5 * dx
    return w


def integrate(values, dx, axis=0):
    values = np.asarray(values, dtype=float)
    w = quad_weights(values.shape[axis], dx)
    shape = [1] * values.ndim
    shape[axis] = len(w)
    return np.sum(values * w.reshape(shape), axis=axis)


def cumulative_integral(values, dx, axis=0):
    values = np.asarray(values, dtype=float)
    return cumulative_simpson(values, dx=dx, axis=axis, initial=0.0)


def smoothstep(x):
    """C^5 polynomial smoothstep on [0,1] (order-5 smootherstep)."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x ** 6 * (462.0 + x * (-1980.0 + x * (3465.0 + x * (
        -3080.0 + x * (1386.0 + x * (-252.0))))))


def sitting_reparam(u, margin):
    """Map [0,1] onto itself, constant on [0,margin] and [1-margin,1]."""
    u = np.asarray(u, dtype=float)
    if not 0.0 <= margin < 0.5:
        raise ValueError("margin must be in [0, 0.5)")
    if margin == 0.0:
        return smoothstep(u)
    return smoothstep((u - margin) / (1.0 - 2.0 * margin))


def loglog_slope(hs, errs):
    """Least-squares convergence slope of errs against grid sizes hs."""
    hs = np.asarray(hs, dtype=float)
    errs = np.maximum(np.asarray(errs, dtype=float), 1e-300)
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
