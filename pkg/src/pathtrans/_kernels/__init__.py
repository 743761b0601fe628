"""Kernel selection: compiled extension if available, numpy fallback otherwise.

Set PATHTRANS_KERNEL=pure to force the fallback.
"""
import os

import numpy as np

from . import pure

_impl = pure
if os.environ.get("PATHTRANS_KERNEL", "").lower() != "pure":
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

IMPL = _impl.IMPL


def _flatten_batch(arr, core_ndim):
    arr = np.ascontiguousarray(arr, dtype=float)
    if not arr.flags.writeable:
        arr = arr.copy()  # broadcast views are read-only; memoryviews are not
    lead = arr.shape[: arr.ndim - core_ndim]
    flat = arr.reshape((-1,) + arr.shape[arr.ndim - core_ndim:])
    return flat, lead


def expm(X):
    X = np.asarray(X, dtype=float)
    if _impl is pure:
        return pure.expm(X)
    flat, lead = _flatten_batch(X, 2)
    return _impl.expm(flat).reshape(lead + X.shape[-2:])


def rkmk4_scan(xi_nodes, xi_mids, dt, y0):
    xi_nodes = np.asarray(xi_nodes, dtype=float)
    if _impl is pure:
        return pure.rkmk4_scan(xi_nodes, xi_mids, dt, y0)
    flat_n, lead = _flatten_batch(xi_nodes, 3)
    flat_m, _ = _flatten_batch(np.asarray(xi_mids, dtype=float), 3)
    y0b = np.broadcast_to(np.asarray(y0, dtype=float), lead + xi_nodes.shape[-2:])
    flat_y, _ = _flatten_batch(y0b, 2)
    out = _impl.rkmk4_scan(flat_n, flat_m, float(dt), flat_y)
    return out.reshape(xi_nodes.shape)


def euler_scan(xi_nodes, dt, y0):
    xi_nodes = np.asarray(xi_nodes, dtype=float)
    if _impl is pure:
        return pure.euler_scan(xi_nodes, dt, y0)
    flat_n, lead = _flatten_batch(xi_nodes, 3)
    y0b = np.broadcast_to(np.asarray(y0, dtype=float), lead + xi_nodes.shape[-2:])
    flat_y, _ = _flatten_batch(y0b, 2)
    out = _impl.euler_scan(flat_n, float(dt), flat_y)
    return out.reshape(xi_nodes.shape)
