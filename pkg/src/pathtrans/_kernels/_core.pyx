# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Lie-group ODE stepping kernel.

Same contract as the pure module, restricted to a single batch axis:
xi_nodes (B, N+1, n, n), xi_mids (B, N, n, n), y0 (B, n, n). The import-time
selector in __init__ flattens other layouts before calling in here.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, log2
from libc.string cimport memcpy, memset

cnp.import_array()

IMPL = "cython"

DEF MAXN = 8
DEF TAYLOR_TERMS = 14


cdef inline void mat_mul(double* a, double* b, double* out, int n) noexcept nogil:
    cdef int i, j, k
    cdef double acc
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += a[i * n + k] * b[k * n + j]
            out[i * n + j] = acc


cdef inline void mat_bracket(double* a, double* b, double* out, int n) noexcept nogil:
    cdef int i, j, k
    cdef double acc
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += a[i * n + k] * b[k * n + j] - b[i * n + k] * a[k * n + j]
            out[i * n + j] = acc


cdef inline void expm_small(double* x, double* out, int n) noexcept nogil:
    # scaling and squaring with a Taylor core, matching the pure fallback
    cdef double a[MAXN * MAXN]
    cdef double tmp[MAXN * MAXN]
    cdef int i, j, k, squarings
    cdef double rowsum, nrm, scale
    nrm = 0.0
    for i in range(n):
        rowsum = 0.0
        for j in range(n):
            rowsum += x[i * n + j] if x[i * n + j] >= 0 else -x[i * n + j]
        if rowsum > nrm:
            nrm = rowsum
    squarings = 0
    if nrm > 0.25:
        squarings = <int>ceil(log2(nrm / 0.25))
    scale = 1.0
    for i in range(squarings):
        scale *= 0.5
    for i in range(n * n):
        a[i] = x[i] * scale
    # Horner: out = I + a/K (I + a/(K-1) (...))
    for i in range(n * n):
        out[i] = a[i] / TAYLOR_TERMS
    for i in range(n):
        out[i * n + i] += 1.0
    for k in range(TAYLOR_TERMS - 1, 0, -1):
        mat_mul(a, out, tmp, n)
        for i in range(n * n):
            out[i] = tmp[i] / k
        for i in range(n):
            out[i * n + i] += 1.0
    for k in range(squarings):
        mat_mul(out, out, tmp, n)
        memcpy(out, tmp, n * n * sizeof(double))


cdef inline void dexpinv(double* u, double* v, double* out, int n) noexcept nogil:
    cdef double w[MAXN * MAXN]
    cdef double w2[MAXN * MAXN]
    cdef int i
    mat_bracket(u, v, w, n)
    mat_bracket(u, w, w2, n)
    for i in range(n * n):
        out[i] = v[i] - 0.5 * w[i] + w2[i] / 12.0


def expm(cnp.ndarray[double, ndim=3] X):
    cdef int b = X.shape[0], n = X.shape[1]
    if n > MAXN:
        raise ValueError("kernel supports matrices up to %d x %d" % (MAXN, MAXN))
    cdef cnp.ndarray[double, ndim=3] out = np.empty_like(X)
    cdef double[:, :, ::1] xv = np.ascontiguousarray(X)
    cdef double[:, :, ::1] ov = out
    cdef int i
    with nogil:
        for i in range(b):
            expm_small(&xv[i, 0, 0], &ov[i, 0, 0], n)
    return out


def rkmk4_scan(cnp.ndarray[double, ndim=4] xi_nodes,
               cnp.ndarray[double, ndim=4] xi_mids,
               double dt,
               cnp.ndarray[double, ndim=3] y0):
    cdef int b = xi_nodes.shape[0], nn = xi_nodes.shape[1], n = xi_nodes.shape[2]
    cdef int nsteps = nn - 1
    if n > MAXN:
        raise ValueError("kernel supports matrices up to %d x %d" % (MAXN, MAXN))
    cdef cnp.ndarray[double, ndim=4] out = np.empty_like(xi_nodes)
    cdef double[:, :, :, ::1] xn = np.ascontiguousarray(xi_nodes)
    cdef double[:, :, :, ::1] xm = np.ascontiguousarray(xi_mids)
    cdef double[:, :, ::1] y0v = np.ascontiguousarray(y0)
    cdef double[:, :, :, ::1] ov = out
    cdef double y[MAXN * MAXN]
    cdef double k1[MAXN * MAXN]
    cdef double k2[MAXN * MAXN]
    cdef double k3[MAXN * MAXN]
    cdef double k4[MAXN * MAXN]
    cdef double u[MAXN * MAXN]
    cdef double theta[MAXN * MAXN]
    cdef double eth[MAXN * MAXN]
    cdef double ynew[MAXN * MAXN]
    cdef int ib, i, j
    cdef int nsq = n * n
    with nogil:
        for ib in range(b):
            memcpy(y, &y0v[ib, 0, 0], nsq * sizeof(double))
            memcpy(&ov[ib, 0, 0, 0], y, nsq * sizeof(double))
            for i in range(nsteps):
                memcpy(k1, &xn[ib, i, 0, 0], nsq * sizeof(double))
                for j in range(nsq):
                    u[j] = 0.5 * dt * k1[j]
                dexpinv(u, &xm[ib, i, 0, 0], k2, n)
                for j in range(nsq):
                    u[j] = 0.5 * dt * k2[j]
                dexpinv(u, &xm[ib, i, 0, 0], k3, n)
                for j in range(nsq):
                    u[j] = dt * k3[j]
                dexpinv(u, &xn[ib, i + 1, 0, 0], k4, n)
                for j in range(nsq):
                    theta[j] = (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
                expm_small(theta, eth, n)
                mat_mul(eth, y, ynew, n)
                memcpy(y, ynew, nsq * sizeof(double))
                memcpy(&ov[ib, i + 1, 0, 0], y, nsq * sizeof(double))
    return out


def euler_scan(cnp.ndarray[double, ndim=4] xi_nodes,
               double dt,
               cnp.ndarray[double, ndim=3] y0):
    cdef int b = xi_nodes.shape[0], nn = xi_nodes.shape[1], n = xi_nodes.shape[2]
    cdef int nsteps = nn - 1
    if n > MAXN:
        raise ValueError("kernel supports matrices up to %d x %d" % (MAXN, MAXN))
    cdef cnp.ndarray[double, ndim=4] out = np.empty_like(xi_nodes)
    cdef double[:, :, :, ::1] xn = np.ascontiguousarray(xi_nodes)
    cdef double[:, :, ::1] y0v = np.ascontiguousarray(y0)
    cdef double[:, :, :, ::1] ov = out
    cdef double y[MAXN * MAXN]
    cdef double u[MAXN * MAXN]
    cdef double eu[MAXN * MAXN]
    cdef double ynew[MAXN * MAXN]
    cdef int ib, i, j
    cdef int nsq = n * n
    with nogil:
        for ib in range(b):
            memcpy(y, &y0v[ib, 0, 0], nsq * sizeof(double))
            memcpy(&ov[ib, 0, 0, 0], y, nsq * sizeof(double))
            for i in range(nsteps):
                for j in range(nsq):
                    u[j] = dt * xn[ib, i, j // n, j % n]
                expm_small(u, eu, n)
                mat_mul(eu, y, ynew, n)
                memcpy(y, ynew, nsq * sizeof(double))
                memcpy(&ov[ib, i + 1, 0, 0], y, nsq * sizeof(double))
    return out
