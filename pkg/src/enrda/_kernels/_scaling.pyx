# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled marginal-scaling iterations.

Mirrors ``numpy_backend``: plain Sinkhorn scaling and the log-domain
variant, written as tight loops over C-contiguous float64 buffers to avoid
the per-iteration temporaries of the vectorized fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log, INFINITY

cnp.import_array()


def scale_plain(double[:, ::1] kernel, double[::1] row_marginal,
                double[::1] col_marginal, double tol, int max_iter):
    cdef Py_ssize_t m = kernel.shape[0]
    cdef Py_ssize_t n = kernel.shape[1]
    v_arr = np.ones(m)
    w_arr = np.ones(n)
    kw_arr = np.empty(m)
    kv_arr = np.empty(n)
    cdef double[::1] v = v_arr
    cdef double[::1] w = w_arr
    cdef double[::1] kw = kw_arr
    cdef double[::1] kv = kv_arr
    cdef Py_ssize_t i, j
    cdef int it = 0
    cdef double acc, residual = INFINITY, diff

    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += kernel[i, j]
        kw[i] = acc

    cdef double vi
    for it in range(1, max_iter + 1):
        for i in range(m):
            v[i] = row_marginal[i] / kw[i]
        for j in range(n):
            kv[j] = 0.0
        for i in range(m):
            vi = v[i]
            for j in range(n):
                kv[j] += kernel[i, j] * vi
        for j in range(n):
            w[j] = col_marginal[j] / kv[j]
        for i in range(m):
            if v[i] != v[i] or v[i] == INFINITY or v[i] == -INFINITY:
                return v_arr, w_arr, it, INFINITY
        for j in range(n):
            if w[j] != w[j] or w[j] == INFINITY or w[j] == -INFINITY:
                return v_arr, w_arr, it, INFINITY
        residual = 0.0
        for i in range(m):
            acc = 0.0
            for j in range(n):
                acc += kernel[i, j] * w[j]
            kw[i] = acc
            diff = fabs(v[i] * acc - row_marginal[i])
            if diff > residual:
                residual = diff
        if residual <= tol:
            break
    return v_arr, w_arr, it, residual


def scale_log(double[:, ::1] cost, double[::1] log_row, double[::1] log_col,
              double gamma, double tol, int max_iter, u0=None, v0=None):
    cdef Py_ssize_t m = cost.shape[0]
    cdef Py_ssize_t n = cost.shape[1]
    g_arr = np.empty((m, n))
    u_arr = np.zeros(m) if u0 is None else np.array(u0, dtype=np.float64)
    v_arr = np.zeros(n) if v0 is None else np.array(v0, dtype=np.float64)
    row_arr = np.exp(np.asarray(log_row))
    lse_arr = np.empty(m)
    colmax_arr = np.empty(n)
    colsum_arr = np.empty(n)
    cdef double[::1] row = row_arr
    cdef double[:, ::1] g = g_arr
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] lse_rows = lse_arr
    cdef double[::1] colmax = colmax_arr
    cdef double[::1] colsum = colsum_arr
    cdef Py_ssize_t i, j
    cdef int it = 0
    cdef double peak, acc, term, ui, vj, residual = INFINITY, diff

    for i in range(m):
        for j in range(n):
            g[i, j] = -cost[i, j] / gamma

    # row log-sum-exp of g + v for the warm-start potentials
    for i in range(m):
        peak = -INFINITY
        for j in range(n):
            term = g[i, j] + v[j]
            if term > peak:
                peak = term
        acc = 0.0
        for j in range(n):
            acc += exp(g[i, j] + v[j] - peak)
        lse_rows[i] = peak + log(acc)

    for it in range(1, max_iter + 1):
        for i in range(m):
            u[i] = log_row[i] - lse_rows[i]
        # column log-sum-exp in two row-major passes (cache friendly)
        for j in range(n):
            colmax[j] = -INFINITY
            colsum[j] = 0.0
        for i in range(m):
            ui = u[i]
            for j in range(n):
                term = g[i, j] + ui
                if term > colmax[j]:
                    colmax[j] = term
        for i in range(m):
            ui = u[i]
            for j in range(n):
                colsum[j] += exp(g[i, j] + ui - colmax[j])
        for j in range(n):
            v[j] = log_col[j] - (colmax[j] + log(colsum[j]))
        residual = 0.0
        for i in range(m):
            peak = -INFINITY
            for j in range(n):
                term = g[i, j] + v[j]
                if term > peak:
                    peak = term
            acc = 0.0
            for j in range(n):
                acc += exp(g[i, j] + v[j] - peak)
            lse_rows[i] = peak + log(acc)
            diff = fabs(exp(u[i] + lse_rows[i]) - row[i])
            if diff > residual:
                residual = diff
        if residual <= tol:
            break
    return u_arr, v_arr, it, residual
