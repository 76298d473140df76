# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``vrfw._kernels._fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, sqrt, fabs, INFINITY

cnp.import_array()

BACKEND = "cython"


cdef void _margins(const long[:] indptr, const long[:] indices,
                   const double[:] data, long i, long y,
                   const double[:, :] W, double[:] out) noexcept nogil:
    cdef Py_ssize_t h = W.shape[0]
    cdef Py_ssize_t l, p
    cdef double sy
    for l in range(h):
        out[l] = 0.0
    for p in range(indptr[i], indptr[i + 1]):
        for l in range(h):
            out[l] += W[l, indices[p]] * data[p]
    sy = out[y]
    for l in range(h):
        out[l] -= sy
    out[y] = -INFINITY


def logistic_values(const long[:] indptr, const long[:] indices,
                    const double[:] data, const long[:] labels,
                    const double[:, :] W):
    cdef Py_ssize_t n = labels.shape[0]
    cdef Py_ssize_t h = W.shape[0]
    cdef Py_ssize_t i, l
    cdef double big, tail
    cdef double[:] a = np.empty(h)
    vals_arr = np.empty(n)
    cdef double[:] vals = vals_arr
    with nogil:
        for i in range(n):
            _margins(indptr, indices, data, i, labels[i], W, a)
            big = 0.0
            for l in range(h):
                if a[l] > big:
                    big = a[l]
            tail = 0.0
            for l in range(h):
                tail += exp(a[l] - big)
            if big == 0.0:
                vals[i] = log1p(tail)
            else:
                vals[i] = big + log(exp(-big) + tail)
    return vals_arr


def logistic_batch_gradient(const long[:] indptr, const long[:] indices,
                            const double[:] data, const long[:] labels,
                            const long[:] counts, const double[:, :] W):
    cdef Py_ssize_t n = labels.shape[0]
    cdef Py_ssize_t h = W.shape[0]
    cdef Py_ssize_t m = W.shape[1]
    cdef Py_ssize_t i, l, p
    cdef long y, c
    cdef long total = 0
    cdef double big, denom, rest
    cdef double[:] a = np.empty(h)
    G_arr = np.zeros((h, m))
    cdef double[:, :] G = G_arr
    with nogil:
        for i in range(n):
            c = counts[i]
            if c == 0:
                continue
            total += c
            y = labels[i]
            _margins(indptr, indices, data, i, y, W, a)
            big = 0.0
            for l in range(h):
                if a[l] > big:
                    big = a[l]
            denom = exp(-big)
            for l in range(h):
                a[l] = exp(a[l] - big)
                denom += a[l]
            rest = 0.0
            for l in range(h):
                a[l] = a[l] / denom
                rest += a[l]
            a[y] = -rest
            for p in range(indptr[i], indptr[i + 1]):
                for l in range(h):
                    G[l, indices[p]] += c * a[l] * data[p]
        if total > 0:
            for l in range(h):
                for p in range(m):
                    G[l, p] = G[l, p] / total
    return G_arr


def top_singular(g, start, double tol, long max_iter):
    cdef Py_ssize_t h = g.shape[0]
    cdef Py_ssize_t m = g.shape[1]
    cdef bint tall = h > m
    cdef double[:, :] a = np.ascontiguousarray(g.T if tall else g, dtype=float)
    cdef Py_ssize_t r = a.shape[0]
    cdef Py_ssize_t q = a.shape[1]
    x_arr = np.array(start, dtype=float)
    y_arr = np.zeros(q)
    cdef double[:] x = x_arr
    cdef double[:] y = y_arr
    cdef Py_ssize_t i, j, best
    cdef long it = 0
    cdef double s, lam, new, nx, bestn, delta, rho
    cdef double prev = -1.0
    with nogil:
        nx = 0.0
        for i in range(r):
            nx += x[i] * x[i]
        nx = sqrt(nx)
        for i in range(r):
            x[i] = x[i] / nx
        lam = _at_x(a, x, y)
        if lam == 0.0:
            best = 0
            bestn = -1.0
            for j in range(q):
                s = 0.0
                for i in range(r):
                    s += a[i, j] * a[i, j]
                if s > bestn:
                    bestn = s
                    best = j
            bestn = sqrt(bestn)
            for i in range(r):
                x[i] = a[i, best] / bestn
            lam = _at_x(a, x, y)
        while it < max_iter:
            it += 1
            nx = 0.0
            for i in range(r):
                s = 0.0
                for j in range(q):
                    s += a[i, j] * y[j]
                x[i] = s
                nx += s * s
            nx = sqrt(nx)
            for i in range(r):
                x[i] = x[i] / nx
            new = _at_x(a, x, y)
            delta = fabs(new - lam)
            lam = new
            if delta <= 1e-15 * new:
                break
            if delta <= tol * new and prev > 0.0:
                # geometric tail estimate of the error still left
                rho = delta / prev
                if rho < 1.0 and delta * rho / (1.0 - rho) <= tol * new:
                    break
            prev = delta
    sigma = sqrt(lam)
    other = y_arr / sigma
    if tall:
        return other, sigma, x_arr, it
    return x_arr, sigma, other, it


cdef double _at_x(const double[:, :] a, const double[:] x, double[:] y) noexcept nogil:
    cdef Py_ssize_t r = a.shape[0]
    cdef Py_ssize_t q = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double lam = 0.0
    for j in range(q):
        y[j] = 0.0
    for i in range(r):
        for j in range(q):
            y[j] += a[i, j] * x[i]
    for j in range(q):
        lam += y[j] * y[j]
    return lam
