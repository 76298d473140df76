"""Pure numpy implementations of the hot kernels.

Signatures and results match the compiled ``_ext`` module; they are used when
the extension is not built or ``VRFW_PURE_PYTHON`` is set.
"""
import numpy as np

BACKEND = "python"


def _row_margins(indptr, indices, data, labels, rows, W):
    """Scores relative to the true class, one row per selected example."""
    h = W.shape[0]
    out = np.empty((rows.size, h))
    for r, i in enumerate(rows):
        lo, hi = indptr[i], indptr[i + 1]
        s = W[:, indices[lo:hi]] @ data[lo:hi]
        out[r] = s - s[labels[i]]
    return out


def logistic_values(indptr, indices, data, labels, W):
    """Per-example loss ``log(1 + sum_{l != y} exp(s_l - s_y))``."""
    n = labels.shape[0]
    a = _row_margins(indptr, indices, data, labels, np.arange(n), W)
    a[np.arange(n), labels] = -np.inf
    big = np.maximum(a.max(axis=1), 0.0)
    tail = np.exp(a - big[:, None]).sum(axis=1)
    small = big == 0.0
    vals = np.empty(n)
    # no shift needed when every margin is <= 0: log1p keeps precision
    vals[small] = np.log1p(tail[small])
    vals[~small] = big[~small] + np.log(np.exp(-big[~small]) + tail[~small])
    return vals


def logistic_batch_gradient(indptr, indices, data, labels, counts, W):
    """``sum_i counts[i] * grad f_i(W) / sum(counts)`` in increasing ``i``."""
    h, m = W.shape
    rows = np.flatnonzero(counts)
    G = np.zeros((h, m))
    if rows.size == 0:
        return G
    a = _row_margins(indptr, indices, data, labels, rows, W)
    y = labels[rows]
    a[np.arange(rows.size), y] = -np.inf
    big = np.maximum(a.max(axis=1), 0.0)
    ex = np.exp(a - big[:, None])
    p = ex / (np.exp(-big) + ex.sum(axis=1))[:, None]
    p[np.arange(rows.size), y] = 0.0
    p[np.arange(rows.size), y] = -p.sum(axis=1)
    total = 0
    for r, i in enumerate(rows):
        lo, hi = indptr[i], indptr[i + 1]
        c = counts[i]
        total += c
        G[:, indices[lo:hi]] += (c * p[r])[:, None] * data[lo:hi][None, :]
    G /= total
    return G


def top_singular(g, start, tol, max_iter):
    """Power iteration on the smaller Gram matrix of ``g``.

    Returns ``(u, sigma, v, iterations)`` with unit ``u``, ``v`` and
    ``sigma = ||g^T u||``.  ``start`` lives in the smaller dimension.
    Stops once the Rayleigh quotient moves by at most ``tol`` (relative)
    and the geometric extrapolation of the remaining change is also
    below ``tol``.
    """
    h, m = g.shape
    a = g if h <= m else g.T
    x = np.array(start, dtype=float)
    x /= np.linalg.norm(x)
    y = a.T @ x
    lam = float(y @ y)
    if lam == 0.0:
        j = int(np.argmax(np.einsum("ij,ij->j", a, a)))
        x = a[:, j] / np.linalg.norm(a[:, j])
        y = a.T @ x
        lam = float(y @ y)
    it = 0
    prev = -1.0
    while it < max_iter:
        it += 1
        x = a @ y
        x /= np.linalg.norm(x)
        y = a.T @ x
        new = float(y @ y)
        delta = abs(new - lam)
        lam = new
        if delta <= 1e-15 * new:
            break
        if delta <= tol * new and prev > 0.0:
            # geometric tail estimate of the error still left
            rho = delta / prev
            if rho < 1.0 and delta * rho / (1.0 - rho) <= tol * new:
                break
        prev = delta
    sigma = float(np.sqrt(lam))
    other = y / sigma
    if h <= m:
        return x, sigma, other, it
    return other, sigma, x, it
