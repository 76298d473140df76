"""Linear minimization oracles, projections and the Frank-Wolfe duality gap."""
from __future__ import annotations

from typing import Optional

import numpy as np

from . import _kernels
from .core import FeasibleDomain, RngStream, dot, norm

POWER_TOL = 1e-9
POWER_ITERS_MAX = 500

_DEFAULT_START_SEED = 0


def top_singular_triple(g, start=None, tol=POWER_TOL, max_iter=POWER_ITERS_MAX):
    """Leading singular triple ``(u, sigma, v)`` of ``g`` by power iteration.

    The iteration runs on the smaller of ``g g^T`` and ``g^T g`` and stops
    once successive Rayleigh quotients agree to ``tol`` (relative) or after
    ``max_iter`` sweeps.  ``start`` is a vector in the smaller dimension; a
    fixed pseudo-random vector is used when omitted.

    Returns ``(u, sigma, v, iterations)``.
    """
    g = np.ascontiguousarray(g, dtype=float)
    if g.ndim != 2:
        raise ValueError("expected a matrix")
    r = min(g.shape)
    if start is None:
        start = RngStream(_DEFAULT_START_SEED).unit_vector(r)
    elif np.shape(start) != (r,):
        raise ValueError(f"start vector must have shape ({r},)")
    return _kernels.top_singular(g, np.asarray(start, dtype=float), float(tol), int(max_iter))


def lmo_trace_norm(g, tau, start=None, tol=POWER_TOL, max_iter=POWER_ITERS_MAX,
                   full_output=False):
    """argmin of ``<g, w>`` over ``{w : ||w||_* <= tau}``: ``-tau u1 v1^T``.

    For ``g = 0`` every point is a minimizer; ``tau e1 e1^T`` is returned and
    reported as degenerate.  With ``full_output`` a second value, a dict with
    keys ``degenerate``, ``sigma`` and ``iterations``, is returned.
    """
    g = np.asarray(g, dtype=float)
    if not np.any(g):
        out = np.zeros_like(g)
        out[0, 0] = tau
        info = {"degenerate": True, "sigma": 0.0, "iterations": 0}
    else:
        u, sigma, v, it = top_singular_triple(g, start, tol, max_iter)
        out = -tau * np.outer(u, v)
        info = {"degenerate": False, "sigma": sigma, "iterations": it}
    if full_output:
        return out, info
    return out


def lmo_l1(g, radius):
    """Signed scaled basis vector ``-radius sign(g_j) e_j``, ``j = argmax |g_j|``.

    ``argmax`` takes the lowest index on ties; ``g = 0`` gives ``+radius e_0``.
    """
    g = np.asarray(g, dtype=float)
    flat = g.ravel()
    j = int(np.argmax(np.abs(flat)))
    out = np.zeros(flat.size)
    out[j] = -radius if flat[j] > 0 else radius
    return out.reshape(g.shape)


def lmo_simplex(g, radius):
    g = np.asarray(g, dtype=float)
    out = np.zeros(g.size)
    out[int(np.argmin(g.ravel()))] = radius
    return out.reshape(g.shape)


def lmo_l2(g, radius, center=None):
    g = np.asarray(g, dtype=float)
    c = np.zeros_like(g) if center is None else np.asarray(center, dtype=float)
    ng = norm(g)
    if ng == 0.0:
        out = c.copy()
        out.flat[0] += radius
        return out
    return c - (radius / ng) * g


def project_simplex(v, s=1.0):
    """Euclidean projection onto ``{x >= 0, sum x = s}`` (sort and threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u * k > css - s)[0][-1]
    theta = (css[rho] - s) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_capped_simplex(v, s):
    """Projection onto ``{x >= 0, sum x <= s}``."""
    v = np.asarray(v, dtype=float)
    clipped = np.maximum(v, 0.0)
    if clipped.sum() <= s:
        return clipped
    return project_simplex(v, s)


def project_trace_norm(w, tau):
    """Nearest point of the trace-norm ball, via a full SVD."""
    w = np.asarray(w, dtype=float)
    try:
        U, s, Vt = np.linalg.svd(w, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("SVD failed during trace-norm projection") from exc
    if s.sum() <= tau:
        return w.copy()
    s = project_simplex(s, tau)
    return (U * s) @ Vt


def project_l2(w, radius, center=None):
    w = np.asarray(w, dtype=float)
    c = np.zeros_like(w) if center is None else np.asarray(center, dtype=float)
    d = w - c
    nd = norm(d)
    if nd <= radius:
        return w.copy()
    return c + (radius / nd) * d


def project_l1(w, radius):
    w = np.asarray(w, dtype=float)
    a = np.abs(w.ravel())
    if a.sum() <= radius:
        return w.copy()
    return (np.sign(w.ravel()) * project_simplex(a, radius)).reshape(w.shape)


def duality_gap(g, x, domain: FeasibleDomain, rng: Optional[RngStream] = None):
    """``max_{v in domain} <g, x - v>``, evaluated at ``v = lmo(g)``."""
    v = domain.lmo(g, rng)
    return dot(g, x - v)


class TraceNormBall(FeasibleDomain):
    """``{w in R^{rows x cols} : ||w||_* <= tau}``."""

    def __init__(self, tau, shape, power_iters_max=POWER_ITERS_MAX, power_tol=POWER_TOL):
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.tau = float(tau)
        self.shape = tuple(shape)
        self.power_iters_max = int(power_iters_max)
        self.power_tol = float(power_tol)

    def lmo(self, g, rng=None):
        start = None if rng is None else rng.unit_vector(min(self.shape))
        return lmo_trace_norm(g, self.tau, start, self.power_tol, self.power_iters_max)

    def diameter(self):
        # Frobenius bound: ||A||_F <= ||A||_* <= tau
        return 2.0 * self.tau

    def project(self, w):
        return project_trace_norm(w, self.tau)

    def contains(self, w, tol=1e-8):
        s = np.linalg.svd(np.asarray(w, dtype=float), compute_uv=False)
        return bool(s.sum() <= self.tau * (1.0 + tol) + tol)

    def default_point(self):
        return np.zeros(self.shape)

    def __repr__(self):
        return f"TraceNormBall(tau={self.tau}, shape={self.shape})"


class L1Ball(FeasibleDomain):
    def __init__(self, radius, dim):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.shape = (dim,) if np.isscalar(dim) else tuple(dim)

    def lmo(self, g, rng=None):
        return lmo_l1(g, self.radius)

    def diameter(self):
        # two opposite vertices are 2r apart in the Euclidean norm
        return 2.0 * self.radius

    def project(self, w):
        return project_l1(w, self.radius)

    def contains(self, w, tol=1e-8):
        return bool(np.abs(w).sum() <= self.radius * (1.0 + tol) + tol)

    def vertices(self):
        d = int(np.prod(self.shape))
        eye = np.eye(d) * self.radius
        return np.concatenate([eye, -eye]).reshape((2 * d,) + self.shape)

    def default_point(self):
        return np.zeros(self.shape)

    def __repr__(self):
        return f"L1Ball(radius={self.radius}, dim={self.shape})"


class Simplex(FeasibleDomain):
    """``{x >= 0, sum x = radius}``."""

    def __init__(self, radius, dim):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.shape = (dim,) if np.isscalar(dim) else tuple(dim)

    def lmo(self, g, rng=None):
        return lmo_simplex(g, self.radius)

    def diameter(self):
        return np.sqrt(2.0) * self.radius

    def project(self, w):
        w = np.asarray(w, dtype=float)
        return project_simplex(w.ravel(), self.radius).reshape(w.shape)

    def contains(self, w, tol=1e-8):
        w = np.asarray(w, dtype=float)
        return bool(w.min() >= -tol and abs(w.sum() - self.radius) <= tol * (1.0 + self.radius))

    def vertices(self):
        d = int(np.prod(self.shape))
        return (np.eye(d) * self.radius).reshape((d,) + self.shape)

    def default_point(self):
        return np.full(self.shape, self.radius / np.prod(self.shape))

    def __repr__(self):
        return f"Simplex(radius={self.radius}, dim={self.shape})"


class L2Ball(FeasibleDomain):
    def __init__(self, radius, dim=None, center=None):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        if center is None:
            if dim is None:
                raise ValueError("need dim or center")
            center = np.zeros((dim,) if np.isscalar(dim) else tuple(dim))
        self.center = np.asarray(center, dtype=float)
        self.shape = self.center.shape

    def lmo(self, g, rng=None):
        return lmo_l2(g, self.radius, self.center)

    def diameter(self):
        return 2.0 * self.radius

    def project(self, w):
        return project_l2(w, self.radius, self.center)

    def contains(self, w, tol=1e-8):
        return norm(np.asarray(w) - self.center) <= self.radius * (1.0 + tol) + tol

    def default_point(self):
        return self.center.copy()

    def __repr__(self):
        return f"L2Ball(radius={self.radius}, dim={self.shape})"
