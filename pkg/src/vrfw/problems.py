"""Finite-sum test objectives: multiclass logistic loss and quadratics."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy import optimize, sparse
from scipy.sparse import linalg as splinalg

from . import _kernels
from .core import FeasibleDomain, FiniteSumObjective, norm
from .dataio import SparseDataset
from .oracles import L1Ball, L2Ball, Simplex, TraceNormBall


class MulticlassLogistic(FiniteSumObjective):
    """``f_i(w) = log(1 + sum_{l != y_i} exp(w_l.e_i - w_{y_i}.e_i))``.

    The iterate is an ``(h, m)`` matrix, one row per class.  There is no
    additive regularizer; the trace-norm constraint plays that role.
    """

    def __init__(self, dataset: SparseDataset):
        self.dataset = dataset
        self.n = dataset.n
        self.shape = (dataset.num_classes, dataset.num_features)
        self._indptr = np.ascontiguousarray(dataset.indptr, dtype=np.int64)
        self._indices = np.ascontiguousarray(dataset.indices, dtype=np.int64)
        self._data = np.ascontiguousarray(dataset.data, dtype=float)
        self._labels = np.ascontiguousarray(dataset.labels, dtype=np.int64)
        self._row_sq = dataset.row_norms_sq()

    def _w(self, w):
        w = np.ascontiguousarray(w, dtype=float)
        if w.shape != self.shape:
            raise ValueError(f"iterate has shape {w.shape}, expected {self.shape}")
        return w

    def values(self, w) -> np.ndarray:
        return _kernels.logistic_values(self._indptr, self._indices, self._data,
                                        self._labels, self._w(w))

    def component_value(self, i, w) -> float:
        self._check_index(i)
        sl = slice(i, i + 2)
        indptr = self._indptr[sl] - self._indptr[i]
        lo, hi = self._indptr[i], self._indptr[i + 1]
        return float(_kernels.logistic_values(
            np.ascontiguousarray(indptr), self._indices[lo:hi], self._data[lo:hi],
            self._labels[i:i + 1], self._w(w))[0])

    def value(self, w) -> float:
        return math.fsum(self.values(w)) / self.n

    def batch_gradient(self, counts, w) -> np.ndarray:
        counts = np.ascontiguousarray(counts, dtype=np.int64)
        return _kernels.logistic_batch_gradient(self._indptr, self._indices, self._data,
                                                self._labels, counts, self._w(w))

    def smoothness_bound(self) -> float:
        """``max_i ||e_i||^2``; the score-space Hessian has norm <= 1."""
        return float(self._row_sq.max()) if self.n else 0.0

    def lipschitz_bound(self) -> float:
        return float(math.sqrt(2.0) * math.sqrt(self._row_sq.max()))

    def mean_smoothness_bound(self) -> float:
        """``0.5 * lambda_max(X^T X / n)``: the softmax Hessian in score space is <= I/2."""
        if getattr(self, "_mean_L", None) is None:
            X = sparse.csr_matrix((self._data, self._indices, self._indptr),
                                  shape=(self.n, self.shape[1]))
            small = X @ X.T if X.shape[0] <= X.shape[1] else X.T @ X
            if small.shape[0] <= 500:
                top = float(np.linalg.eigvalsh(small.toarray())[-1])
            else:
                top = float(splinalg.eigsh(small, k=1, which="LA", v0=np.ones(small.shape[0]),
                                           tol=1e-12, return_eigenvectors=False)[0])
            self._mean_L = 0.5 * top / self.n
        return self._mean_L

    def accuracy(self, w) -> float:
        w = self._w(w)
        hits = 0
        for i in range(self.n):
            lo, hi = self._indptr[i], self._indptr[i + 1]
            s = w[:, self._indices[lo:hi]] @ self._data[lo:hi]
            hits += int(np.argmax(s) == self._labels[i])
        return hits / self.n


class QuadraticProblem(FiniteSumObjective):
    """``f_i(w) = 0.5 w^T A_i w - b_i^T w`` with PSD ``A_i``.

    ``L`` is the largest eigenvalue over all ``A_i`` (each component is
    L-smooth) and ``alpha`` the smallest eigenvalue of their mean.
    """

    def __init__(self, A, b, domain: Optional[FeasibleDomain] = None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        self.diagonal = A.ndim == 2
        if self.diagonal:
            if A.shape != b.shape or np.any(A < 0):
                raise ValueError("diagonal A must be nonnegative with the shape of b, (n, d)")
        elif A.ndim != 3 or A.shape[1] != A.shape[2] or b.shape != A.shape[:2]:
            raise ValueError("expected A of shape (n, d, d) or (n, d) and b of shape (n, d)")
        self.A = A
        self.b = b
        self.n, d = b.shape
        self.shape = (d,)
        self.b_mean = b.mean(axis=0)
        if self.diagonal:
            self.A_mean = A.mean(axis=0)
            self._top = A.max(axis=1)
            self.alpha = float(self.A_mean.min())
        else:
            self._A_flat = A.reshape(self.n, d * d)
            self.A_mean = A.mean(axis=0)
            self._top = np.array([np.linalg.eigvalsh(Ai)[-1] for Ai in A])
            self.alpha = float(np.linalg.eigvalsh(self.A_mean)[0])
        self.L = float(self._top.max())
        self.domain = domain
        self.w_star = None
        self.f_star = None
        if domain is not None:
            self.w_star = self.constrained_optimum(domain)
            self.f_star = self.value(self.w_star)

    def component_value(self, i, w) -> float:
        self._check_index(i)
        w = np.asarray(w, dtype=float)
        if self.diagonal:
            return float(0.5 * (self.A[i] * w) @ w - self.b[i] @ w)
        return float(0.5 * w @ self.A[i] @ w - self.b[i] @ w)

    def values(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if self.diagonal:
            return 0.5 * self.A @ (w * w) - self.b @ w
        return 0.5 * np.einsum("ijk,j,k->i", self.A, w, w) - self.b @ w

    def value(self, w) -> float:
        if self.diagonal:
            # O(d) through the mean coefficients instead of O(n d); numpy's
            # pairwise sum keeps a fixed order and O(log d) rounding growth
            w = np.asarray(w, dtype=float)
            return float(np.sum((0.5 * self.A_mean * w - self.b_mean) * w))
        return math.fsum(self.values(w)) / self.n

    def batch_gradient(self, counts, w) -> np.ndarray:
        counts = np.asarray(counts, dtype=float)
        total = counts.sum()
        w = np.asarray(w, dtype=float)
        if self.diagonal:
            return ((counts @ self.A) * w - counts @ self.b) / total
        d = self.shape[0]
        Ac = (counts @ self._A_flat).reshape(d, d)
        return (Ac @ w - counts @ self.b) / total

    def full_gradient(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if self.diagonal:
            return self.A_mean * w - self.b_mean
        return self.A_mean @ w - self.b_mean

    def smoothness_bound(self) -> float:
        return self.L

    def mean_smoothness_bound(self) -> float:
        if self.diagonal:
            return float(self.A_mean.max())
        return float(np.linalg.eigvalsh(self.A_mean)[-1])

    def strong_convexity(self) -> Optional[float]:
        return self.alpha if self.alpha > 0 else None

    @property
    def condition_number(self) -> float:
        return self.L / self.alpha

    def lipschitz_bound(self) -> Optional[float]:
        """Upper bound on ``max_i ||grad f_i(w)||`` over the attached domain."""
        if self.domain is None:
            return None
        R = _max_norm(self.domain)
        return float(np.max(self._top * R + np.linalg.norm(self.b, axis=1)))

    def unconstrained_optimum(self) -> np.ndarray:
        if self.diagonal:
            return self.b_mean / self.A_mean
        return np.linalg.solve(self.A_mean, self.b_mean)

    def constrained_optimum(self, domain: FeasibleDomain, tol=1e-15, max_iter=200000):
        """Minimizer of ``f`` over ``domain``.

        Interior optima come from a linear solve; on an L2 ball the boundary
        case is a one-dimensional KKT root find; other projectable domains
        use projected gradient descent, which converges linearly here.
        """
        if self.alpha > 0:
            w = self.unconstrained_optimum()
            if domain.contains(w, 0.0):
                return w
        if isinstance(domain, L2Ball):
            return self._l2_kkt(domain)
        top = self.A_mean.max() if self.diagonal else np.linalg.eigvalsh(self.A_mean)[-1]
        if top <= 0.0:
            # linear objective: the LMO vertex of its constant gradient
            return domain.lmo(-self.b_mean)
        step = 1.0 / float(top)
        w = domain.project(domain.default_point())
        for _ in range(max_iter):
            nxt = domain.project(w - step * self.full_gradient(w))
            if norm(nxt - w) <= tol * max(1.0, norm(w)):
                return nxt
            w = nxt
        return w

    def _l2_kkt(self, ball: L2Ball) -> np.ndarray:
        # w(lam) = (A + lam I)^{-1} (b + lam c), with ||w(lam) - c|| = r
        if self.diagonal:
            evals, Q = self.A_mean, np.eye(self.shape[0])
        else:
            evals, Q = np.linalg.eigh(self.A_mean)
        c = ball.center
        bq = Q.T @ self.b_mean
        cq = Q.T @ c

        def dist(lam):
            wq = (bq + lam * cq) / (evals + lam)
            return np.linalg.norm(wq - cq) - ball.radius

        lo = max(0.0, -evals[0]) + 1e-300
        hi = 1.0
        while dist(hi) > 0:
            hi *= 2.0
        lam = optimize.brentq(dist, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        return Q @ ((bq + lam * cq) / (evals + lam))


def _max_norm(domain: FeasibleDomain) -> float:
    if isinstance(domain, L2Ball):
        return norm(domain.center) + domain.radius
    if isinstance(domain, (L1Ball, Simplex)):
        return domain.radius
    if isinstance(domain, TraceNormBall):
        return domain.tau
    return norm(domain.default_point()) + domain.diameter()


def _random_rotation(gen, d):
    q, r = np.linalg.qr(gen.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def quadratic_make(dim: int, L: float, alpha: float, n: int, seed: int,
                   domain: Optional[FeasibleDomain] = None, placement: str = "interior",
                   noise: float = 1.0, spread: float = 0.5, center=None,
                   diagonal: bool = False) -> QuadraticProblem:
    """Random quadratic whose mean Hessian has extreme eigenvalues ``(alpha, L)``.

    All ``A_i`` share one eigenbasis (the standard basis when ``diagonal``,
    which stores ``A`` as ``(n, d)`` and suits large ``d``); their
    eigenvalues scatter around the mean without leaving ``[0, L]``, so each
    component is L-smooth.  The unconstrained minimizer ``center`` is drawn
    strictly inside ``domain`` (``placement="interior"``) or outside it
    (``"exterior"``, putting the constrained optimum on the boundary).
    ``"face"`` puts the optimum in the relative interior of the positive
    facet of an L1 ball (or of a simplex), with every coordinate nonzero.
    On a simplex with ``d`` large this is the instance on which any method
    building its iterate from LMO vertices needs order ``1/eps`` LMO calls.
    """
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be positive")
    if not (alpha > 0 and L >= alpha):
        raise ValueError("need L >= alpha > 0")
    if dim == 1 and L != alpha:
        raise ValueError("a one-dimensional quadratic has a single curvature; need L == alpha")
    if placement not in ("interior", "exterior", "face"):
        raise ValueError("placement must be 'interior', 'exterior' or 'face'")
    gen = np.random.Generator(np.random.PCG64(seed))
    domain = domain if domain is not None else L2Ball(1.0, dim)
    Q = None if diagonal else _random_rotation(gen, dim)
    means = np.sort(gen.uniform(alpha, L, size=dim))[::-1]
    means[0], means[-1] = L, alpha
    width = spread * np.minimum(means, L - means)
    u = gen.uniform(-1.0, 1.0, size=(n, dim))
    u -= u.mean(axis=0)
    u /= max(1.0, np.abs(u).max())
    lam = means + width * u
    if diagonal:
        A = lam
    else:
        A = np.einsum("ij,nj,kj->nik", Q, lam, Q)
        A = 0.5 * (A + A.transpose(0, 2, 1))
    if center is None:
        center = _draw_center(gen, domain, placement)
    center = np.asarray(center, dtype=float)
    eta = gen.standard_normal((n, dim))
    eta -= eta.mean(axis=0)
    b = (A * center if diagonal else A @ center) + noise * eta
    return QuadraticProblem(A, b, domain)


def _draw_center(gen, domain, placement):
    d = int(np.prod(domain.shape))
    u = gen.standard_normal(d)
    if isinstance(domain, Simplex) and placement in ("face", "interior"):
        p = 1.0 + 0.25 * gen.uniform(-1.0, 1.0, size=d)
        return domain.radius * p / p.sum()
    if placement == "face":
        if not isinstance(domain, L1Ball):
            raise ValueError("placement='face' needs an L1 ball or a simplex")
        p = 1.0 + 0.25 * gen.uniform(-1.0, 1.0, size=d)
        return 1.2 * domain.radius * p / p.sum()
    scale = 0.5 if placement == "interior" else 2.0
    if isinstance(domain, L2Ball):
        return domain.center + scale * domain.radius * u / np.linalg.norm(u)
    if isinstance(domain, L1Ball):
        return scale * domain.radius * u / np.abs(u).sum()
    raise ValueError(f"cannot place a center inside {domain!r}; pass center=")
