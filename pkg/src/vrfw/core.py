"""Shared abstractions: iterates, objectives, domains, RNG and cost accounting.

Iterates are plain dense ``numpy`` arrays. Matrix problems use shape
``(rows, cols)``; vector problems use 1-D arrays of length ``d``.
"""
from __future__ import annotations

import dataclasses
import time
from typing import Optional

import numpy as np


def dot(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean / Frobenius inner product of two equally shaped arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float).ravel()))


def convex_combination(x: np.ndarray, v: np.ndarray, gamma: float) -> np.ndarray:
    """Return ``(1 - gamma) * x + gamma * v``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if np.shape(x) != np.shape(v):
        raise ValueError(f"shape mismatch: {np.shape(x)} vs {np.shape(v)}")
    if gamma == 0.0:
        return np.array(x, dtype=float, copy=True)
    if gamma == 1.0:
        return np.array(v, dtype=float, copy=True)
    return (1.0 - gamma) * x + gamma * v


class RngStream:
    """Seeded source of component indices.

    Backed by numpy's PCG64, whose output stream is platform independent for
    a fixed seed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def next_index(self, n: int) -> int:
        if n < 1:
            raise ValueError("n must be positive")
        return int(self._gen.integers(0, n))

    def indices(self, n: int, m: int) -> np.ndarray:
        """``m`` iid uniform indices in ``{0, ..., n-1}``."""
        if n < 1 or m < 1:
            raise ValueError("n and m must be positive")
        return self._gen.integers(0, n, size=m)

    def counts(self, n: int, m: int) -> np.ndarray:
        """Multiplicity of each index among ``m`` iid uniform draws.

        Same distribution as ``np.bincount(self.indices(n, m), minlength=n)``
        but costs O(n) rather than O(m).
        """
        if n < 1 or m < 1:
            raise ValueError("n and m must be positive")
        if n == 1:
            return np.array([m], dtype=np.int64)
        return self._gen.multinomial(m, np.full(n, 1.0 / n))

    def unit_vector(self, size: int) -> np.ndarray:
        v = self._gen.standard_normal(size)
        return v / np.linalg.norm(v)

    def normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)


@dataclasses.dataclass
class CostLedger:
    """Monotone oracle-call counters."""

    exact_gradients: int = 0
    stochastic_gradients: int = 0
    lmo_calls: int = 0
    projections: int = 0
    wall_time: float = 0.0

    def copy(self) -> "CostLedger":
        return dataclasses.replace(self)

    def gradient_equivalents(self, n: int) -> int:
        """Stochastic gradients plus ``n`` per exact gradient."""
        return self.stochastic_gradients + n * self.exact_gradients

    def total_calls(self) -> int:
        return (self.exact_gradients + self.stochastic_gradients
                + self.lmo_calls + self.projections)


class Timer:
    """Accumulates wall time into a ledger while active."""

    def __init__(self, ledger: CostLedger):
        self.ledger = ledger
        self._start: Optional[float] = None

    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ledger.wall_time += time.perf_counter() - self._start
        return False


class FiniteSumObjective:
    """Base class for ``f(w) = (1/n) sum_i f_i(w)``.

    Subclasses implement ``component_value``, ``batch_gradient`` and
    ``values``.  ``batch_gradient(counts, w)`` returns
    ``sum_i counts[i] * grad f_i(w) / sum(counts)``, accumulated in index
    order, which is how every sampled estimate in the library is formed.
    """

    n: int
    shape: tuple

    def component_value(self, i: int, w: np.ndarray) -> float:
        raise NotImplementedError

    def component_gradient(self, i: int, w: np.ndarray) -> np.ndarray:
        self._check_index(i)
        counts = np.zeros(self.n, dtype=np.int64)
        counts[i] = 1
        return self.batch_gradient(counts, w)

    def batch_gradient(self, counts: np.ndarray, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value(self, w: np.ndarray) -> float:
        raise NotImplementedError

    def full_gradient(self, w: np.ndarray) -> np.ndarray:
        return self.batch_gradient(np.ones(self.n, dtype=np.int64), w)

    def smoothness_bound(self) -> float:
        raise NotImplementedError

    def mean_smoothness_bound(self) -> float:
        """Smoothness constant of ``f`` itself (at most ``smoothness_bound``)."""
        return self.smoothness_bound()

    def strong_convexity(self) -> Optional[float]:
        return None

    def lipschitz_bound(self) -> Optional[float]:
        return None

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"component index {i} out of range [0, {self.n})")


class FeasibleDomain:
    """Compact convex set accessed through linear minimization."""

    shape: tuple

    def lmo(self, g: np.ndarray, rng: Optional[RngStream] = None) -> np.ndarray:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def project(self, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no projection")

    @property
    def can_project(self) -> bool:
        return type(self).project is not FeasibleDomain.project

    def contains(self, w: np.ndarray, tol: float = 1e-8) -> bool:
        raise NotImplementedError

    def default_point(self) -> np.ndarray:
        """A fixed feasible point used as the arbitrary start ``x``."""
        raise NotImplementedError
