"""Step-size, batch-size and epoch-length schedules.

``theory`` schedules are the parameter choices under which the convergence
guarantees hold; ``practical`` ones are the lighter experimental defaults.
Multipliers are exposed so the large theoretical constants can be scaled.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Optional

PRACTICAL_DEFAULTS = {
    "sfw_batch": "k^2",
    "scgs_batch": "k^3",
    "svrf_batch": "k",
    "fixed_batch": 100,       # STORC, SGD, SVRG
    "snapshot_gap": 50,       # SVRF, STORC, SVRG
    "sgd_rate": "c/sqrt(k)",
    "svrg_rate": "c'",
    "trace_norm_tau": 50.0,
}


def fw_step(k: int) -> float:
    """``gamma_k = 2 / (k + 1)``."""
    return 2.0 / (k + 1)


# -- SVRF ------------------------------------------------------------------

def svrf_epoch_length(t: int) -> int:
    return 2 ** (t + 3) - 2


def svrf_batch_theory(k: int, mult: float = 96.0) -> int:
    return int(math.ceil(mult * (k + 1)))


def svrf_batch_practical(k: int) -> int:
    return k


# -- SFW -------------------------------------------------------------------

def sfw_batch_theory(k: int, G: float, L: float, D: float) -> int:
    # rounding guards against 4.000000000000001 -> 5
    return int(math.ceil(round((G * (k + 1) / (L * D)) ** 2, 9)))


def sfw_batch_practical(k: int) -> int:
    return k * k


# -- SCGS / STORC ----------------------------------------------------------

def sliding_beta(k: int, L: float) -> float:
    return 3.0 * L / k


def sliding_eta(k: int, L: float, Dt2: float, N: int) -> float:
    return 2.0 * L * Dt2 / (N * k)


def scgs_batch_practical(k: int) -> int:
    return k ** 3


def scgs_batch_theory(k: int, G: float, L: float, D: float, N: int) -> int:
    """Plain-sample batch keeping the estimator variance below L^2 D^2 / (N (k+1)^2)."""
    return int(math.ceil(round(G * G * N * (k + 1) ** 2 / (L * L * D * D), 9)))


@dataclasses.dataclass(frozen=True)
class StorcEpoch:
    """Parameters of one outer STORC epoch."""

    t: int
    case: str
    N: int
    Dt2: float
    L: float
    D: float
    G: Optional[float] = None
    mu: Optional[float] = None
    mult_a: float = 900.0
    mult_b: float = 700.0
    mult_b_lin: float = 24.0
    mult_c: float = 5600.0

    def batch(self, k: int) -> int:
        if self.case == "a":
            return int(math.ceil(self.mult_a * self.N))
        if self.case == "b":
            return int(math.ceil(self.mult_b * self.N
                                 + self.mult_b_lin * self.N * self.G * (k + 1) / (self.L * self.D)))
        return int(math.ceil(round(self.mult_c * self.N * self.mu, 9)))

    def beta(self, k: int) -> float:
        return sliding_beta(k, self.L)

    def eta(self, k: int) -> float:
        return sliding_eta(k, self.L, self.Dt2, self.N)


def storc_epoch(t: int, case: str, L: float, D: float, G: Optional[float] = None,
                mu: Optional[float] = None, **mults) -> StorcEpoch:
    """Theory schedule for epoch ``t`` under case ``a``, ``b`` or ``c``."""
    if case in ("a", "b"):
        if case == "b" and G is None:
            raise ValueError("STORC case (b) needs the Lipschitz constant G")
        N = int(math.ceil(round(2.0 ** (t / 2.0 + 2.0), 9)))
        return StorcEpoch(t, case, N, D * D, L, D, G, mu, **mults)
    if case == "c":
        if mu is None:
            raise ValueError("STORC case (c) needs strong convexity (mu = L / alpha)")
        N = int(math.ceil(round(math.sqrt(32.0 * mu), 9)))
        return StorcEpoch(t, case, N, mu * D * D / 2.0 ** (t - 1), L, D, G, mu, **mults)
    raise ValueError(f"unknown STORC case {case!r}; expected 'a', 'b' or 'c'")


def storc_practical_epoch(t: int, N: int, L: float, D: float, G: Optional[float] = None) -> StorcEpoch:
    """Practical epoch: fixed ``N``, with ``D_t^2 = D^2 / 2^(t-1)`` as in case (c) without ``mu``."""
    return StorcEpoch(t, "practical", N, D * D / 2.0 ** (t - 1), L, D, G)
