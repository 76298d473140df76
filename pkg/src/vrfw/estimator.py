"""Stochastic gradient estimates, plain and variance-reduced."""
from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from .core import CostLedger, FiniteSumObjective, RngStream


@dataclasses.dataclass
class Snapshot:
    """Anchor point ``w0`` with its exact gradient."""

    w0: np.ndarray
    grad_w0: np.ndarray


def take_snapshot(obj: FiniteSumObjective, w0, ledger: Optional[CostLedger] = None) -> Snapshot:
    w0 = np.array(w0, dtype=float, copy=True)
    g = obj.full_gradient(w0)
    if ledger is not None:
        ledger.exact_gradients += 1
    return Snapshot(w0, g)


def _one_hot(n, i):
    if not 0 <= i < n:
        raise IndexError(f"component index {i} out of range [0, {n})")
    c = np.zeros(n, dtype=np.int64)
    c[i] = 1
    return c


def vr_correction(obj, w, snap: Snapshot, counts) -> np.ndarray:
    """Mean over the sampled components of ``grad f_i(w) - grad f_i(w0)``.

    The same indices (with multiplicity) are used at both points.  The two
    batch means share one accumulation order, so at ``w = w0`` the result is
    exactly zero.
    """
    return obj.batch_gradient(counts, w) - obj.batch_gradient(counts, snap.w0)


def vr_gradient(obj: FiniteSumObjective, w, snap: Snapshot, i: int,
                ledger: Optional[CostLedger] = None) -> np.ndarray:
    """``grad f_i(w) - grad f_i(w0) + grad f(w0)``."""
    counts = _one_hot(obj.n, i)
    out = vr_correction(obj, w, snap, counts) + snap.grad_w0
    if ledger is not None:
        ledger.stochastic_gradients += 2
    return out


def minibatch_vr(obj: FiniteSumObjective, w, snap: Snapshot, m: int, rng: RngStream,
                 ledger: Optional[CostLedger] = None) -> np.ndarray:
    """Average of ``m`` iid variance-reduced samples at ``w``."""
    if m < 1:
        raise ValueError("mini-batch size must be at least 1")
    counts = rng.counts(obj.n, int(m))
    out = vr_correction(obj, w, snap, counts) + snap.grad_w0
    if ledger is not None:
        ledger.stochastic_gradients += 2 * int(m)
    return out


def minibatch_plain(obj: FiniteSumObjective, w, m: int, rng: RngStream,
                    ledger: Optional[CostLedger] = None) -> np.ndarray:
    """Average of ``m`` iid stochastic gradients ``grad f_i(w)``."""
    if m < 1:
        raise ValueError("mini-batch size must be at least 1")
    counts = rng.counts(obj.n, int(m))
    out = obj.batch_gradient(counts, w)
    if ledger is not None:
        ledger.stochastic_gradients += int(m)
    return out


def empirical_vr_variance(obj, w, snap: Snapshot, trials: int, rng: RngStream) -> float:
    """Sample mean of ``||vr_gradient - grad f(w)||^2`` over ``trials`` draws."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    full = obj.full_gradient(w)
    total = 0.0
    for _ in range(trials):
        i = rng.next_index(obj.n)
        d = vr_gradient(obj, w, snap, i) - full
        total += float(np.vdot(d, d))
    return total / trials


def exhaustive_vr_variance(obj, w, snap: Snapshot) -> float:
    """Exact variance of one variance-reduced sample (average over all ``i``)."""
    full = obj.full_gradient(w)
    total = 0.0
    for i in range(obj.n):
        d = vr_gradient(obj, w, snap, i) - full
        total += float(np.vdot(d, d))
    return total / obj.n
