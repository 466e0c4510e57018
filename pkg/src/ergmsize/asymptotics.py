"""Closed-form degree quantities for the offset model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InputError


def _ilogit(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass(frozen=True)
class MixingSpec:
    """``K`` groups with limiting proportions ``p`` and a symmetric
    matrix ``eta`` of group-pair log-odds shifts (``-inf`` forbids ties)."""

    p: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        eta = np.asarray(self.eta, dtype=np.float64)
        if p.ndim != 1 or eta.shape != (p.size, p.size):
            raise InputError("eta must be K x K for K proportions")
        if np.any(p < 0) or not np.isclose(p.sum(), 1.0):
            raise InputError("proportions must be non-negative and sum to 1")
        if not np.array_equal(eta, eta.T):
            raise InputError("eta must be symmetric")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "eta", eta)

    @property
    def K(self) -> int:
        return self.p.size


def poisson_limit_pmf(theta: float, d: int) -> float:
    """Limiting degree pmf, Poisson with mean ``exp(theta)``."""
    if d < 0:
        raise InputError("degree must be >= 0")
    return float(stats.poisson.pmf(d, np.exp(theta)))


def finite_n_tie_prob(theta: float, n: int) -> float:
    return float(_ilogit(-np.log(n) + theta))


def finite_n_degree_pmf(theta: float, n: int, d: int) -> float:
    """Degree pmf of the edges-plus-offset model on ``n`` nodes."""
    if n < 2 or not 0 <= d <= n - 1:
        raise InputError(f"need n >= 2 and 0 <= d <= n-1, got n={n}, d={d}")
    return float(stats.binom.pmf(d, n - 1, finite_n_tie_prob(theta, n)))


def mixing_expected_degree(spec: MixingSpec, k: int) -> float:
    """Limiting expected degree of a group-``k`` actor."""
    return float(np.sum(spec.p * np.exp(spec.eta[k])))


def finite_n_mixing_degree(spec: MixingSpec, sizes, k: int) -> float:
    """Exact expected degree of a group-``k`` actor among ``sum(sizes)`` nodes.

    The actor's own slot is excluded from its group (no self-loops), so
    this is ``(|P_k| - 1)`` rather than ``|P_k|`` partners for the own group.
    """
    sizes = np.asarray(sizes, dtype=np.float64)
    if sizes.size != spec.K:
        raise InputError("need one size per group")
    n = sizes.sum()
    others = sizes.copy()
    others[k] -= 1
    p = _ilogit(-np.log(n) + spec.eta[k])
    return float(np.sum(others * p))
