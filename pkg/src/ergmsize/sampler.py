"""Gibbs sampling from the ERGM and exact enumeration for tiny networks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import _kernel
from .errors import InputError, TooLargeError
from .network import AttributeTable, Network
from .terms import CompiledModel, ModelSpec, StatVector, offset_value, pair_values

DRIFT_CHECK_STEPS = 100_000


@dataclass
class SamplerConfig:
    """Chain settings.  ``None`` for burn_in/interval selects the defaults
    ``20 * dyads`` and ``dyads`` (one expected visit per dyad between draws)."""

    burn_in: int | None = None
    interval: int | None = None
    n_samples: int = 1
    seed: int = 0
    initial: str = "empty"
    initial_p: float = 0.5

    def __post_init__(self):
        if self.burn_in is not None and self.burn_in < 0:
            raise InputError("burn_in must be >= 0")
        if self.interval is not None and self.interval < 1:
            raise InputError("interval must be >= 1")
        if self.n_samples < 1:
            raise InputError("n_samples must be >= 1")
        if self.initial not in ("empty", "bernoulli"):
            raise InputError(f"unknown initial state {self.initial!r}")

    def resolved(self, n: int) -> tuple[int, int]:
        dyads = n * (n - 1) // 2
        burn = 20 * dyads if self.burn_in is None else self.burn_in
        interval = dyads if self.interval is None else self.interval
        return burn, max(1, interval)


def _attrs_or_empty(attrs, n):
    if attrs is None:
        return AttributeTable(n)
    if attrs.n != n and attrs.columns:
        raise InputError(f"attributes cover {attrs.n} nodes, network has {n}")
    return attrs


def bernoulli_network(n: int, prob, rng) -> Network:
    """Independent ties; ``prob`` is a scalar or a function ``(i, js) -> p``."""
    edges = []
    for i in range(n - 1):
        js = np.arange(i + 1, n)
        p = prob(i, js) if callable(prob) else prob
        hit = js[rng.random(js.size) < p]
        edges.extend((i, int(j)) for j in hit)
    return Network(n, edges)


class GibbsChain:
    """A single Gibbs chain over networks on a fixed node set.

    The chain owns its state and random generator; ``run`` advances it
    and returns statistic snapshots.  Single writer only.
    """

    def __init__(self, attrs: AttributeTable | None, model: ModelSpec, net0: Network | None = None,
                 n: int | None = None, seed=0, theta=None):
        if net0 is not None:
            n = net0.n
        elif n is None:
            n = attrs.n if attrs is not None else None
        if n is None or n < 2:
            raise InputError("a chain needs n >= 2")
        self.n = n
        self.attrs = _attrs_or_empty(attrs, n)
        self.model = model
        self.cm = CompiledModel.for_attrs(model, self.attrs)
        self.offset = offset_value(model.offset, n)
        self.theta = np.array(model.require_theta() if theta is None else theta, dtype=np.float64)
        self.rng = np.random.default_rng(seed)
        self.bits = _kernel.empty_bits(n)
        self.deg = np.zeros(n, np.int64)
        if net0 is not None and net0.n_edges:
            _kernel.load_edges(self.bits, self.deg, net0.edge_array())
        self.stats = self.recompute()
        self._integer = np.isin(self.cm.kinds, [0, 1, 2, 3, 4, 7, 8])
        self.steps_done = 0

    @property
    def dyads(self) -> int:
        return self.n * (self.n - 1) // 2

    def set_theta(self, theta):
        self.theta = np.asarray(theta, dtype=np.float64).copy()

    def recompute(self) -> np.ndarray:
        cm = self.cm
        return _kernel.global_stats(self.bits, self.deg, self.n, cm.kinds, cm.p1, cm.p2, cm.cat, cm.num)

    def check_drift(self):
        """Compare incremental statistics with a full recomputation and resync."""
        fresh = self.recompute()
        ok_int = np.array_equal(fresh[self._integer], self.stats[self._integer])
        real = ~self._integer
        scale = 1.0 + np.abs(fresh[real])
        ok_real = np.all(np.abs(fresh[real] - self.stats[real]) <= 1e-9 * scale * max(1, self.n))
        if not (ok_int and ok_real):
            raise AssertionError(f"incremental statistics drifted: {self.stats} vs {fresh}")
        self.stats = fresh

    def _advance(self, steps, record_interval, out):
        cm = self.cm
        _kernel.gibbs_run(self.rng, self.n, self.bits, self.deg, cm.kinds, cm.p1, cm.p2, cm.cat, cm.num,
                          self.theta, self.offset, self.stats, steps, record_interval, out)
        self.steps_done += steps

    def run(self, steps: int, record_interval: int = 0) -> np.ndarray:
        """Advance ``steps`` updates; return snapshots every ``record_interval`` steps."""
        K = len(self.cm.kinds)
        if record_interval <= 0:
            out = np.empty((0, K))
            done = 0
            while done < steps:
                chunk = min(DRIFT_CHECK_STEPS, steps - done)
                self._advance(chunk, 0, out)
                done += chunk
                if chunk == DRIFT_CHECK_STEPS:
                    self.check_drift()
            return out
        n_rec = steps // record_interval
        out = np.empty((n_rec, K))
        per_chunk = max(1, DRIFT_CHECK_STEPS // record_interval)
        row = 0
        while row < n_rec:
            m = min(per_chunk, n_rec - row)
            self._advance(m * record_interval, record_interval, out[row:row + m])
            row += m
            self.check_drift()
        rest = steps - n_rec * record_interval
        if rest:
            self._advance(rest, 0, out[:0])
        return out

    def sample_stats(self, n_samples: int, interval: int) -> np.ndarray:
        return self.run(n_samples * interval, interval)

    def network(self) -> Network:
        e = _kernel.edge_array(self.bits, self.n, int(self.deg.sum() // 2))
        net = Network(self.n)
        for i, j in e:
            net.toggle(int(i), int(j))
        return net

    def degrees(self) -> np.ndarray:
        return self.deg.copy()


def gibbs_sample(net0: Network | None, attrs: AttributeTable | None, model: ModelSpec,
                 cfg: SamplerConfig, n: int | None = None, stats_only: bool = False):
    """Draw ``cfg.n_samples`` networks (or statistic vectors) by Gibbs sampling.

    The chain starts at ``net0`` when given, otherwise at the state named
    by ``cfg.initial``.  Every ``interval``-th state after ``burn_in``
    steps is retained.
    """
    if net0 is None:
        n = n if n is not None else (attrs.n if attrs is not None else None)
        if n is None:
            raise InputError("network size unknown: pass net0, attrs or n")
        if cfg.initial == "bernoulli":
            net0 = bernoulli_network(n, cfg.initial_p, np.random.default_rng([cfg.seed, 1]))
    chain = GibbsChain(attrs, model, net0, n=n, seed=cfg.seed)
    burn, interval = cfg.resolved(chain.n)
    chain.run(burn)
    if stats_only:
        return chain.sample_stats(cfg.n_samples, interval)
    nets = []
    for _ in range(cfg.n_samples):
        chain.run(interval)
        nets.append(chain.network())
    return nets


def dyad_list(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def dyad_index_matrix(n: int) -> np.ndarray:
    idx = np.full((n, n), -1, np.int64)
    for k, (i, j) in enumerate(dyad_list(n)):
        idx[i, j] = idx[j, i] = k
    return idx


def network_code(net: Network) -> int:
    idx = dyad_index_matrix(net.n)
    return sum(1 << int(idx[i, j]) for i, j in net.edges)


def network_from_code(n: int, code: int) -> Network:
    return Network(n, [d for k, d in enumerate(dyad_list(n)) if code >> k & 1])


@dataclass
class ExactDistribution:
    """Probabilities of every network on ``n`` nodes.

    Graph ``c`` has tie ``dyads[k]`` iff bit ``k`` of ``c`` is set.
    """

    n: int
    dyads: list
    stats: np.ndarray
    log_weights: np.ndarray
    log_z: float
    probs: np.ndarray

    def prob(self, net: Network) -> float:
        return float(self.probs[network_code(net)])

    def log_prob(self, net: Network) -> float:
        return float(self.log_weights[network_code(net)] - self.log_z)


def _enumerated_stats(n, attrs, model):
    D = n * (n - 1) // 2
    codes = np.arange(2 ** D, dtype=np.int64)
    dyads = dyad_list(n)
    bits = ((codes[:, None] >> np.arange(D)) & 1).astype(np.int8)
    cm = CompiledModel.for_attrs(model, attrs)
    I = np.array([d[0] for d in dyads])
    J = np.array([d[1] for d in dyads])
    pv = pair_values(cm, cm.cat[:, I], cm.num[:, I], cm.cat[:, J], cm.num[:, J])
    stats = bits @ pv
    deg = np.zeros((codes.size, n), np.int64)
    for k, (i, j) in enumerate(dyads):
        deg[:, i] += bits[:, k]
        deg[:, j] += bits[:, k]
    for k in np.flatnonzero(cm.markov):
        stats[:, k] = ((deg == cm.p1[k]) & (cm.cat[k] == 1)).sum(axis=1)
    edge_counts = bits.sum(axis=1).astype(np.float64)
    return dyads, stats, edge_counts


def exact_distribution(attrs: AttributeTable | None, model: ModelSpec, n: int | None = None,
                       max_dyads: int = 21) -> ExactDistribution:
    """Enumerate all ``2^(n(n-1)/2)`` networks and normalise the ERGM weights."""
    n = n if n is not None else attrs.n
    D = n * (n - 1) // 2
    if D > max_dyads:
        raise TooLargeError(f"n={n} has {D} dyads; enumeration cap is {max_dyads}")
    attrs = _attrs_or_empty(attrs, n)
    dyads, stats, edge_counts = _enumerated_stats(n, attrs, model)
    lw = offset_value(model.offset, n) * edge_counts + stats @ model.require_theta()
    log_z = float(logsumexp(lw))
    return ExactDistribution(n, dyads, stats, lw, log_z, np.exp(lw - log_z))


def expected_stats(dist: ExactDistribution, model: ModelSpec | None = None) -> StatVector:
    return dist.probs @ dist.stats


def stat_covariance(dist: ExactDistribution) -> np.ndarray:
    mu = expected_stats(dist)
    c = dist.stats - mu
    return (c * dist.probs[:, None]).T @ c


def state_frequencies(attrs: AttributeTable | None, model: ModelSpec, n: int, steps: int,
                      seed=0, burn_in: int = 0, net0: Network | None = None) -> np.ndarray:
    """Empirical distribution of Gibbs states, tallied after every step."""
    D = n * (n - 1) // 2
    if D > 24:
        raise TooLargeError("state tallies are limited to 24 dyads")
    chain = GibbsChain(attrs, model, net0, n=n, seed=seed)
    chain.run(burn_in)
    net = chain.network()
    idx = dyad_index_matrix(n)
    counts = np.zeros(2 ** D, np.int64)
    cm = chain.cm
    _kernel.gibbs_state_counts(chain.rng, n, chain.bits, chain.deg, cm.kinds, cm.p1, cm.p2, cm.cat, cm.num,
                               chain.theta, chain.offset, steps, idx, network_code(net), counts)
    return counts / counts.sum()


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def mc_standard_error(x, n_batches: int | None = None) -> np.ndarray:
    """Batch-means standard error of the mean of ``x`` (rows are draws)."""
    x = np.asarray(x, dtype=np.float64)
    m = x.shape[0]
    b = n_batches or max(2, int(math.sqrt(m)))
    b = min(b, m)
    size = m // b
    if size < 1:
        raise InputError("not enough draws for batch means")
    means = x[: b * size].reshape(b, size, *x.shape[1:]).mean(axis=1)
    return means.std(axis=0, ddof=1) / math.sqrt(b)
