"""Estimation of natural parameters from target statistics under a fixed offset.

Two routes:

``logistic_dyad_independent``
    Exact maximum likelihood for dyad-independent models.  The
    likelihood is a product of per-dyad logistic terms with the offset as
    a fixed intercept shift.  Dyads are grouped by the attribute profiles
    of their endpoints, so the Newton iterations run over dyad *types*
    rather than all ``n(n-1)/2`` dyads.  Fractional (mean-value) targets
    are accepted in place of observed statistics.

``stochastic_approximation``
    Robbins-Monro iteration on the moment equations
    ``E_theta[g(Y)] = target`` with Gibbs-sampled statistics, followed by
    a confirmation run whose batch means give the Monte Carlo standard
    errors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ego import ImpliedStats
from .errors import DegeneracyError, InputError, ModelAttributeMismatch, SeparationError, WrongMethodError
from .network import AttributeTable, Network
from .sampler import GibbsChain, bernoulli_network
from .terms import CompiledModel, ModelSpec, global_stats, ilogit, offset_value, pair_values

log = logging.getLogger(__name__)

METHODS = ("auto", "logistic_dyad_independent", "stochastic_approximation")


@dataclass
class FitConfig:
    """Fitting controls.

    Chain lengths are in *sweeps*: one sweep is ``n(n-1)/2`` Gibbs steps.
    ``tol`` bounds the confirmation-phase z-scores
    ``|target - mean| / mc_se`` of every statistic.  ``diagonalize``
    shrinks the sampled covariance towards its diagonal before it is used
    as the preconditioner (1.0 = purely diagonal).
    """

    method: str = "auto"
    max_iterations: int = 1000
    a0: float = 0.5
    decay: float = 0.75
    samples_per_iteration: int = 1
    subphase_iterations: int = 50
    n_subphases: int = 3
    interval: float = 0.5
    burn_in: float = 3.0
    phase1_samples: int | None = None
    newton_steps: int = 5
    tol: float = 3.0
    diagonalize: float = 0.2
    confirm_batches: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        if not 0.5 < self.decay <= 1:
            raise InputError("decay exponent must be in (0.5, 1]")
        if self.tol <= 0 or self.a0 <= 0 or self.interval <= 0:
            raise InputError("tol, a0 and interval must be positive")
        if self.samples_per_iteration < 1 or self.subphase_iterations < 1 or self.max_iterations < 1:
            raise InputError("iteration counts must be positive")
        if not 0 <= self.diagonalize <= 1:
            raise InputError("diagonalize must be in [0, 1]")


@dataclass
class FitResult:
    theta_hat: np.ndarray
    target: np.ndarray
    achieved: np.ndarray
    mc_standard_errors: np.ndarray
    converged: bool
    iterations: int
    names: list = field(default_factory=list)
    method: str = ""
    offset: float = 0.0
    n: int = 0
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("theta_hat", "target", "achieved", "mc_standard_errors"):
            d[k] = [float(x) for x in d[k]]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for k in ("theta_hat", "target", "achieved", "mc_standard_errors"):
            d[k] = np.asarray(d[k], dtype=np.float64)
        return cls(**d)


# --------------------------------------------------------------------------
# Dyad types
# --------------------------------------------------------------------------

@dataclass
class DyadTypes:
    """Dyads grouped by endpoint attribute profile.

    ``X[t]`` is the change-statistic row shared by the ``weight[t]``
    dyads of type ``t``; ``profile[i]`` is node ``i``'s profile and
    ``index[a, b]`` the type of a profile pair.
    """

    X: np.ndarray
    weight: np.ndarray
    profile: np.ndarray
    index: np.ndarray


def dyad_types(cm: CompiledModel, n: int) -> DyadTypes:
    feats = np.vstack([cm.cat.astype(np.float64), cm.num]).T if len(cm.kinds) else np.zeros((n, 1))
    uniq, profile, counts = np.unique(feats, axis=0, return_inverse=True, return_counts=True)
    profile = profile.reshape(-1)
    P = len(uniq)
    a, b = np.triu_indices(P)
    weight = np.where(a == b, counts[a] * (counts[a] - 1) / 2, counts[a] * counts[b]).astype(np.float64)
    first = np.zeros(P, np.int64)
    first[profile[::-1]] = np.arange(n)[::-1]
    ia, ib = first[a], first[b]
    X = pair_values(cm, cm.cat[:, ia], cm.num[:, ia], cm.cat[:, ib], cm.num[:, ib])
    index = np.zeros((P, P), np.int64)
    index[a, b] = np.arange(a.size)
    index[b, a] = np.arange(a.size)
    keep = weight > 0
    # Dropping empty types would shift indices; zero-weight rows are harmless.
    X[~keep] = 0.0
    return DyadTypes(X, weight, profile, index)


def _stat_bounds(types: DyadTypes, cm: CompiledModel, n: int):
    lo = (types.weight[:, None] * np.minimum(types.X, 0)).sum(axis=0)
    hi = (types.weight[:, None] * np.maximum(types.X, 0)).sum(axis=0)
    for k in np.flatnonzero(cm.markov):
        lo[k] = 0.0
        hi[k] = float(cm.cat[k].sum()) if cm.p1[k] <= n - 1 else 0.0
    return lo, hi


def check_interior(target, attrs, model, n, err=DegeneracyError):
    """Raise ``err`` if any target sits on its achievable minimum or maximum."""
    cm = CompiledModel.for_attrs(model, attrs)
    types = dyad_types(cm, n)
    lo, hi = _stat_bounds(types, cm, n)
    eps = 1e-9 * (1 + np.abs(hi - lo))
    bad = [model.terms[k].label for k in range(len(target))
           if target[k] <= lo[k] + eps[k] or target[k] >= hi[k] - eps[k]]
    if bad:
        raise err(f"targets on the boundary of the achievable range for: {', '.join(bad)}")
    return types, cm


# --------------------------------------------------------------------------
# Helpers
# --------------------------------------------------------------------------

def _resolve(targets, attrs, model, n):
    if isinstance(targets, ImpliedStats):
        n = targets.n if n is None else n
        if attrs is None:
            attrs = attrs_from_composition(targets.composition, n)
        T = np.asarray(targets.targets, dtype=np.float64)
    elif isinstance(targets, Network):
        n = targets.n
        if attrs is None:
            attrs = AttributeTable(n)
        T = global_stats(targets, attrs, model)
    else:
        T = np.asarray(targets, dtype=np.float64)
        if n is None:
            n = attrs.n if attrs is not None else None
    if n is None or n < 2:
        raise InputError("network size unknown or < 2")
    if attrs is None:
        attrs = AttributeTable(n)
    if attrs.columns and attrs.n != n:
        raise ModelAttributeMismatch(f"attributes cover {attrs.n} nodes, targets imply {n}")
    if T.shape != (len(model.terms),):
        raise InputError(f"{T.size} targets for {len(model.terms)} terms")
    return T, attrs, n


def attrs_from_composition(composition: dict, n: int, levels: dict | None = None) -> AttributeTable:
    """Node attributes realising categorical counts (largest-remainder rounding)."""
    cat, lv = {}, {}
    for name, counts in composition.items():
        labels = list(levels[name]) if levels and name in levels else list(counts)
        c = np.array([float(counts.get(lab, 0.0)) for lab in labels])
        c = c * (n / c.sum())
        base = np.floor(c).astype(int)
        rem = n - base.sum()
        base[np.argsort(-(c - base), kind="stable")[:rem]] += 1
        cat[name] = np.repeat(np.arange(len(labels)), base)
        lv[name] = labels
    return AttributeTable(n, cat, lv, {})


def _preconditioner(cov: np.ndarray, diagonalize: float) -> np.ndarray:
    d = np.maximum(np.diag(cov), 1e-8)
    P = (1 - diagonalize) * cov
    P[np.diag_indices_from(P)] = d
    return P


def _solve(P, r):
    try:
        return np.linalg.solve(P, r)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(P, r, rcond=None)[0]


# --------------------------------------------------------------------------
# Logistic route
# --------------------------------------------------------------------------

def _newton_logistic(X, w, T, offset, theta0=None, max_iter=200):
    K = X.shape[1]
    theta = np.zeros(K) if theta0 is None else np.array(theta0, dtype=np.float64)

    def loglik(th):
        eta = offset + X @ th
        return float(T @ th - np.sum(w * np.logaddexp(0.0, eta)))

    ll = loglik(theta)
    scale = 1.0 + np.abs(T)
    for it in range(1, max_iter + 1):
        p = ilogit(offset + X @ theta)
        grad = T - (w * p) @ X
        if np.max(np.abs(grad) / scale) < 1e-10:
            return theta, it - 1
        info = (X * (w * p * (1 - p))[:, None]).T @ X
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError:
            raise InputError("collinear terms: the Fisher information is singular") from None
        if np.linalg.cond(info) > 1e14:
            raise InputError("collinear terms: the Fisher information is singular")
        t = 1.0
        while True:
            cand = theta + t * step
            ll_new = loglik(cand)
            if ll_new >= ll - 1e-12 * abs(ll) or t < 1e-10:
                break
            t *= 0.5
        theta, ll = cand, ll_new
        if np.max(np.abs(theta)) > 1e3:
            raise SeparationError("coefficients diverge; a statistic separates ties from non-ties")
    raise SeparationError(f"Newton iterations did not converge in {max_iter} steps")


def fit_logistic_dyad_independent(targets, attrs: AttributeTable | None, model: ModelSpec,
                                  cfg: FitConfig | None = None, n: int | None = None) -> FitResult:
    """Exact MLE for a dyad-independent model given a network or target statistics."""
    if not model.dyad_independent:
        bad = [t.label for t in model.terms if t.locality != "dyad_independent"]
        raise WrongMethodError(f"logistic fitting needs dyad-independent terms; got {bad}")
    T, attrs, n = _resolve(targets, attrs, model, n)
    types, cm = check_interior(T, attrs, model, n, err=SeparationError)
    off = offset_value(model.offset, n)
    theta, iters = _newton_logistic(types.X, types.weight, T, off)
    p = ilogit(off + types.X @ theta)
    achieved = (types.weight * p) @ types.X
    return FitResult(theta, T, achieved, np.zeros_like(theta), True, iters, model.names,
                     "logistic_dyad_independent", off, n)


# --------------------------------------------------------------------------
# Stochastic approximation
# --------------------------------------------------------------------------

def _warm_start(T, attrs, model, n, types, rng):
    """Dyad-independent sub-model fit and an independent-ties starting network."""
    K = len(model.terms)
    di = ~model.markov_mask
    theta = np.zeros(K)
    off = offset_value(model.offset, n)
    if di.any():
        sub_theta, _ = _newton_logistic(types.X[:, di], types.weight, T[di], off)
        theta[di] = sub_theta
    p_types = ilogit(off + types.X[:, di] @ theta[di])
    prof = types.profile
    idx = types.index

    def prob(i, js):
        return p_types[idx[prof[i], prof[js]]]

    return theta, bernoulli_network(n, prob, rng)


def _sweeps(x, dyads):
    return max(1, int(round(x * dyads)))


MAX_COORD_STEP = 2.0


def _newton_step(P, resid, K):
    """Newton step capped in Mahalanobis norm and in every coordinate.

    The coordinate cap matters when some statistic barely varies in the
    draws: the covariance is then nearly singular and a tiny Mahalanobis
    norm can hide an enormous step.
    """
    step = _solve(P, resid)
    big = float(np.max(np.abs(step))) if step.size else 0.0
    if not np.isfinite(big):
        return np.zeros_like(step)
    if big > MAX_COORD_STEP:
        step = step * (MAX_COORD_STEP / big)
    maha = math.sqrt(max(float(resid @ step), 0.0))
    cap = 2.0 * math.sqrt(K)
    return step * (cap / maha) if maha > cap else step


def fit_stochastic_approximation(targets, attrs, model, cfg: FitConfig, n=None) -> FitResult:
    """Robbins-Monro fit followed by Newton-corrected confirmation rounds.

    Each confirmation run draws ``4 * subphase_iterations`` statistic
    vectors at the current estimate and applies one Newton correction
    ``theta + Sigma^-1 (target - mean)``.  The round's discrepancy is
    standardised by the batch-means error of its own mean combined with
    that of the previous round (the correction inherits the latter), so
    passing the test means the linearisation holds at Monte Carlo
    precision.  The reported standard errors are the batch-means spread
    of the corrected estimate.
    """
    T, attrs, n = _resolve(targets, attrs, model, n)
    K = len(model.terms)
    types, cm = check_interior(T, attrs, model, n)
    init_seed, chain_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    theta, net0 = _warm_start(T, attrs, model, n, types, np.random.default_rng(init_seed))
    chain = GibbsChain(attrs, model, net0, seed=chain_seed, theta=theta)
    D = chain.dyads
    interval = _sweeps(cfg.interval, D)
    chain.run(_sweeps(cfg.burn_in, D))
    n1 = cfg.phase1_samples or max(20, 2 * K)
    diag = {"interval_steps": interval, "phase1": [], "confirmations": []}

    def failed(reason, t):
        diag["failure"] = reason
        nan = np.full(K, np.nan)
        return FitResult(theta, T, nan, nan, False, t, model.names, "stochastic_approximation",
                         chain.offset, n, diag)

    # Phase 1: damped Newton steps with the sampled covariance as Jacobian.
    for _ in range(max(1, cfg.newton_steps)):
        G = chain.sample_stats(n1, interval)
        cov = np.atleast_2d(np.cov(G, rowvar=False))
        P = _preconditioner(cov, cfg.diagonalize)
        resid = T - G.mean(axis=0)
        worst = float(np.max(np.abs(resid) / np.sqrt(np.maximum(np.diag(cov), 1e-8))))
        diag["phase1"].append(worst)
        theta = theta + _newton_step(P, resid, K)
        chain.set_theta(theta)
        if worst < 0.5:
            break

    # Phase 2: Robbins-Monro subphases, each ending at its Polyak average.
    t = 0
    for _ in range(cfg.n_subphases):
        path, draws = [], []
        for _ in range(cfg.subphase_iterations):
            a = cfg.a0 / (1.0 + t) ** cfg.decay
            g = chain.sample_stats(cfg.samples_per_iteration, interval)
            draws.append(g)
            theta = theta + a * _solve(P, T - g.mean(axis=0))
            if not np.all(np.isfinite(theta)) or np.max(np.abs(theta)) > 1e3:
                return failed("coefficients diverged", t)
            chain.set_theta(theta)
            path.append(theta)
            t += 1
        theta = np.mean(path, axis=0)
        chain.set_theta(theta)
        G = np.vstack(draws)
        if G.shape[0] > K:
            P = _preconditioner(np.atleast_2d(np.cov(G, rowvar=False)), cfg.diagonalize)

    # Phase 3: confirmation rounds.
    per_iter = cfg.samples_per_iteration
    m = 4 * cfg.subphase_iterations * per_iter
    B = min(cfg.confirm_batches, m)
    m -= m % B
    prev_se = np.zeros(K)
    converged = False
    while True:
        G = chain.sample_stats(m, interval)
        t += m // per_iter
        mean = G.mean(axis=0)
        cov = np.atleast_2d(np.cov(G, rowvar=False))
        J = _preconditioner(cov, 0.0)
        batch = G.reshape(B, m // B, K).mean(axis=1)
        se_mean = batch.std(axis=0, ddof=1) / math.sqrt(B)
        z = (T - mean) / np.maximum(np.hypot(se_mean, prev_se), 1e-12)
        sd = np.sqrt(np.maximum(np.diag(cov), 1e-12))
        corr = np.array([_solve(J, T - b) for b in batch])
        theta_hat = theta + _newton_step(J, T - mean, K)
        se = corr.std(axis=0, ddof=1) / math.sqrt(B)
        diag["confirmations"].append(float(np.max(np.abs(z))))
        diag.update(z=z.tolist(), t_ratios=((mean - T) / sd).tolist(), se_mean=se_mean.tolist(),
                    theta_confirmed=theta.tolist())
        if np.max(np.abs(z)) < cfg.tol:
            converged = True
            break
        if t >= cfg.max_iterations:
            break
        if np.max(np.abs(theta_hat)) > 1e3:
            return failed("coefficients diverged", t)
        log.info("confirmation failed (max |z| = %.2f); correcting", float(np.max(np.abs(z))))
        theta, prev_se = theta_hat, se_mean
        chain.set_theta(theta)
    return FitResult(theta_hat, T, mean, se, converged, t, model.names, "stochastic_approximation",
                     chain.offset, n, diag)


def fit_mean_value(targets, attrs: AttributeTable | None, model: ModelSpec, cfg: FitConfig | None = None,
                   n: int | None = None) -> FitResult:
    """Find theta with ``E_theta[g(Y)] = targets`` at a fixed offset.

    ``targets`` is an :class:`ImpliedStats`, a statistic vector, or a
    :class:`Network` whose statistics are used.  ``method='auto'``
    selects the exact logistic route for dyad-independent models.
    """
    cfg = cfg or FitConfig()
    method = cfg.method
    if method == "auto":
        method = "logistic_dyad_independent" if model.dyad_independent else "stochastic_approximation"
    if method == "logistic_dyad_independent":
        try:
            return fit_logistic_dyad_independent(targets, attrs, model, cfg, n)
        except SeparationError as err:
            raise DegeneracyError(str(err)) from None
    return fit_stochastic_approximation(targets, attrs, model, cfg, n)
