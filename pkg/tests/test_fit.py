import math

import numpy as np
import pytest
from scipy import optimize

from ergmsize import terms as T
from ergmsize import fit as F
from ergmsize.ego import ImpliedStats
from ergmsize.errors import DegeneracyError, InputError, SeparationError, WrongMethodError
from ergmsize.fit import (FitConfig, FitResult, attrs_from_composition, fit_logistic_dyad_independent,
                          fit_mean_value)
from ergmsize.network import AttributeTable, Network
from ergmsize.sampler import GibbsChain, exact_distribution, expected_stats

from helpers import random_attrs, random_network

LOG_N = T.OffsetSpec("log_inverse_n")


def edges_only(offset=T.OffsetSpec()):
    return T.ModelSpec([T.edges()], offset=offset)


def logit(p):
    return math.log(p / (1 - p))


def test_config_validation():
    with pytest.raises(InputError):
        FitConfig(decay=0.5)
    with pytest.raises(InputError):
        FitConfig(tol=0)
    with pytest.raises(InputError):
        FitConfig(method="newton")


def test_edges_no_offset_is_logit_density(rng):
    net = random_network(60, 0.1, rng)
    r = fit_logistic_dyad_independent(net, None, edges_only())
    assert r.theta_hat[0] == pytest.approx(logit(net.density()), abs=1e-10)
    assert r.converged and r.achieved[0] == pytest.approx(net.n_edges)


def test_edges_with_offset_shifts_by_log_n(rng):
    net = random_network(60, 0.1, rng)
    r = fit_logistic_dyad_independent(net, None, edges_only(LOG_N))
    assert r.theta_hat[0] == pytest.approx(logit(net.density()) + math.log(60), abs=1e-10)


def test_mean_degree_two_closed_form():
    r = fit_mean_value(np.array([100.0]), None, edges_only(LOG_N), n=100)
    assert 99 / (1 + math.exp(math.log(100) - r.theta_hat[0])) == pytest.approx(2.0, abs=1e-10)
    assert r.theta_hat[0] == pytest.approx(logit(2 / 99) + math.log(100), abs=1e-10)
    assert r.theta_hat[0] == pytest.approx(math.log(200 / 97), abs=1e-10)


def test_offset_invariance_edges_only(rng):
    net = random_network(50, 0.08, rng)
    a = fit_logistic_dyad_independent(net, None, edges_only(LOG_N)).theta_hat[0]
    mu = T.OffsetSpec("logit_mu_over_n_minus_1", mu=3.0)
    b = fit_logistic_dyad_independent(net, None, edges_only(mu)).theta_hat[0]
    assert a - b == pytest.approx(mu.value(50) - LOG_N.value(50), abs=1e-10)


def test_two_block_mixing_matches_enumeration():
    attrs = AttributeTable.from_labels({"g": ["a", "a", "a", "b", "b", "b"]})
    net = Network(6, [(0, 1), (1, 2), (0, 3), (3, 4), (2, 5), (4, 5), (1, 4)])
    m = T.ModelSpec([T.within("g", "a"), T.within("g", "b"), T.between("g", "a", "b")], offset=LOG_N)
    obs = T.global_stats(net, attrs, m)
    fit = fit_logistic_dyad_independent(net, attrs, m)

    def score(theta):
        return expected_stats(exact_distribution(attrs, m.with_theta(theta))) - obs

    exact = optimize.root(score, np.zeros(3), tol=1e-12).x
    np.testing.assert_allclose(fit.theta_hat, exact, atol=1e-7)


def test_fractional_targets_accepted():
    attrs = AttributeTable.from_labels({"sex": ["F"] * 10 + ["M"] * 10})
    m = T.ModelSpec([T.edges(), T.same("sex")], offset=LOG_N)
    r = fit_logistic_dyad_independent(np.array([12.5, 3.25]), attrs, m)
    np.testing.assert_allclose(r.achieved, [12.5, 3.25], rtol=1e-9)


def test_separation_detected():
    attrs = AttributeTable.from_labels({"sex": ["F"] * 5 + ["M"] * 5})
    m = T.ModelSpec([T.edges(), T.same("sex")])
    with pytest.raises(SeparationError):
        fit_logistic_dyad_independent(np.array([10.0, 0.0]), attrs, m)
    with pytest.raises(DegeneracyError):
        fit_mean_value(np.array([10.0, 0.0]), attrs, m)


def test_collinear_terms_rejected():
    attrs = AttributeTable.from_labels({"sex": ["F"] * 5 + ["M"] * 5})
    m = T.ModelSpec([T.activity("sex", "F"), T.activity("sex", "M"), T.edges()])
    with pytest.raises(InputError):
        fit_logistic_dyad_independent(np.array([8.0, 8.0, 8.0]), attrs, m)


def test_markov_term_needs_sa():
    m = T.ModelSpec([T.edges(), T.degree(1)])
    with pytest.raises(WrongMethodError):
        fit_logistic_dyad_independent(np.array([5.0, 3.0]), None, m, n=20)


def test_degenerate_targets_raise():
    m = T.ModelSpec([T.edges(), T.degree(1)], offset=LOG_N)
    with pytest.raises(DegeneracyError):
        fit_mean_value(np.array([0.0, 0.0]), None, m, n=30)
    with pytest.raises(DegeneracyError):
        fit_mean_value(np.array([10.0, 30.0]), None, m, n=30)


def test_sa_agrees_with_logistic(rng):
    attrs = random_attrs(150, rng)
    m = T.ModelSpec([T.activity("sex", "F"), T.activity("sex", "M"), T.within("race", "W")], offset=LOG_N)
    targets = np.array([90.0, 80.0, 20.0])
    exact = fit_mean_value(targets, attrs, m)
    assert exact.method == "logistic_dyad_independent"
    hits = []
    for seed in range(10):
        sa = fit_mean_value(targets, attrs, m, FitConfig(method="stochastic_approximation", seed=seed))
        assert sa.method == "stochastic_approximation" and sa.converged
        hits.extend(np.abs(sa.theta_hat - exact.theta_hat) < 2 * sa.mc_standard_errors)
    # Nominal coverage of a 2-SE band is 95%.
    assert np.mean(hits) >= 0.8


@pytest.fixture(scope="module")
def markov_case():
    rng = np.random.default_rng(21)
    n = 120
    attrs = AttributeTable(n, {"sex": rng.integers(0, 2, n)}, {"sex": ["F", "M"]}, {})
    m = T.ModelSpec([T.edges(), T.same("sex"), T.degree(1)], theta=[0.5, -1.0, 1.0], offset=LOG_N)
    chain = GibbsChain(attrs, m, seed=2)
    chain.run(20 * chain.dyads)
    return attrs, m, chain.sample_stats(2000, chain.dyads // 2).mean(axis=0)


def test_sa_reproducible(markov_case):
    attrs, m, targets = markov_case
    a = fit_mean_value(targets, attrs, m, FitConfig(seed=7))
    b = fit_mean_value(targets, attrs, m, FitConfig(seed=7))
    assert a.to_dict() == b.to_dict()


def test_sa_converged_result_is_consistent(markov_case):
    attrs, m, targets = markov_case
    r = fit_mean_value(targets, attrs, m, FitConfig(seed=1))
    assert r.converged and r.theta_hat.shape == (3,)
    assert np.all(np.abs(np.array(r.diagnostics["z"])) < 3.0)
    assert np.all(r.mc_standard_errors > 0)
    assert np.max(np.abs(r.theta_hat - m.theta)) < 0.5


def test_non_convergence_is_reported(markov_case):
    attrs, m, targets = markov_case
    cfg = FitConfig(seed=1, max_iterations=1, subphase_iterations=2, n_subphases=1, newton_steps=1,
                    phase1_samples=3, tol=1e-6)
    r = fit_mean_value(targets, attrs, m, cfg)
    assert not r.converged


def test_result_round_trip(markov_case):
    attrs, m, targets = markov_case
    r = fit_mean_value(targets[:1], None, T.ModelSpec([T.edges()], offset=LOG_N), n=120)
    back = FitResult.from_dict(r.to_dict())
    np.testing.assert_array_equal(back.theta_hat, r.theta_hat)


def test_implied_stats_targets_use_composition():
    s = ImpliedStats(20, np.array([6.0, 2.0]), {"sex": {"F": 9.6, "M": 10.4}}, ["activity.F", "same"])
    m = T.ModelSpec([T.activity("sex", "F"), T.same("sex")], offset=LOG_N)
    r = fit_mean_value(s, None, m)
    assert r.n == 20 and r.converged
    attrs = attrs_from_composition(s.composition, 20)
    assert sorted(np.bincount(attrs.categorical["sex"])) == [10, 10]


def test_newton_step_bounded_on_near_singular_covariance():
    P = np.diag([1.0, 1e-8])
    step = F._newton_step(P, np.array([0.1, 0.1]), 2)
    assert np.all(np.isfinite(step))
    assert np.max(np.abs(step)) <= F.MAX_COORD_STEP + 1e-12
    # well-conditioned steps pass through untouched
    assert np.allclose(F._newton_step(np.eye(2), np.array([0.3, -0.2]), 2), [0.3, -0.2])
