"""Mediation samplers against closed-form, OLS, and quadrature oracles."""

import numpy as np
import pytest

from netmediate import (
    MediationConfig,
    MediationData,
    derive_effects,
    effective_sample_size,
    fit_binary_mediation,
    fit_continuous_mediation,
    fit_total_effect,
    gen_mediation_data,
    hpd_interval,
    logistic_log_likelihood,
    summarize,
)

FAST = MediationConfig(iterations=3000, burn_in=500, n_chains=3, seed=1)


def ols_coef(design, y):
    return np.linalg.lstsq(design, y, rcond=None)[0]


def pooled_mcse(posterior, name):
    """Monte Carlo standard error of the pooled posterior mean."""
    ess = sum(effective_sample_size(chain) for chain in posterior.params[name])
    return float(np.std(posterior.pooled(name), ddof=1) / np.sqrt(ess))


def nig_grid_posterior(w, y, coef_index, coef_prior_var=1e6, shape=0.001, rate=0.001):
    """Oracle: marginal posterior mean/sd of one coefficient.

    Integrates the conjugate normal conditional over a dense precision
    grid weighted by p(tau | y). The evidence p(y | tau), with the
    coefficient block integrated out analytically, is

        (n/2) log(tau/2pi) - 1/2 log|V0| - 1/2 log|P|
          + 1/2 mu' P mu - 1/2 tau y'y,

    with P = tau W'W + V0^{-1} and mu = tau P^{-1} W'y. Independent of
    the Gibbs code path.
    """
    n, p = w.shape
    v0_inv = np.eye(p) / coef_prior_var
    wtw = w.T @ w
    wty = w.T @ y
    yty = float(y @ y)
    logdet_v0 = p * np.log(coef_prior_var)
    resid = y - w @ ols_coef(w, y)
    tau_hat = 1.0 / max(np.var(resid), 1e-10)
    taus = np.geomspace(tau_hat / 200, tau_hat * 200, 3000)
    log_w = np.empty_like(taus)
    means = np.empty_like(taus)
    second = np.empty_like(taus)
    for i, tau in enumerate(taus):
        prec = tau * wtw + v0_inv
        cov = np.linalg.inv(prec)
        mu = cov @ (tau * wty)
        sign, logdet_p = np.linalg.slogdet(prec)
        log_evidence = (
            0.5 * n * np.log(tau / (2 * np.pi))
            - 0.5 * logdet_v0
            - 0.5 * logdet_p
            + 0.5 * float(mu @ prec @ mu)
            - 0.5 * tau * yty
        )
        log_prior = (shape - 1) * np.log(tau) - rate * tau
        log_w[i] = log_evidence + log_prior + np.log(tau)  # log-grid Jacobian
        means[i] = mu[coef_index]
        second[i] = cov[coef_index, coef_index] + mu[coef_index] ** 2
    weights = np.exp(log_w - log_w.max())
    weights /= weights.sum()
    mean = float(weights @ means)
    var = float(weights @ second - mean ** 2)
    return mean, float(np.sqrt(var))


# ---------------------------------------------------------------------------
# continuous model


def test_continuous_recovery():
    data = gen_mediation_data(500, a=[1.0, -1.0], b=[0.3, 0.2], cp=0.5, seed=42)
    post = fit_continuous_mediation(data, FAST)
    rows = {r.parameter: r.estimate for r in summarize(post)}
    for name, truth in [("cp", 0.5), ("a1", 1.0), ("a2", -1.0), ("b1", 0.3), ("b2", 0.2)]:
        assert abs(rows[name] - truth) < 0.15, name


def test_continuous_identity_outcome():
    # Y == X exactly: cp -> 1, ab -> 0
    rng = np.random.default_rng(0)
    x = (rng.random(200) < 0.5).astype(float)
    data = MediationData(x=x, y=x.copy(), mediators=rng.standard_normal((200, 1)))
    post = fit_continuous_mediation(data, FAST)
    rows = {r.parameter: r.estimate for r in summarize(post)}
    assert abs(rows["cp"] - 1.0) < 0.05
    assert abs(rows["ab"]) < 0.05


def test_continuous_ab_matches_ols_difference():
    data = gen_mediation_data(500, a=[0.8], b=[0.5], cp=0.3, seed=7)
    post = fit_continuous_mediation(
        data, MediationConfig(iterations=6000, burn_in=1000, n_chains=3, seed=2)
    )
    ab = float(np.mean(post.pooled("ab")))
    ones = np.ones(data.n)
    c = ols_coef(np.column_stack([ones, data.x]), data.y)[1]
    cp = ols_coef(np.column_stack([ones, data.x, data.mediators]), data.y)[1]
    assert abs(ab - (c - cp)) < 0.02


def test_continuous_cp_matches_nig_grid_oracle():
    data = gen_mediation_data(50, a=[0.6], b=[0.8], cp=0.4, seed=3)
    post = fit_continuous_mediation(
        data, MediationConfig(iterations=12000, burn_in=2000, n_chains=3, seed=4)
    )
    w = np.column_stack([np.ones(data.n), data.x, data.mediators])
    oracle_mean, oracle_sd = nig_grid_posterior(w, data.y, coef_index=1)
    cp = post.pooled("cp")
    mcse_mean = pooled_mcse(post, "cp")
    assert abs(np.mean(cp) - oracle_mean) < 3 * mcse_mean
    ess = sum(effective_sample_size(c) for c in post.params["cp"])
    mcse_sd = np.std(cp, ddof=1) / np.sqrt(2 * (ess - 1))
    assert abs(np.std(cp, ddof=1) - oracle_sd) < 3 * mcse_sd


def test_continuous_rejects_constant_x():
    data = MediationData(
        x=np.ones(50), y=np.random.default_rng(0).standard_normal(50),
        mediators=np.random.default_rng(1).standard_normal((50, 1)),
    )
    with pytest.raises(ValueError, match="'x'"):
        fit_continuous_mediation(data, FAST)


def test_continuous_rejects_constant_mediator():
    rng = np.random.default_rng(0)
    data = MediationData(
        x=(rng.random(50) < 0.5).astype(float),
        y=rng.standard_normal(50),
        mediators=np.ones((50, 1)),
    )
    with pytest.raises(ValueError, match="'m1'"):
        fit_continuous_mediation(data, FAST)


def test_continuous_requires_enough_rows():
    rng = np.random.default_rng(0)
    data = MediationData(x=rng.random(4), y=rng.random(4), mediators=rng.random((4, 2)))
    with pytest.raises(ValueError, match="n > Q \\+ 2"):
        fit_continuous_mediation(data, FAST)


def test_family_tag_checked():
    data = gen_mediation_data(100, a=[0.5], b=[0.5], cp=0.0, family="binary", seed=1)
    with pytest.raises(ValueError, match="continuous"):
        fit_continuous_mediation(data, FAST)
    data2 = gen_mediation_data(100, a=[0.5], b=[0.5], cp=0.0, seed=1)
    with pytest.raises(ValueError, match="binary"):
        fit_binary_mediation(data2, FAST)


# ---------------------------------------------------------------------------
# binary model


def test_binary_recovery():
    data = gen_mediation_data(
        1000, a=[0.5], b=[2.0], cp=1.0, intercept_y=-1.0, family="binary", seed=12
    )
    post = fit_binary_mediation(
        data, MediationConfig(iterations=8000, burn_in=2000, n_chains=3, seed=5)
    )
    rows = {r.parameter: r.estimate for r in summarize(post)}
    b0 = float(np.mean(post.pooled("b0")))
    for name, truth in [("cp", 1.0), ("a1", 0.5), ("b1", 2.0)]:
        assert abs(rows[name] - truth) < 0.3, name
    assert abs(b0 - (-1.0)) < 0.3


def test_binary_null_hpd_contains_zero():
    data = gen_mediation_data(500, a=[0.0], b=[0.0], cp=0.0, family="binary", seed=13)
    post = fit_binary_mediation(data, MediationConfig(iterations=4000, burn_in=1000, n_chains=3, seed=6))
    lo, hi = hpd_interval(post.pooled("ab"), 0.95)
    assert lo <= 0.0 <= hi


def test_logistic_log_likelihood_at_zero():
    rng = np.random.default_rng(1)
    n = 137
    w = np.column_stack([np.ones(n), rng.standard_normal(n)])
    y = (rng.random(n) < 0.5).astype(float)
    assert logistic_log_likelihood(np.zeros(2), w, y) == pytest.approx(n * np.log(0.5))


def test_binary_rejects_single_class():
    rng = np.random.default_rng(2)
    data = MediationData(
        x=(rng.random(60) < 0.5).astype(float),
        y=np.zeros(60),
        mediators=rng.standard_normal((60, 1)),
        y_family="binary",
    )
    with pytest.raises(ValueError, match="single class"):
        fit_binary_mediation(data, FAST)


def test_binary_flags_complete_separation():
    x = np.concatenate([np.zeros(30), np.ones(30)])
    y = x.copy()  # x separates y perfectly
    m = np.random.default_rng(3).standard_normal((60, 1)) * 0.01
    data = MediationData(x=x, y=y, mediators=m, y_family="binary")
    post = fit_binary_mediation(
        data, MediationConfig(iterations=1500, burn_in=500, n_chains=1, seed=7)
    )
    assert "complete_separation" in post.warnings


def test_binary_acceptance_rate_in_band():
    data = gen_mediation_data(400, a=[0.5], b=[1.0], cp=0.5, family="binary", seed=14)
    post = fit_binary_mediation(data, MediationConfig(iterations=4000, burn_in=1500, n_chains=2, seed=8))
    for rate in post.acceptance_rates.values():
        assert 0.15 <= rate <= 0.6


# ---------------------------------------------------------------------------
# derived effects


def test_derive_effects_two_mediators():
    draws = {"cp": np.array([0.5]), "a1": np.array([1.0]), "a2": np.array([2.0]),
             "b1": np.array([3.0]), "b2": np.array([4.0])}
    out = derive_effects(draws)
    assert out["ab1"][0] == 3.0 and out["ab2"][0] == 8.0
    assert out["ab"][0] == 11.0
    assert out["total"][0] == 11.5


def test_derive_effects_zero_a():
    draws = {"cp": np.array([2.0]), "a1": np.array([0.0]), "b1": np.array([5.0])}
    out = derive_effects(draws)
    assert out["ab"][0] == 0.0 and out["total"][0] == 2.0


def test_derive_effects_small_values():
    draws = {"cp": np.array([1.0]), "a1": np.array([0.1]), "b1": np.array([-0.2])}
    out = derive_effects(draws)
    assert out["ab"][0] == pytest.approx(-0.02)
    assert out["total"][0] == pytest.approx(0.98)


def test_derive_effects_missing_keys():
    with pytest.raises(ValueError, match="cp"):
        derive_effects({"a1": np.array([1.0]), "b1": np.array([1.0])})
    with pytest.raises(ValueError, match="b1"):
        derive_effects({"cp": np.array([0.0]), "a1": np.array([1.0])})


def test_per_draw_identities_exact():
    # total == cp + ((ab1 + ab2) + ...) summed ascending, bit-for-bit
    data = gen_mediation_data(150, a=[0.5, -0.4, 0.2], b=[0.3, 0.1, -0.6], cp=0.25, seed=20)
    post = fit_continuous_mediation(data, MediationConfig(iterations=800, burn_in=200, n_chains=2, seed=9))
    for k in (1, 2, 3):
        assert np.array_equal(
            post.params[f"ab{k}"], post.params[f"a{k}"] * post.params[f"b{k}"]
        )
    ab = post.params["ab1"]
    for k in (2, 3):
        ab = ab + post.params[f"ab{k}"]
    assert np.array_equal(post.params["ab"], ab)
    assert np.array_equal(post.params["total"], post.params["cp"] + ab)


# ---------------------------------------------------------------------------
# summaries


def test_summarize_constant_draws():
    data = gen_mediation_data(150, a=[0.5], b=[0.3], cp=0.25, seed=21)
    post = fit_continuous_mediation(data, MediationConfig(iterations=300, burn_in=100, n_chains=1, seed=10))
    post.params["const"] = np.ones((1, 200))
    post.param_order = ["const"]
    row = summarize(post)[0]
    assert row.estimate == 1.0
    assert row.post_sd == 0.0
    assert (row.hpd_lower, row.hpd_upper) == (1.0, 1.0)
    assert row.significant


def test_summarize_standard_normal_draws():
    rng = np.random.default_rng(22)
    data = gen_mediation_data(150, a=[0.5], b=[0.3], cp=0.25, seed=23)
    post = fit_continuous_mediation(data, MediationConfig(iterations=300, burn_in=100, n_chains=1, seed=11))
    post.params["z"] = rng.standard_normal((1, 10000))
    post.param_order = ["z"]
    row = summarize(post, prob=0.95)[0]
    assert abs(row.estimate) < 0.05
    assert abs(row.hpd_lower - (-1.96)) < 0.1
    assert abs(row.hpd_upper - 1.96) < 0.1
    assert not row.significant


def test_summarize_needs_pooled_draws():
    data = gen_mediation_data(150, a=[0.5], b=[0.3], cp=0.25, seed=24)
    post = fit_continuous_mediation(data, MediationConfig(iterations=160, burn_in=100, n_chains=1, seed=12))
    with pytest.raises(ValueError, match="100 pooled"):
        summarize(post)


# ---------------------------------------------------------------------------
# total effect cross-check


def test_total_effect_matches_derived_total():
    data = gen_mediation_data(400, a=[0.8], b=[0.4], cp=0.08, seed=25)  # total ~ 0.4
    post = fit_continuous_mediation(data, FAST)
    total_post = fit_total_effect(data, FAST)
    derived = float(np.mean(post.pooled("total")))
    fitted = float(np.mean(total_post.pooled("c")))
    assert abs(fitted - derived) < 0.1


def test_total_effect_constant_x():
    data = MediationData(
        x=np.full(50, 2.0), y=np.random.default_rng(0).standard_normal(50),
        mediators=np.random.default_rng(1).standard_normal((50, 1)),
    )
    with pytest.raises(ValueError, match="'x'"):
        fit_total_effect(data, FAST)


def test_total_effect_null_contains_zero():
    data = gen_mediation_data(300, a=[0.0], b=[0.0], cp=0.0, seed=26)
    total_post = fit_total_effect(data, FAST)
    lo, hi = hpd_interval(total_post.pooled("c"), 0.95)
    assert lo <= 0.0 <= hi


def test_total_effect_binary_family():
    data = gen_mediation_data(400, a=[0.5], b=[1.0], cp=0.8, family="binary", seed=27)
    total_post = fit_total_effect(data, MediationConfig(iterations=3000, burn_in=1000, n_chains=2, seed=13))
    assert float(np.mean(total_post.pooled("c"))) > 0.3


# ---------------------------------------------------------------------------
# stability properties


def test_predictor_location_invariance():
    data = gen_mediation_data(300, a=[0.7], b=[0.4], cp=0.3, seed=28)
    shifted = MediationData(x=data.x + 5.0, y=data.y, mediators=data.mediators)
    cfg = MediationConfig(iterations=5000, burn_in=1000, n_chains=2, seed=14)
    post1 = fit_continuous_mediation(data, cfg)
    post2 = fit_continuous_mediation(shifted, cfg)
    for name in ("cp", "a1", "b1", "ab"):
        mcse = max(pooled_mcse(post1, name), pooled_mcse(post2, name))
        diff = abs(np.mean(post1.pooled(name)) - np.mean(post2.pooled(name)))
        assert diff < 3 * mcse + 1e-12, name


def test_chain_exchangeability():
    data = gen_mediation_data(300, a=[0.7], b=[0.4], cp=0.3, seed=29)
    post = fit_continuous_mediation(
        data, MediationConfig(iterations=8000, burn_in=1000, n_chains=3, seed=15)
    )
    per_chain = post.params["ab"].mean(axis=1)
    mcse_single = pooled_mcse(post, "ab") * np.sqrt(post.n_chains)
    assert per_chain.max() - per_chain.min() < 2 * 3 * mcse_single


def test_hpd_coverage_for_ab():
    # 95% HPD for ab should cover the truth in 88..99 of 100 datasets
    truth_ab = 0.6 * 0.5 + 0.4 * 0.3
    cfg = MediationConfig(iterations=2200, burn_in=200, n_chains=1, seed=16)
    covered = 0
    for rep in range(100):
        data = gen_mediation_data(
            200, a=[0.6, 0.4], b=[0.5, 0.3], cp=0.2, seed=1000 + rep
        )
        post = fit_continuous_mediation(data, cfg)
        lo, hi = hpd_interval(post.pooled("ab"), 0.95)
        covered += lo <= truth_ab <= hi
    assert 88 <= covered <= 99, covered
