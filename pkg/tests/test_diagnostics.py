"""Diagnostics against Monte Carlo calibration and exhaustive oracles."""

import numpy as np
import pytest

from netmediate import effective_sample_size, geweke_z, hpd_interval, split_rhat


def exhaustive_hpd(samples, prob):
    """Oracle: scan every window of ceil(prob*n) consecutive sorted values."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = len(s)
    n_in = min(int(np.ceil(prob * n)), n)
    best = None
    for i in range(n - n_in + 1):
        width = s[i + n_in - 1] - s[i]
        if best is None or width < best[0]:
            best = (width, s[i], s[i + n_in - 1])
    return best[1], best[2]


# ---------------------------------------------------------------------------
# geweke


def test_geweke_iid_chains_small_z():
    zs = [geweke_z(np.random.default_rng(seed).standard_normal(10000)) for seed in range(20)]
    assert max(abs(z) for z in zs) < 4.0


def test_geweke_linear_trend_large_z():
    assert abs(geweke_z(np.arange(1.0, 10001.0))) > 10


def test_geweke_constant_chain_errors():
    with pytest.raises(ValueError, match="degenerate chain"):
        geweke_z(np.ones(1000))


def test_geweke_short_chain_errors():
    with pytest.raises(ValueError, match="too short"):
        geweke_z(np.arange(50.0))


def test_geweke_bad_fracs():
    with pytest.raises(ValueError):
        geweke_z(np.random.default_rng(0).standard_normal(1000), first_frac=0.6, last_frac=0.6)


def test_geweke_affine_invariance():
    x = np.random.default_rng(3).standard_normal(5000)
    z1 = geweke_z(x)
    z2 = geweke_z(2.5 * x + 7.0)
    assert abs(z1 - z2) < 1e-9


# ---------------------------------------------------------------------------
# hpd


def test_hpd_single_point():
    assert hpd_interval([5.0], 0.5) == (5.0, 5.0)


def test_hpd_uniform_grid_lowest_start():
    lo, hi = hpd_interval(np.arange(1.0, 101.0), 0.95)
    assert (lo, hi) == (1.0, 95.0)  # all widths tie at 94; lowest start wins


def test_hpd_matches_exhaustive_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 501))
        samples = rng.standard_normal(n) * rng.uniform(0.5, 3.0)
        prob = rng.uniform(0.05, 0.99)
        assert hpd_interval(samples, prob) == exhaustive_hpd(samples, prob)


def test_hpd_exponential_starts_near_zero():
    samples = np.random.default_rng(0).exponential(1.0, size=100000)
    lo, _ = hpd_interval(samples, 0.95)
    assert abs(lo) < 0.02


def test_hpd_no_wider_than_equal_tailed():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = int(rng.integers(10, 501))
        samples = rng.gamma(2.0, size=n)
        prob = 0.9
        lo, hi = hpd_interval(samples, prob)
        q_lo, q_hi = np.quantile(samples, [(1 - prob) / 2, (1 + prob) / 2])
        assert hi - lo <= (q_hi - q_lo) + 1e-12


def test_hpd_input_errors():
    with pytest.raises(ValueError, match="empty"):
        hpd_interval([], 0.95)
    with pytest.raises(ValueError, match="prob"):
        hpd_interval([1.0, 2.0], 1.5)


# ---------------------------------------------------------------------------
# split R-hat


def test_rhat_constant_chains():
    assert split_rhat([np.ones(200), np.ones(200)]) == 1.0


def test_rhat_iid_chains_near_one():
    rng = np.random.default_rng(4)
    chains = [rng.standard_normal(5000) for _ in range(4)]
    value = split_rhat(chains)
    assert 1.0 <= value <= 1.02


def test_rhat_separated_chains():
    rng = np.random.default_rng(5)
    chains = [rng.standard_normal(500), rng.standard_normal(500) + 10.0]
    assert split_rhat(chains) > 2.0


def test_rhat_single_chain_split():
    value = split_rhat([np.random.default_rng(6).standard_normal(2000)])
    assert 1.0 <= value < 1.1


def test_rhat_length_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        split_rhat([np.zeros(200), np.zeros(300)])


# ---------------------------------------------------------------------------
# effective sample size


def test_ess_iid_chain():
    ess = effective_sample_size(np.random.default_rng(8).standard_normal(10000))
    assert 8000 <= ess <= 10000


def test_ess_ar1_chain():
    # AR(1) with phi = 0.9: theoretical ESS = n (1-phi)/(1+phi) ~ 526
    rng = np.random.default_rng(9)
    n, phi = 10000, 0.9
    x = np.empty(n)
    x[0] = rng.standard_normal()
    innovations = rng.standard_normal(n) * np.sqrt(1 - phi ** 2)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + innovations[t]
    assert 350 <= effective_sample_size(x) <= 750


def test_ess_alternating_chain_clips_to_n():
    x = np.tile([1.0, -1.0], 500)
    assert effective_sample_size(x) == 1000


def test_ess_degenerate_chain_errors():
    with pytest.raises(ValueError, match="degenerate"):
        effective_sample_size(np.full(500, 3.0))
