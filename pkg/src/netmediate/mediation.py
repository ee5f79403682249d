"""Bayesian multiple-mediator models with extracted network mediators.

Two outcome families share the mediator regressions (conjugate Gibbs):

* continuous outcome: normal linear regression of Y on (1, X, M_1..M_Q),
  sampled by exact conjugate Gibbs;
* binary outcome: logistic regression of Y on (1, X, M_1..M_Q), sampled
  by joint adaptive random-walk Metropolis.

Coefficients carry Normal(0, 1e6) priors and residual precisions
Gamma(0.001, 0.001) priors by default. Per draw, the indirect effects
ab_k = a_k * b_k, their sum ab, and total = cp + ab are attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.special import expit

from .diagnostics import hpd_interval

__all__ = [
    "MediationConfig",
    "MediationData",
    "MediationPosterior",
    "ParameterSummary",
    "derive_effects",
    "fit_binary_mediation",
    "fit_continuous_mediation",
    "fit_total_effect",
    "logistic_log_likelihood",
    "summarize",
]


@dataclass
class MediationData:
    """Observed data for a mediation fit: predictor, outcome, mediators."""

    x: np.ndarray
    y: np.ndarray
    mediators: np.ndarray
    y_family: str = "continuous"

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).ravel()
        self.y = np.asarray(self.y, dtype=float).ravel()
        self.mediators = np.asarray(self.mediators, dtype=float)
        if self.mediators.ndim == 1:
            self.mediators = self.mediators[:, None]
        n = len(self.x)
        if len(self.y) != n or self.mediators.shape[0] != n:
            raise ValueError(
                f"length mismatch: x has {n}, y has {len(self.y)}, "
                f"mediators have {self.mediators.shape[0]} rows"
            )
        if self.mediators.shape[1] < 1:
            raise ValueError("need at least one mediator column")
        for name, arr in (("x", self.x), ("y", self.y), ("mediators", self.mediators)):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains missing or non-finite values")
        if self.y_family not in ("continuous", "binary"):
            raise ValueError(f"unknown outcome family: {self.y_family!r}")
        if self.y_family == "binary" and not np.isin(self.y, (0.0, 1.0)).all():
            raise ValueError("binary outcome entries must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def n_mediators(self) -> int:
        return self.mediators.shape[1]


@dataclass
class MediationConfig:
    iterations: int = 30000
    burn_in: int = 5000
    thin: int = 1
    n_chains: int = 3
    coef_prior_variance: float = 1e6
    precision_prior_shape: float = 0.001
    precision_prior_rate: float = 0.001
    hpd_prob: float = 0.95
    target_acceptance: float = 0.3
    seed: int | None = None

    def __post_init__(self):
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("need 0 <= burn_in < iterations")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.n_chains < 1:
            raise ValueError("n_chains must be >= 1")
        if not 0 < self.hpd_prob < 1:
            raise ValueError("hpd_prob must be in (0, 1)")
        if self.n_saved < 1:
            raise ValueError("chain settings leave no saved draws")

    @property
    def n_saved(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


@dataclass
class MediationPosterior:
    """Saved posterior draws, one row per chain per parameter array."""

    params: dict
    param_order: list
    family: str
    config: MediationConfig
    acceptance_rates: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def n_chains(self) -> int:
        return next(iter(self.params.values())).shape[0]

    @property
    def n_saved(self) -> int:
        return next(iter(self.params.values())).shape[1]

    def pooled(self, name: str) -> np.ndarray:
        return self.params[name].ravel()


@dataclass
class ParameterSummary:
    parameter: str
    estimate: float
    post_sd: float
    hpd_lower: float
    hpd_upper: float
    significant: bool


def _chain_rngs(seed, n_chains):
    seq = np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in seq.spawn(n_chains)]


def _check_nonconstant(name: str, values: np.ndarray):
    if np.all(values == values[0]):
        raise ValueError(f"rank-deficient design: column {name!r} is constant")


def _sample_linear_conjugate(w, y, config, rng):
    """Gibbs draws from the conjugate normal linear model.

    Alternates theta | tau ~ Normal and tau | theta ~ Gamma under
    Normal(0, v) coefficient priors and a Gamma(shape, rate) precision
    prior. Returns (coef draws (S, p), precision draws (S,)).
    """
    n, p = w.shape
    prior_prec = 1.0 / config.coef_prior_variance
    shape0 = config.precision_prior_shape
    rate0 = config.precision_prior_rate
    wtw = w.T @ w
    wty = w.T @ y
    eye = np.eye(p)

    theta, *_ = np.linalg.lstsq(w, y, rcond=None)
    resid = y - w @ theta
    tau = 1.0 / max(float(resid @ resid) / max(n - p, 1), 1e-12)

    n_saved = config.n_saved
    coef_draws = np.empty((n_saved, p))
    prec_draws = np.empty(n_saved)
    s = 0
    for t in range(1, config.iterations + 1):
        prec = tau * wtw + prior_prec * eye
        chol_u = cholesky(prec, lower=False)
        mu = cho_solve((chol_u, False), tau * wty)
        theta = mu + solve_triangular(chol_u, rng.standard_normal(p), lower=False)
        resid = y - w @ theta
        tau = rng.gamma(shape0 + 0.5 * n, 1.0 / (rate0 + 0.5 * float(resid @ resid)))
        if t > config.burn_in and (t - config.burn_in) % config.thin == 0:
            coef_draws[s] = theta
            prec_draws[s] = tau
            s += 1
    return coef_draws, prec_draws


def logistic_log_likelihood(coef, design, y) -> float:
    """Bernoulli-logit log-likelihood sum_i [y_i eta_i - log(1 + e^eta_i)]."""
    coef = np.asarray(coef, dtype=float)
    design = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    eta = design @ coef
    return float(y @ eta - np.logaddexp(0.0, eta).sum())


def _newton_logistic(w, y, prior_prec, max_iter=50):
    """Ridge-regularized Newton ascent; returns (estimate, inverse Hessian)."""
    n, p = w.shape
    beta = np.zeros(p)
    eye = np.eye(p)
    hess = None
    for _ in range(max_iter):
        eta = w @ beta
        mu = expit(eta)
        grad = w.T @ (y - mu) - prior_prec * beta
        weights = np.maximum(mu * (1.0 - mu), 1e-10)
        hess = w.T @ (w * weights[:, None]) + (prior_prec + 1e-8) * eye
        step = np.linalg.solve(hess, grad)
        beta = beta + step
        if np.max(np.abs(step)) < 1e-8 or np.max(np.abs(beta)) > 100.0:
            break
    return beta, np.linalg.inv(hess)


def _is_separated(w, y, beta) -> bool:
    margins = (2.0 * y - 1.0) * (w @ beta)
    return bool(np.min(margins) > 0)


def _sample_logistic_adaptive(w, y, config, rng):
    """Adaptive random-walk Metropolis on the joint logistic block.

    The multivariate normal proposal starts from the inverse Hessian at a
    regularized Newton estimate; during burn-in its covariance tracks the
    empirical covariance of the chain and a global scale is tuned toward
    the target acceptance rate, after which both are frozen.

    Returns (coef draws (S, p), post-adaptation acceptance rate, warnings).
    """
    n, p = w.shape
    prior_prec = 1.0 / config.coef_prior_variance
    warnings = []

    beta, hess_inv = _newton_logistic(w, y, prior_prec)
    if _is_separated(w, y, beta):
        warnings.append("complete_separation")

    def log_post(b):
        return logistic_log_likelihood(b, w, y) - 0.5 * prior_prec * float(b @ b)

    run_mean = beta.copy()
    run_cov = hess_inv.copy()
    chol_l = np.linalg.cholesky(run_cov + 1e-10 * np.eye(p))
    log_scale = float(np.log(2.38 / np.sqrt(p)))
    lp_cur = log_post(beta)

    n_saved = config.n_saved
    coef_draws = np.empty((n_saved, p))
    s = 0
    accepted_post = 0
    proposed_post = 0
    for t in range(1, config.iterations + 1):
        prop = beta + np.exp(log_scale) * (chol_l @ rng.standard_normal(p))
        lp_prop = log_post(prop)
        accept = np.log(rng.random()) < lp_prop - lp_cur
        if accept:
            beta = prop
            lp_cur = lp_prop
        if t <= config.burn_in:
            delta = beta - run_mean
            run_mean = run_mean + delta / (t + 1)
            run_cov = run_cov + (np.outer(delta, beta - run_mean) - run_cov) / (t + 1)
            log_scale += min(0.25, t ** -0.6) * ((1.0 if accept else 0.0) - config.target_acceptance)
            if t >= 100 and t % 25 == 0:
                chol_l = np.linalg.cholesky(run_cov + 1e-10 * np.eye(p))
        else:
            proposed_post += 1
            accepted_post += int(accept)
            if (t - config.burn_in) % config.thin == 0:
                coef_draws[s] = beta
                s += 1
    rate = accepted_post / proposed_post if proposed_post else 0.0
    return coef_draws, rate, warnings


def derive_effects(draws: dict) -> dict:
    """Attach ab_k = a_k * b_k, ab = sum_k ab_k, and total = cp + ab.

    ``draws`` maps parameter names to arrays of per-draw values (any
    matching shape); the k-sum runs ascending so the identity
    total - cp - sum(ab_k) == 0 holds exactly for every draw.
    """
    if "cp" not in draws:
        raise ValueError("draws must contain 'cp'")
    q = 0
    while f"a{q + 1}" in draws:
        q += 1
    if q == 0:
        raise ValueError("draws must contain a1..aQ and b1..bQ")
    out = dict(draws)
    for k in range(1, q + 1):
        if f"b{k}" not in draws:
            raise ValueError(f"draws missing 'b{k}'")
        out[f"ab{k}"] = np.asarray(draws[f"a{k}"]) * np.asarray(draws[f"b{k}"])
    ab = out["ab1"]
    for k in range(2, q + 1):
        ab = ab + out[f"ab{k}"]
    out["ab"] = ab
    out["total"] = np.asarray(draws["cp"]) + ab
    return out


def _effect_param_order(q: int) -> list:
    order = ["cp"]
    order += [f"a{k}" for k in range(1, q + 1)]
    order += [f"b{k}" for k in range(1, q + 1)]
    order += [f"ab{k}" for k in range(1, q + 1)]
    order += ["ab", "total"]
    return order


def _fit_mediation(data: MediationData, config: MediationConfig) -> MediationPosterior:
    n, q = data.n, data.n_mediators
    _check_nonconstant("x", data.x)
    for k in range(q):
        _check_nonconstant(f"m{k + 1}", data.mediators[:, k])

    w_out = np.column_stack([np.ones(n), data.x, data.mediators])
    w_med = np.column_stack([np.ones(n), data.x])

    binary = data.y_family == "binary"
    if binary:
        if data.y.sum() == 0 or data.y.sum() == n:
            raise ValueError("binary outcome has a single class; both classes required")
    else:
        if n <= q + 2:
            raise ValueError(f"need n > Q + 2 observations, got n={n}, Q={q}")

    warnings = []
    acceptance = {}
    per_chain = {name: [] for name in ["b0", "cp"]
                 + [f"b{k}" for k in range(1, q + 1)]
                 + [f"i0{k}" for k in range(1, q + 1)]
                 + [f"a{k}" for k in range(1, q + 1)]
                 + [f"prec_u{k}" for k in range(1, q + 1)]
                 + ([] if binary else ["prec_y"])}

    for chain_id, rng in enumerate(_chain_rngs(config.seed, config.n_chains)):
        if binary:
            coef, rate, chain_warn = _sample_logistic_adaptive(w_out, data.y, config, rng)
            acceptance[f"outcome_chain{chain_id}"] = rate
            for w_msg in chain_warn:
                if w_msg not in warnings:
                    warnings.append(w_msg)
        else:
            coef, prec = _sample_linear_conjugate(w_out, data.y, config, rng)
            per_chain["prec_y"].append(prec)
        per_chain["b0"].append(coef[:, 0])
        per_chain["cp"].append(coef[:, 1])
        for k in range(1, q + 1):
            per_chain[f"b{k}"].append(coef[:, 1 + k])
        for k in range(1, q + 1):
            coef_m, prec_m = _sample_linear_conjugate(w_med, data.mediators[:, k - 1], config, rng)
            per_chain[f"i0{k}"].append(coef_m[:, 0])
            per_chain[f"a{k}"].append(coef_m[:, 1])
            per_chain[f"prec_u{k}"].append(prec_m)

    params = {name: np.stack(rows) for name, rows in per_chain.items()}
    params = derive_effects(params)
    names = _effect_param_order(q) + ["b0"] + [f"i0{k}" for k in range(1, q + 1)]
    if not binary:
        names.append("prec_y")
    names += [f"prec_u{k}" for k in range(1, q + 1)]
    return MediationPosterior(
        params=params,
        param_order=names,
        family=data.y_family,
        config=config,
        acceptance_rates=acceptance,
        warnings=warnings,
    )


def fit_continuous_mediation(data: MediationData, config: MediationConfig | None = None) -> MediationPosterior:
    """Gibbs sampling of the continuous-outcome mediation system.

    The outcome regression Y ~ (1, X, M) and the Q mediator regressions
    M_k ~ (1, X) have exact conjugate conditionals, so every draw is from
    the exact conditional posterior. Derived effects ride along per draw.
    """
    if data.y_family != "continuous":
        raise ValueError("data is not tagged continuous")
    return _fit_mediation(data, config or MediationConfig())


def fit_binary_mediation(data: MediationData, config: MediationConfig | None = None) -> MediationPosterior:
    """Mediation fit for a binary outcome via logistic regression.

    Mediator regressions are conjugate Gibbs; the logistic coefficient
    block (b0, cp, b_1..b_Q) is sampled jointly by adaptive random-walk
    Metropolis. Complete separation is flagged, not fatal.
    """
    if data.y_family != "binary":
        raise ValueError("data is not tagged binary")
    return _fit_mediation(data, config or MediationConfig())


def fit_total_effect(data: MediationData, config: MediationConfig | None = None) -> MediationPosterior:
    """Single-predictor regression of Y on X: the total-effect cross-check.

    Returns a posterior over (i1, c) under the matching outcome family;
    `c` estimates the total effect and should agree with the derived
    cp + ab from the mediation fit.
    """
    config = config or MediationConfig()
    _check_nonconstant("x", data.x)
    n = data.n
    w = np.column_stack([np.ones(n), data.x])
    binary = data.y_family == "binary"
    if binary and (data.y.sum() == 0 or data.y.sum() == n):
        raise ValueError("binary outcome has a single class; both classes required")

    per_chain = {"i1": [], "c": []}
    if not binary:
        per_chain["prec_y"] = []
    acceptance = {}
    warnings = []
    for chain_id, rng in enumerate(_chain_rngs(config.seed, config.n_chains)):
        if binary:
            coef, rate, chain_warn = _sample_logistic_adaptive(w, data.y, config, rng)
            acceptance[f"outcome_chain{chain_id}"] = rate
            for w_msg in chain_warn:
                if w_msg not in warnings:
                    warnings.append(w_msg)
        else:
            coef, prec = _sample_linear_conjugate(w, data.y, config, rng)
            per_chain["prec_y"].append(prec)
        per_chain["i1"].append(coef[:, 0])
        per_chain["c"].append(coef[:, 1])

    params = {name: np.stack(rows) for name, rows in per_chain.items()}
    order = ["c", "i1"] + ([] if binary else ["prec_y"])
    return MediationPosterior(
        params=params,
        param_order=order,
        family=data.y_family,
        config=config,
        acceptance_rates=acceptance,
        warnings=warnings,
    )


def summarize(posterior: MediationPosterior, prob: float | None = None) -> list:
    """Pooled posterior summaries: mean, SD, HPD interval, significance.

    Chains are pooled post burn-in. A parameter is flagged significant
    when its HPD interval excludes zero.
    """
    if prob is None:
        prob = posterior.config.hpd_prob
    if not 0 < prob < 1:
        raise ValueError(f"prob must be in (0, 1), got {prob}")
    total = posterior.n_chains * posterior.n_saved
    if total < 100:
        raise ValueError(f"need >= 100 pooled draws to summarize, got {total}")
    rows = []
    for name in posterior.param_order:
        pooled = posterior.pooled(name)
        lo, hi = hpd_interval(pooled, prob)
        rows.append(
            ParameterSummary(
                parameter=name,
                estimate=float(np.mean(pooled)),
                post_sd=float(np.std(pooled, ddof=1)),
                hpd_lower=lo,
                hpd_upper=hi,
                significant=not (lo <= 0.0 <= hi),
            )
        )
    return rows
