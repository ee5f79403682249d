"""MCMC estimation of the latent eigenmodel for binary symmetric networks.

The model for dyad (i, j), each counted once (i < j):

    A_ij ~ Bernoulli(p_ij),   link(p_ij) = z_ij,
    z_ij = sum_m beta_m H_m,ij + u_i' Lambda u_j,

with U an N x Q matrix of node-specific latent factors and Lambda a
diagonal matrix of Q signed weights. Omitting H gives the unconditional
model; with H, the factorization captures what remains of the network
after controlling for the dyadic covariate.

Sampling is Metropolis-within-Gibbs with random-walk proposals: one
spherical-normal block per latent row u_i, one scalar block per lambda_k
and per beta_m. Proposal scales adapt by Robbins-Monro during burn-in
(target acceptance 0.3) and freeze afterwards. Priors: u_ik ~ N(0, 1),
lambda_k ~ N(0, 10^2), beta_m ~ N(0, 10^2), all configurable.

U and Lambda are identified only up to column sign and rotation, so
downstream use goes through the posterior mean of U Lambda U' (the
``ulu_postmean`` field), which is identified; mediators are the leading
eigenvectors of that matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.special import expit, log_ndtr, ndtr

from .graphs import validate_adjacency, validate_dyadic_covariate

__all__ = [
    "DimensionSelection",
    "EigenmodelConfig",
    "EigenmodelFit",
    "MediatorMatrix",
    "ScreeResult",
    "extract_mediators",
    "fit_eigenmodel",
    "load_fit_json",
    "save_fit_json",
    "scree_elbow",
    "select_dimension_conditional",
]


@dataclass
class EigenmodelConfig:
    rank: int = 2
    total_iterations: int = 30000
    burn_in: int = 5000
    thin: int = 1
    link: str = "logit"
    prior_sd_beta: float = 10.0
    prior_sd_lambda: float = 10.0
    prior_sd_u: float = 1.0
    target_acceptance: float = 0.3
    keep_u_draws: bool = True
    seed: int | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if not 0 <= self.burn_in < self.total_iterations:
            raise ValueError("need 0 <= burn_in < total_iterations")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.link not in ("logit", "probit"):
            raise ValueError(f"unknown link: {self.link!r}")
        for name in ("prior_sd_beta", "prior_sd_lambda", "prior_sd_u"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_saved < 1:
            raise ValueError("chain settings leave no saved draws")

    @property
    def n_saved(self) -> int:
        return (self.total_iterations - self.burn_in) // self.thin


@dataclass
class EigenmodelFit:
    config: EigenmodelConfig
    ulu_postmean: np.ndarray
    lambda_draws: np.ndarray
    beta_draws: np.ndarray | None
    u_draws: np.ndarray | None
    acceptance_rates: dict
    warnings: list = field(default_factory=list)

    @property
    def n_nodes(self) -> int:
        return self.ulu_postmean.shape[0]

    @property
    def n_saved(self) -> int:
        return self.lambda_draws.shape[0]


@dataclass
class MediatorMatrix:
    """Leading eigenvectors of the posterior-mean latent matrix."""

    vectors: np.ndarray      # (n, q), orthonormal columns
    eigenvalues: np.ndarray  # (q,), descending
    warnings: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def q(self) -> int:
        return self.vectors.shape[1]


class ScreeResult(NamedTuple):
    q: int
    positive_eigenvalues: np.ndarray
    heuristic_available: bool


@dataclass
class DimensionSelection:
    selected_q: int
    spectra: dict
    flagged: bool
    fits: dict = field(default_factory=dict)


def _loglik_terms(z, a, link: str):
    if link == "logit":
        return a * z - np.logaddexp(0.0, z)
    return np.where(a > 0, log_ndtr(z), log_ndtr(-z))


def _link_inverse(z, link: str):
    return expit(z) if link == "logit" else ndtr(z)


def _dyadic_newton_beta(h_cols, a_tri, max_iter=25):
    """Quick logistic estimate of the dyadic covariate coefficients.

    Used only to initialize the chain near the covariate-explained part of
    the network so the latent factors start on the residual.
    """
    m = h_cols.shape[1]
    beta = np.zeros(m)
    eye = np.eye(m)
    for _ in range(max_iter):
        mu = expit(h_cols @ beta)
        grad = h_cols.T @ (a_tri - mu)
        hess = h_cols.T @ (h_cols * np.maximum(mu * (1 - mu), 1e-10)[:, None]) + 1e-8 * eye
        step = np.linalg.solve(hess, grad)
        beta = beta + step
        if np.max(np.abs(step)) < 1e-8 or np.max(np.abs(beta)) > 20.0:
            break
    return np.clip(beta, -10.0, 10.0)


def _initial_state(a, h_list, cfg, rng):
    """Spectral warm start on the (covariate-adjusted) residual network."""
    n = a.shape[0]
    q = cfg.rank
    iu = np.triu_indices(n, 1)
    if h_list:
        h_cols = np.column_stack([hm[iu] for hm in h_list])
        beta = _dyadic_newton_beta(h_cols, a[iu])
        if cfg.link == "probit":
            beta = beta / 1.7
        z_cov = np.zeros((n, n))
        for bm, hm in zip(beta, h_list):
            z_cov += bm * hm
        p_model = _link_inverse(z_cov, cfg.link)
    else:
        beta = np.zeros(0)
        p_model = np.full((n, n), 0.5)
    weight = np.maximum(p_model * (1.0 - p_model), 0.1)
    resid = np.clip((a - p_model) / weight, -4.0, 4.0)
    resid = (resid + resid.T) / 2.0
    np.fill_diagonal(resid, 0.0)
    vals, vecs = np.linalg.eigh(resid)
    order = np.argsort(-np.abs(vals), kind="stable")[:q]
    u = vecs[:, order] * np.sqrt(n)
    lam = vals[order] / n
    u = u + 0.01 * rng.standard_normal((n, q))
    return u, lam, beta


def fit_eigenmodel(a, h=None, config: EigenmodelConfig | None = None) -> EigenmodelFit:
    """Fit the latent eigenmodel by Metropolis-within-Gibbs MCMC.

    ``h`` may be a single dyadic covariate matrix, a list of them (one
    beta each), or None for the unconditional model. Returns saved draws
    of (beta, Lambda, U) and the posterior mean of U Lambda U'.
    """
    cfg = config or EigenmodelConfig()
    a = validate_adjacency(a)
    n = a.shape[0]
    if cfg.rank >= n:
        raise ValueError(f"rank {cfg.rank} must be smaller than the node count {n}")
    if h is None:
        h_list = []
    elif isinstance(h, (list, tuple)):
        h_list = [validate_dyadic_covariate(hm, n) for hm in h]
    else:
        h_list = [validate_dyadic_covariate(h, n)]
    n_cov = len(h_list)
    q = cfg.rank
    link = cfg.link

    warnings = []
    iu = np.triu_indices(n, 1)
    a_tri = a[iu]
    n_dyads = len(a_tri)
    edges = a_tri.sum()
    if edges == 0 or edges == n_dyads:
        warnings.append("degenerate_network")

    rng = np.random.default_rng(cfg.seed)
    u, lam, beta = _initial_state(a, h_list, cfg, rng)

    h_tri = [hm[iu] for hm in h_list]
    hb = np.zeros((n, n))
    for bm, hm in zip(beta, h_list):
        hb += bm * hm
    ulam = u * lam
    z = hb + ulam @ u.T

    log_s_u = np.full(n, np.log(0.3))
    log_s_lam = np.log(0.1 + 0.3 * np.abs(lam))
    log_s_beta = np.full(n_cov, np.log(0.2))
    rm_count_u = np.zeros(n)
    rm_count_lam = np.zeros(q)
    rm_count_beta = np.zeros(n_cov)
    acc_u = np.zeros(n)
    acc_lam = np.zeros(q)
    acc_beta = np.zeros(n_cov)

    var_u = cfg.prior_sd_u ** 2
    var_lam = cfg.prior_sd_lambda ** 2
    var_beta = cfg.prior_sd_beta ** 2
    target = cfg.target_acceptance

    n_saved = cfg.n_saved
    lambda_draws = np.empty((n_saved, q))
    beta_draws = np.empty((n_saved, n_cov)) if n_cov else None
    u_draws = np.empty((n_saved, n, q)) if cfg.keep_u_draws else None
    ulu_acc = np.zeros((n, n))
    s = 0

    def rm_step(log_sigma, count, accepted):
        gamma = min(0.25, count ** -0.6)
        return log_sigma + gamma * ((1.0 if accepted else 0.0) - target)

    for t in range(1, cfg.total_iterations + 1):
        adapting = t <= cfg.burn_in

        for i in range(n):
            prop = u[i] + np.exp(log_s_u[i]) * rng.standard_normal(q)
            zrow_new = hb[i] + ulam @ prop
            terms_new = _loglik_terms(zrow_new, a[i], link)
            terms_old = _loglik_terms(z[i], a[i], link)
            dll = (terms_new.sum() - terms_new[i]) - (terms_old.sum() - terms_old[i])
            dprior = 0.5 * (u[i] @ u[i] - prop @ prop) / var_u
            accepted = np.log(rng.random()) < dll + dprior
            if accepted:
                u[i] = prop
                ulam[i] = prop * lam
                z[i, :] = zrow_new
                z[:, i] = zrow_new
            if adapting:
                rm_count_u[i] += 1
                log_s_u[i] = rm_step(log_s_u[i], rm_count_u[i], accepted)
            else:
                acc_u[i] += accepted

        z_tri = z[iu]
        ll_tri = _loglik_terms(z_tri, a_tri, link).sum()
        for k in range(q):
            prop_l = lam[k] + np.exp(log_s_lam[k]) * rng.standard_normal()
            dlam = prop_l - lam[k]
            prod = u[iu[0], k] * u[iu[1], k]
            z_new = z_tri + dlam * prod
            ll_new = _loglik_terms(z_new, a_tri, link).sum()
            dprior = 0.5 * (lam[k] ** 2 - prop_l ** 2) / var_lam
            accepted = np.log(rng.random()) < ll_new - ll_tri + dprior
            if accepted:
                lam[k] = prop_l
                ulam[:, k] = u[:, k] * prop_l
                z += dlam * np.outer(u[:, k], u[:, k])
                z_tri = z_new
                ll_tri = ll_new
            if adapting:
                rm_count_lam[k] += 1
                log_s_lam[k] = rm_step(log_s_lam[k], rm_count_lam[k], accepted)
            else:
                acc_lam[k] += accepted

        for m in range(n_cov):
            prop_b = beta[m] + np.exp(log_s_beta[m]) * rng.standard_normal()
            dbeta = prop_b - beta[m]
            z_new = z_tri + dbeta * h_tri[m]
            ll_new = _loglik_terms(z_new, a_tri, link).sum()
            dprior = 0.5 * (beta[m] ** 2 - prop_b ** 2) / var_beta
            accepted = np.log(rng.random()) < ll_new - ll_tri + dprior
            if accepted:
                beta[m] = prop_b
                z += dbeta * h_list[m]
                hb += dbeta * h_list[m]
                z_tri = z_new
                ll_tri = ll_new
            if adapting:
                rm_count_beta[m] += 1
                log_s_beta[m] = rm_step(log_s_beta[m], rm_count_beta[m], accepted)
            else:
                acc_beta[m] += accepted

        if t % 2000 == 0:
            # resync against incremental-update floating point drift
            z = hb + ulam @ u.T

        if t > cfg.burn_in and (t - cfg.burn_in) % cfg.thin == 0:
            lambda_draws[s] = lam
            if beta_draws is not None:
                beta_draws[s] = beta
            if u_draws is not None:
                u_draws[s] = u
            ulu_acc += ulam @ u.T
            s += 1

    n_post = cfg.total_iterations - cfg.burn_in
    acceptance = {
        "u": (acc_u / n_post).tolist(),
        "lambda": (acc_lam / n_post).tolist(),
        "beta": (acc_beta / n_post).tolist(),
    }
    ulu = ulu_acc / n_saved
    ulu = (ulu + ulu.T) / 2.0
    return EigenmodelFit(
        config=cfg,
        ulu_postmean=ulu,
        lambda_draws=lambda_draws,
        beta_draws=beta_draws,
        u_draws=u_draws,
        acceptance_rates=acceptance,
        warnings=warnings,
    )


def extract_mediators(fit, q: int) -> MediatorMatrix:
    """Leading q eigenvectors of the posterior-mean latent matrix.

    Accepts an EigenmodelFit or a symmetric matrix. Eigenpairs are sorted
    by eigenvalue descending; each eigenvector's sign is canonicalized so
    its largest-magnitude entry is positive (ties to the lowest index).
    """
    matrix = fit.ulu_postmean if isinstance(fit, EigenmodelFit) else np.asarray(fit, dtype=float)
    n = matrix.shape[0]
    if q > n:
        raise ValueError(f"cannot extract {q} mediators from an {n}-node fit")
    if q < 1:
        raise ValueError("need q >= 1")
    vals, vecs = np.linalg.eigh(matrix)
    order = np.argsort(-vals, kind="stable")[:q]
    top_vals = vals[order]
    top_vecs = vecs[:, order].copy()
    for k in range(q):
        pivot = int(np.argmax(np.abs(top_vecs[:, k])))
        if top_vecs[pivot, k] < 0:
            top_vecs[:, k] = -top_vecs[:, k]
    warnings = []
    tol = 1e-8 * max(1.0, float(np.max(np.abs(vals))))
    nonzero = int((np.abs(vals) > tol).sum())
    if q > nonzero:
        warnings.append("rank_exceeds_nonzero_eigenvalues")
    return MediatorMatrix(vectors=top_vecs, eigenvalues=top_vals, warnings=warnings)


def scree_elbow(eigenvalues) -> ScreeResult:
    """Suggested latent dimension from the positive part of a spectrum.

    Picks the k maximizing the second difference of the descending
    positive eigenvalues; with fewer than three positive values the
    heuristic is unavailable and the count itself is returned.
    """
    vals = np.asarray(eigenvalues, dtype=float).ravel()
    if vals.size == 0:
        raise ValueError("empty eigenvalue list")
    if np.any(np.diff(vals) > 1e-9):
        raise ValueError("eigenvalues must be sorted descending")
    pos = vals[vals > 0]
    if len(pos) < 3:
        return ScreeResult(q=len(pos), positive_eigenvalues=pos, heuristic_available=False)
    second_diff = pos[:-2] - 2.0 * pos[1:-1] + pos[2:]
    q = int(np.argmax(second_diff)) + 1
    return ScreeResult(q=q, positive_eigenvalues=pos, heuristic_available=True)


def select_dimension_conditional(a, h, q_max: int, config: EigenmodelConfig | None = None) -> DimensionSelection:
    """Pick the conditional-model dimension by the negative-eigenvalue rule.

    Fits the conditional model at Q = 2..q_max and eigendecomposes each
    posterior-mean latent matrix. A rank-Q fit's model dimensions are the
    Q largest-magnitude eigenvalues of that mean (the remaining ones are
    averaging noise near zero); the selected dimension is the largest Q
    whose model dimensions are all positive. If even Q=2 carries a
    negative dimension, returns 2 with ``flagged=True``. Full descending
    spectra are returned per Q so a human can override.
    """
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    cfg = config or EigenmodelConfig()
    seeds = np.random.SeedSequence(cfg.seed).generate_state(q_max - 1)
    spectra = {}
    fits = {}
    candidates = []
    for idx, q in enumerate(range(2, q_max + 1)):
        cfg_q = replace(cfg, rank=q, seed=int(seeds[idx]))
        fit = fit_eigenmodel(a, h, cfg_q)
        vals = np.linalg.eigvalsh(fit.ulu_postmean)
        model_dims = vals[np.argsort(-np.abs(vals), kind="stable")[:q]]
        spectra[q] = vals[::-1]
        fits[q] = fit
        if model_dims.min() > 0:
            candidates.append(q)
    if candidates:
        return DimensionSelection(selected_q=max(candidates), spectra=spectra, flagged=False, fits=fits)
    return DimensionSelection(selected_q=2, spectra=spectra, flagged=True, fits=fits)


def save_fit_json(fit: EigenmodelFit, path, include_u: bool = False):
    """Serialize a fit to the canonical JSON document."""
    cfg = fit.config
    doc = {
        "config": {
            "rank": cfg.rank,
            "total_iterations": cfg.total_iterations,
            "burn_in": cfg.burn_in,
            "thin": cfg.thin,
            "link": cfg.link,
            "prior_sd_beta": cfg.prior_sd_beta,
            "prior_sd_lambda": cfg.prior_sd_lambda,
            "prior_sd_u": cfg.prior_sd_u,
            "target_acceptance": cfg.target_acceptance,
            "seed": cfg.seed if isinstance(cfg.seed, (int, type(None))) else str(cfg.seed),
        },
        "n_nodes": fit.n_nodes,
        "n_saved": fit.n_saved,
        "warnings": fit.warnings,
        "acceptance_rates": fit.acceptance_rates,
        "ulu_postmean": fit.ulu_postmean.tolist(),
        "lambda_draws": fit.lambda_draws.tolist(),
        "beta_draws": fit.beta_draws.tolist() if fit.beta_draws is not None else None,
        "u_draws": fit.u_draws.tolist() if include_u and fit.u_draws is not None else None,
    }
    with open(path, "w") as handle:
        json.dump(doc, handle)


def load_fit_json(path) -> EigenmodelFit:
    with open(path) as handle:
        doc = json.load(handle)
    c = doc["config"]
    cfg = EigenmodelConfig(
        rank=c["rank"],
        total_iterations=c["total_iterations"],
        burn_in=c["burn_in"],
        thin=c["thin"],
        link=c["link"],
        prior_sd_beta=c["prior_sd_beta"],
        prior_sd_lambda=c["prior_sd_lambda"],
        prior_sd_u=c["prior_sd_u"],
        target_acceptance=c["target_acceptance"],
        seed=c["seed"] if isinstance(c["seed"], int) else None,
    )
    return EigenmodelFit(
        config=cfg,
        ulu_postmean=np.asarray(doc["ulu_postmean"], dtype=float),
        lambda_draws=np.asarray(doc["lambda_draws"], dtype=float),
        beta_draws=None if doc["beta_draws"] is None else np.asarray(doc["beta_draws"], dtype=float),
        u_draws=None if doc.get("u_draws") is None else np.asarray(doc["u_draws"], dtype=float),
        acceptance_rates=doc["acceptance_rates"],
        warnings=doc.get("warnings", []),
    )
