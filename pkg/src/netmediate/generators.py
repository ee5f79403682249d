"""Seeded generators for networks and mediation data.

Every generator is a deterministic function of its parameters and seed.
Randomness comes from numpy's PCG64 generator (``np.random.default_rng``)
and dyads are always sampled in row-major upper-triangle order (i < j),
so identical inputs reproduce identical matrices bit for bit.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .graphs import validate_dyadic_covariate
from .mediation import MediationData

__all__ = [
    "gen_erdos_renyi",
    "gen_eigenmodel",
    "gen_latent_class",
    "gen_latent_distance",
    "gen_mediation_data",
    "gen_structured_u",
]


def _sample_adjacency(probs: np.ndarray, rng) -> np.ndarray:
    """Bernoulli-sample a symmetric adjacency from dyad probabilities.

    ``probs`` is a full matrix; only its upper triangle is consulted, in
    row-major order.
    """
    n = probs.shape[0]
    iu = np.triu_indices(n, 1)
    draws = rng.random(len(iu[0]))
    a = np.zeros((n, n))
    a[iu] = (draws < probs[iu]).astype(float)
    return a + a.T


def gen_erdos_renyi(n: int, p: float, seed=None) -> np.ndarray:
    """Classical random graph: each dyad is an independent Bernoulli(p)."""
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    return _sample_adjacency(np.full((n, n), float(p)), rng)


def gen_latent_class(memberships, prob, seed=None) -> np.ndarray:
    """Stochastic block network: dyad (i, j) ~ Bernoulli(prob[c_i][c_j]).

    ``memberships`` holds integer class indices into the symmetric class
    probability table ``prob``. Nodes of the same class are stochastically
    equivalent by construction.
    """
    memberships = np.asarray(memberships, dtype=int)
    prob = np.asarray(prob, dtype=float)
    if prob.ndim != 2 or prob.shape[0] != prob.shape[1]:
        raise ValueError("class probability table must be square")
    if not np.array_equal(prob, prob.T):
        raise ValueError("class probability table must be symmetric")
    if np.any(prob < 0) or np.any(prob > 1):
        raise ValueError("class probabilities must be in [0, 1]")
    if memberships.min() < 0 or memberships.max() >= prob.shape[0]:
        raise ValueError("membership label outside the probability table")
    if len(memberships) < 2:
        raise ValueError("need n >= 2")
    rng = np.random.default_rng(seed)
    return _sample_adjacency(prob[np.ix_(memberships, memberships)], rng)


def gen_latent_distance(positions, intercept: float, seed=None) -> np.ndarray:
    """Latent distance network: p_ij = logistic(a - ||u_i - u_j||)."""
    positions = np.asarray(positions, dtype=float)
    if positions.ndim == 1:
        positions = positions[:, None]
    if positions.shape[1] < 1:
        raise ValueError("need latent dimension d >= 1")
    if positions.shape[0] < 2:
        raise ValueError("need n >= 2")
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    rng = np.random.default_rng(seed)
    return _sample_adjacency(expit(intercept - dist), rng)


def gen_eigenmodel(u, lam, beta=None, h=None, seed=None) -> np.ndarray:
    """Latent eigenmodel network: p_ij = logistic(beta h_ij + u_i' Lam u_j)."""
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    n, q = u.shape
    if n < 2:
        raise ValueError("need n >= 2")
    if len(lam) != q:
        raise ValueError(f"lambda has length {len(lam)}, expected {q}")
    if (beta is None) != (h is None):
        raise ValueError("beta and h must be supplied together")
    z = (u * lam) @ u.T
    if h is not None:
        h = validate_dyadic_covariate(h, n)
        z = z + float(beta) * h
    rng = np.random.default_rng(seed)
    return _sample_adjacency(expit(z), rng)


def gen_structured_u(n: int, q: int) -> np.ndarray:
    """Block-structured latent positions with unit-norm rows.

    Nodes are split into q contiguous, nearly equal groups; every node in
    group g sits at the g-th coordinate axis. Columns are orthogonal
    indicator vectors, so group g forms a community whose internal dyads
    pick up lam[g] on the link scale.
    """
    if not 1 <= q < n:
        raise ValueError("need 1 <= q < n")
    u = np.zeros((n, q))
    bounds = np.linspace(0, n, q + 1).astype(int)
    for g in range(q):
        u[bounds[g]: bounds[g + 1], g] = 1.0
    return u


def gen_mediation_data(
    n: int,
    a,
    b,
    cp: float,
    intercept_y: float = 0.0,
    intercepts_m=None,
    noise_sd_y: float = 1.0,
    noise_sd_m: float = 1.0,
    family: str = "continuous",
    seed=None,
) -> MediationData:
    """Simulate predictor, mediators, and outcome from the mediation model.

    X ~ Bernoulli(0.5); M_k = i_k + a_k X + noise; a continuous outcome is
    Y = i_y + cp X + sum_k b_k M_k + noise, a binary one is Bernoulli of
    the logistic of the same linear predictor.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if len(a) != len(b):
        raise ValueError("a and b must have the same length")
    q = len(a)
    if intercepts_m is None:
        intercepts_m = np.zeros(q)
    intercepts_m = np.atleast_1d(np.asarray(intercepts_m, dtype=float))
    if len(intercepts_m) != q:
        raise ValueError("intercepts_m must match the number of mediators")
    if family == "continuous" and noise_sd_y <= 0:
        raise ValueError("continuous outcome needs noise_sd_y > 0")
    if noise_sd_m <= 0:
        raise ValueError("need noise_sd_m > 0")

    rng = np.random.default_rng(seed)
    x = (rng.random(n) < 0.5).astype(float)
    m = intercepts_m + np.outer(x, a) + noise_sd_m * rng.standard_normal((n, q))
    eta = intercept_y + cp * x + m @ b
    if family == "continuous":
        y = eta + noise_sd_y * rng.standard_normal(n)
    elif family == "binary":
        y = (rng.random(n) < expit(eta)).astype(float)
    else:
        raise ValueError(f"unknown outcome family: {family!r}")
    return MediationData(x=x, y=y, mediators=m, y_family=family)
