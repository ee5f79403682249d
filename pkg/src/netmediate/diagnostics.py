"""MCMC convergence diagnostics and interval estimation.

All functions are deterministic in their inputs and accept plain 1-D
arrays of draws. ``Chain`` is a thin carrier used by the CLI when reading
draw exports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Chain",
    "effective_sample_size",
    "geweke_z",
    "hpd_interval",
    "split_rhat",
]


@dataclass
class Chain:
    name: str
    draws: np.ndarray
    chain_id: int = 0

    def __post_init__(self):
        self.draws = np.asarray(self.draws, dtype=float)
        if self.draws.size == 0:
            raise ValueError(f"chain {self.name!r} is empty")
        if not np.isfinite(self.draws).all():
            raise ValueError(f"chain {self.name!r} contains non-finite draws")


def _segment_mean_var(segment: np.ndarray) -> tuple[float, float]:
    """Segment mean and a batch-means estimate of Var(segment mean).

    Uses floor(sqrt(m)) batches of equal size (trailing remainder draws
    dropped), which is consistent under the usual mixing conditions and
    robust to autocorrelation.
    """
    m = len(segment)
    b = int(np.floor(np.sqrt(m)))
    size = m // b
    means = segment[: b * size].reshape(b, size).mean(axis=1)
    return float(segment.mean()), float(np.var(means, ddof=1) / b)


def geweke_z(draws, first_frac: float = 0.1, last_frac: float = 0.5) -> float:
    """Geweke convergence z-score comparing early and late chain means.

    z = (mean_A - mean_B) / sqrt(Var(mean_A) + Var(mean_B)) where A is the
    first ``first_frac`` of the chain, B the last ``last_frac``, and the
    variances come from batch means. |z| >= 1.96 is conventional evidence
    against convergence.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 1:
        raise ValueError("draws must be a 1-D array")
    n = len(draws)
    if n < 100:
        raise ValueError(f"chain too short for Geweke test: {n} < 100")
    if not (0 < first_frac and 0 < last_frac and first_frac + last_frac <= 1):
        raise ValueError("need 0 < first_frac, last_frac and first_frac + last_frac <= 1")
    n_a = int(np.floor(n * first_frac))
    n_b = int(np.floor(n * last_frac))
    seg_a = draws[:n_a]
    seg_b = draws[n - n_b:]
    if np.var(seg_a) == 0 and np.var(seg_b) == 0:
        raise ValueError("degenerate chain: zero variance in both Geweke segments")
    mean_a, var_a = _segment_mean_var(seg_a)
    mean_b, var_b = _segment_mean_var(seg_b)
    return float((mean_a - mean_b) / np.sqrt(var_a + var_b))


def hpd_interval(samples, prob: float) -> tuple[float, float]:
    """Sample highest-posterior-density interval at mass ``prob``.

    Scans every window of ceil(prob * n) consecutive sorted values and
    returns the narrowest; ties go to the lowest starting index.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("empty sample set")
    if not 0 < prob < 1:
        raise ValueError(f"prob must be in (0, 1), got {prob}")
    s = np.sort(samples)
    n = len(s)
    n_in = min(int(np.ceil(prob * n)), n)
    if n_in < 1:
        n_in = 1
    widths = s[n_in - 1:] - s[: n - n_in + 1]
    i = int(np.argmin(widths))
    return float(s[i]), float(s[i + n_in - 1])


def split_rhat(chains) -> float:
    """Split-chain potential scale reduction factor.

    Accepts a list of equal-length 1-D arrays (or a 2-D array, one row per
    chain). Each chain is split in half, so a single chain is valid input.
    Zero total variance returns 1.0 (a constant target is converged).
    """
    rows = [np.asarray(c, dtype=float).ravel() for c in chains]
    if len(rows) == 0:
        raise ValueError("no chains given")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise ValueError(f"chains have mismatched lengths: {sorted(lengths)}")
    n = lengths.pop()
    if n < 100:
        raise ValueError(f"chains too short for split R-hat: {n} < 100")
    half = n // 2
    halves = []
    for r in rows:
        halves.append(r[:half])
        halves.append(r[n - half:])
    draws = np.stack(halves)
    if np.var(draws) == 0:
        return 1.0
    m, length = draws.shape
    within = float(np.mean(np.var(draws, axis=1, ddof=1)))
    between = float(length * np.var(np.mean(draws, axis=1), ddof=1))
    if within == 0:
        return float(np.inf)
    var_hat = (length - 1) / length * within + between / length
    return float(max(1.0, np.sqrt(var_hat / within)))


def _autocorrelations(x: np.ndarray) -> np.ndarray:
    n = len(x)
    centered = x - x.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(centered, nfft)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), nfft)[:n] / n
    return acov / acov[0]


def effective_sample_size(draws) -> float:
    """ESS = n / (1 + 2 * sum of autocorrelations).

    Autocorrelations are summed in consecutive pairs (rho_1 + rho_2),
    (rho_3 + rho_4), ... and truncated at the first non-positive pair
    (Geyer's initial-positive rule). The result is clipped to (0, n].
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 1:
        raise ValueError("draws must be a 1-D array")
    n = len(draws)
    if n < 100:
        raise ValueError(f"chain too short for ESS: {n} < 100")
    if np.var(draws) == 0:
        raise ValueError("degenerate chain: zero variance")
    rho = _autocorrelations(draws)
    total = 0.0
    t = 1
    while t + 1 < n:
        pair = rho[t] + rho[t + 1]
        if pair <= 0:
            break
        total += pair
        t += 2
    ess = n / (1.0 + 2.0 * total)
    return float(min(max(ess, np.finfo(float).tiny), n))
