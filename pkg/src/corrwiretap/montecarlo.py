"""Seeded Monte-Carlo simulation of the correlated wiretap channel.

Channel gains are drawn as unit-power circular complex Gaussians::

    g1 ~ CN(0, 1),  w ~ CN(0, 1) independent
    g2 = sqrt(rho) g1 + sqrt(1 - rho) w
    alpha = lambda1 |g1|^2,  beta = lambda2 |g2|^2

so that ``|E[g1 g2*]|^2 = rho`` is the correlation of the powers and
(alpha, beta) follow Kibble's bivariate exponential law.  Noise, transmitted
symbols and received signals never need to be simulated: with unit-variance
noise they only enter through the SNRs.

Reproducibility
---------------
Random streams come from NumPy's PCG64 bit generator.  For a run with
master ``seed`` and ``workers`` substreams, substream ``i`` is
``PCG64(SeedSequence(seed).spawn(workers)[i])``.  Substream ``i`` draws the
``i``-th share of the samples (``n // workers``, plus one for the first
``n % workers`` streams) in chunks of at most ``CHUNK`` pairs.  Per-stream
totals are exact (``math.fsum``) and are folded in stream order, so a given
``(seed, n, workers)`` always reproduces the same estimate bit for bit,
whether the streams run serially or on threads.
"""

from __future__ import annotations

import math
import secrets
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .channel import ChannelParams, joint_cdf_grid
from .errors import DomainError

__all__ = [
    "CHUNK",
    "FadingSample",
    "McEstimate",
    "GofResult",
    "new_seed",
    "substreams",
    "sample_pair",
    "sample_pairs",
    "estimate_capacity",
    "estimate_outage",
    "empirical_cdf",
    "power_correlation",
    "chi_square_gof",
]

CHUNK = 1 << 18
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class FadingSample:
    h_sd: complex
    h_se: complex
    alpha: float
    beta: float


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int
    workers: int = 1


def new_seed() -> int:
    """A fresh 64-bit seed from the OS entropy pool."""
    return secrets.randbits(64)


def substreams(seed: int, workers: int = 1) -> list[np.random.Generator]:
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers!r}")
    children = np.random.SeedSequence(int(seed)).spawn(workers)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _complex_normal(rng, size):
    z = rng.standard_normal((2,) + tuple(np.atleast_1d(size)))
    return (z[0] + 1j * z[1]) * math.sqrt(0.5)


def sample_pair(p: ChannelParams, rng: np.random.Generator) -> FadingSample:
    """Draw one channel realisation (h_sd, h_se) and its SNRs."""
    g = _complex_normal(rng, 2)
    g1 = g[0]
    g2 = math.sqrt(p.rho) * g1 + math.sqrt(1.0 - p.rho) * g[1]
    h_sd = complex(g1 * math.sqrt(p.lambda1))
    h_se = complex(g2 * math.sqrt(p.lambda2))
    return FadingSample(h_sd, h_se, abs(h_sd) ** 2, abs(h_se) ** 2)


def sample_pairs(p: ChannelParams, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised draw of ``n`` (alpha, beta) pairs."""
    z = rng.standard_normal((4, n))
    # |g|^2 with g = (x + i y)/sqrt(2)
    g1r, g1i = z[0], z[1]
    sr, sc = math.sqrt(p.rho), math.sqrt(1.0 - p.rho)
    g2r = sr * g1r + sc * z[2]
    g2i = sr * g1i + sc * z[3]
    alpha = 0.5 * p.lambda1 * (g1r * g1r + g1i * g1i)
    beta = 0.5 * p.lambda2 * (g2r * g2r + g2i * g2i)
    return alpha, beta


def _shares(n, workers):
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _run_streams(p, n, seed, workers, statistic: Callable[[np.ndarray, np.ndarray], np.ndarray]):
    """Per-stream (sum, sum of squares) of ``statistic`` over the stream's share."""
    if n < MIN_SAMPLES:
        raise DomainError(f"at least {MIN_SAMPLES} samples required, got {n}")
    gens = substreams(seed, workers)
    shares = _shares(n, workers)

    def run(i):
        rng = gens[i]
        sums, sqs = [], []
        left = shares[i]
        while left > 0:
            m = min(CHUNK, left)
            x = statistic(*sample_pairs(p, m, rng))
            sums.append(math.fsum(x))
            sqs.append(math.fsum(x * x))
            left -= m
        return math.fsum(sums), math.fsum(sqs)

    if workers == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(workers)))
    total = math.fsum(s for s, _ in parts)
    total_sq = math.fsum(q for _, q in parts)
    return total, total_sq


def _secrecy_capacity_array(alpha, beta):
    return np.maximum(0.0, np.log1p(alpha) - np.log1p(beta))


def estimate_capacity(p: ChannelParams, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Sample mean of the per-realisation secrecy capacity (nats)."""
    total, total_sq = _run_streams(p, n, seed, workers, _secrecy_capacity_array)
    mean = total / n
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
    return McEstimate(mean, math.sqrt(var / n), n, int(seed), workers)


def estimate_outage(p: ChannelParams, rate_R: float, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Fraction of realisations with secrecy capacity <= rate_R; binomial std error."""
    rate_R = float(rate_R)
    if not rate_R >= 0.0:
        raise DomainError(f"rate must be >= 0 nats, got {rate_R!r}")
    if rate_R == 0.0:
        stat = lambda a, b: (a <= b).astype(float)
    else:
        stat = lambda a, b: (_secrecy_capacity_array(a, b) <= rate_R).astype(float)
    total, _ = _run_streams(p, n, seed, workers, stat)
    frac = total / n
    return McEstimate(frac, math.sqrt(frac * (1.0 - frac) / n), n, int(seed), workers)


def empirical_cdf(p: ChannelParams, n: int, seed: int, grid, workers: int = 1) -> list[tuple[float, float]]:
    """Empirical CDF of the secrecy capacity at each rate in ``grid``.

    One sample set is shared by all grid points, so the output is
    non-decreasing.
    """
    grid = [float(r) for r in grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("grid must be sorted ascending")
    if any(r < 0.0 for r in grid):
        raise DomainError("rates must be >= 0")
    if n < MIN_SAMPLES:
        raise DomainError(f"at least {MIN_SAMPLES} samples required, got {n}")
    counts = np.zeros(len(grid), dtype=np.int64)
    edges = np.asarray(grid)
    for rng, share in zip(substreams(seed, workers), _shares(n, workers)):
        left = share
        while left > 0:
            m = min(CHUNK, left)
            a, b = sample_pairs(p, m, rng)
            cs = _secrecy_capacity_array(a, b)
            # cs <= r for each r; cs == 0 exactly whenever alpha <= beta
            counts += np.searchsorted(np.sort(cs), edges, side="right")
            left -= m
    return [(r, c / n) for r, c in zip(grid, counts.tolist())]


def power_correlation(alpha: np.ndarray, beta: np.ndarray) -> float:
    return float(np.corrcoef(alpha, beta)[0, 1])


@dataclass(frozen=True)
class GofResult:
    statistic: float
    dof: int
    p_value: float
    n_cells: int


def chi_square_gof(p: ChannelParams, alpha, beta, bins: int = 20, min_expected: float = 5.0) -> GofResult:
    """Pearson chi-square test of samples against the joint law.

    Cells are the product of equal-mass bins of each exponential marginal;
    expected cell masses come from the bivariate CDF.  Cells whose expected
    count is below ``min_expected`` are pooled into one cell.
    """
    alpha = np.asarray(alpha)
    beta = np.asarray(beta)
    n = alpha.size
    qs = np.arange(1, bins) / bins
    a_edges = -p.lambda1 * np.log1p(-qs)
    b_edges = -p.lambda2 * np.log1p(-qs)
    full_a = np.concatenate(([0.0], a_edges, [np.inf]))
    full_b = np.concatenate(([0.0], b_edges, [np.inf]))
    cdf = joint_cdf_grid(p, full_a, full_b)
    cell_p = np.diff(np.diff(cdf, axis=0), axis=1)
    cell_p = np.clip(cell_p, 0.0, None)
    observed, _, _ = np.histogram2d(alpha, beta, bins=[full_a, full_b])
    expected = n * cell_p
    keep = expected >= min_expected
    obs = list(observed[keep])
    exp = list(expected[keep])
    if np.any(~keep):
        obs.append(observed[~keep].sum())
        exp.append(expected[~keep].sum())
    obs = np.asarray(obs)
    exp = np.asarray(exp)
    exp *= n / exp.sum()
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = obs.size - 1
    return GofResult(stat, dof, float(stats.chi2.sf(stat, dof)), obs.size)
