"""Correlated Rayleigh wiretap channel.

The instantaneous SNRs ``alpha`` (Alice to Bob) and ``beta`` (Alice to Eve)
are exponential with means ``lambda1`` and ``lambda2``.  They are jointly
distributed as Kibble's bivariate exponential with power correlation ``rho``::

    f(a, b) = I0(2 sqrt(rho a b / (l1 l2)) / (1 - rho))
              * exp(-(a/l1 + b/l2) / (1 - rho)) / ((1 - rho) l1 l2)

Expanding I0 gives the mixture ``f = sum_k c_k f_k`` with
``c_k = rho**k / ((k!)**2 (1 - rho)**(2k + 1))`` and
``f_k = exp(-(a/l1 + b/l2)/(1-rho)) (a/l1)**k (b/l2)**k / (l1 l2)``.
Each ``c_k f_k`` is a product of two Gamma(k + 1) densities weighted by
``(1 - rho) rho**k``; that normalised view is used throughout the package.

All capacities are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DomainError
from .specfun import bessel_i0e, regularized_upper_gamma_table

__all__ = [
    "RHO_MAX",
    "ChannelParams",
    "SnrPair",
    "series_coefficient",
    "log_series_weight",
    "joint_pdf_bessel",
    "joint_pdf_series",
    "normalized_pdf",
    "instantaneous_secrecy_capacity",
    "joint_cdf",
    "joint_cdf_grid",
    "db_to_linear",
]

RHO_MAX = 0.99


def db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    """Mean SNRs (linear) and power correlation of the wiretap channel."""

    lambda1: float
    lambda2: float
    rho: float

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "rho"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or isinstance(v, bool):
                raise DomainError(f"{name} must be a real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not (self.lambda1 > 0.0 and math.isfinite(self.lambda1)):
            raise DomainError(f"lambda1 must be finite and > 0, got {self.lambda1!r}")
        if not (self.lambda2 > 0.0 and math.isfinite(self.lambda2)):
            raise DomainError(f"lambda2 must be finite and > 0, got {self.lambda2!r}")
        if not (0.0 <= self.rho <= RHO_MAX):
            raise DomainError(f"rho must lie in [0, {RHO_MAX}], got {self.rho!r}")

    @classmethod
    def from_snr_db(cls, snr_db: float, rho: float, snr2_db: float | None = None) -> "ChannelParams":
        l1 = db_to_linear(snr_db)
        l2 = l1 if snr2_db is None else db_to_linear(snr2_db)
        return cls(l1, l2, rho)

    @property
    def ratio(self) -> float:
        """lambda1 / lambda2."""
        return self.lambda1 / self.lambda2


@dataclass(frozen=True)
class SnrPair:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not (v >= 0.0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)


def series_coefficient(k: int, rho: float) -> float:
    """c_k = rho**k / ((k!)**2 (1 - rho)**(2k+1)); log-space above k = 20."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    rho = float(rho)
    if not (0.0 <= rho < 1.0):
        raise DomainError(f"rho must lie in [0, 1), got {rho!r}")
    if k == 0:
        return 1.0 / (1.0 - rho)
    if rho == 0.0:
        return 0.0
    if k <= 20:
        return rho**k / (math.factorial(k) ** 2 * (1.0 - rho) ** (2 * k + 1))
    log_c = k * math.log(rho) - 2.0 * math.lgamma(k + 1.0) - (2 * k + 1) * math.log1p(-rho)
    return math.exp(log_c) if log_c < 709.0 else math.inf


def log_series_weight(k: int, rho: float) -> float:
    """log of (1 - rho) rho**k = c_k (k!)**2 (1 - rho)**(2k+2), the mixture weight."""
    if rho == 0.0:
        return 0.0 if k == 0 else -math.inf
    return math.log1p(-rho) + k * math.log(rho)


def normalized_pdf(u, v, rho):
    """Joint density of (alpha/lambda1, beta/lambda2); vectorised over u, v.

    Evaluated as ``i0e(z) exp(z - (u+v)/(1-rho)) / (1-rho)`` so that large
    Bessel arguments never overflow.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    one_m = 1.0 - rho
    z = 2.0 * np.sqrt(rho * u * v) / one_m
    out = bessel_i0e(z) * np.exp(z - (u + v) / one_m) / one_m
    return out if out.ndim else float(out)


def joint_pdf_bessel(p: ChannelParams, s: SnrPair) -> float:
    """f(alpha, beta) evaluated through I0 directly."""
    u = s.alpha / p.lambda1
    v = s.beta / p.lambda2
    return normalized_pdf(u, v, p.rho) / (p.lambda1 * p.lambda2)


def joint_pdf_series(p: ChannelParams, s: SnrPair, ctrl=None) -> float:
    """f(alpha, beta) as the truncated mixture sum_k c_k f_k(alpha, beta).

    Terms are added until ``consecutive_passes`` successive terms are below
    ``rel_tol`` times the running sum.  Raises ConvergenceFailure at the cap.
    """
    from .closedform import SeriesControl

    ctrl = ctrl or SeriesControl()
    u = s.alpha / p.lambda1
    v = s.beta / p.lambda2
    rho = p.rho
    one_m = 1.0 - rho
    log_base = -(u + v) / one_m - math.log(one_m * p.lambda1 * p.lambda2)
    if rho == 0.0 or u * v == 0.0:
        return math.exp(log_base)
    # c_k f_k = base * (q^k / k!)^2 with q = sqrt(rho u v) / (1 - rho)
    q = math.sqrt(rho * u * v) / one_m
    k = np.arange(ctrl.k_max + 1, dtype=float)
    log_terms = 2.0 * (k * math.log(q) - np.cumsum(np.log(np.maximum(k, 1.0))))
    shift = log_terms.max()
    terms = np.exp(log_terms - shift)
    partial = np.cumsum(terms)
    small = terms <= ctrl.rel_tol * partial
    # terms rise until k ~ q; underflowed leading terms must not count as converged
    small[: int(np.argmax(log_terms)) + 1] = False
    n_pass = ctrl.consecutive_passes
    run = np.convolve(small.astype(int), np.ones(n_pass, dtype=int), mode="valid")
    hits = np.flatnonzero(run == n_pass)
    if hits.size == 0:
        raise ConvergenceFailure(
            f"joint PDF series did not converge within k_max={ctrl.k_max}",
            partial=math.exp(log_base + shift) * partial[-1],
            terms_used=ctrl.k_max + 1,
        )
    last = hits[0] + n_pass - 1
    return math.exp(log_base + shift + math.log(partial[last]))


def instantaneous_secrecy_capacity(s: SnrPair) -> float:
    """max(0, ln(1 + alpha) - ln(1 + beta)) in nats."""
    if s.alpha <= s.beta:
        return 0.0
    return math.log1p((s.alpha - s.beta) / (1.0 + s.beta))


def joint_cdf_grid(p: ChannelParams, alpha_edges, beta_edges, tol: float = 1e-16) -> np.ndarray:
    """Matrix of P(alpha' <= a_i, beta' <= b_j) from the Gamma-mixture form.

    Each mixture component factorises, so the CDF is
    ``sum_k (1-rho) rho**k P(k+1, a/(1-rho)) P(k+1, b/(1-rho))`` with P the
    regularised lower incomplete gamma.  Infinite edges are allowed.
    """
    one_m = 1.0 - p.rho
    a = np.asarray(alpha_edges, dtype=float) / p.lambda1 / one_m
    b = np.asarray(beta_edges, dtype=float) / p.lambda2 / one_m
    if p.rho == 0.0:
        n_terms = 1
    else:
        n_terms = int(math.ceil(math.log(tol) / math.log(p.rho))) + 1
    k = np.arange(n_terms)
    weights = np.exp(math.log1p(-p.rho) + k * math.log(p.rho)) if p.rho > 0 else np.ones(1)

    def lower_table(x):
        out = np.empty((n_terms, x.size))
        for i, xi in enumerate(x):
            if xi <= 0.0:
                out[:, i] = 0.0
            elif math.isinf(xi):
                out[:, i] = 1.0
            else:
                out[:, i] = 1.0 - regularized_upper_gamma_table(n_terms - 1, xi)
        return out

    pa = lower_table(a)
    pb = lower_table(b)
    return np.clip((pa * weights[:, None]).T @ pb, 0.0, 1.0)


def joint_cdf(p: ChannelParams, alpha: float, beta: float) -> float:
    """P(alpha' <= alpha, beta' <= beta)."""
    return float(joint_cdf_grid(p, [alpha], [beta])[0, 0])
