"""Series expressions for the average secrecy capacity and secrecy outage.

Both quantities are sums over the index k of the I0 expansion of the joint
PDF.  With ``w_k = (1 - rho) rho**k`` the k-th mixture weight,

* capacity:  ``C = sum_k c_k (R1_k - R2_k) = sum_k w_k B_k`` where ``B_k`` is
  the secrecy capacity of the k-th component;
* outage:    ``P_out(R) = 1 - sum_k w_k S_k`` where ``S_k`` is the
  probability that the k-th component supports rate R.

``R1_k`` and ``R2_k`` carry a factor ``(k!)**2 (1-rho)**(2k+2)`` that cancels
``c_k`` exactly, so the summation engine works with ``B_k`` built from the
Gamma-normalised moments of :mod:`corrwiretap.specfun`.  The un-normalised
terms remain available through :func:`r1_term` and :func:`r2_term`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, series_coefficient
from .errors import ConvergenceFailure, DomainError, NumericalInconsistency
from .specfun import (
    EvalDiag,
    f_log_moment,
    log_moment_sequence,
    regularized_upper_gamma_table,
    worst_diag,
)

__all__ = [
    "SeriesControl",
    "CapacityResult",
    "OutageResult",
    "r1_term",
    "r2_term",
    "capacity_term",
    "outage_term",
    "average_secrecy_capacity",
    "outage_probability",
]

NEGATIVE_SLACK = 1e-12


@dataclass(frozen=True)
class SeriesControl:
    """Truncation rule for the k-series.

    Summation stops once ``consecutive_passes`` successive terms are each
    below ``rel_tol`` times the running sum; ``k_max`` caps the index.
    """

    rel_tol: float = 1e-12
    consecutive_passes: int = 3
    k_max: int = 5000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise DomainError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol!r}")
        if int(self.consecutive_passes) != self.consecutive_passes or self.consecutive_passes < 1:
            raise DomainError(f"consecutive_passes must be an integer >= 1, got {self.consecutive_passes!r}")
        if int(self.k_max) != self.k_max or self.k_max < 10:
            raise DomainError(f"k_max must be an integer >= 10, got {self.k_max!r}")


@dataclass(frozen=True)
class CapacityResult:
    value: float
    terms_used: int
    last_term_ratio: float
    diag: EvalDiag = field(default_factory=EvalDiag)

    @property
    def bits(self) -> float:
        return self.value / math.log(2.0)


@dataclass(frozen=True)
class OutageResult:
    value: float
    terms_used: int
    y: float
    mu: float
    last_term_ratio: float = 0.0


# ---------------------------------------------------------------------------
# un-normalised R terms


def _check_k(k):
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    return int(k)


def _weighted_f_sum(lam, k, ratio, one_m):
    """k! sum_{m=0}^k ratio^m/m! (1-rho)^(k+1-m) F(lam, k+m, (1+ratio)/(1-rho))."""
    mu = (1.0 + ratio) / one_m
    parts = []
    for m in range(k + 1):
        f, _ = f_log_moment(lam, k + m, mu)
        parts.append(ratio**m / math.factorial(m) * one_m ** (k + 1 - m) * f)
    return math.factorial(k) * math.fsum(parts)


def r1_term(p: ChannelParams, k: int) -> float:
    """R1_k: the ln(1 + alpha) part of component k over the region alpha > beta.

    R1_k = k! (1-rho)^(k+1) F(l1, k, 1/(1-rho))
           - k! sum_m (l1/l2)^m/m! (1-rho)^(k+1-m) F(l1, k+m, (1 + l1/l2)/(1-rho))
    """
    k = _check_k(k)
    one_m = 1.0 - p.rho
    f, _ = f_log_moment(p.lambda1, k, 1.0 / one_m)
    first = math.factorial(k) * one_m ** (k + 1) * f
    return first - _weighted_f_sum(p.lambda1, k, p.lambda1 / p.lambda2, one_m)


def r2_term(p: ChannelParams, k: int) -> float:
    """R2_k = k! sum_m (l2/l1)^m/m! (1-rho)^(k+1-m) F(l2, k+m, (1 + l2/l1)/(1-rho))."""
    k = _check_k(k)
    return _weighted_f_sum(p.lambda2, k, p.lambda2 / p.lambda1, 1.0 - p.rho)


# ---------------------------------------------------------------------------
# normalised engine


def _lfact(n):
    """lgamma(j + 1) for j = 0..n."""
    out = np.zeros(n + 1)
    if n > 0:
        out[1:] = np.cumsum(np.log(np.arange(1, n + 1, dtype=float)))
    return out


class _CapacityTerms:
    """Per-k component capacities B_k for one channel, with cached moments."""

    def __init__(self, p: ChannelParams, n_hint: int = 128):
        self.p = p
        one_m = 1.0 - p.rho
        r = p.ratio
        self.mu_direct = 1.0 / one_m
        self.mu_main = (1.0 + r) / one_m
        self.mu_eve = (1.0 + 1.0 / r) / one_m
        # negative-binomial weights C(k+m, m) q^m p^(k+1)
        self.log_q_main = -math.log1p(1.0 / r)
        self.log_p_main = -math.log1p(r)
        self.log_q_eve, self.log_p_eve = self.log_p_main, self.log_q_main
        self.n = 0
        self._grow(n_hint)

    def _grow(self, n):
        p = self.p
        self.g_direct, d1 = log_moment_sequence(p.lambda1, n, self.mu_direct)
        self.g_main, d2 = log_moment_sequence(p.lambda1, 2 * n, self.mu_main)
        self.g_eve, d3 = log_moment_sequence(p.lambda2, 2 * n, self.mu_eve)
        self.lf = _lfact(2 * n)
        self.diag = worst_diag(d1, d2, d3)
        self.n = n

    def __call__(self, k):
        if k > self.n:
            self._grow(max(2 * self.n, k))
        lf = self.lf
        m = np.arange(k + 1)
        log_binom = lf[k + m] - lf[k] - lf[m]
        w_main = np.exp(log_binom + m * self.log_q_main + (k + 1) * self.log_p_main)
        w_eve = np.exp(log_binom + m * self.log_q_eve + (k + 1) * self.log_p_eve)
        lost = np.dot(w_main, self.g_main[k : 2 * k + 1]) + np.dot(w_eve, self.g_eve[k : 2 * k + 1])
        return float(self.g_direct[k] - lost)


def capacity_term(p: ChannelParams, k: int) -> float:
    """c_k (R1_k - R2_k), evaluated in normalised form."""
    k = _check_k(k)
    if p.rho == 0.0 and k > 0:
        return 0.0
    b = _CapacityTerms(p, n_hint=max(k, 1))(k)
    return math.exp(math.log1p(-p.rho) + (k * math.log(p.rho) if k else 0.0)) * b


class _OutageTerms:
    """Per-k component survival S_k = P(N + J <= k).

    N ~ NegBin(k+1, mu/(1+mu)) and J ~ Poisson(y/(1-rho)) are independent;
    this is the inner double sum over m and n regrouped by n and j = m - n.
    """

    def __init__(self, p: ChannelParams, y: float, mu: float, n_hint: int = 128):
        self.y_scaled = y / (1.0 - p.rho)
        self.log_q = -math.log1p(1.0 / mu)
        self.log_p = -math.log1p(mu)
        self.n = 0
        self._grow(n_hint)

    def _grow(self, n):
        self.pois_cdf = regularized_upper_gamma_table(n, self.y_scaled)
        self.lf = _lfact(2 * n)
        self.n = n

    def __call__(self, k):
        if k > self.n:
            self._grow(max(2 * self.n, k))
        lf = self.lf
        nn = np.arange(k + 1)
        w = np.exp(lf[k + nn] - lf[k] - lf[nn] + nn * self.log_q + (k + 1) * self.log_p)
        return float(np.dot(w, self.pois_cdf[k - nn]))


def outage_term(p: ChannelParams, rate_R: float, k: int) -> float:
    """The k-th term of the survival series, w_k S_k."""
    k = _check_k(k)
    y, mu = _outage_shape(p, rate_R)
    if p.rho == 0.0 and k > 0:
        return 0.0
    s = _OutageTerms(p, y, mu, n_hint=max(k, 1))(k)
    return math.exp(math.log1p(-p.rho) + (k * math.log(p.rho) if k else 0.0)) * s


def _outage_shape(p, rate_R):
    rate_R = float(rate_R)
    if not (rate_R >= 0.0 and math.isfinite(rate_R)):
        raise DomainError(f"rate must be finite and >= 0 nats, got {rate_R!r}")
    y = math.expm1(rate_R) / p.lambda1
    mu = math.exp(rate_R) * p.lambda2 / p.lambda1
    return y, mu


def _sum_series(p, component, ctrl, what):
    """Sum w_k component(k) under ``ctrl``; returns (value, terms_used, last_ratio)."""
    log_rho = math.log(p.rho) if p.rho > 0.0 else -math.inf
    log_w0 = math.log1p(-p.rho)
    total = 0.0
    comp = 0.0
    passes = 0
    ratio = 0.0
    for k in range(ctrl.k_max + 1):
        term = math.exp(log_w0 + k * log_rho) * component(k) if k else math.exp(log_w0) * component(0)
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        partial = total + comp
        if p.rho == 0.0:
            # c_k = 0 for every k >= 1: the series is exactly its first term
            return partial, 1, 0.0
        ratio = abs(term) / abs(partial) if partial != 0.0 else (0.0 if term == 0.0 else math.inf)
        passes = passes + 1 if ratio < ctrl.rel_tol else 0
        if passes >= ctrl.consecutive_passes:
            return partial, k + 1, ratio
    raise ConvergenceFailure(
        f"{what} series not converged after k_max={ctrl.k_max} terms (last term ratio {ratio:.3g})",
        partial=total + comp,
        terms_used=ctrl.k_max + 1,
    )


def average_secrecy_capacity(p: ChannelParams, ctrl: SeriesControl | None = None) -> CapacityResult:
    """Average secrecy capacity in nats from the truncated k-series.

    Raises
    ------
    ConvergenceFailure
        If ``ctrl.k_max`` is reached first; ``exc.partial`` holds the sum so far.
    NumericalInconsistency
        If the sum comes out below ``-1e-12``.
    """
    ctrl = ctrl or SeriesControl()
    terms = _CapacityTerms(p)
    value, used, ratio = _sum_series(p, terms, ctrl, "capacity")
    if value < 0.0:
        if value < -NEGATIVE_SLACK:
            raise NumericalInconsistency(f"average secrecy capacity came out negative: {value!r}")
        value = 0.0
    return CapacityResult(value, used, ratio, terms.diag)


def outage_probability(p: ChannelParams, rate_R: float, ctrl: SeriesControl | None = None) -> OutageResult:
    """Secrecy outage probability P(C_s <= R) for a target rate R in nats.

    Uses ``y = (e^R - 1)/lambda1`` and ``mu = e^R lambda2/lambda1``.  Each
    k-term of the survival series carries the factor
    ``c_k k! (1-rho)^(k+1)``; see :func:`_outage_term_literal`.
    """
    ctrl = ctrl or SeriesControl()
    y, mu = _outage_shape(p, rate_R)
    survival, used, ratio = _sum_series(p, _OutageTerms(p, y, mu), ctrl, "outage")
    raw = 1.0 - survival
    if not (-NEGATIVE_SLACK <= raw <= 1.0 + NEGATIVE_SLACK):
        raise NumericalInconsistency(f"outage probability outside [0, 1]: {raw!r}")
    return OutageResult(min(max(raw, 0.0), 1.0), used, y, mu, ratio)


def _outage_term_literal(p: ChannelParams, rate_R: float, k: int, corrected: bool = True) -> float:
    """k-th survival term as the plain triple sum over m and n (small k only).

    ``c_k k! sum_m (1/m!) (mu/(1-rho))^m sum_n C(m, n) (y/mu)^(m-n)
    ((1-rho)/(1+mu))^(k+n+1) Gamma(k+n+1)``, times ``exp(-y/(1-rho))``.
    Without the ``(1-rho)^(k+1)`` factor (``corrected=False``) the terms
    grow like ``(rho/(1-rho))**k`` and the series diverges for rho > 1/2.
    """
    y, mu = _outage_shape(p, rate_R)
    one_m = 1.0 - p.rho
    inner = 0.0
    for m in range(k + 1):
        acc = 0.0
        for n in range(m + 1):
            acc += math.comb(m, n) * (y / mu) ** (m - n) * (one_m / (1.0 + mu)) ** (k + n + 1) * math.gamma(k + n + 1)
        inner += (mu / one_m) ** m / math.factorial(m) * acc
    term = series_coefficient(k, p.rho) * math.factorial(k) * inner * math.exp(-y / one_m)
    if corrected:
        term *= one_m ** (k + 1)
    return term
