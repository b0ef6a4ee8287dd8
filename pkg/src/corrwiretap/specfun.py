"""Special functions needed by the closed-form secrecy expressions.

Everything here works on real, double-precision arguments.  The functions
fall into three groups:

* classical functions: :func:`exp_integral_e1`, :func:`bessel_i0`,
  :func:`bessel_i0e`, integer-order incomplete gammas, factorials and
  binomials;
* the Laplace-type moments

      F_k(lam, k, mu) = int_0^inf x^k exp(-mu x) / (1 + lam x) dx
      F(lam, k, mu)   = int_0^inf ln(1 + lam x) exp(-mu x) x^k dx

  exposed as :func:`f_k_base` and :func:`f_log_moment`;
* sequence versions of the same moments normalised by the Gamma(k+1, mu)
  density (:func:`reciprocal_moment_sequence`, :func:`log_moment_sequence`),
  which stay O(1) for any k and are what the series engine consumes.

With ``X ~ Gamma(k + 1, rate mu)`` and ``s = mu / lam``::

    mu**(k+1) / k! * F_k(lam, k, mu) = E[1 / (1 + lam X)]   =: H_k
    mu**(k+1) / k! * F(lam, k, mu)   = E[ln(1 + lam X)]     =: G_k

and the integration-by-parts recursion for F becomes ``G_k = G_{k-1} + H_k / s``
with ``G_0 = H_0 / s``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import DomainError

__all__ = [
    "EULER_GAMMA",
    "EvalDiag",
    "EvalMethod",
    "DiagValue",
    "exp_integral_e1",
    "scaled_e1",
    "bessel_i0",
    "bessel_i0e",
    "factorial",
    "log_factorial",
    "binomial",
    "lower_gamma_int",
    "upper_gamma_int",
    "regularized_upper_gamma_table",
    "f_k_base",
    "f_log_moment",
    "reciprocal_moment",
    "reciprocal_moment_sequence",
    "log_moment_sequence",
    "worst_diag",
]

EULER_GAMMA = 0.57721566490153286061
CANCELLATION_LIMIT = 1e6
_EXACT_FACTORIAL_MAX = 20
_I0_SERIES_MAX = 30.0


class EvalMethod(str, enum.Enum):
    RECURSION = "recursion"
    QUADRATURE_FALLBACK = "quadrature_fallback"


@dataclass(frozen=True)
class EvalDiag:
    """How an F_k value was obtained.

    ``cancellation_estimate`` is ``sum|term| / |sum term|`` for the
    alternating closed form; roughly ``10**-16 * cancellation_estimate``
    is the relative error the closed form would have carried.
    """

    method_used: EvalMethod = EvalMethod.RECURSION
    cancellation_estimate: float = 1.0

    def __post_init__(self):
        c = self.cancellation_estimate
        if not (math.isfinite(c) and c >= 0.0):
            # an overflowed ratio is still "very large"; keep the field finite
            object.__setattr__(self, "cancellation_estimate", float(np.finfo(float).max))

    @property
    def fell_back(self) -> bool:
        return self.method_used is EvalMethod.QUADRATURE_FALLBACK


class DiagValue(NamedTuple):
    value: float
    diag: EvalDiag


def worst_diag(*diags: EvalDiag) -> EvalDiag:
    """Fallback beats recursion; ties are broken by the larger cancellation."""
    return max(diags, key=lambda d: (d.fell_back, d.cancellation_estimate))


# ---------------------------------------------------------------------------
# exponential integral


def _check_positive(name, x):
    if not (x > 0.0) or math.isnan(x):
        raise DomainError(f"{name} must be > 0, got {x!r}")


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < 1e-18 * abs(total):
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x):
    # modified Lentz on exp(x) E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x}")


def scaled_e1(x: float) -> float:
    """Return exp(x) * E1(x); finite for every x > 0 (about 1/x for large x)."""
    x = float(x)
    _check_positive("x", x)
    if x <= 1.0:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1(x) = int_1^inf exp(-x t) / t dt for x > 0.

    Power series for x <= 1, continued fraction above.  Underflows quietly
    to 0.0 for x beyond ~745.
    """
    x = float(x)
    _check_positive("x", x)
    if x <= 1.0:
        return _e1_series(x)
    if x > 745.0:
        return 0.0
    return _e1_scaled_cf(x) * math.exp(-x)


# ---------------------------------------------------------------------------
# modified Bessel function I0


def _i0_series(x):
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 1
    while True:
        term *= q / (k * k)
        total += term
        if term < 1e-17 * total:
            break
        k += 1
    return total


def _i0e_asymptotic(x):
    # I0(x) e^-x ~ (2 pi x)^-1/2 sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    term = 1.0
    total = 1.0
    for k in range(1, 40):
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt > term:
            break
        term = nxt
        total += term
        if term < 1e-17 * total:
            break
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_i0e(x):
    """Exponentially scaled Bessel function exp(-x) I0(x), x >= 0.

    Accepts scalars or arrays.  The even power series is used up to
    x = 30 and the large-argument asymptotic expansion beyond.
    """
    if np.ndim(x) == 0:
        xf = float(x)
        if not xf >= 0.0:
            raise DomainError(f"bessel_i0 argument must be >= 0, got {x!r}")
        if xf <= _I0_SERIES_MAX:
            return _i0_series(xf) * math.exp(-xf)
        return _i0e_asymptotic(xf)
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0.0)):
        raise DomainError("bessel_i0 argument must be >= 0")
    return np.vectorize(bessel_i0e, otypes=[float])(arr)


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero, x >= 0.

    Small arguments sum ``x**(2k) / (4**k (k!)**2)`` directly; large
    arguments go through the scaled asymptotic form.  Overflows to inf
    past x ~ 713.
    """
    if np.ndim(x) == 0:
        xf = float(x)
        if not xf >= 0.0:
            raise DomainError(f"bessel_i0 argument must be >= 0, got {x!r}")
        if xf <= _I0_SERIES_MAX:
            return _i0_series(xf)
        scaled = _i0e_asymptotic(xf)
        if xf < 700.0:
            return scaled * math.exp(xf)
        log_val = xf + math.log(scaled)
        return math.exp(log_val) if log_val < 709.78 else math.inf
    arr = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        return bessel_i0e(arr) * np.exp(arr)


# ---------------------------------------------------------------------------
# factorials, binomials, integer-order incomplete gammas


def _check_nonneg_int(name, n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {n!r}")
    return int(n)


def log_factorial(n: int) -> float:
    n = _check_nonneg_int("n", n)
    return math.lgamma(n + 1.0)


def factorial(n: int) -> float:
    """n! as a float; exact below 21, via lgamma above (inf past 170)."""
    n = _check_nonneg_int("n", n)
    if n <= _EXACT_FACTORIAL_MAX:
        return float(math.factorial(n))
    if n > 170:
        return math.inf
    return math.exp(math.lgamma(n + 1.0))


def binomial(n: int, k: int) -> float:
    n = _check_nonneg_int("n", n)
    k = _check_nonneg_int("k", k)
    if k > n:
        return 0.0
    if n <= _EXACT_FACTORIAL_MAX:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0))


def _poisson_partial_sum(n, x):
    """exp(-x) * sum_{m=0}^n x^m / m!, the regularised upper gamma Q(n+1, x)."""
    if x == 0.0:
        return 1.0
    # build the terms outward from the mode so nothing over/underflows early
    logx = math.log(x)
    m0 = min(n, int(x))
    t0 = math.exp(-x + m0 * logx - math.lgamma(m0 + 1.0))
    total = t0
    t = t0
    for m in range(m0, 0, -1):
        t *= m / x
        total += t
        if t < 1e-18 * total:
            break
    t = t0
    for m in range(m0 + 1, n + 1):
        t *= x / m
        total += t
        if t < 1e-18 * total:
            break
    return min(total, 1.0)


def _poisson_tail_sum(n, x):
    """exp(-x) * sum_{m>n} x^m / m!, the regularised lower gamma P(n+1, x)."""
    if x == 0.0:
        return 0.0
    t = math.exp(-x + (n + 1) * math.log(x) - math.lgamma(n + 2.0))
    total = t
    m = n + 1
    while t > 1e-18 * total:
        m += 1
        t *= x / m
        total += t
    return total


def _check_gamma_args(order, x):
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)) or order < 1:
        raise DomainError(f"incomplete gamma order must be a positive integer, got {order!r}")
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"incomplete gamma argument must be >= 0, got {x!r}")
    return int(order) - 1, x


def lower_gamma_int(n_plus_1: int, x: float) -> float:
    """gamma(n+1, x) = n! - n! e^-x sum_{m=0}^n x^m/m! for integer n >= 0.

    The finite sum is used when x > n + 1.  Below that the subtraction
    would cancel, so the equivalent convergent tail ``n! e^-x sum_{m>n}``
    is summed instead.
    """
    n, x = _check_gamma_args(n_plus_1, x)
    if x > n + 1:
        p = 1.0 - _poisson_partial_sum(n, x)
    else:
        p = _poisson_tail_sum(n, x)
    return factorial(n) * p


def upper_gamma_int(n_plus_1: int, x: float) -> float:
    """Gamma(n+1, x) = n! e^-x sum_{m=0}^n x^m / m! for integer n >= 0."""
    n, x = _check_gamma_args(n_plus_1, x)
    if x > n + 1:
        q = _poisson_partial_sum(n, x)
    else:
        q = 1.0 - _poisson_tail_sum(n, x)
    return factorial(n) * q


def regularized_upper_gamma_table(n_max: int, x: float) -> np.ndarray:
    """Array of Q(j+1, x) = Gamma(j+1, x) / j! for j = 0..n_max.

    Equivalently the Poisson(x) CDF at 0..n_max.
    """
    n_max = _check_nonneg_int("n_max", n_max)
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"argument must be >= 0, got {x!r}")
    j = np.arange(n_max + 1, dtype=float)
    if x == 0.0:
        return np.ones(n_max + 1)
    logpmf = -x + j * math.log(x) - _lgamma_array(n_max + 1)
    cdf = np.cumsum(np.exp(logpmf))
    return np.minimum(cdf, 1.0)


def _lgamma_array(n):
    """lgamma(j + 1) for j = 0..n-1."""
    out = np.zeros(n)
    if n > 1:
        out[1:] = np.cumsum(np.log(np.arange(1, n, dtype=float)))
    return out


# ---------------------------------------------------------------------------
# F_k and F moments


def _check_moment_args(lam, k, mu):
    lam = float(lam)
    mu = float(mu)
    _check_positive("lambda", lam)
    _check_positive("mu", mu)
    k = _check_nonneg_int("k", k)
    return lam, k, mu


def _reciprocal_closed_form(k, s):
    """E[1/(1+lam X)] from the alternating closed form, plus the cancellation ratio.

    Terms (normalised by mu**(k+1)/k!) are
        t_E = (-1)^k s^(k+1) e^s E1(s) / k!
        t_m = (-1)^(k-m) (m-1)! s^(k+1-m) / k!,   m = 1..k
    generated from m = k downward by t_{m-1} = -t_m s / (m-1).
    """
    es = scaled_e1(s)
    if k == 0:
        return s * es, 1.0
    terms = []
    t = s / k
    terms.append(t)
    for m in range(k, 1, -1):
        t *= -s / (m - 1)
        if not math.isfinite(t):
            return math.nan, math.inf
        terms.append(t)
    terms.append(-t * s * es)
    value = math.fsum(terms)
    abs_sum = math.fsum(abs(v) for v in terms)
    if not math.isfinite(abs_sum):
        return math.nan, math.inf
    ratio = abs_sum / max(abs(value), 1e-300)
    return value, ratio


def _reciprocal_quadrature(k, s):
    # int_0^inf t^k e^-t / k! / (1 + t/s) dt over [0, T], t = mu x
    upper = k * math.log(k + 2.0) + 40.0
    lg = math.lgamma(k + 1.0)
    inv_s = 1.0 / s

    if k == 0:
        def integrand(t):
            return math.exp(-t) / (1.0 + t * inv_s)
    else:
        def integrand(t):
            if t <= 0.0:
                return 0.0
            return math.exp(k * math.log(t) - t - lg) / (1.0 + t * inv_s)

    pts = [float(k)] if 0 < k < upper else None
    val, _ = integrate.quad(integrand, 0.0, upper, points=pts, epsabs=0.0, epsrel=1e-13, limit=500)
    return val


def reciprocal_moment(lam: float, k: int, mu: float) -> DiagValue:
    """E[1 / (1 + lam X)] for X ~ Gamma(k + 1, rate mu), with diagnostics.

    This is F_k scaled by mu**(k+1)/k!.  The closed form is used unless
    its estimated cancellation exceeds 1e6, in which case the integral
    is evaluated by adaptive Gauss-Kronrod quadrature.
    """
    lam, k, mu = _check_moment_args(lam, k, mu)
    s = mu / lam
    value, ratio = _reciprocal_closed_form(k, s)
    if ratio <= CANCELLATION_LIMIT and value > 0.0:
        return DiagValue(value, EvalDiag(EvalMethod.RECURSION, ratio))
    value = _reciprocal_quadrature(k, s)
    return DiagValue(value, EvalDiag(EvalMethod.QUADRATURE_FALLBACK, ratio))


def _gamma_scale(k, mu):
    """k! / mu**(k+1), may overflow to inf."""
    if k <= _EXACT_FACTORIAL_MAX:
        return math.factorial(k) / mu ** (k + 1)
    log_scale = math.lgamma(k + 1.0) - (k + 1) * math.log(mu)
    return math.exp(log_scale) if log_scale < 709.0 else math.inf


def f_k_base(lam: float, k: int, mu: float) -> DiagValue:
    """F_k = int_0^inf x^k e^(-mu x) / (1 + lam x) dx.

    Returns ``(value, diag)``.  ``diag.method_used`` reports whether the
    closed form survived the cancellation check.
    """
    h, diag = reciprocal_moment(lam, k, mu)
    return DiagValue(h * _gamma_scale(k, mu), diag)


def f_log_moment(lam: float, k: int, mu: float) -> DiagValue:
    """F(lam, k, mu) = int_0^inf ln(1 + lam x) e^(-mu x) x^k dx.

    Upward integration-by-parts recursion from F(lam, 0, mu), each step
    consuming one :func:`f_k_base` value; the running sum is compensated.
    The diagnostic is the worst one among the F_k evaluations.
    """
    lam, k, mu = _check_moment_args(lam, k, mu)
    s = mu / lam
    parts = []
    diags = []
    for j in range(k + 1):
        h, d = reciprocal_moment(lam, j, mu)
        parts.append(h)
        diags.append(d)
    g = math.fsum(parts) / s
    return DiagValue(g * _gamma_scale(k, mu), worst_diag(*diags))


def reciprocal_moment_sequence(lam: float, n_max: int, mu: float) -> tuple[np.ndarray, EvalDiag]:
    """H_k = E[1/(1+lam X_k)], X_k ~ Gamma(k+1, mu), for k = 0..n_max.

    Uses the F_k recursion ``H_k = (s/k) (1 - H_{k-1})`` run in its
    stable direction: upward for k > s, downward for k < s, anchored at
    k0 = floor(s) by a single :func:`reciprocal_moment` evaluation.
    Error amplification is at most one per step either way.
    """
    lam, n_max, mu = _check_moment_args(lam, n_max, mu)
    s = mu / lam
    k0 = min(n_max, int(math.floor(s)))
    anchor, diag = reciprocal_moment(lam, k0, mu)
    h = np.empty(n_max + 1)
    h[k0] = anchor
    for k in range(k0 + 1, n_max + 1):
        h[k] = (s / k) * (1.0 - h[k - 1])
    for k in range(k0, 0, -1):
        h[k - 1] = 1.0 - (k / s) * h[k]
    return h, diag


def log_moment_sequence(lam: float, n_max: int, mu: float) -> tuple[np.ndarray, EvalDiag]:
    """G_k = E[ln(1 + lam X_k)], X_k ~ Gamma(k+1, mu), for k = 0..n_max.

    This is F(lam, k, mu) * mu**(k+1) / k!.  The recursion
    ``G_k = G_{k-1} + H_k / s`` is accumulated with Neumaier summation.
    """
    h, diag = reciprocal_moment_sequence(lam, n_max, mu)
    s = float(mu) / float(lam)
    g = np.empty_like(h)
    total = 0.0
    comp = 0.0
    for k, v in enumerate(h.tolist()):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        g[k] = total + comp
    return g / s, diag
