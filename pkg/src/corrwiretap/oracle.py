"""Direct 2-D quadrature of the defining integrals.

Used as an independent check on :mod:`corrwiretap.closedform`.  It only
touches the Bessel form of the joint PDF and the per-realisation secrecy
capacity, never the k-series.

Integration runs in normalised coordinates ``u = alpha/lambda1``,
``v = beta/lambda2`` over the box ``[0, T]**2`` with ``T = tail_multiplier``
(the box ``[0, T lambda1] x [0, T lambda2]`` in SNR units).  Both marginals
are unit exponentials in these coordinates, so the probability mass outside
the box is at most ``2 exp(-T)``; this bound is used for the tail terms
instead of a pointwise bound on the density, which would be loose by a factor
``exp(T (1 - 1/(1 + sqrt(rho))))``.

The iterated scheme integrates the inner variable with adaptive
Gauss-Kronrod (QUADPACK, via :func:`scipy.integrate.quad`) between exact
region limits, so the kink along the region boundary never falls inside a
panel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .channel import ChannelParams
from .errors import DomainError, QuadratureNonconvergence
from .specfun import bessel_i0e

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "capacity_by_quadrature",
    "outage_by_quadrature",
    "mass_by_quadrature",
]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    tail_multiplier: float = 40.0
    limit: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise DomainError(f"abs_tol must be > 0, got {self.abs_tol!r}")
        if not self.tail_multiplier >= 20.0:
            raise DomainError(f"tail_multiplier must be >= 20, got {self.tail_multiplier!r}")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    tail_bound: float

    def __float__(self):
        return self.value


def _pdf_factory(rho):
    """Scalar joint density of (u, v); math-only for speed inside quad."""
    one_m = 1.0 - rho
    inv = 1.0 / one_m
    if rho == 0.0:
        return lambda u, v: math.exp(-u - v)
    c = 2.0 * math.sqrt(rho) * inv

    def pdf(u, v):
        z = c * math.sqrt(u * v)
        return bessel_i0e(z) * math.exp(z - (u + v) * inv) * inv

    return pdf


def _iterated(outer_fn, a, b, q, outer_points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                outer_fn, a, b, epsabs=q.abs_tol, epsrel=1e-12, limit=q.limit, points=outer_points
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureNonconvergence(str(exc)) from exc
    return val, err


def _inner(fn, lo, hi, q, peak=None):
    if hi <= lo:
        return 0.0
    pts = [peak] if peak is not None and lo < peak < hi else None
    val, _ = integrate.quad(fn, lo, hi, epsabs=0.1 * q.abs_tol, epsrel=1e-12, limit=q.limit, points=pts)
    return val


def _ridge(rho, u):
    # E[v | u] = rho u + 1 - rho; the conditional density concentrates there
    return rho * u + 1.0 - rho if rho > 0.0 and u > 1.0 else None


def capacity_by_quadrature(p: ChannelParams, q: QuadratureSpec | None = None) -> QuadratureResult:
    """E[max(0, ln(1+alpha) - ln(1+beta))] by iterated adaptive quadrature.

    Inner integral over beta on ``beta < alpha``, outer over alpha.
    """
    q = q or QuadratureSpec()
    T = q.tail_multiplier
    l1, l2, rho = p.lambda1, p.lambda2, p.rho
    pdf = _pdf_factory(rho)

    def outer(u):
        log_main = math.log1p(l1 * u)
        hi = min(l1 * u / l2, T)
        return _inner(lambda v: (log_main - math.log1p(l2 * v)) * pdf(u, v), 0.0, hi, q, _ridge(rho, u))

    val, err = _iterated(outer, 0.0, T, q)
    tail = (l1 * (T + 1.0) + math.log1p(l1 * T)) * math.exp(-T)
    return QuadratureResult(val, err, tail)


def outage_by_quadrature(p: ChannelParams, rate_R: float, q: QuadratureSpec | None = None) -> QuadratureResult:
    """P(alpha <= e^R (1 + beta) - 1) by iterated adaptive quadrature.

    For each alpha the inner beta-integral starts at the region boundary
    ``beta = (alpha + 1 - e^R) / e^R``.
    """
    q = q or QuadratureSpec()
    rate_R = float(rate_R)
    if not rate_R >= 0.0:
        raise DomainError(f"rate must be >= 0 nats, got {rate_R!r}")
    T = q.tail_multiplier
    l1, l2, rho = p.lambda1, p.lambda2, p.rho
    pdf = _pdf_factory(rho)
    g = math.exp(rate_R)
    shift = math.expm1(rate_R)

    def outer(u):
        lo = max(0.0, (l1 * u - shift) / (g * l2))
        return _inner(lambda v: pdf(u, v), lo, T, q, _ridge(rho, u))

    # the boundary leaves v = 0 at u = (e^R - 1) / lambda1
    kink = shift / l1
    pts = [kink] if 0.0 < kink < T else None
    val, err = _iterated(outer, 0.0, T, q, pts)
    return QuadratureResult(val, err, 2.0 * math.exp(-T))


def mass_by_quadrature(p: ChannelParams, q: QuadratureSpec | None = None, region: str = "box") -> QuadratureResult:
    """Probability mass of the joint PDF over the box or one half of it.

    ``region`` is ``"box"``, ``"alpha>beta"`` or ``"alpha<=beta"``.
    """
    q = q or QuadratureSpec()
    T = q.tail_multiplier
    l1, l2, rho = p.lambda1, p.lambda2, p.rho
    pdf = _pdf_factory(rho)
    if region == "box":
        limits = lambda u: (0.0, T)
    elif region == "alpha>beta":
        limits = lambda u: (0.0, min(l1 * u / l2, T))
    elif region == "alpha<=beta":
        limits = lambda u: (min(l1 * u / l2, T), T)
    else:
        raise ValueError(f"unknown region {region!r}")

    def outer(u):
        lo, hi = limits(u)
        return _inner(lambda v: pdf(u, v), lo, hi, q, _ridge(rho, u))

    val, err = _iterated(outer, 0.0, T, q)
    return QuadratureResult(val, err, 2.0 * math.exp(-T))
