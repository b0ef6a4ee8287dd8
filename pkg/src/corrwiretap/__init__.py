"""Secrecy capacity and secrecy outage of correlated Rayleigh wiretap channels.

The closed-form k-series (:mod:`corrwiretap.closedform`) is the primary
engine.  :mod:`corrwiretap.oracle` (2-D quadrature) and
:mod:`corrwiretap.montecarlo` (seeded simulation) evaluate the same
quantities independently.
"""

from .channel import (
    RHO_MAX,
    ChannelParams,
    SnrPair,
    instantaneous_secrecy_capacity,
    joint_pdf_bessel,
    joint_pdf_series,
    series_coefficient,
)
from .closedform import (
    CapacityResult,
    OutageResult,
    SeriesControl,
    average_secrecy_capacity,
    outage_probability,
    r1_term,
    r2_term,
)
from .errors import ConvergenceFailure, DomainError, NumericalInconsistency, QuadratureNonconvergence
from .montecarlo import McEstimate, estimate_capacity, estimate_outage, empirical_cdf, sample_pair
from .oracle import QuadratureSpec, capacity_by_quadrature, outage_by_quadrature

__version__ = "0.1.0"

__all__ = [
    "RHO_MAX",
    "ChannelParams",
    "SnrPair",
    "instantaneous_secrecy_capacity",
    "joint_pdf_bessel",
    "joint_pdf_series",
    "series_coefficient",
    "CapacityResult",
    "OutageResult",
    "SeriesControl",
    "average_secrecy_capacity",
    "outage_probability",
    "r1_term",
    "r2_term",
    "ConvergenceFailure",
    "DomainError",
    "NumericalInconsistency",
    "QuadratureNonconvergence",
    "McEstimate",
    "estimate_capacity",
    "estimate_outage",
    "empirical_cdf",
    "sample_pair",
    "QuadratureSpec",
    "capacity_by_quadrature",
    "outage_by_quadrature",
]
