"""Distance between two uniformly random points in a cube."""

from .analytic import (
    ConsistencyError,
    DomainError,
    Regime,
    cdf,
    classify,
    moment,
    pdf,
    quantile,
    regime_masses,
)
from .quadrature import QuadratureError

__all__ = [
    "ConsistencyError",
    "DomainError",
    "QuadratureError",
    "Regime",
    "cdf",
    "classify",
    "moment",
    "pdf",
    "quantile",
    "regime_masses",
]
