"""Density of the separation by direct angular integration.

Put one point at the origin and describe the other by its distance ``lam``
and direction ``(theta, phi)``, with ``theta`` measured up from the z = 0
plane and both angles in the first octant.  The second point fits in the
cube for a ``lx * ly * lz`` box of starting positions, so the density is

    8 * lam**2 * integral of lx*ly*lz*cos(theta) dtheta dphi

over the directions with all three box sides positive.  This module
integrates that numerically (inner over ``phi``, outer over ``theta``) with
region bounds tailored to each regime.  It never touches the closed forms
in :mod:`cubesep.analytic` and exists to check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytic import SQRT2, SQRT3, DomainError, Regime, classify
from .quadrature import QuadratureError, integrate

HALF_PI = 0.5 * math.pi
K_UNIT = 8.0
DEFAULT_TOL = 1e-9
BULK_TOL = 1e-7


class DegenerateRegionError(DomainError):
    """The integration region has zero measure (``lam`` = 0 or sqrt(3))."""


@dataclass(frozen=True)
class AngularPoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= HALF_PI and 0.0 <= self.phi <= HALF_PI):
            raise DomainError(f"angles must lie in [0, pi/2]: {self!r}")


@dataclass(frozen=True)
class BoxSides:
    lx: float
    ly: float
    lz: float

    @property
    def inside(self) -> bool:
        return self.lx > 0 and self.ly > 0 and self.lz > 0


@dataclass(frozen=True)
class RegionSpec:
    """``theta`` in ``[theta_lo, theta_hi]`` and ``phi`` in ``[phi_lo(theta), phi_hi(theta)]``."""

    theta_lo: float
    theta_hi: float
    phi_lo: Callable[[float], float]
    phi_hi: Callable[[float], float]

    def contains(self, theta: float, phi: float, slack: float = 0.0) -> bool:
        if not self.theta_lo - slack <= theta <= self.theta_hi + slack:
            return False
        return self.phi_lo(theta) - slack <= phi <= self.phi_hi(theta) + slack


def box_sides(lam: float, point: AngularPoint) -> BoxSides:
    c = math.cos(point.theta)
    return BoxSides(
        1.0 - lam * c * math.cos(point.phi),
        1.0 - lam * c * math.sin(point.phi),
        1.0 - lam * math.sin(point.theta),
    )


def _integrand(lam, theta, phi):
    ct = np.cos(theta)
    lx = 1.0 - lam * ct * np.cos(phi)
    ly = 1.0 - lam * ct * np.sin(phi)
    lz = 1.0 - lam * np.sin(theta)
    inside = (lx > 0) & (ly > 0) & (lz > 0)
    return np.where(inside, K_UNIT * lx * ly * lz * lam * lam * ct, 0.0)


def integrand(lam: float, point: AngularPoint) -> float:
    """Joint density in ``(lam, theta, phi)`` for the unit cube; zero outside the region."""
    if not 0.0 <= lam <= SQRT3:
        raise DomainError(f"scaled length must lie in [0, sqrt(3)], got {lam!r}")
    return float(_integrand(lam, point.theta, point.phi))


def _phi1(lam):
    # face x = 1: cos(phi) cos(theta) = 1/lam
    return lambda theta: math.acos(min(1.0, 1.0 / (lam * math.cos(theta))))


def _phi2(lam):
    # face y = 1: sin(phi) cos(theta) = 1/lam
    return lambda theta: math.asin(min(1.0, 1.0 / (lam * math.cos(theta))))


def _const(x):
    return lambda theta: x


def regions_for(lam: float) -> list[RegionSpec]:
    """Integration regions covering every direction with a positive box."""
    if lam <= 0.0 or lam >= SQRT3:
        raise DegenerateRegionError(f"no integration region of positive measure at lam={lam!r}")
    regime = classify(lam)
    if regime is Regime.NEAR:
        return [RegionSpec(0.0, HALF_PI, _const(0.0), _const(HALF_PI))]
    if regime is Regime.MID:
        split = math.acos(1.0 / lam)
        top = math.asin(min(1.0 / lam, 1.0))
        return [
            RegionSpec(split, top, _const(0.0), _const(HALF_PI)),
            RegionSpec(0.0, split, _phi1(lam), _phi2(lam)),
        ]
    return [RegionSpec(math.acos(SQRT2 / lam), math.asin(1.0 / lam), _phi1(lam), _phi2(lam))]


def pdf_by_quadrature(lam: float, tol: float = DEFAULT_TOL) -> float:
    """``a*P(l)`` at ``lam = l/a`` from nested adaptive quadrature.

    Raises :class:`QuadratureError` (with the best estimate attached) when
    the panel budget runs out before ``tol`` is met.
    """
    if not 1e-12 <= tol <= 1e-4:
        raise DomainError(f"tol must lie in [1e-12, 1e-4], got {tol!r}")
    regions = regions_for(lam)
    # inner errors are integrated over at most pi/2 of theta
    inner_tol = tol / (4.0 * len(regions))
    outer_tol = tol / (2.0 * len(regions))

    def inner(theta):
        out = np.empty_like(theta)
        for i, th in enumerate(theta):
            lo, hi = region.phi_lo(th), region.phi_hi(th)
            out[i] = integrate(lambda phi: _integrand(lam, th, phi), lo, hi, tol=inner_tol)
        return out

    total = 0.0
    for region in regions:
        try:
            total += integrate(inner, region.theta_lo, region.theta_hi, tol=outer_tol)
        except QuadratureError as exc:
            raise QuadratureError(
                f"oracle quadrature at lam={lam!r} did not converge",
                total + exc.estimate, exc.error) from exc
    return total
