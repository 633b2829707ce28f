"""Closed-form density of the distance between two random points in a cube.

Everything is computed for the unit cube in the scaled length ``lam = l/a``,
where the density ``a*P(l)`` is a function of ``lam`` alone.  Entry points
that take a side length ``a`` apply ``P_a(l) = P_1(l/a) / a`` at the
boundary.

The density has three closed forms, one per regime of ``lam``:

* Near, ``0 <= lam <= 1``
* Mid, ``1 < lam <= sqrt(2)``
* Far, ``sqrt(2) < lam <= sqrt(3)``

Regime boundaries belong to the lower branch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import integrate, integrate_panels

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
BREAKS = (0.0, 1.0, SQRT2, SQRT3)

CDF_TOL = 1e-10
QUANTILE_XTOL = 1e-12
RADICAND_DUST = 1e-14
# below this distance from sqrt(3) the far closed form is replaced by its series
TAIL_SWITCH = 0.05

# a*P as a power series in eps = sqrt(3) - lam; see scripts/derive_tail_series.py
_TAIL_COEFFS = (
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    1.8,
    1.0392304845413263761,
    1.4571428571428571429,
    2.2083647796503185492,
    3.6071428571428571429,
    6.3116756213908730899,
    11.737878787878787879,
    23.006752147355234868,
    47.152097902097902098,
    100.34874705297386117,
    220.47760989010989011,
    497.73422716951320561,
    1150.1220194327731092,
    2711.7840998360835107,
    6507.7860068369453044,
    15862.668833071614239,
    39204.401535087719298,
    98102.47506572965641,
    248243.69323607778091,
    634560.44890090652086,
    1637081.0209191267292,
    4259189.9382643473649,
    11167178.075299479167,
    29488670.161928985582,
    78384139.494481359009,
)


class DomainError(ValueError):
    """Argument outside the domain of the requested quantity."""


class ConsistencyError(ArithmeticError):
    """A closed form produced a value it never should (e.g. a negative density)."""


class Regime(enum.Enum):
    NEAR = "near"
    MID = "mid"
    FAR = "far"


@dataclass(frozen=True)
class TailExpansion:
    """Leading behaviour ``coefficient * (sqrt(3) - lam)**exponent`` at the far end."""

    coefficient: float = 9 / 5
    exponent: int = 5

    def __post_init__(self):
        if not self.coefficient > 0 or self.exponent < 1:
            raise ValueError("tail expansion needs coefficient > 0 and exponent >= 1")

    def __call__(self, lam):
        return self.coefficient * (SQRT3 - np.asarray(lam, dtype=float)) ** self.exponent


TAIL = TailExpansion()


def _check_lambda(lam):
    arr = np.asarray(lam, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > SQRT3):
        raise DomainError(f"scaled length must lie in [0, sqrt(3)], got {lam!r}")
    return arr


def _scaled(l, a):
    if not a > 0:
        raise DomainError(f"side length must be positive, got {a!r}")
    return np.asarray(l, dtype=float) / a


def _sqrt_radicand(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(x < -RADICAND_DUST):
        raise ConsistencyError(f"negative radicand in {what}: min {x.min()!r}")
    return np.sqrt(np.maximum(x, 0.0))


def classify(lam: float) -> Regime:
    lam = float(_check_lambda(lam))
    if lam <= 1.0:
        return Regime.NEAR
    if lam <= SQRT2:
        return Regime.MID
    return Regime.FAR


def pdf_near(lam):
    """Near-branch closed form, valid for ``0 <= lam <= 1``."""
    lam = np.asarray(lam, dtype=float)
    return lam**2 * (4 * np.pi - 6 * np.pi * lam + 8 * lam**2 - lam**3)


def pdf_mid(lam):
    """Mid-branch closed form, valid for ``1 <= lam <= sqrt(2)``.

    ``arcsec(lam)`` is evaluated as ``arctan(sqrt(lam**2 - 1))``, which keeps
    full relative accuracy as ``lam -> 1``.
    """
    lam = np.asarray(lam, dtype=float)
    s = lam * lam
    root = _sqrt_radicand(s - 1.0, "mid branch")
    return lam * (
        2 * s * s
        + 6 * s
        - 1
        - 2 * np.pi * (4 * lam - 3)
        - 8 * (2 * s + 1) * root
        + 24 * s * np.arctan(root)
    )


def pdf_far(lam):
    """Far-branch closed form, valid for ``sqrt(2) <= lam <= sqrt(3)``.

    The two arcsecants are rewritten through ``r = sqrt(lam**2 - 2)``:
    ``arcsec(lam**2 - 1) = arctan(lam*r)`` and
    ``arcsec(sqrt(lam**2 - 1)) = arctan(r)``.  The expression still cancels
    catastrophically near ``sqrt(3)``, where the value is ~``1.8*eps**5``.
    :func:`pdf` uses :func:`pdf_tail_series` there instead.
    """
    lam = np.asarray(lam, dtype=float)
    s = lam * lam
    root = _sqrt_radicand(s - 2.0, "far branch")
    return lam * (
        8 * (s + 1) * root
        - (s + 1) * (s + 5)
        + 2 * np.pi * (3 * s - 4 * lam + 3)
        + 24 * lam * np.arctan(lam * root)
        - 24 * (s + 1) * np.arctan(root)
    )


def pdf_tail_series(lam):
    """Far branch as a power series in ``sqrt(3) - lam`` (accurate for eps <= 0.05)."""
    eps = SQRT3 - np.asarray(lam, dtype=float)
    # Horner from the highest order down; the first five terms are zero
    acc = np.zeros_like(eps)
    for c in _TAIL_COEFFS[:4:-1]:
        acc = acc * eps + c
    return acc * eps**5


def _pdf_unit(lam: np.ndarray) -> np.ndarray:
    out = np.empty_like(lam)
    near = lam <= 1.0
    mid = (lam > 1.0) & (lam <= SQRT2)
    far = lam > SQRT2
    tail = far & (SQRT3 - lam < TAIL_SWITCH)
    body = far & ~tail
    out[near] = pdf_near(lam[near])
    out[mid] = pdf_mid(lam[mid])
    out[body] = pdf_far(lam[body])
    out[tail] = pdf_tail_series(lam[tail])
    if np.any(out < 0.0):
        bad = lam[out < 0.0]
        raise ConsistencyError(f"negative density at lam={bad[:5]!r}")
    return out


def pdf(l, a: float = 1.0):
    """Density of the separation ``l`` for a cube of side ``a``.

    Accepts a scalar or an array.  With the default ``a=1`` this is the
    dimensionless ``a*P(l)`` as a function of ``lam = l/a``.
    """
    lam = _check_lambda(_scaled(l, a))
    out = _pdf_unit(np.atleast_1d(lam)) / a
    return float(out[0]) if lam.ndim == 0 else out.reshape(lam.shape)


@lru_cache(maxsize=None)
def _regime_integral(k: int, n: int) -> float:
    # n-th moment of the unit density over the k-th regime panel
    return integrate(lambda t: t**n * _pdf_unit(t), BREAKS[k], BREAKS[k + 1], tol=CDF_TOL / 3)


def _cdf_unit(lam: float) -> float:
    total = 0.0
    for k in range(3):
        lo, hi = BREAKS[k], BREAKS[k + 1]
        if lam >= hi:
            total += _regime_integral(k, 0)
        else:
            if lam > lo:
                total += integrate(_pdf_unit, lo, lam, tol=CDF_TOL / 3)
            break
    return total


def cdf(l, a: float = 1.0):
    """Probability that the separation is at most ``l``.

    Scalars go through panel-split adaptive quadrature; arrays are handled
    by :func:`cdf_many`.
    """
    lam = _check_lambda(_scaled(l, a))
    if lam.ndim:
        return cdf_many(lam)
    return _cdf_unit(float(lam))


def cdf_many(lam, tol: float = CDF_TOL) -> np.ndarray:
    """CDF at many scaled lengths at once (unit cube).

    Integrates the density between consecutive sorted arguments, with the
    regime boundaries inserted as extra edges, and accumulates.
    """
    lam = _check_lambda(lam)
    flat = lam.ravel()
    edges = np.union1d(flat, BREAKS)
    pieces = integrate_panels(_pdf_unit, edges, tol=tol, limit=max(20000, 4 * edges.size))
    acc = np.concatenate([[0.0], np.cumsum(pieces)])
    return acc[np.searchsorted(edges, flat)].reshape(lam.shape)


def quantile(p, a: float = 1.0) -> float:
    """Inverse CDF: the separation below which a fraction ``p`` of pairs lie."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {p!r}")
    if not a > 0:
        raise DomainError(f"side length must be positive, got {a!r}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return SQRT3 * a

    # bracket within one regime so the CDF is smooth on the search interval
    masses = np.cumsum([_regime_integral(k, 0) for k in range(3)])
    k = int(np.searchsorted(masses, p))
    k = min(k, 2)
    lo, hi = BREAKS[k], BREAKS[k + 1]
    base = masses[k - 1] if k else 0.0
    target = p - base

    # Newton steps safeguarded by bisection; the derivative of the CDF is the pdf
    x = 0.5 * (lo + hi)
    for _ in range(200):
        g = integrate(_pdf_unit, BREAKS[k], x, tol=CDF_TOL / 3) - target
        if g == 0.0:
            break
        if g > 0:
            hi = x
        else:
            lo = x
        d = float(_pdf_unit(np.array([x]))[0])
        step = x - g / d if d > 0 else math.nan
        if not lo <= step <= hi:
            step = 0.5 * (lo + hi)
        if abs(step - x) < QUANTILE_XTOL:
            x = step
            break
        x = step
    return x * a


def moment(n: int, a: float = 1.0) -> float:
    """``E[l**n]`` for a cube of side ``a``."""
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= 8):
        raise DomainError(f"moment order must be an integer in [0, 8], got {n!r}")
    if not a > 0:
        raise DomainError(f"side length must be positive, got {a!r}")
    return a**n * sum(_regime_integral(k, int(n)) for k in range(3))


def regime_masses() -> tuple[float, float, float]:
    """Probabilities of the Near, Mid and Far regimes."""
    c1 = _cdf_unit(1.0)
    c2 = _cdf_unit(SQRT2)
    return c1, c2 - c1, 1.0 - c2


def tail_check(epsilon: float) -> tuple[float, float]:
    """Fit the fifth-power tail at ``lam = sqrt(3) - epsilon``.

    Returns ``(pdf / epsilon**5, relative deviation from 9/5)``.
    """
    if not 0.0 < epsilon <= 0.05:
        raise DomainError(f"epsilon must lie in (0, 0.05], got {epsilon!r}")
    fitted = pdf(SQRT3 - epsilon) / epsilon**TAIL.exponent
    return fitted, abs(fitted - TAIL.coefficient) / TAIL.coefficient


def derivative_probe(lam: float, order: int, h: float) -> tuple[float, float]:
    """One-sided finite-difference derivatives of the pdf at ``lam``.

    Returns ``(left, right)``: the left estimate only samples ``[lam - 3h,
    lam]`` and the right one ``[lam, lam + 3h]``, so each sees a single
    branch when ``lam`` is a regime boundary.  Both stencils are second-order
    accurate.
    """
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order!r}")
    if not 1e-6 <= h <= 1e-2:
        raise DomainError(f"step must lie in [1e-6, 1e-2], got {h!r}")
    lam = float(lam)
    if lam - 3 * h < 0.0 or lam + 3 * h > SQRT3:
        raise DomainError(f"stencil around {lam!r} with h={h!r} leaves [0, sqrt(3)]")

    offsets = np.arange(4) * h
    left = _pdf_unit(lam - offsets)
    right = _pdf_unit(lam + offsets)
    if order == 1:
        w = np.array([3.0, -4.0, 1.0, 0.0]) / (2 * h)
        return float(w @ left), float(-(w @ right))
    w = np.array([2.0, -5.0, 4.0, -1.0]) / h**2
    return float(w @ left), float(w @ right)
