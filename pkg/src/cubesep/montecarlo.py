"""Monte Carlo separations in the unit cube and goodness-of-fit against the CDF.

Random numbers come from numpy's PCG64 bit generator.  Sequential mode seeds
``PCG64(seed)`` and draws a ``(n, 6)`` block of doubles in [0, 1), so each
pair consumes A.x, A.y, A.z, B.x, B.y, B.z in that order.  Partitioned mode
gives partition ``i`` the stream ``PCG64(SeedSequence(seed, spawn_key=(i,)))``
and the first ``n % parts`` partitions one extra sample each; the result is
the concatenation in partition order, so it depends only on
``(seed, partitions)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .analytic import SQRT3, DomainError, cdf_many

GENERATOR = "numpy.random.PCG64"
KS_COEFF_1PCT = 1.628
CHUNK = 1 << 20


class DataError(ValueError):
    """Sample data that cannot have come from the cube sampler."""


@dataclass(frozen=True)
class SimConfig:
    sample_count: int = 150_000
    bin_count: int = 100
    seed: int = 1

    def __post_init__(self):
        if int(self.sample_count) != self.sample_count or self.sample_count < 1:
            raise ValueError(f"sample_count must be a positive integer, got {self.sample_count!r}")
        if int(self.bin_count) != self.bin_count or self.bin_count < 2:
            raise ValueError(f"bin_count must be an integer >= 2, got {self.bin_count!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def widths(self):
        return np.diff(self.edges)

    def normalized_heights(self):
        """Counts as a density in ``lam`` (comparable to ``a*P``)."""
        if self.total == 0:
            return np.zeros_like(self.widths)
        return self.counts / (self.total * self.widths)

    def expected_masses(self):
        return np.diff(cdf_many(self.edges))


@dataclass
class GofReport:
    ks_statistic: float
    ks_threshold_1pct: float
    chi_square: float
    chi_square_dof: int
    sample_count: int
    seed: int | None
    pass_: bool

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("pass_")
        return d


def _draw(rng: np.random.Generator, n: int) -> np.ndarray:
    out = np.empty(n)
    for start in range(0, n, CHUNK):
        m = min(CHUNK, n - start)
        xyz = rng.random((m, 6))
        d = xyz[:, :3] - xyz[:, 3:]
        out[start:start + m] = np.sqrt(np.einsum("ij,ij->i", d, d))
    return out


def sample_separations(config: SimConfig, partitions: int | None = None) -> np.ndarray:
    """Distances between ``config.sample_count`` random pairs in the unit cube."""
    if partitions is None:
        return _draw(np.random.Generator(np.random.PCG64(config.seed)), config.sample_count)
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    base, extra = divmod(config.sample_count, partitions)
    sizes = [base + (i < extra) for i in range(partitions)]
    rngs = [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed, spawn_key=(i,))))
        for i in range(partitions)
    ]
    with ThreadPoolExecutor(max_workers=partitions) as pool:
        parts = list(pool.map(_draw, rngs, sizes))
    return np.concatenate(parts)


def build_histogram(samples, bin_count: int = 100) -> Histogram:
    """Equal-width bins over [0, sqrt(3)]; the last bin is closed on the right."""
    samples = np.asarray(samples, dtype=float)
    if bin_count < 2:
        raise ValueError("bin_count must be >= 2")
    if samples.size and (np.any(~(samples >= 0.0)) or np.any(samples > SQRT3)):
        raise DataError("samples outside [0, sqrt(3)]")
    counts, edges = np.histogram(samples, bins=bin_count, range=(0.0, SQRT3))
    edges[0], edges[-1] = 0.0, SQRT3
    return Histogram(edges=edges, counts=counts.astype(np.int64), total=int(samples.size))


def _merge_sparse(observed, expected, minimum=5.0):
    """Pool bins from each end inwards until every expected count is >= ``minimum``."""
    obs = list(observed)
    exp = list(expected)
    while len(exp) > 1 and exp[-1] < minimum:
        e, o = exp.pop(), obs.pop()
        exp[-1] += e
        obs[-1] += o
    # the density vanishes like lam**2 at the origin too
    while len(exp) > 1 and exp[0] < minimum:
        e, o = exp.pop(0), obs.pop(0)
        exp[0] += e
        obs[0] += o
    return np.array(obs, dtype=float), np.array(exp, dtype=float)


def chi_square(hist: Histogram) -> tuple[float, int]:
    obs, exp = _merge_sparse(hist.counts, hist.total * hist.expected_masses())
    return float(np.sum((obs - exp) ** 2 / exp)), max(len(exp) - 1, 0)


def ks_statistic(sorted_samples: np.ndarray) -> float:
    n = sorted_samples.size
    f = cdf_many(sorted_samples)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_test(samples, bin_count: int = 100, seed: int | None = None) -> GofReport:
    """Kolmogorov-Smirnov and chi-square comparison with the cube law."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise DomainError("ks_test needs at least one sample")
    if np.any(np.diff(x) < 0):
        x = np.sort(x)
    if x[0] < 0.0 or x[-1] > SQRT3:
        raise DomainError("samples outside [0, sqrt(3)]")
    n = x.size
    d = ks_statistic(x)
    threshold = KS_COEFF_1PCT / math.sqrt(n)
    chi2, dof = chi_square(build_histogram(x, bin_count))
    return GofReport(
        ks_statistic=d,
        ks_threshold_1pct=threshold,
        chi_square=chi2,
        chi_square_dof=dof,
        sample_count=n,
        seed=seed,
        pass_=bool(d < threshold),
    )


def simulate(config: SimConfig, partitions: int | None = None) -> tuple[Histogram, GofReport]:
    samples = np.sort(sample_separations(config, partitions))
    return build_histogram(samples, config.bin_count), ks_test(samples, config.bin_count, config.seed)
