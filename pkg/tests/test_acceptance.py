"""Exit criteria for the build; each test records one PASS/FAIL line."""

import math
import time

import numpy as np

from cubesep import analytic, montecarlo, oracle
from cubesep.analytic import SQRT2, SQRT3
from cubesep.quadrature import integrate_panels


def test_1_normalization(criterion):
    start = time.perf_counter()
    panels = integrate_panels(analytic.pdf, analytic.BREAKS, tol=1e-10)
    elapsed = time.perf_counter() - start
    err = abs(panels.sum() - 1.0)
    ok = err < 1e-8 and elapsed < 1.0
    criterion(1, "normalization", ok, f"|sum - 1| = {err:.2e}, {elapsed:.3f} s")
    assert ok


def test_2_oracle_equivalence(criterion):
    lams = np.concatenate([
        lo + (hi - lo) * (np.arange(100) + 0.5) / 100
        for lo, hi in [(0.0, 1.0), (1.0, SQRT2), (SQRT2, SQRT3)]
    ])
    start = time.perf_counter()
    quad = np.array([oracle.pdf_by_quadrature(float(x), 1e-9) for x in lams])
    elapsed = time.perf_counter() - start
    diff = np.abs(analytic.pdf(lams) - quad)
    ok = diff.max() < 1e-7 and elapsed < 120
    per_regime = ", ".join(f"{d.max():.1e}" for d in diff.reshape(3, 100))
    criterion(2, "oracle equivalence", ok,
              f"max diff per regime {per_regime} (limit 1e-7), {elapsed:.1f} s")
    assert ok


def test_3_smoothness(criterion):
    value_gaps = [abs(float(analytic.pdf_near(1.0) - analytic.pdf_mid(1.0))),
                  abs(float(analytic.pdf_mid(SQRT2) - analytic.pdf_far(SQRT2)))]
    ok = max(value_gaps) < 1e-9
    for lam in (1.0, SQRT2):
        for h in (1e-3, 1e-4, 1e-5):
            left, right = analytic.derivative_probe(lam, 1, h)
            ok &= abs(left - right) < 10 * h
    jumps = [np.subtract(*analytic.derivative_probe(1.0, 2, h)[::-1]) for h in (1e-3, 1e-4)]
    ok &= abs(jumps[0] - jumps[1]) < 0.05 * abs(jumps[1]) and min(map(abs, jumps)) > 1.0
    gaps = [abs(np.subtract(*analytic.derivative_probe(SQRT2, 2, h))) for h in (1e-3, 1e-4)]
    ok &= gaps[0] < 1e-2 and gaps[1] < 1e-3
    criterion(3, "smoothness", ok,
              f"P jump {max(value_gaps):.1e}; P'' jump at 1 = {jumps[1]:.3f}; "
              f"P'' gap at sqrt2 = {gaps[1]:.1e}")
    assert ok


def test_4_tail_law(criterion):
    c1, r1 = analytic.tail_check(0.01)
    c2, r2 = analytic.tail_check(0.001)
    ok = r1 < 0.02 and r2 < 0.002
    criterion(4, "tail law", ok, f"coef {c1:.5f} ({r1:.3%}) at 0.01, {c2:.5f} ({r2:.4%}) at 0.001")
    assert ok


def test_5_regime_masses(criterion):
    near, mid, far = analytic.regime_masses()
    exact_near = 43 / 30 - math.pi / 6
    ok = (abs(near - 0.91) <= 0.005 and abs(mid - 0.09) <= 0.005 and 0 < far < 1e-3
          and abs(near - exact_near) < 1e-8)
    criterion(5, "regime masses", ok,
              f"near {near:.8f} (exact {exact_near:.8f}), mid {mid:.8f}, far {far:.3e}")
    assert ok


def test_6_monte_carlo(criterion):
    start = time.perf_counter()
    _, report = montecarlo.simulate(montecarlo.SimConfig(150_000, 100, seed=1))
    failures = sum(
        not montecarlo.simulate(montecarlo.SimConfig(150_000, 100, seed=s))[1].pass_
        for s in range(100, 120)
    )
    uniform = np.random.Generator(np.random.PCG64(7)).random(150_000) * SQRT3
    control = montecarlo.ks_test(uniform)
    elapsed = time.perf_counter() - start
    ok = report.pass_ and failures <= 1 and not control.pass_ and elapsed < 10
    criterion(6, "Monte Carlo reproduction", ok,
              f"seed 1 D = {report.ks_statistic:.5f} < {report.ks_threshold_1pct:.5f}; "
              f"{failures}/20 seeds fail; uniform control D = {control.ks_statistic:.3f}; "
              f"{elapsed:.1f} s")
    assert ok


def test_7_moment_oracle(criterion):
    m2 = analytic.moment(2)
    x = montecarlo.sample_separations(montecarlo.SimConfig(1_000_000, seed=2024))
    sq = x * x
    z = (sq.mean() - 0.5) / (sq.std(ddof=1) / math.sqrt(sq.size))
    ok = abs(m2 - 0.5) < 1e-8 and abs(z) < 4
    criterion(7, "second moment", ok, f"|moment(2) - 1/2| = {abs(m2 - 0.5):.1e}; MC z = {z:.2f}")
    assert ok


def test_8_quantile_round_trip(criterion):
    ps = np.arange(1, 100) / 100
    err = max(abs(analytic.cdf(analytic.quantile(p)) - p) for p in ps)
    ok = err < 1e-8
    criterion(8, "quantile round trip", ok, f"max |cdf(quantile(p)) - p| = {err:.1e}")
    assert ok
