"""Command-line entry point: ``cubesep {table,verify,simulate,masses}``.

Exit codes: 0 success, 1 failed check, 2 usage or config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic, montecarlo, oracle
from .analytic import SQRT2, SQRT3
from .quadrature import QuadratureError, integrate_panels

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

PAPER_MASSES = ("91%", "9%", "0.04%")


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass(frozen=True)
class TableRequest:
    quantity: str = "pdf"
    points: int = 200
    side_length: float = 1.0
    output_path: str | None = None

    def __post_init__(self):
        if self.quantity not in ("pdf", "cdf", "both"):
            raise ValueError(f"quantity must be pdf, cdf or both, got {self.quantity!r}")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if not self.side_length > 0:
            raise ValueError("side length must be positive")


def table_rows(request: TableRequest):
    """Header plus one row per grid point: ``lambda, a*P(l)`` and/or the CDF.

    Values go through the side-length-aware entry points at ``l = lam*a``;
    ``a*P`` and the CDF are dimensionless, so they are the same for any
    ``a`` up to rounding.
    """
    a = request.side_length
    lam = np.linspace(0.0, SQRT3, request.points)
    lam[-1] = SQRT3
    ls = np.minimum(lam * a, SQRT3 * a)
    header = ["lambda"]
    cols = [lam]
    if request.quantity in ("pdf", "both"):
        header.append("a_pdf")
        cols.append(a * analytic.pdf(ls, a))
    if request.quantity in ("cdf", "both"):
        header.append("cdf")
        cols.append(analytic.cdf(ls, a))
    yield header
    for row in zip(*cols):
        yield [fmt(v) for v in row]


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_table(request: TableRequest) -> int:
    try:
        fh, close = _open_out(request.output_path)
    except OSError as exc:
        print(f"error: cannot write {request.output_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        writer = csv.writer(fh, lineterminator="\n")
        for row in table_rows(request):
            writer.writerow(row)
    finally:
        if close:
            fh.close()
    return EXIT_OK


# -- verify ---------------------------------------------------------------

def _check_normalization(tol, grid_points):
    panels = integrate_panels(analytic.pdf, analytic.BREAKS, tol=tol)
    total = float(panels.sum())
    detail = "panels " + " + ".join(f"{p:.10f}" for p in panels) + f" = {total:.12f}"
    return abs(total - 1.0) < 1e-8, detail


def _grid(grid_points):
    per = [grid_points // 3 + (i < grid_points % 3) for i in range(3)]
    out = []
    for (lo, hi), n in zip(zip(analytic.BREAKS[:-1], analytic.BREAKS[1:]), per):
        out.extend(lo + (hi - lo) * (np.arange(n) + 0.5) / n)
    return np.array(out)


def _check_oracle(tol, grid_points):
    lams = _grid(grid_points)
    closed = analytic.pdf(lams)
    quad = np.array([oracle.pdf_by_quadrature(float(x), tol) for x in lams])
    diff = np.abs(closed - quad)
    worst = int(np.argmax(diff))
    limit = max(tol, 1e-7)
    return bool(diff.max() < limit), (
        f"{lams.size} points, max |closed - oracle| = {diff.max():.3e} at lam={lams[worst]:.6f}"
        f" (limit {limit:.0e})")


def _check_continuity(tol, grid_points):
    g1 = abs(float(analytic.pdf_near(1.0) - analytic.pdf_mid(1.0)))
    g2 = abs(float(analytic.pdf_mid(SQRT2) - analytic.pdf_far(SQRT2)))
    ok = g1 < 1e-9 and g2 < 1e-9
    hs = (1e-3, 1e-4, 1e-5)
    gaps = []
    for lam in (1.0, SQRT2):
        for h in hs:
            left, right = analytic.derivative_probe(lam, 1, h)
            gaps.append(abs(left - right))
            ok = ok and abs(left - right) < 10 * h
    return ok, (f"value gaps {g1:.1e}, {g2:.1e}; first-derivative gaps "
                + ", ".join(f"{g:.1e}" for g in gaps))


def _check_second_derivative(tol, grid_points):
    jumps = []
    for h in (1e-3, 1e-4):
        left, right = analytic.derivative_probe(1.0, 2, h)
        jumps.append(right - left)
    stable = abs(jumps[0] - jumps[1]) < 0.05 * abs(jumps[1])
    nonzero = min(abs(j) for j in jumps) > 1.0
    gaps = []
    for h in (1e-3, 1e-4):
        left, right = analytic.derivative_probe(SQRT2, 2, h)
        gaps.append((h, abs(left - right)))
    smooth = all(g < 10 * h for h, g in gaps)
    return stable and nonzero and smooth, (
        f"jump at 1: {jumps[0]:.4f}, {jumps[1]:.4f}; gap at sqrt(2): "
        + ", ".join(f"{g:.1e}" for _, g in gaps))


def _check_tail(tol, grid_points):
    c1, r1 = analytic.tail_check(0.01)
    c2, r2 = analytic.tail_check(0.001)
    return r1 < 0.02 and r2 < 0.002, (
        f"eps=0.01: {c1:.6f} ({r1:.2%}); eps=0.001: {c2:.6f} ({r2:.3%})")


def _check_masses(tol, grid_points):
    near, mid, far = analytic.regime_masses()
    exact = 43 / 30 - math.pi / 6
    ok = (abs(near - 0.91) <= 0.005 and abs(mid - 0.09) <= 0.005 and 0 < far < 1e-3
          and abs(near - exact) < 1e-8 and abs(near + mid + far - 1) < 1e-8)
    return ok, f"near={near:.8g} mid={mid:.8g} far={far:.8g} (exact near {exact:.8g})"


CHECKS = [
    ("normalization", _check_normalization),
    ("oracle", _check_oracle),
    ("continuity", _check_continuity),
    ("second-derivative", _check_second_derivative),
    ("tail", _check_tail),
    ("masses", _check_masses),
]


def cmd_verify(tol: float = oracle.DEFAULT_TOL, grid_points: int = 300, out=None) -> int:
    out = out or sys.stdout
    all_ok = True
    for name, check in CHECKS:
        try:
            ok, detail = check(tol, grid_points)
        except (QuadratureError, analytic.DomainError, ArithmeticError) as exc:
            ok, detail = False, f"error: {type(exc).__name__}: {exc}"
        all_ok = all_ok and ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", file=out)
    return EXIT_OK if all_ok else EXIT_FAIL


# -- simulate -------------------------------------------------------------

def write_histogram_csv(hist: montecarlo.Histogram, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["bin_lo", "bin_hi", "count", "normalized_height", "expected_height"])
    heights = hist.normalized_heights()
    expected = hist.expected_masses() / hist.widths
    for lo, hi, c, y, e in zip(hist.edges[:-1], hist.edges[1:], hist.counts, heights, expected):
        writer.writerow([fmt(lo), fmt(hi), int(c), fmt(y), fmt(e)])


def report_dict(report: montecarlo.GofReport, config: montecarlo.SimConfig, partitions=None):
    d = report.to_dict()
    d["generator"] = montecarlo.GENERATOR
    d["config"] = {
        "sample_count": config.sample_count,
        "bin_count": config.bin_count,
        "seed": config.seed,
        "partitions": partitions,
    }
    return d


def cmd_simulate(config: montecarlo.SimConfig, output_path: str = ".", partitions=None) -> int:
    hist, report = montecarlo.simulate(config, partitions)
    out = Path(output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "histogram.csv", "w", newline="") as fh:
            write_histogram_csv(hist, fh)
        with open(out / "report.json", "w") as fh:
            json.dump(report_dict(report, config, partitions), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"KS D = {report.ks_statistic:.6f} (1% threshold {report.ks_threshold_1pct:.6f}), "
          f"chi2 = {report.chi_square:.2f} on {report.chi_square_dof} dof, "
          f"{'PASS' if report.pass_ else 'FAIL'}")
    return EXIT_OK if report.pass_ else EXIT_FAIL


def cmd_masses(out=None) -> int:
    out = out or sys.stdout
    masses = analytic.regime_masses()
    labels = ("p_near (0 < l < a)", "p_mid (a < l < sqrt2 a)", "p_far (l > sqrt2 a)")
    for label, p, quoted in zip(labels, masses, PAPER_MASSES):
        print(f"{label:<24} {p:.8g}   quoted {quoted}", file=out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cubesep", description="Separation of two random points in a cube.")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="CSV table of a*P(l) and/or the CDF against l/a")
    t.add_argument("--quantity", choices=["pdf", "cdf", "both"], default="pdf")
    t.add_argument("--points", type=int, default=200)
    t.add_argument("--side", type=float, default=1.0)
    t.add_argument("--out", default=None, help="output file (default stdout)")

    v = sub.add_parser("verify", help="closed forms against the quadrature oracle and other checks")
    v.add_argument("--tol", type=float, default=oracle.DEFAULT_TOL)
    v.add_argument("--points", type=int, default=300, help="oracle comparison grid size")

    s = sub.add_parser("simulate", help="Monte Carlo histogram and goodness-of-fit report")
    s.add_argument("--samples", type=int, default=150_000)
    s.add_argument("--bins", type=int, default=100)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--partitions", type=int, default=None)
    s.add_argument("--out", default=".", help="directory for histogram.csv and report.json")

    sub.add_parser("masses", help="probability of each regime")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "table":
            request = TableRequest(args.quantity, args.points, args.side, args.out)
        elif args.command == "simulate":
            config = montecarlo.SimConfig(args.samples, args.bins, args.seed)
            if args.partitions is not None and args.partitions < 1:
                raise ValueError("partitions must be >= 1")
        elif args.command == "verify" and args.points < 1:
            raise ValueError("--points must be >= 1")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "table":
        return cmd_table(request)
    if args.command == "verify":
        return cmd_verify(args.tol, args.points)
    if args.command == "simulate":
        return cmd_simulate(config, args.out, args.partitions)
    return cmd_masses()


if __name__ == "__main__":
    sys.exit(main())
