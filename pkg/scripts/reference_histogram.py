"""Regenerate the density curve and the 150,000-pair histogram as CSV files.

Writes ``curve.csv`` (lambda, a_pdf, cdf) and ``histogram.csv`` plus
``report.json`` into the output directory; plot them with any tool.
"""

import argparse
from pathlib import Path

from cubesep import cli
from cubesep.montecarlo import SimConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="reference_run")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--samples", type=int, default=150_000)
    parser.add_argument("--bins", type=int, default=100)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cli.cmd_table(cli.TableRequest("both", 500, 1.0, str(out / "curve.csv")))
    return cli.cmd_simulate(SimConfig(args.samples, args.bins, args.seed), str(out))


if __name__ == "__main__":
    raise SystemExit(main())
