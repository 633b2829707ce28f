"""KS pass rate of the cube sampler over many seeds.

At the 1% level roughly one seed in a hundred should fail; a much higher
rate points at the sampler or the CDF.
"""

import argparse

import numpy as np

from cubesep.montecarlo import SimConfig, simulate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=200)
    parser.add_argument("--first-seed", type=int, default=1000)
    parser.add_argument("--samples", type=int, default=150_000)
    args = parser.parse_args()

    stats = []
    failed = []
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        _, report = simulate(SimConfig(args.samples, 100, seed))
        stats.append(report.ks_statistic / report.ks_threshold_1pct)
        if not report.pass_:
            failed.append(seed)
    stats = np.array(stats)
    print(f"{len(failed)}/{args.seeds} seeds fail at the 1% level "
          f"({len(failed) / args.seeds:.1%}); failing seeds: {failed}")
    print(f"D / threshold: median {np.median(stats):.3f}, max {stats.max():.3f}")


if __name__ == "__main__":
    main()
