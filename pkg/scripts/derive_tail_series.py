"""Print Taylor coefficients of a*P(l) in powers of eps = sqrt(3) - l/a.

The far-branch closed form loses all significant digits to cancellation as
l/a -> sqrt(3), so ``cubesep.analytic`` switches to this expansion there.
The coefficients are computed here at 80 digits with mpmath and pasted into
``_TAIL_COEFFS``.  Rerun after touching the far-branch formula.
"""

import argparse

import mpmath as mp


def far_branch(eps):
    lam = mp.sqrt(3) - eps
    s = lam * lam
    asec = lambda x: mp.acos(1 / x)
    return lam * (
        8 * (s + 1) * mp.sqrt(s - 2)
        - (s + 1) * (s + 5)
        + 2 * mp.pi * (3 * s - 4 * lam + 3)
        + 24 * lam * asec(s - 1)
        - 24 * (s + 1) * asec(mp.sqrt(s - 1))
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--terms", type=int, default=30)
    parser.add_argument("--dps", type=int, default=80)
    args = parser.parse_args()

    mp.mp.dps = args.dps
    coeffs = mp.taylor(far_branch, mp.mpf(0), args.terms - 1, direction=1)
    print("_TAIL_COEFFS = (")
    for c in coeffs:
        # orders 0..4 vanish identically; print exact zeros for them
        c = mp.mpf(0) if abs(c) < mp.mpf(10) ** (-args.dps // 2) else c
        print(f"    {mp.nstr(c, 20)},")
    print(")")


if __name__ == "__main__":
    main()
