"""Relative gain 1 - r_c / r_b over a grid of (alpha, M) for one (N, K),
showing that skewed capacities widen the gap."""

import argparse
from fractions import Fraction

from hetcache.analysis import rate_report
from hetcache.experiments import exp_profile, parse_grid


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=10)
    parser.add_argument("--K", type=int, default=20)
    parser.add_argument("--alphas", default="1/2:1:1/10")
    parser.add_argument("--Ms", default="1/2:4:1/2")
    args = parser.parse_args()
    print("alpha,M,r_c,r_b,gain")
    for alpha in parse_grid(args.alphas):
        for M in parse_grid(args.Ms):
            if M > args.N:
                continue
            r = rate_report(exp_profile(args.K, M, alpha), args.N)
            gain = 1 - r.r_c / r.r_b if r.r_b else Fraction(0)
            print(f"{float(alpha):.3g},{float(M):.3g},{float(r.r_c):.6f},{float(r.r_b):.6f},{float(gain):.4f}")


if __name__ == "__main__":
    main()
