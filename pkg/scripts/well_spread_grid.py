"""Estimate the probability that m random (d1+1)-subsets of {0..n} are well spread."""
import argparse

from hdxlab import faces as fc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="18,24,32,64,256,1024")
    ap.add_argument("--d1", type=int, default=2)
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    for n in (int(x) for x in a.n.split(",")):
        e = fc.well_spread_probability(n, a.d1, a.m, a.trials, a.seed)
        print(f"n={n:6d}  p={e.value:.4f}  95% CI [{e.lo:.4f}, {e.hi:.4f}]")


if __name__ == "__main__":
    main()
