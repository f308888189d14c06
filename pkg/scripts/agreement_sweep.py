"""Agree and explained fraction along a planted/iid mixture on a simplex."""
import argparse

import numpy as np

from hdxlab import agreement as ag
from hdxlab import complex as cx


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=60, help="simplex on n+1 vertices")
    ap.add_argument("--k", type=int, default=15)
    ap.add_argument("--test", choices=["V", "Z"], default="V")
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", default="0,0.25,0.5,0.75,1")
    ap.add_argument("--csv")
    a = ap.parse_args()
    X = cx.complete(a.n)
    D = ag.TestDistribution.v_test(a.k) if a.test == "V" else ag.TestDistribution.z_test(a.k)
    G = {v: v % a.q for v in X.vertices}
    grid = [float(x) for x in a.grid.split(",")]
    fam = ag.mixture_family(X, G, a.q, 0.0, a.seed)
    rows = []
    for lam in grid:
        name, F = fam(lam)
        r = ag.decode_global(X, F, D, 1 / np.sqrt(a.k), a.trials, a.seed, votes=3000)
        rows.append(ag.SweepRow(name, lam, r.agree.value, r.agree.lo, r.agree.hi, r.explained))
        print(f"lambda={lam:.2f}  Agree={r.agree.value:.5f} [{r.agree.lo:.5f},{r.agree.hi:.5f}]  "
              f"explained={r.explained:.4f}")
    if a.csv:
        ag.write_sweep(rows, a.csv)


if __name__ == "__main__":
    main()
