"""Grow a tower of connected 3-covers from the 7-vertex torus and check each step."""
import argparse

from hdxlab import complex as cx
from hdxlab import covers as cv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, default=3)
    ap.add_argument("--target", type=int, default=180)
    ap.add_argument("--csv")
    a = ap.parse_args()

    def step(i, Y, cov):
        Q, qmap = cv.deck_quotient_check(Y, cv.deck_group(cov), min_dist=3)
        print(f"step {i}: {len(Y.vertices)} vertices, deck quotient recovers base: "
              f"{cv.quotient_matches_base(cov, Q, qmap)}")

    log, _ = cv.tower(cx.torus7(), a.ell, a.target, on_step=step)
    for s in log.steps:
        print(f"  |X(0)| = {s.vertices:4d}  dim Z1 = {s.dim_Z:3d}  dim B1 = {s.dim_B:3d}")
    print("status", log.status)
    if a.csv:
        log.write_csv(a.csv)


if __name__ == "__main__":
    main()
