"""Local functions pulled back from a 2-cover pass the test but have no global explanation."""
import argparse
import statistics

from hdxlab import agreement as ag
from hdxlab import cohomology as co
from hdxlab import complex as cx
from hdxlab import covers as cv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6, help="annulus with 2n vertices")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--eta", type=float, default=0.25)
    a = ap.parse_args()
    A = cx.annulus(a.n)
    cs = co.cocycle_space(A, 2)
    cov = cv.cover_from_cocycle(A, cs.witness, strict_clique=True)
    print(f"base: {len(A.vertices)} vertices, clique complex {cx.is_clique_complex(A)}; "
          f"cover connected {cx.is_connected(cov.total)}, verified {cv.verify_cover(cov).ok}")
    Gy = {y: 2 * cov.rho[y] + cov.total.label(y)[1] for y in cov.total.vertices}
    E = ag.TestDistribution.custom(1, 1)
    P = ag.decode_global(A, ag.plant(A, {v: 2 * v for v in A.vertices}, 0.0), E, a.eta)
    print(f"planted: Agree {P.agree.fraction}, explained {P.explained:.4f}")
    agrees, expl = [], []
    for seed in range(a.seeds):
        r = ag.decode_global(A, ag.plant_cover(cov, Gy, 1, "random", seed), E, a.eta)
        agrees.append(r.agree.value)
        expl.append(r.explained)
        print(f"seed {seed:2d}: Agree {str(r.agree.fraction):>7s} = {r.agree.value:.4f}  explained {r.explained:.4f}")
    print(f"mean Agree {statistics.mean(agrees):.4f}, mean explained {statistics.mean(expl):.4f}")


if __name__ == "__main__":
    main()
