"""Sample edge loops of C_g(F_p)^I, contract them and report the sampled cone diameter."""
import argparse
import collections

from hdxlab import cones


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", type=int, default=17)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--I", default="1,2,6")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    I = tuple(int(x) for x in a.I.split(","))
    rep = cones.build_symplectic_cone(a.g, a.p, I, a.samples, a.seed)
    hist = collections.Counter(rep.tr_counts)
    print(f"C_{a.g}(F_{a.p})^{set(I)}: {a.samples} sampled edges, all valid: {rep.all_valid}, "
          f"envelope ok: {rep.envelope_ok}")
    print(f"sampled diameter R = {rep.diameter}, bound 1/R = {rep.bound}")
    for k in sorted(hist):
        print(f"  {k:3d} triangle moves: {hist[k]}")


if __name__ == "__main__":
    main()
