"""Batch front end: `hdxlab <subcommand> ...`.

Exit codes: 0 ok, 2 a verification failed, 3 a tower ended in FAIL,
4 a face budget was exceeded, 64 usage error.  Every output file carries the
normalized run config and its sha256 so reruns can be matched byte for byte.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import agreement as ag
from . import buildings as bd
from . import cohomology as co
from . import complex as cx
from . import cones
from . import covers as cv
from . import faces as fc
from . import spectra as sp

OK, VERIFY_FAIL, TOWER_FAIL, BUDGET, USAGE = 0, 2, 3, 4, 64


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    args: dict = field(default_factory=dict)
    seed: int = 0
    budget_faces: int = bd.DEFAULT_BUDGET

    def canonical(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def _clean(x, digits=12):
    """Make results JSON-stable: fixed float precision, Fractions as strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v, digits) for v in x]
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.{digits}g}")
    return x


def _write_json(path, cfg: RunConfig, payload: dict) -> None:
    out = {"config": asdict(cfg), "config_hash": cfg.hash}
    out.update(_clean(payload))
    text = json.dumps(out, sort_keys=True, indent=1) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(path, cfg: RunConfig, header: list, rows: list) -> None:
    lines = [f"# config_hash={cfg.hash}", ",".join(header)]
    for r in rows:
        lines.append(",".join(_cell(x) for x in r))
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}"
    if isinstance(x, bool):
        return "1" if x else "0"
    return str(x)


def named_complex(text: str, budget: int) -> cx.Complex:
    """Building specs (A:n=2,p=2+C:g=2,p=3,I=1,2) or torus7, simplex:n, annulus:n, cycle:n."""
    name, _, arg = text.partition(":")
    if name == "torus7":
        return cx.torus7()
    if name == "simplex":
        return cx.complete(int(arg))
    if name == "annulus":
        return cx.annulus(int(arg))
    if name == "cycle":
        return cx.cycle_graph(int(arg))
    return bd.build_symplectic_like(text, budget)


def load_complex(path: str, budget: int) -> cx.Complex:
    if os.path.exists(path):
        return cx.Complex.from_json(json.loads(Path(path).read_text()))
    return named_complex(path, budget)


# subcommands

def cmd_build(a, cfg) -> int:
    X = named_complex(a.spec, a.budget_faces)
    out = X.to_json()
    out["summary"] = {"vertices": len(X.vertices), "top_faces": len(X.top_faces), "dim": X.dim}
    _write_json(a.out, cfg, out)
    return OK


def cmd_spectra(a, cfg) -> int:
    X = load_complex(a.input, a.budget_faces)
    rows = []
    rep = sp.lambda2(X)
    rows.append(("graph", rep.n, rep.lambda2, rep.lambda2_abs, None, True))
    ok = True
    if X.dim >= 2:
        tr = sp.trickle_check(X, a.tol)
        rows.append(("trickle", len(X.vertices), tr.global_max, max(abs(tr.global_min), abs(tr.global_max)),
                     tr.upper, tr.ok))
        ok &= tr.ok
    for kl in a.swap or []:
        k, l = map(int, kl.split(","))
        lam, bound, good = sp.swap_bound_check(X, k, l, a.tol)
        rows.append((f"swap_{k}_{l}", len(X.faces(k)), lam, lam, bound, good))
        ok &= good
    rows = [(r[0], r[1], r[2], r[3], "" if r[4] is None else r[4], "pass" if r[5] else "fail") for r in rows]
    _write_csv(a.out, cfg, ["walk", "n", "lambda2", "lambda2_abs", "bound", "pass"], rows)
    return OK if ok else VERIFY_FAIL


def cmd_h1(a, cfg) -> int:
    X = load_complex(a.input, a.budget_faces)
    G = co.FiniteGroup.parse(a.group)
    out = {"group": a.group}
    if G.is_abelian and G.name.startswith("Z"):
        cs = co.cocycle_space(X, G.degree)
        out.update(dim_Z1=cs.dim_Z, dim_B1=cs.dim_B, gap=cs.gap,
                   witness=None if cs.witness is None else cs.witness.to_json())
    if a.exact:
        r = co.expansion_exact(X, G, budget=a.budget_faces)
        out["h1_exact"] = r.h1
    if a.samples:
        s = co.expansion_sample(X, G, a.samples, a.seed)
        out["h1_sample_upper"] = s.ratio
        out["samples"] = a.samples
    _write_json(a.out, cfg, out)
    return OK


def cmd_cone(a, cfg) -> int:
    if a.kind == "symplectic":
        I = tuple(int(x) for x in a.I.split(","))
        rep = cones.build_symplectic_cone(a.g, a.p, I, a.samples, a.seed, keep_traces=bool(a.trace))
        out = {"g": a.g, "p": a.p, "I": list(I), "samples": a.samples, "sampled": True,
               "diameter": rep.diameter, "bound": rep.bound, "valid": rep.all_valid,
               "envelope_ok": rep.envelope_ok, "tr_counts": rep.tr_counts}
        if a.trace:
            traces = [{"edge": [u.to_json(), w.to_json()], "contraction": t.contraction.to_json(with_states=True)}
                      for u, w, t in rep.traces]
            Path(a.trace).write_text(json.dumps(_clean({"config_hash": cfg.hash, "traces": traces}), sort_keys=True) + "\n")
        _write_json(a.out, cfg, out)
        return OK if rep.all_valid else VERIFY_FAIL
    if a.kind == "join":
        A1 = load_complex(a.left, a.budget_faces)
        A2 = load_complex(a.right, a.budget_faces)
        A2 = A2.shift_ids(max(A1.vertices) + 1)
        Z, C = cones.join_cone(A1, A2)
    else:
        Z = load_complex(a.input, a.budget_faces)
        C = cones.star_cone(Z, Z.vertices[0])
    rep = cones.validate_cone(Z, C)
    out = {"kind": a.kind, "valid": rep.ok, "diameter": rep.diameter, "edges": rep.edges_checked,
           "bound_k2": cones.cone_bound(C, 2), "failures": [str(f) for f in rep.failures[:20]]}
    if a.trace:
        tr = [{"edge": list(e), "contraction": c.to_json(with_states=True, oracle=Z)} for e, c in sorted(C.contractions.items())]
        Path(a.trace).write_text(json.dumps(_clean({"config_hash": cfg.hash, "traces": tr}), sort_keys=True) + "\n")
    _write_json(a.out, cfg, out)
    return OK if rep.ok else VERIFY_FAIL


def cmd_cover(a, cfg) -> int:
    X = load_complex(a.input, a.budget_faces)
    G = co.FiniteGroup.parse(a.group)
    if a.cocycle:
        phi = co.Cochain.from_json(X, json.loads(Path(a.cocycle).read_text()))
    else:
        phi = co.cocycle_space(X, G.degree).witness
        if phi is None:
            print("no cocycle outside B^1", file=sys.stderr)
            return VERIFY_FAIL
    cov = cv.cover_from_cocycle(X, phi)
    rep = cv.verify_cover(cov)
    out = cov.total.to_json()
    out["rho"] = {str(y): x for y, x in sorted(cov.rho.items())}
    out["verified"] = rep.ok
    out["connected"] = cx.is_connected(cov.total)
    _write_json(a.out, cfg, out)
    return OK if rep.ok else VERIFY_FAIL


def cmd_tower(a, cfg) -> int:
    X = load_complex(a.input, a.budget_faces)
    log, _ = cv.tower(X, a.ell, a.target)
    path = a.out if a.out not in (None, "-") else None
    rows = []
    for k, s in enumerate(log.steps):
        sup = "" if s.cocycle is None else ";".join(f"{u}-{v}:{x}" for (u, v), x in sorted(s.cocycle.items()) if x)
        rows.append((k, s.vertices, s.dim_Z, s.dim_B, sup, "" if s.connected is None else s.connected,
                     "" if s.verified is None else s.verified))
    rows.append(("status", log.status, "", "", "", "", ""))
    _write_csv(path, cfg, ["step", "vertices", "dim_Z1", "dim_B1", "cocycle_support", "connected", "verified"], rows)
    return OK if log.status == "OK" else TOWER_FAIL


def cmd_faces(a, cfg) -> int:
    out = {}
    ok = True
    if a.input:
        X = load_complex(a.input, a.budget_faces)
        F = fc.faces_complex(X, a.r, a.budget_faces)
        out["faces_complex"] = {"vertices": len(F.vertices), "top_faces": len(F.top_faces), "dim": F.dim}
        checked = 0
        for v in F.vertices[: a.links]:
            s = [F.label(v)]
            good = fc.same_weighted(fc.faces_link(X, a.r, s), fc.direct_faces_link(F, s))
            ok &= good
            checked += 1
        out["links_checked"] = checked
        out["links_equal"] = ok
    if a.check_well_spread:
        grid = [int(x) for x in a.n.split(",")]
        est = [fc.well_spread_probability(n, a.d1, a.m, a.trials, a.seed) for n in grid]
        out["well_spread"] = [{"n": n, "p": e.value, "lo": e.lo, "hi": e.hi} for n, e in zip(grid, est)]
        out["monotone"] = all(x.value <= y.value for x, y in zip(est, est[1:]))
    if a.colors:
        J = fc.ColorSet.from_json(json.loads(a.colors))
        r = fc.well_spread_check(J, a.n_single, a.d1)
        out["check"] = {"ok": r.ok, "failed": r.failed, "detail": r.detail}
    _write_json(a.out, cfg, out)
    return OK if ok else VERIFY_FAIL


def cmd_agree(a, cfg) -> int:
    X = load_complex(a.input, a.budget_faces)
    if a.test == "V":
        D = ag.TestDistribution.v_test(a.k)
    elif a.test == "Z":
        D = ag.TestDistribution.z_test(a.k)
    else:
        D = ag.TestDistribution.custom(a.k, a.overlap)
    G = {v: v % a.q for v in X.vertices}
    eta_dec = a.decode_eta if a.decode_eta is not None else 1 / np.sqrt(a.k)
    grid = [float(x) for x in a.grid.split(",")] if a.grid else [None]
    rows = []
    for x in grid:
        if a.ensemble == "planted":
            eta = a.eta if x is None else x
            F, name, par = ag.plant(X, G, eta, a.seed, a.q), "planted", eta
        elif a.ensemble == "iid":
            F, name, par = ag.IIDEnsemble(a.q, a.seed), "iid", 0.0
        else:
            lam = 0.5 if x is None else x
            F, name, par = ag.mixture_family(X, G, a.q, a.eta, a.seed)(lam)[1], "mixture", lam
        res = ag.decode_global(X, F, D, eta_dec, a.trials, a.seed, votes=a.votes)
        rows.append((name, f"{par:g}", res.agree.value, res.agree.lo, res.agree.hi, res.explained))
    _write_csv(a.out, cfg, ["family", "param", "agree", "ci_lo", "ci_hi", "explained"], rows)
    return OK


def cmd_report(a, cfg) -> int:
    entries = []
    for p in sorted(Path(a.dir).iterdir()):
        if p.suffix == ".json":
            try:
                d = json.loads(p.read_text())
            except json.JSONDecodeError:
                continue
            entries.append({"file": p.name, "config_hash": d.get("config_hash"),
                            "subcommand": d.get("config", {}).get("subcommand")})
        elif p.suffix == ".csv":
            first = p.read_text().splitlines()[:1]
            h = first[0].split("=", 1)[1] if first and first[0].startswith("# config_hash=") else None
            entries.append({"file": p.name, "config_hash": h, "subcommand": None})
    _write_json(a.out, cfg, {"files": entries})
    return OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-faces", type=int, default=bd.DEFAULT_BUDGET)
    common.add_argument("--trials", type=int, default=2000)
    common.add_argument("--tol", type=float, default=sp.TOL)
    common.add_argument("-o", "--out", default="-")

    P = _Parser(prog="hdxlab", description=__doc__.splitlines()[0])
    sub = P.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="materialize a complex")
    b.add_argument("spec")
    b.set_defaults(fn=cmd_build)

    s = sub.add_parser("spectra", parents=[common], help="walk spectra and bound checks")
    s.add_argument("--input", required=True)
    s.add_argument("--swap", action="append", help="k,l swap walk to check (repeatable)")
    s.set_defaults(fn=cmd_spectra)

    h = sub.add_parser("h1", parents=[common], help="cohomology and coboundary expansion")
    h.add_argument("--input", required=True)
    h.add_argument("--group", default="Z2")
    h.add_argument("--exact", action="store_true")
    h.add_argument("--samples", type=int, default=0)
    h.set_defaults(fn=cmd_h1)

    c = sub.add_parser("cone", parents=[common], help="decoding cones")
    c.add_argument("--kind", choices=["symplectic", "join", "star"], default="symplectic")
    c.add_argument("--g", type=int, default=17)
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--I", default="1,2,6")
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--left")
    c.add_argument("--right")
    c.add_argument("--input")
    c.add_argument("--trace", help="write full move traces here")
    c.set_defaults(fn=cmd_cone)

    v = sub.add_parser("cover", parents=[common], help="cover from a cocycle")
    v.add_argument("--input", required=True)
    v.add_argument("--group", default="Z2")
    v.add_argument("--cocycle", help="cochain JSON; default: first cocycle outside B^1")
    v.set_defaults(fn=cmd_cover)

    t = sub.add_parser("tower", parents=[common], help="iterated covers")
    t.add_argument("--input", required=True)
    t.add_argument("--ell", type=int, default=3)
    t.add_argument("--target", type=int, default=180)
    t.set_defaults(fn=cmd_tower)

    f = sub.add_parser("faces", parents=[common], help="faces complexes and well-spread colors")
    f.add_argument("--input")
    f.add_argument("--r", type=int, default=1)
    f.add_argument("--links", type=int, default=50, help="number of vertex links to compare")
    f.add_argument("--check-well-spread", action="store_true")
    f.add_argument("--n", default="18,32,64,256", help="grid of n for the probability estimate")
    f.add_argument("--d1", type=int, default=2)
    f.add_argument("--m", type=int, default=6)
    f.add_argument("--colors", help="ColorSet JSON to check, e.g. [[1,2],[5,6]]")
    f.add_argument("--n-single", type=int, default=100, help="n for --colors")
    f.set_defaults(fn=cmd_faces)

    g = sub.add_parser("agree", parents=[common], help="agreement tests")
    g.add_argument("--input", default="simplex:60")
    g.add_argument("--test", choices=["V", "Z", "custom"], default="V")
    g.add_argument("--k", type=int, default=15)
    g.add_argument("--overlap", type=int, default=1)
    g.add_argument("--ensemble", choices=["planted", "iid", "mixture"], default="planted")
    g.add_argument("--eta", type=float, default=0.0)
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--grid", help="comma separated noise rates or mixture weights")
    g.add_argument("--decode-eta", type=float)
    g.add_argument("--votes", type=int, help="faces sampled for the plurality vote")
    g.set_defaults(fn=cmd_agree)

    r = sub.add_parser("report", parents=[common], help="index outputs in a directory")
    r.add_argument("dir")
    r.set_defaults(fn=cmd_report)
    return P


def run(argv=None) -> int:
    try:
        a = parser().parse_args(argv)
    except UsageError as e:
        print(f"hdxlab: {e}", file=sys.stderr)
        return USAGE
    args = {k: v for k, v in sorted(vars(a).items())
            if k not in ("fn", "subcommand", "seed", "budget_faces", "out")}
    cfg = RunConfig(a.subcommand, args, a.seed, a.budget_faces)
    try:
        return a.fn(a, cfg)
    except bd.BudgetExceeded as e:
        print(f"hdxlab: {e}", file=sys.stderr)
        return BUDGET
    except (ag.ParameterError, cones.PreconditionViolated, FileNotFoundError, ValueError) as e:
        print(f"hdxlab: {e}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
