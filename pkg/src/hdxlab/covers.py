"""Covers X^phi built from 1-cocycles, cover verification, towers and deck quotients."""
from __future__ import annotations

import csv
import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from .cohomology import Cochain, FiniteGroup, NotCocycle, cocycle_space, delta, is_identity
from .complex import Complex, clique_complex, is_clique_complex, is_connected, link


class NotCliqueComplex(ValueError):
    pass


class NotProper(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


@dataclass
class CoverMap:
    total: Complex
    base: Complex
    rho: dict  # total vertex id -> base vertex id
    ell: int

    def fiber(self, v) -> list:
        return self.fibers[v]

    @property
    def fibers(self) -> dict:
        if not hasattr(self, "_fibers"):
            fib = defaultdict(list)
            for y, x in self.rho.items():
                fib[x].append(y)
            self._fibers = {x: sorted(ys) for x, ys in fib.items()}
        return self._fibers

    def lifts(self, s) -> list[tuple]:
        """The lifts of a face s of the base, one per vertex over s[0]."""
        s = tuple(s)
        out = []
        for y0 in self.fibers[s[0]]:
            nb = self.total.neighbors(y0) if len(s) > 1 else set()
            lift = [y0]
            for v in s[1:]:
                cand = [y for y in self.fibers[v] if y in nb]
                if len(cand) != 1:
                    raise ValueError(f"face {s} does not lift uniquely over {y0}")
                lift.append(cand[0])
            out.append(tuple(lift))
        return out


def _check_cocycle(phi: Cochain) -> None:
    if phi.level != 1:
        raise NotCocycle("need a 1-cochain")
    if phi.X.dim >= 2 and not is_identity(delta(phi)):
        raise NotCocycle("delta phi is not identically 1")


def cover_from_cocycle(X: Complex, phi: Cochain, strict_clique: bool = False) -> CoverMap:
    """X^phi: vertices X(0) x [l]; (v,i) ~ (u, phi(u,v).i); faces are the lifts of faces of X.

    For clique complexes the lifted faces are exactly the cliques of the cover
    graph (checked when strict_clique is set).
    """
    _check_cocycle(phi)
    if strict_clique and not is_clique_complex(X):
        raise NotCliqueComplex("base is not a clique complex")
    G, l = phi.group, phi.group.degree
    V = X.vertices
    pos = {v: k for k, v in enumerate(V)}
    vid = lambda v, i: pos[v] * l + i
    faces, weights = [], []
    for f, w in zip(X.top_faces, X.weights):
        for i in range(l):
            lifted = [vid(f[0], i)] + [vid(u, G.act(phi(u, f[0]), i)) for u in f[1:]]
            faces.append(tuple(lifted))
            weights.append(w / l)
    labels = {vid(v, i): (v, i) for v in V for i in range(l)}
    colors = {vid(v, i): X.colors[v] for v in V for i in range(l)} if X.colors else None
    Y = Complex(faces, weights, colors, labels, X.p)
    rho = {vid(v, i): v for v in V for i in range(l)}
    cov = CoverMap(Y, X, rho, l)
    if strict_clique:
        C = clique_complex(Y, Y.dim)
        if C.top_faces != Y.top_faces:
            raise NotCliqueComplex("lifted faces differ from the cliques of the cover graph")
    return cov


@dataclass
class CoverReport:
    ok: bool
    surjective: bool = True
    homomorphism: bool = True
    fibers: bool = True
    links: bool = True
    failure: str = ""


def verify_cover(cov: CoverMap) -> CoverReport:
    Y, X, rho, l = cov.total, cov.base, cov.rho, cov.ell
    rep = CoverReport(True)
    if set(rho) != set(Y.vertices):
        rep.ok = rep.surjective = False
        rep.failure = "map not defined on every vertex of the cover"
        return rep
    if set(rho.values()) != set(X.vertices):
        rep.ok = rep.surjective = False
        rep.failure = "map is not surjective"
        return rep
    for f in Y.top_faces:
        img = tuple(sorted({rho[y] for y in f}))
        if len(img) != len(f) or not X.is_face(img):
            rep.ok = rep.homomorphism = False
            rep.failure = f"face {f} is not sent to a face"
            return rep
    for x, ys in cov.fibers.items():
        if len(ys) != l:
            rep.ok = rep.fibers = False
            rep.failure = f"fiber over {x} has {len(ys)} points"
            return rep
    for y in Y.vertices:
        Ly = link(Y, (y,))
        Lx = link(X, (rho[y],))
        vs = Ly.vertices
        imgs = [rho[u] for u in vs]
        if len(set(imgs)) != len(imgs) or set(imgs) != set(Lx.vertices):
            rep.ok = rep.links = False
            rep.failure = f"link at {y} is not mapped bijectively"
            return rep
        mapped = sorted(tuple(sorted(rho[u] for u in f)) for f in Ly.top_faces)
        if mapped != Lx.top_faces:
            rep.ok = rep.links = False
            rep.failure = f"link at {y} is not mapped isomorphically"
            return rep
    return rep


@dataclass
class TowerStep:
    vertices: int
    dim_Z: int
    dim_B: int
    cocycle: dict | None
    connected: bool | None
    verified: bool | None


@dataclass
class TowerLog:
    ell: int
    target: int
    steps: list = field(default_factory=list)
    status: str = "OK"  # or "FAIL"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "vertices", "dim_Z1", "dim_B1", "cocycle_support", "connected", "verified"])
            for k, s in enumerate(self.steps):
                sup = "" if s.cocycle is None else ";".join(
                    f"{a}-{b}:{v}" for (a, b), v in sorted(s.cocycle.items()) if v)
                w.writerow([k, s.vertices, s.dim_Z, s.dim_B, sup,
                            "" if s.connected is None else int(s.connected),
                            "" if s.verified is None else int(s.verified)])
            w.writerow(["status", self.status, "", "", "", "", ""])


def tower(X0: Complex, ell: int, n_target: int, on_step=None) -> tuple[TowerLog, list]:
    """Iterate X_{i+1} = X_i^phi with phi a cocycle outside B^1 until |X_i(0)| >= n_target.

    Returns the log and the list of complexes X_0, X_1, ...; a missing cocycle
    ends the run with status FAIL.
    """
    log = TowerLog(ell, n_target)
    Xs = [X0]
    X = X0
    while True:
        cs = cocycle_space(X, ell)
        if len(X.vertices) >= n_target:
            log.steps.append(TowerStep(len(X.vertices), cs.dim_Z, cs.dim_B, None, None, None))
            break
        phi = cs.witness
        if phi is None:
            log.steps.append(TowerStep(len(X.vertices), cs.dim_Z, cs.dim_B, None, None, None))
            log.status = "FAIL"
            break
        cov = cover_from_cocycle(X, phi)
        ok = verify_cover(cov).ok
        conn = is_connected(cov.total)
        log.steps.append(TowerStep(len(X.vertices), cs.dim_Z, cs.dim_B, dict(phi.values), conn, ok))
        if not (ok and conn):
            log.status = "FAIL"
            break
        # fresh integer ids; labels keep the (base vertex, sheet) pair
        X = cov.total
        Xs.append(X)
        if on_step is not None:
            on_step(len(Xs) - 1, X, cov)
    return log, Xs


def deck_translation(cov: CoverMap, g: int) -> dict:
    """The deck transformation (v, i) -> (v, g.i) of a cover built from a cocycle."""
    G = FiniteGroup.cyclic(cov.ell)
    inv = {lab: y for y, lab in cov.total.labels.items()}
    return {y: inv[(v, G.act(g, i))] for y, (v, i) in cov.total.labels.items()}


def deck_group(cov: CoverMap) -> list[dict]:
    return [deck_translation(cov, g) for g in range(cov.ell)]


def deck_quotient_check(Y: Complex, action: list[dict], min_dist: int = 4) -> tuple[Complex, CoverMap]:
    """Quotient of Y by a group of simplicial automorphisms given as vertex maps.

    Requires a free action with dist(v, gv) >= min_dist for g != 1.  Returns
    the orbit complex and the verified quotient map.
    """
    vs = Y.vertices
    ident = [a for a in action if all(a[v] == v for v in vs)]
    if not ident:
        raise ValueError("action must contain the identity")
    top = set(Y.top_faces)
    for a in action:
        for f in Y.top_faces:
            if tuple(sorted(a[v] for v in f)) not in top:
                raise ValueError("action is not simplicial")
    G = Y.graph()
    for a in action:
        if a in ident:
            continue
        for v in vs:
            if a[v] == v:
                raise NotProper("action is not free", (v, v))
            d = nx.shortest_path_length(G, v, a[v]) if nx.has_path(G, v, a[v]) else np.inf
            if d < min_dist:
                raise NotProper(f"dist({v}, g.{v}) = {d} < {min_dist}", (v, a[v]))
    orbit = {}
    for v in vs:
        if v in orbit:
            continue
        o = min(a[v] for a in action)
        for a in action:
            orbit[a[v]] = o
    reps = sorted(set(orbit.values()))
    acc = defaultdict(Fraction)
    for f, w in zip(Y.top_faces, Y.weights):
        acc[tuple(sorted(orbit[v] for v in f))] += w
    faces = sorted(acc)
    labels = {r: Y.label(r) for r in reps} if Y.labels else None
    colors = {r: Y.colors[r] for r in reps} if Y.colors else None
    Q = Complex(faces, [acc[f] for f in faces], colors, labels, Y.p)
    cov = CoverMap(Y, Q, dict(orbit), len(action))
    rep = verify_cover(cov)
    if not rep.ok:
        raise NotProper(f"quotient map is not a cover: {rep.failure}")
    return Q, cov


def quotient_matches_base(cov: CoverMap, Q: Complex, qmap: CoverMap) -> bool:
    """The orbit complex of the deck action equals the base, with matching weights."""
    to_base = {}
    for y, r in qmap.rho.items():
        b = cov.rho[y]
        if to_base.setdefault(r, b) != b:
            return False
    if len(set(to_base.values())) != len(to_base):
        return False
    mapped = {tuple(sorted(to_base[v] for v in f)): w for f, w in zip(Q.top_faces, Q.weights)}
    return mapped == dict(zip(cov.base.top_faces, cov.base.weights))
