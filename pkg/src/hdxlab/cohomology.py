"""Cochains with finite-group coefficients on levels -1..2.

Group elements are ints 0..|G|-1 with 0 the identity.  A cochain stores one
value per sorted face; the value on another orientation follows from the
antisymmetry laws.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from . import gf
from .buildings import BudgetExceeded
from .complex import Complex


class NotCocycle(ValueError):
    pass


class FiniteGroup:
    def __init__(self, name: str, table, elements=None, degree: int | None = None, action=None, check=True):
        self.name = name
        self.table = np.asarray(table, dtype=np.int64)
        self.order = self.table.shape[0]
        self.elements = list(elements) if elements is not None else list(range(self.order))
        self.inverse = np.array([int(np.flatnonzero(self.table[a] == 0)[0]) for a in range(self.order)])
        self.degree = degree if degree is not None else self.order
        self._action = action
        if check:
            self._check()

    def _check(self):
        n, T = self.order, self.table
        if T.shape != (n, n) or not (T[0] == np.arange(n)).all() or not (T[:, 0] == np.arange(n)).all():
            raise ValueError("element 0 must be the identity")
        for row in T:
            if sorted(row) != list(range(n)):
                raise ValueError("table is not a Latin square")
        a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        if not (T[T[a, b], c] == T[a, T[b, c]]).all():
            raise ValueError("table is not associative")

    @classmethod
    def cyclic(cls, l: int) -> "FiniteGroup":
        a = np.arange(l)
        return cls(f"Z{l}", (a[:, None] + a[None, :]) % l, degree=l,
                   action=lambda g, i: (g + i) % l, check=False)

    @classmethod
    def symmetric(cls, m: int) -> "FiniteGroup":
        perms = list(itertools.permutations(range(m)))
        index = {q: k for k, q in enumerate(perms)}
        # (a*b)(i) = a(b(i))
        T = [[index[tuple(a[b[i]] for i in range(m))] for b in perms] for a in perms]
        return cls(f"S{m}", T, elements=perms, degree=m, action=lambda g, i: perms[g][i], check=False)

    @classmethod
    def parse(cls, name: str) -> "FiniteGroup":
        kind, num = name[0].upper(), int(name[1:])
        if kind == "Z":
            return cls.cyclic(num)
        if kind == "S":
            return cls.symmetric(num)
        raise ValueError(f"unknown group {name}")

    @property
    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def act(self, g: int, i: int) -> int:
        if self._action is None:
            return self.mul(g, i)
        return self._action(g, i)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass
class Cochain:
    X: Complex
    level: int
    group: FiniteGroup
    values: dict  # sorted face -> element

    def __call__(self, *oriented) -> int:
        """Value on an oriented face, via f(v,u) = f(u,v)^-1 and alternation."""
        key = tuple(sorted(oriented))
        a = self.values[key]
        if self.level >= 1 and _perm_sign([key.index(v) for v in oriented]) < 0:
            return self.group.inv(a)
        return a

    def to_json(self) -> dict:
        return {"level": self.level, "group": self.group.name,
                "entries": [{"face": list(s), "value": int(v)} for s, v in sorted(self.values.items())]}

    @classmethod
    def from_json(cls, X: Complex, d: dict) -> "Cochain":
        G = FiniteGroup.parse(d["group"])
        return cls(X, d["level"], G, {tuple(e["face"]): int(e["value"]) for e in d["entries"]})

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def faces_at(X: Complex, level: int) -> list:
    return [()] if level == -1 else X.faces(level)


def constant(X: Complex, level: int, G: FiniteGroup, value: int = 0) -> Cochain:
    return Cochain(X, level, G, {s: value for s in faces_at(X, level)})


def random_cochain(X: Complex, level: int, G: FiniteGroup, rng: np.random.Generator) -> Cochain:
    fs = faces_at(X, level)
    vals = rng.integers(0, G.order, size=len(fs))
    return Cochain(X, level, G, dict(zip(fs, map(int, vals))))


def delta(f: Cochain) -> Cochain:
    X, G = f.X, f.group
    if f.level >= 2 or f.level + 1 > X.dim:
        raise ValueError(f"no coboundary from level {f.level} on a {X.dim}-dimensional complex")
    out = {}
    if f.level == -1:
        for (v,) in X.faces(0):
            out[(v,)] = f.values[()]
    elif f.level == 0:
        for u, v in X.faces(1):
            out[(u, v)] = G.mul(f.values[(u,)], G.inv(f.values[(v,)]))
    else:
        for u, v, w in X.faces(2):
            a = G.mul(f.values[(u, v)], f.values[(v, w)])
            out[(u, v, w)] = G.mul(a, G.inv(f.values[(u, w)]))
    return Cochain(X, f.level + 1, G, out)


def is_identity(f: Cochain) -> bool:
    return all(v == 0 for v in f.values.values())


def weight(f: Cochain) -> Fraction:
    if f.level == -1:
        return Fraction(int(f.values[()] != 0))
    fw = f.X.face_weights(f.level)
    return sum((fw[s] for s, v in f.values.items() if v != 0), Fraction(0))


def distance(f: Cochain, g: Cochain) -> Fraction:
    fw = f.X.face_weights(f.level) if f.level >= 0 else {(): Fraction(1)}
    return sum((fw[s] for s in f.values if f.values[s] != g.values[s]), Fraction(0))


# linear algebra over F_l

def coboundary_matrices(X: Complex, l: int):
    """delta_0 (E x V) and delta_1 (T x E) over F_l for sorted faces."""
    V = X.faces(0)
    E = X.faces(1) if X.dim >= 1 else []
    T = X.faces(2) if X.dim >= 2 else []
    vi = {v: i for i, (v,) in enumerate(V)}
    ei = {e: i for i, e in enumerate(E)}
    d0 = np.zeros((len(E), len(V)), dtype=np.int64)
    for k, (u, v) in enumerate(E):
        d0[k, vi[u]] = 1
        d0[k, vi[v]] = l - 1
    d1 = np.zeros((len(T), len(E)), dtype=np.int64)
    for k, (u, v, w) in enumerate(T):
        d1[k, ei[(u, v)]] = 1
        d1[k, ei[(v, w)]] = 1
        d1[k, ei[(u, w)]] = l - 1
    return d0 % l, d1 % l, E


@dataclass
class CocycleSpace:
    l: int
    edges: list
    Z: gf.Subspace
    B: gf.Subspace
    witness: Cochain | None

    @property
    def dim_Z(self) -> int:
        return self.Z.dim

    @property
    def dim_B(self) -> int:
        return self.B.dim

    @property
    def gap(self) -> int:
        return self.Z.dim - self.B.dim

    def vector(self, f: Cochain) -> np.ndarray:
        return np.array([f.values[e] for e in self.edges], dtype=np.int64)

    def cochain(self, X: Complex, vec) -> Cochain:
        return Cochain(X, 1, FiniteGroup.cyclic(self.l), {e: int(x) for e, x in zip(self.edges, vec)})

    def is_coboundary(self, f: Cochain) -> bool:
        return self.B.contains_vector(self.vector(f))

    def is_cocycle(self, f: Cochain) -> bool:
        return self.Z.contains_vector(self.vector(f))


def cocycle_space(X: Complex, l: int) -> CocycleSpace:
    if not gf.is_prime(l):
        raise ValueError(f"cyclic coefficients need a prime order, got {l}")
    d0, d1, E = coboundary_matrices(X, l)
    n = len(E)
    Zrows = gf.nullspace_array(d1, l, ncols=n) if d1.size else np.eye(n, dtype=np.int64)
    Z = gf.Subspace.span(Zrows, n, l) if len(Zrows) else gf.Subspace.zero(n, l)
    B = gf.Subspace.span(d0.T, n, l) if d0.size else gf.Subspace.zero(n, l)
    if not Z.contains(B):
        raise AssertionError("coboundaries are not cocycles")
    witness = None
    for row in Z.rows:
        if not B.contains_vector(row):
            G = FiniteGroup.cyclic(l)
            witness = Cochain(X, 1, G, {e: int(x) for e, x in zip(E, row)})
            break
    return CocycleSpace(l, E, Z, B, witness)


# expansion

def _int_weights(fw: dict, faces: list) -> tuple[np.ndarray, int]:
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (fw[s].denominator for s in faces), 1)
    return np.array([fw[s].numerator * (den // fw[s].denominator) for s in faces], dtype=np.int64), den


def _edge_triangle_index(X: Complex):
    E = X.faces(1)
    T = X.faces(2) if X.dim >= 2 else []
    ei = {e: i for i, e in enumerate(E)}
    tri = np.array([[ei[(u, v)], ei[(v, w)], ei[(u, w)]] for u, v, w in T], dtype=np.int64).reshape(-1, 3)
    return E, T, tri


def _delta_rows(G: FiniteGroup, F: np.ndarray, tri: np.ndarray) -> np.ndarray:
    if G.name.startswith("Z"):
        return (F[:, tri[:, 0]] + F[:, tri[:, 1]] - F[:, tri[:, 2]]) % G.order
    a = G.table[F[:, tri[:, 0]], F[:, tri[:, 1]]]
    return G.table[a, G.inverse[F[:, tri[:, 2]]]]


def _all_cochains(q: int, E: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, E), dtype=np.int16)
    for k in range(E - 1, -1, -1):
        out[:, k] = idx % q
        idx //= q
    return out


@dataclass
class ExpansionResult:
    h1: Fraction | None  # None when every cochain is a cocycle
    witness: np.ndarray | None
    cochains: int
    exact: bool = True


def expansion_exact(X: Complex, G: FiniteGroup, budget: int = 10**7, chunk: int = 1 << 18) -> ExpansionResult:
    """min over f not in Z^1 of wt(delta f) / dist(f, Z^1), by exhaustion."""
    E, T, tri = _edge_triangle_index(X)
    N = G.order ** len(E)
    if N > budget:
        raise BudgetExceeded(N, budget)
    we, De = _int_weights(X.face_weights(1), E)
    if T:
        wt, Dt = _int_weights(X.face_weights(2), T)
    else:
        wt, Dt = np.zeros(0, dtype=np.int64), 1
    if G.is_abelian:
        # cosets of Z^1 are the fibres of f -> delta f
        best: dict = {}
        dwt: dict = {}
        for start in range(0, N, chunk):
            F = _all_cochains(G.order, len(E), start, min(N, start + chunk))
            D = _delta_rows(G, F, tri) if T else np.zeros((len(F), 0), dtype=np.int64)
            fw = (F != 0) @ we
            dw = (D != 0) @ wt if T else np.zeros(len(F), dtype=np.int64)
            keep = dw > 0
            if not keep.any():
                continue
            D, fw, dw = np.ascontiguousarray(D[keep].astype(np.int8)), fw[keep], dw[keep]
            keys = D.view(np.dtype((np.void, D.shape[1]))).ravel()
            uniq, inv = np.unique(keys, return_inverse=True)
            mins = np.full(len(uniq), np.iinfo(np.int64).max)
            np.minimum.at(mins, inv, fw)
            dws = np.zeros(len(uniq), dtype=np.int64)
            dws[inv] = dw
            for k, a, b in zip(uniq.tolist(), mins.tolist(), dws.tolist()):
                if k not in best or a < best[k][0]:
                    best[k] = (a, k)
                    dwt[k] = b
        if not best:
            return ExpansionResult(None, None, N)
        h1 = min(Fraction(dwt[k] * De, a * Dt) for k, (a, _) in best.items())
        return ExpansionResult(h1, None, N)
    # nonabelian: collect cocycles, then brute-force distances
    cocycles = []
    for start in range(0, N, chunk):
        F = _all_cochains(G.order, len(E), start, min(N, start + chunk))
        D = _delta_rows(G, F, tri) if T else np.zeros((len(F), 0), dtype=np.int64)
        cocycles.append(F[~D.any(axis=1)])
    Zm = np.vstack(cocycles)
    if len(Zm) * N * len(E) > 50 * budget:
        raise BudgetExceeded(len(Zm) * N, budget)
    h1, arg = None, None
    for start in range(0, N, chunk):
        F = _all_cochains(G.order, len(E), start, min(N, start + chunk))
        D = _delta_rows(G, F, tri)
        dw = (D != 0) @ wt
        keep = dw > 0
        F, dw = F[keep], dw[keep]
        if not len(F):
            continue
        dist = np.min(np.stack([(F != z) @ we for z in Zm], axis=1), axis=1)
        for k in range(len(F)):
            r = Fraction(int(dw[k]) * De, int(dist[k]) * Dt)
            if h1 is None or r < h1:
                h1, arg = r, F[k].copy()
    return ExpansionResult(h1, arg, N)


def _potential_distance(G, E, we, f, nverts, vindex, max_enum=4096, rng=None, restarts=4):
    """Min over potentials h of the weighted disagreement between f and delta h.

    Exhaustive when |G|^(V-1) is small, otherwise greedy descent from
    spanning-tree starts (an upper bound)."""
    eu = np.array([vindex[u] for u, _ in E])
    ev = np.array([vindex[v] for _, v in E])
    if G.order ** (nverts - 1) <= max_enum:
        H = _all_cochains(G.order, nverts - 1, 0, G.order ** (nverts - 1))
        H = np.hstack([np.zeros((len(H), 1), dtype=np.int64), H])
        dh = G.table[H[:, eu], G.inverse[H[:, ev]]]
        return int(((dh != f[None, :]) @ we).min()), True
    adj = [[] for _ in range(nverts)]
    for k in range(len(E)):
        adj[eu[k]].append((k, ev[k], True))
        adj[ev[k]].append((k, eu[k], False))
    best = None
    for r in range(restarts):
        root = int(rng.integers(nverts)) if rng is not None else r % nverts
        h = np.full(nverts, -1)
        h[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for k, y, x_is_u in adj[x]:
                if h[y] >= 0:
                    continue
                # f(u,v) = h(u) h(v)^-1
                h[y] = G.mul(G.inv(f[k]), h[x]) if x_is_u else G.mul(f[k], h[x])
                stack.append(y)
        h[h < 0] = 0
        for _ in range(50):
            changed = False
            for x in range(nverts):
                scores = np.zeros(G.order, dtype=np.int64)
                for k, y, x_is_u in adj[x]:
                    for c in range(G.order):
                        val = G.mul(c, G.inv(h[y])) if x_is_u else G.mul(h[y], G.inv(c))
                        scores[c] += we[k] * (val != f[k])
                c = int(np.argmin(scores))
                if scores[c] < scores[h[x]]:
                    h[x] = c
                    changed = True
            if not changed:
                break
        dh = G.table[h[eu], G.inverse[h[ev]]]
        d = int((dh != f) @ we)
        best = d if best is None else min(best, d)
    return best, False


@dataclass
class SampleReport:
    ratio: Fraction | None
    witness: np.ndarray | None
    trials: int
    skipped: int
    exact_distances: bool


def expansion_sample(X: Complex, G: FiniteGroup, trials: int, seed: int = 0) -> SampleReport:
    """Smallest observed wt(delta f)/dist(f, Z^1) over random, near-cocycle and
    locally perturbed cochains.  An estimate of h^1 from above, not a certificate.

    Distances are exact against Z^1 when it is small and cyclic; otherwise they
    are distances to B^1, exact or by descent (exact_distances says which).
    """
    rng = np.random.default_rng(seed)
    E, T, tri = _edge_triangle_index(X)
    V = [v for (v,) in X.faces(0)]
    vindex = {v: i for i, v in enumerate(V)}
    we, De = _int_weights(X.face_weights(1), E)
    wt, Dt = _int_weights(X.face_weights(2), T) if T else (np.zeros(0, dtype=np.int64), 1)
    eu = np.array([vindex[u] for u, _ in E])
    ev = np.array([vindex[v] for _, v in E])
    Zm = None
    if G.is_abelian and gf.is_prime(G.order) and G.name.startswith("Z"):
        cs = cocycle_space(X, G.order)
        if G.order ** cs.dim_Z <= 4096:
            C = _all_cochains(G.order, cs.dim_Z, 0, G.order ** cs.dim_Z)
            Zm = (C @ cs.Z.array) % G.order if cs.dim_Z else np.zeros((1, len(E)), dtype=np.int64)
    best, arg, skipped, exact = None, None, 0, True
    for t in range(trials):
        mode = t % 3
        if mode == 0:
            f = rng.integers(0, G.order, size=len(E))
        else:
            h = rng.integers(0, G.order, size=len(V))
            f = G.table[h[eu], G.inverse[h[ev]]]
            if mode == 1:
                k = rng.integers(1, 4)
                pos = rng.choice(len(E), size=min(k, len(E)), replace=False)
            else:
                v = rng.integers(len(V))
                inc = np.flatnonzero((eu == v) | (ev == v))
                pos = inc[rng.random(len(inc)) < 0.5] if len(inc) else inc
            for e in pos:
                f[e] = G.table[f[e], rng.integers(1, G.order)]
        D = _delta_rows(G, f[None, :], tri)[0] if T else np.zeros(0, dtype=np.int64)
        dw = int((D != 0) @ wt) if T else 0
        if dw == 0:
            skipped += 1
            continue
        if Zm is not None:
            dist = int(((Zm != f[None, :]) @ we).min())
        else:
            dist, ok = _potential_distance(G, E, we, f, len(V), vindex, rng=rng)
            exact = exact and ok
        r = Fraction(dw * De, dist * Dt)
        if best is None or r < best:
            best, arg = r, f.copy()
    return SampleReport(best, arg, trials, skipped, exact)
