"""Spherical buildings A_n(F_p), C_g(F_p) and their joins.

Conventions: A_n has the nonzero proper subspaces of F_p^{n+1} as vertices
(colors 1..n, color = dimension), C_g has the nonzero isotropic subspaces of
F_p^{2g} (colors 1..g).  Top faces are full flags restricted to the chosen
colors, weighted uniformly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import gf
from .complex import EMPTY, Complex, join, link
from .gf import Subspace, SymplecticForm

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    def __init__(self, projected: int, budget: int):
        super().__init__(f"projected {projected} faces exceeds budget {budget}")
        self.projected = projected
        self.budget = budget


@dataclass(frozen=True)
class BuildingSpec:
    kind: str  # "A" or "C"
    rank: int
    p: int
    colors: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("A", "C"):
            raise ValueError(f"unknown building type {self.kind}")
        gf.check_prime(self.p)
        cs = tuple(sorted(set(self.colors))) if self.colors is not None else tuple(range(1, self.rank + 1))
        if any(c < 1 or c > self.rank for c in cs):
            raise ValueError(f"colors {cs} outside 1..{self.rank}")
        object.__setattr__(self, "colors", cs)

    @property
    def ambient(self) -> int:
        return self.rank + 1 if self.kind == "A" else 2 * self.rank

    def count(self, k: int) -> int:
        if self.kind == "A":
            return gf.gaussian_binomial(self.rank + 1, k, self.p)
        return gf.count_isotropic(self.rank, self.p, k)

    def projected_top_faces(self) -> int:
        if not self.colors:
            return 1
        cs = self.colors
        n = self.count(cs[-1])
        for a, b in zip(cs[-2::-1], cs[:0:-1]):
            n *= gf.gaussian_binomial(b, a, self.p)
        return n

    def __str__(self) -> str:
        key = "n" if self.kind == "A" else "g"
        s = f"{self.kind}:{key}={self.rank},p={self.p}"
        if self.colors != tuple(range(1, self.rank + 1)):
            s += ",I=" + ",".join(map(str, self.colors))
        return s


@dataclass(frozen=True)
class SymplecticLikeSpec:
    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        kinds = [b.kind for b in self.parts]
        if "C" in kinds[:-1]:
            raise ValueError("a type C component may only appear last")

    def __str__(self) -> str:
        return "+".join(map(str, self.parts))


def parse_spec(text: str) -> SymplecticLikeSpec:
    """Parse strings like "A:n=2,p=2+C:g=2,p=3,I=1,2"."""
    parts = []
    for chunk in text.split("+"):
        kind, _, rest = chunk.strip().partition(":")
        vals: dict = {}
        key = None
        for tok in rest.split(","):
            tok = tok.strip()
            if "=" in tok:
                key, v = tok.split("=", 1)
                vals[key] = [int(v)]
            elif tok:
                if key != "I":
                    raise ValueError(f"bad token {tok!r} in {chunk!r}")
                vals[key].append(int(tok))
        rank_key = "n" if kind == "A" else "g"
        if rank_key not in vals or "p" not in vals:
            raise ValueError(f"spec {chunk!r} needs {rank_key}= and p=")
        parts.append(BuildingSpec(kind, vals[rank_key][0], vals["p"][0], tuple(vals["I"]) if "I" in vals else None))
    return SymplecticLikeSpec(tuple(parts))


def vertices_of(spec: BuildingSpec, k: int) -> list[Subspace]:
    if spec.kind == "A":
        return gf.enumerate_subspaces(spec.rank + 1, spec.p, k)
    return gf.enumerate_isotropic(SymplecticForm.standard(spec.rank, spec.p), k)


def build(spec: BuildingSpec, budget: int = DEFAULT_BUDGET) -> Complex:
    if not spec.colors:
        return EMPTY
    projected = spec.projected_top_faces()
    if projected * len(spec.colors) > budget:
        raise BudgetExceeded(projected * len(spec.colors), budget)
    n, p = spec.ambient, spec.p
    cs = spec.colors
    levels = {k: vertices_of(spec, k) for k in cs}
    ids, labels, colors = {}, {}, {}
    for k in cs:
        for v in levels[k]:
            ids[v] = len(ids)
            labels[ids[v]] = v
            colors[ids[v]] = k
    # below[b][v] = ids of color-a subspaces inside v, for consecutive colors a < b
    below = {}
    for a, b in zip(cs, cs[1:]):
        local = gf.enumerate_subspaces(b, p, a)
        rel = {}
        for v in levels[b]:
            B = v.array
            rel[ids[v]] = [ids[Subspace.span((w.array @ B) % p, n, p)] for w in local]
        below[b] = rel
    faces = []

    def down(i, chain):
        if i < 0:
            faces.append(tuple(chain))
            return
        for u in below[cs[i + 1]][chain[-1]]:
            chain.append(u)
            down(i - 1, chain)
            chain.pop()

    for v in levels[cs[-1]]:
        down(len(cs) - 2, [ids[v]])
    return Complex(faces, None, colors, labels, p)


def build_symplectic_like(spec: SymplecticLikeSpec | str, budget: int = DEFAULT_BUDGET) -> Complex:
    if isinstance(spec, str):
        spec = parse_spec(spec)
    projected = 1
    for b in spec.parts:
        projected *= b.projected_top_faces()
    if projected > budget:
        raise BudgetExceeded(projected, budget)
    parts, offset = [], 0
    for b in spec.parts:
        X = build(b, budget)
        if X.dim < 0:
            continue
        parts.append(X.shift_ids(offset))
        offset += len(X.vertices)
    if not parts:
        return EMPTY
    if len(parts) == 1:
        return parts[0]
    Z = join(parts)
    Z.labels = {v: (i, parts[i].labels[v]) for i in range(len(parts)) for v in parts[i].vertices}
    return Z


def type_a(n: int, p: int, colors=None, budget: int = DEFAULT_BUDGET) -> Complex:
    return build(BuildingSpec("A", n, p, colors), budget)


def type_c(g: int, p: int, colors=None, budget: int = DEFAULT_BUDGET) -> Complex:
    return build(BuildingSpec("C", g, p, colors), budget)


def vertex_id(X: Complex, v: Subspace) -> int:
    index = getattr(X, "_label_index", None)
    if index is None:
        index = {lab: i for i, lab in X.labels.items()}
        X._label_index = index
    return index[v]


@dataclass
class LinkIso:
    mapping: dict  # link vertex id -> target vertex id
    target: Complex
    ok: bool
    reason: str = ""


def building_link_iso(g: int, p: int, v: Subspace, X: Complex | None = None) -> LinkIso:
    """Explicit isomorphism link(C_g, v) -> A_{t-1} v C_{g-t}, then verified.

    Below v a subspace is sent to its coordinates in v's basis; above v it is
    sent to its image in v^perp/v written in a symplectic basis.
    """
    form = SymplecticForm.standard(g, p)
    t = v.dim
    if not (1 <= t <= g) or not gf.is_isotropic(form, v):
        raise ValueError("v must be a nonzero isotropic subspace")
    if X is None:
        X = type_c(g, p)
    L = link(X, (vertex_id(X, v),))
    A = type_a(t - 1, p) if t >= 2 else EMPTY
    C = type_c(g - t, p) if g - t >= 1 else EMPTY
    C = C.shift_ids(len(A.vertices)) if C.dim >= 0 else C
    target = join([A, C]) if A.dim >= 0 and C.dim >= 0 else (A if C.dim < 0 else C)
    q = gf.quotient_form(form, v) if g > t else None
    mapping = {}
    for u_id in L.vertices:
        u = X.labels[u_id]
        if u.dim < t:
            img = Subspace.span(v.coords(u.array), t, p)
            mapping[u_id] = vertex_id(A, img)
        else:
            img = q.image(u)
            mapping[u_id] = vertex_id(C, img)
    ok, reason = verify_iso(L, target, mapping)
    return LinkIso(mapping, target, ok, reason)


def verify_iso(X: Complex, Y: Complex, mapping: dict) -> tuple[bool, str]:
    """Check that mapping is a weight-preserving simplicial isomorphism X -> Y."""
    if set(mapping) != set(X.vertices):
        return False, "mapping is not defined on all vertices"
    if len(set(mapping.values())) != len(mapping):
        return False, "mapping is not injective"
    if set(mapping.values()) != set(Y.vertices):
        return False, "mapping is not onto"
    img = {tuple(sorted(mapping[v] for v in f)): w for f, w in zip(X.top_faces, X.weights)}
    tgt = dict(zip(Y.top_faces, Y.weights))
    if img != tgt:
        return False, "top faces or weights differ"
    return True, ""


def flag_link_type(g: int, p: int, flag: list[Subspace]) -> SymplecticLikeSpec:
    """Join type of the link of an isotropic flag: A_{j_0} v ... v C_{g - top}."""
    dims = [0] + [u.dim for u in sorted(flag, key=lambda u: u.dim)]
    parts = [BuildingSpec("A", b - a - 1, p) for a, b in zip(dims, dims[1:]) if b - a - 1 >= 1]
    if g - dims[-1] >= 1:
        parts.append(BuildingSpec("C", g - dims[-1], p))
    return SymplecticLikeSpec(tuple(parts))


def flag_link_matches(X: Complex, g: int, p: int, flag_ids) -> bool:
    """Spot check: the flag link has the vertex count per dimension and the top
    face count of the predicted join."""
    flag = [X.labels[i] for i in flag_ids]
    L = link(X, flag_ids)
    expect = build_symplectic_like(flag_link_type(g, p, flag))
    if len(L.top_faces) != len(expect.top_faces) or len(L.vertices) != len(expect.vertices):
        return False
    return L.dim == expect.dim


# lazy oracle for buildings too large to materialize

class SymplecticOracle:
    """Membership predicates for C_g(F_p)^I without materializing it."""

    def __init__(self, g: int, p: int, colors):
        self.g, self.p = g, p
        self.colors = tuple(sorted(colors))
        self.form = SymplecticForm.standard(g, p)

    def is_vertex(self, v: Subspace) -> bool:
        return v.n == 2 * self.g and v.dim in self.colors and gf.is_isotropic(self.form, v)

    def is_face(self, vs) -> bool:
        vs = sorted(set(vs), key=lambda u: u.dim)
        if len({u.dim for u in vs}) != len(vs) or not all(self.is_vertex(u) for u in vs):
            return False
        return all(b.contains(a) for a, b in zip(vs, vs[1:]))

    def color(self, v: Subspace) -> int:
        return v.dim


def isotropic_path(g: int, p: int, v1: Subspace, v2: Subspace, j: int) -> list[Subspace]:
    """A walk v1 -> ... -> v2 alternating between isotropic i- and j-subspaces.

    When dim(v1 + v2) <= j the walk has length at most 4; otherwise it moves
    through a chain of Lagrangians, each consecutive pair meeting in a
    hyperplane.
    """
    form = SymplecticForm.standard(g, p)
    i = v1.dim
    if v2.dim != i or not (i < j <= g):
        raise ValueError("need dim v1 = dim v2 < j <= g")
    if v1 == v2:
        return [v1]
    s = v1 + v2
    if s.dim <= j:
        return _short_path(form, v1, v2, j)
    L1 = gf.extend_isotropic(form, v1, g)
    L2 = gf.extend_isotropic(form, v2, g)
    chain = [L1]
    while chain[-1] != L2:
        M = chain[-1]
        x = gf.least_outside(L2, M)
        x_sp = Subspace.span(x, form.n, p)
        chain.append((M & gf.perp(form, x_sp)) + x_sp)
    # i-subspaces in consecutive intersections
    stops = [v1] + [gf.first_subspace_of(a & b, i) for a, b in zip(chain, chain[1:])] + [v2]
    path = [v1]
    for k, M in enumerate(chain):
        path += _walk_inside(form, M, stops[k], stops[k + 1], j)[1:]
    return path


def _short_path(form, v1, v2, j):
    s = v1 + v2
    if gf.is_isotropic(form, s):
        return [v1, gf.extend_isotropic(form, s, j), v2]
    u1 = gf.extend_isotropic(form, v1, j)
    w = u1 + v2
    u2 = gf.extend_isotropic(form, v2, j, within=w)
    v = gf.first_subspace_of(u1 & u2, v1.dim)
    path = [v1, u1, v, u2, v2]
    # drop immediate repeats (v may coincide with v1 or v2)
    out = [path[0]]
    for x in path[1:]:
        if len(out) >= 2 and out[-2] == x:
            out.pop()
        elif out[-1] != x:
            out.append(x)
    return out


def _walk_inside(form, M, a, b, j):
    """Walk between i-subspaces a, b of the isotropic subspace M through j-subspaces of M."""
    i = a.dim
    if a == b:
        return [a]
    r = j - i
    path = [a]
    cur = a
    beta = list(b.rows)
    got = 0
    while cur != b:
        got = min(i, got + r)
        nxt = Subspace.span(np.array(beta[:got]), form.n, form.p)
        for row in cur.rows:
            if nxt.dim == i:
                break
            if not nxt.contains_vector(row):
                nxt = nxt + Subspace.span(row, form.n, form.p)
        if nxt != cur:
            u = gf.extend_isotropic(form, cur + nxt, j, within=M)
            path += [u, nxt]
        cur = nxt
    return path
