"""Decoding cones: loops, BT/TR moves, contractions and the cone bound.

A contraction is a list of moves applied to a closed walk.  Moves:

    bt_insert(pos, x)  (.., a, ..)     -> (.., a, x, a, ..)
    bt_delete(pos)     (.., a, x, a, ..) -> (.., a, ..)
    tr_insert(pos, x)  (.., a, b, ..)  -> (.., a, x, b, ..)   with {a, x, b} a triangle
    tr_delete(pos)     (.., a, x, b, ..) -> (.., a, b, ..)    with {a, x, b} a triangle

The complex is only consulted through `is_face`, so the same code runs on a
materialized Complex and on the lazy symplectic oracle.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from . import gf
from .buildings import SymplecticOracle, isotropic_path
from .complex import Complex, Disconnected, join
from .gf import Subspace, SymplecticForm


class PreconditionViolated(ValueError):
    pass


class BadMove(ValueError):
    pass


@dataclass(frozen=True)
class Move:
    kind: str
    pos: int
    vertex: object = None

    @property
    def is_tr(self) -> bool:
        return self.kind.startswith("tr")


class Loop:
    """A closed walk being rewritten; every move is checked against the oracle."""

    def __init__(self, verts, oracle):
        self.v = list(verts)
        self.oracle = oracle
        self.moves: list[Move] = []

    def _edge(self, a, b) -> bool:
        return a != b and self.oracle.is_face([a, b])

    def _tri(self, a, b, c) -> bool:
        return len({_key(a), _key(b), _key(c)}) == 3 and self.oracle.is_face([a, b, c])

    def apply(self, m: Move) -> None:
        v, pos = self.v, m.pos
        if m.kind == "bt_insert":
            if not (0 <= pos < len(v)) or not self._edge(v[pos], m.vertex):
                raise BadMove(f"bt_insert at {pos}: not an edge")
            v[pos + 1:pos + 1] = [m.vertex, v[pos]]
        elif m.kind == "bt_delete":
            if not (0 <= pos and pos + 2 < len(v)) or v[pos] != v[pos + 2]:
                raise BadMove(f"bt_delete at {pos}: not a backtrack")
            del v[pos + 1:pos + 3]
        elif m.kind == "tr_insert":
            if not (0 <= pos and pos + 1 < len(v)) or not self._tri(v[pos], m.vertex, v[pos + 1]):
                raise BadMove(f"tr_insert at {pos}: not a triangle")
            v.insert(pos + 1, m.vertex)
        elif m.kind == "tr_delete":
            if not (0 <= pos and pos + 2 < len(v)) or not self._tri(v[pos], v[pos + 1], v[pos + 2]):
                raise BadMove(f"tr_delete at {pos}: not a triangle")
            del v[pos + 1]
        else:
            raise BadMove(f"unknown move {m.kind}")
        self.moves.append(m)

    def bt_insert(self, pos, x):
        self.apply(Move("bt_insert", pos, x))

    def bt_delete(self, pos):
        self.apply(Move("bt_delete", pos))

    def tr_insert(self, pos, x):
        self.apply(Move("tr_insert", pos, x))

    def tr_delete(self, pos):
        self.apply(Move("tr_delete", pos))

    def reduce_backtracks(self, lo: int = 0, tail: int = 0) -> None:
        """Delete (a, x, a) patterns inside [lo, len - 1 - tail]."""
        i = lo
        while i + 2 <= len(self.v) - 1 - tail:
            if self.v[i] == self.v[i + 2]:
                self.bt_delete(i)
                i = max(lo, i - 1)
            else:
                i += 1

    @property
    def trivial(self) -> bool:
        return len(self.v) == 1


def _key(x):
    return x if not isinstance(x, Subspace) else (x.n, x.p, x.rows)


@dataclass
class Contraction:
    start: list
    moves: list

    @property
    def tr_count(self) -> int:
        return sum(m.is_tr for m in self.moves)

    def to_json(self, with_states: bool = False, oracle=None) -> dict:
        out = {"start": [_enc(x) for x in self.start],
               "moves": [{"kind": m.kind, "pos": m.pos, **({"vertex": _enc(m.vertex)} if m.vertex is not None else {})}
                         for m in self.moves],
               "tr_count": self.tr_count}
        if with_states:
            states = [list(self.start)]
            L = Loop(self.start, oracle if oracle is not None else _AnyOracle())
            for m in self.moves:
                L.apply(m)
                states.append(list(L.v))
            out["states"] = [[_enc(x) for x in s] for s in states]
        return out


class _AnyOracle:
    def is_face(self, vs) -> bool:
        return True


def _enc(x):
    return x.to_json() if isinstance(x, Subspace) else x


@dataclass
class ReplayReport:
    ok: bool
    tr_count: int
    bad_move: int | None = None
    reason: str = ""


def replay(c: Contraction, oracle) -> ReplayReport:
    """Apply the moves; every intermediate must be a closed walk; must end trivial."""
    start = list(c.start)
    if start[0] != start[-1]:
        return ReplayReport(False, 0, None, "start is not closed")
    L = Loop(start, oracle)
    for a, b in zip(start, start[1:]):
        if not L._edge(a, b):
            return ReplayReport(False, 0, None, "start is not a walk")
    for k, m in enumerate(c.moves):
        try:
            L.apply(m)
        except BadMove as e:
            return ReplayReport(False, c.tr_count, k, str(e))
        if L.v[0] != start[0] or L.v[-1] != start[0]:
            return ReplayReport(False, c.tr_count, k, "base point moved")
    if not L.trivial:
        return ReplayReport(False, c.tr_count, None, f"ends at a loop of length {len(L.v) - 1}")
    return ReplayReport(True, c.tr_count)


def mirror(c: Contraction) -> Contraction:
    """The same contraction read backwards along the loop (for the reversed edge)."""
    L = list(c.start)
    out = []
    for m in c.moves:
        n = len(L)
        width = {"bt_insert": 0, "bt_delete": 2, "tr_insert": 1, "tr_delete": 2}[m.kind]
        out.append(Move(m.kind, n - 1 - m.pos - width, m.vertex))
        _apply_raw(L, m)
    return Contraction(list(reversed(c.start)), out)


def _apply_raw(v, m):
    if m.kind == "bt_insert":
        v[m.pos + 1:m.pos + 1] = [m.vertex, v[m.pos]]
    elif m.kind == "bt_delete":
        del v[m.pos + 1:m.pos + 3]
    elif m.kind == "tr_insert":
        v.insert(m.pos + 1, m.vertex)
    else:
        del v[m.pos + 1]


@dataclass
class Cone:
    base: object
    paths: dict  # vertex -> walk from base
    contractions: dict  # (u, w) -> Contraction of P_u (u, w) P_w^-1
    sampled: bool = False

    @property
    def diameter(self) -> int:
        return max((c.tr_count for c in self.contractions.values()), default=0)

    def edge_loop(self, u, w) -> list:
        return list(self.paths[u]) + list(reversed(self.paths[w]))


@dataclass
class ConeReport:
    ok: bool
    diameter: int
    edges_checked: int
    failures: list = field(default_factory=list)  # (edge, move index, reason)


def validate_cone(X, C: Cone, edges=None) -> ConeReport:
    """Check paths, the start loop of every contraction and its replay.

    X is anything with is_face.  For a materialized Complex every edge must
    carry a contraction in one orientation."""
    fails = []
    for u, P in C.paths.items():
        if P[0] != C.base or P[-1] != u:
            fails.append(((u,), None, "path endpoints"))
        elif any(a == b or not X.is_face([a, b]) for a, b in zip(P, P[1:])):
            fails.append(((u,), None, "path is not a walk"))
    if edges is None and isinstance(X, Complex):
        edges = X.faces(1)
        for e in edges:
            if e not in C.contractions and (e[1], e[0]) not in C.contractions:
                fails.append((e, None, "edge without contraction"))
    for (u, w), c in C.contractions.items():
        if list(c.start) != C.edge_loop(u, w):
            fails.append(((u, w), None, "start loop is not P_u (u,w) P_w^-1"))
            continue
        r = replay(c, X)
        if not r.ok:
            fails.append(((u, w), r.bad_move, r.reason))
    return ConeReport(not fails, C.diameter, len(C.contractions), fails)


def cone_bound(C: Cone | int, k: int) -> Fraction:
    """1 / (binom(k+1, 3) * diam) from a cone on a face-transitive complex."""
    R = C if isinstance(C, int) else C.diameter
    return Fraction(1, math.comb(k + 1, 3) * max(R, 1))


def cone_off(L: Loop, lo: int, hi: int, apex) -> None:
    """Contract the closed subwalk L[lo..hi] through triangles with a common apex."""
    if hi - lo == 2 and L.v[lo] == L.v[hi]:
        L.bt_delete(lo)
        return
    if hi == lo:
        return
    L.tr_insert(lo, apex)
    hi += 1
    while hi - lo > 2:
        L.tr_delete(lo + 1)
        hi -= 1
    L.bt_delete(lo)


def star_cone(X: Complex, v0) -> Cone:
    """Cone with P_u = (v0, u) for a vertex adjacent to everything."""
    paths = {v0: [v0]}
    for u in X.vertices:
        if u != v0:
            if not X.is_face([v0, u]):
                raise PreconditionViolated(f"{v0} is not adjacent to {u}")
            paths[u] = [v0, u]
    cone = Cone(v0, paths, {})
    for u, w in X.faces(1):
        L = Loop(cone.edge_loop(u, w), X)
        L.reduce_backtracks()
        if not L.trivial:
            L.tr_delete(0)
            L.bt_delete(0)
        cone.contractions[(u, w)] = Contraction(cone.edge_loop(u, w), L.moves)
    return cone


def join_cone(A1: Complex, A2: Complex) -> tuple[Complex, Cone]:
    """Cone on Z = A1 v A2 based at v1 in A1, with v2 in A2.

    P_u = (v1, u) for u in A2 and (v1, v2, u) for u in A1.  Edges inside one
    side close with one triangle; a cross edge is contracted along a shortest
    path of A1 (2 * (path length) triangles)."""
    if len(A1.vertices) > 1:
        G1 = A1.graph()
        c = nx.number_connected_components(G1)
        if c != 1:
            raise Disconnected(c)
    else:
        G1 = A1.graph()
    Z = join([A1, A2])
    side1 = set(A1.vertices)
    v1, v2 = A1.vertices[0], A2.vertices[0]
    paths = {v1: [v1]}
    for u in A2.vertices:
        paths[u] = [v1, u]
    for u in A1.vertices:
        if u != v1:
            paths[u] = [v1, v2, u]
    cone = Cone(v1, paths, {})
    for u, w in Z.faces(1):
        if (u in side1) != (w in side1):
            a, b = (u, w) if u in side1 else (w, u)
            c = _cross(Z, cone, G1, v1, v2, a, b)
            cone.contractions[(u, w)] = c if u == a else mirror(c)
            continue
        L = Loop(cone.edge_loop(u, w), Z)
        L.reduce_backtracks()
        if not L.trivial:
            # one triangle through v1 (A2 side) or v2 (A1 side) closes it
            k = next(i for i in range(len(L.v) - 3)
                     if L.v[i] == L.v[i + 3] and L._tri(L.v[i], L.v[i + 1], L.v[i + 2]))
            L.tr_delete(k)
            L.reduce_backtracks()
        cone.contractions[(u, w)] = Contraction(cone.edge_loop(u, w), L.moves)
    return Z, cone


def _cross(Z, cone, G1, v1, v2, a, b) -> Contraction:
    start = cone.edge_loop(a, b)
    L = Loop(start, Z)
    if a == v1:
        L.reduce_backtracks()
        return Contraction(start, L.moves)
    # loop (v1, v2, a, b, v1); ladder along v1 = x_1, ..., x_m = a
    xs = nx.shortest_path(G1, v1, a)
    m = len(xs)
    for i in range(1, m):
        L.tr_insert(3, xs[i])  # (b, x_i) -> (b, x_{i+1}, x_i)
    L.bt_delete(2)  # (a, b, a) -> (a)
    while len(L.v) > 3:
        L.tr_delete(1)  # (v2, x_k, x_{k-1}) -> (v2, x_{k-1})
    L.bt_delete(0)
    return Contraction(start, L.moves)


# the symplectic engine

def colors_ok(g: int, I) -> bool:
    i0, i1, i2 = sorted(I)
    return i1 >= 2 * i0 and i2 >= 3 * i1 and 17 * i1 <= 2 * g


@dataclass
class SymplecticTrace:
    contraction: Contraction
    u_perp: Subspace | None = None
    u_star: Subspace | None = None
    u_2star: Subspace | None = None
    i2_vertices: int = 0
    i0_vertices: int = 0
    six_cycles: int = 0


def build_u_perp(form: SymplecticForm, t0: Subspace, size: int) -> tuple[Subspace, list]:
    """Isotropic u perpendicular to t0 with u & t0 = 0, one least vector at a time.

    Returns u and its basis in the order the vectors were picked."""
    order = []
    t = t0
    while len(order) < size:
        x = gf.least_outside(gf.perp(form, t), t)
        if x is None:
            raise PreconditionViolated("no room for the perpendicular space")
        order.append(x)
        t = t + Subspace.span(x, form.n, form.p)
    return Subspace.span(np.array(order), form.n, form.p) if order else Subspace.zero(form.n, form.p), order


def _first_rows(vectors: list, k: int, n: int, p: int) -> Subspace:
    return Subspace.span(np.array(vectors[:k]), n, p) if k else Subspace.zero(n, p)


def contract_cycle_symplectic(g: int, p: int, I, loop: list, oracle: SymplecticOracle | None = None) -> SymplecticTrace:
    i0, i1, i2 = sorted(I)
    if not colors_ok(g, I):
        raise PreconditionViolated(f"colors {sorted(I)} violate i1 >= 2 i0, i2 >= 3 i1, 17 i1 <= 2g")
    oracle = oracle or SymplecticOracle(g, p, I)
    form = oracle.form
    if loop[0] != loop[-1]:
        raise PreconditionViolated("loop is not closed")
    if len(loop) - 1 > 11:
        raise PreconditionViolated(f"loop of length {len(loop) - 1} > 11")
    for a, b in zip(loop, loop[1:]):
        if a == b or not oracle.is_face([a, b]):
            raise PreconditionViolated("loop is not a walk in the building")
    L = Loop(loop, oracle)
    trace = SymplecticTrace(None)
    trace.i2_vertices = sum(u.dim == i2 for u in loop[1:-1]) + (loop[0].dim == i2)
    if loop[0].dim == i2:
        a = gf.first_subspace_of(loop[0], i0)
        L.bt_insert(0, a)
        L.bt_insert(len(L.v) - 1, a)
        _contract(L, form, (i0, i1, i2), 1, 1, trace)
        L.reduce_backtracks()
    else:
        _contract(L, form, (i0, i1, i2), 0, 0, trace)
    if not L.trivial:
        raise AssertionError("contraction did not finish")
    trace.contraction = Contraction(list(loop), L.moves)
    return trace


def _contract(L: Loop, form, dims, lo: int, tail: int, trace: SymplecticTrace) -> None:
    i0, i1, i2 = dims
    hi = lambda: len(L.v) - 1 - tail
    L.reduce_backtracks(lo, tail)
    # (a) remove interior i2 vertices
    while True:
        k = next((k for k in range(lo + 1, hi()) if L.v[k].dim == i2), None)
        if k is None:
            break
        x = L.v[k]
        a = L.v[k - 1]
        if a.dim == i1:
            if k - 2 >= lo and L.v[k - 2].dim == i0:
                L.tr_delete(k - 2)
                k -= 1
            else:
                L.tr_insert(k - 1, gf.first_subspace_of(a, i0))
                k += 1
        b = L.v[k + 1]
        if b.dim == i1:
            if k + 2 <= hi() and L.v[k + 2].dim == i0:
                L.tr_delete(k)
            else:
                L.tr_insert(k, gf.first_subspace_of(b, i0))
        a, b = L.v[k - 1], L.v[k + 1]
        if a == b:
            L.bt_delete(k - 1)
        else:
            y = gf.extend_isotropic(form, a + b, i1, within=x)
            L.tr_insert(k - 1, y)
            L.tr_delete(k)
        L.reduce_backtracks(lo, tail)
    if hi() == lo:
        return
    # (b) u_perp, u*, u**
    seg = L.v[lo:hi() + 1]
    t0 = seg[0]
    for u in seg[1:]:
        t0 = t0 + u
    u_perp, order = build_u_perp(form, t0, 6 * i1)
    u_star = _first_rows(order, i1, form.n, form.p)
    u_2star = _first_rows(order, i0, form.n, form.p)
    trace.u_perp, trace.u_star, trace.u_2star = u_perp, u_star, u_2star
    # (d) detours (v, u_v, u**, u_v, v) at every i0 vertex, right to left
    spots = [k for k in range(lo, hi()) if L.v[k].dim == i0]
    trace.i0_vertices += len(spots)
    for k in reversed(spots):
        v = L.v[k]
        u = gf.extend_isotropic(form, v + u_2star, i1, within=v + u_star)
        L.bt_insert(k, u)
        L.bt_insert(k + 1, u_2star)
    # (e) tile each segment between consecutive u** visits, right to left
    stars = [k for k in range(lo, hi() + 1) if L.v[k] == u_2star]
    for s, e in reversed(list(zip(stars, stars[1:]))):
        _tile(L, form, s, e, u_star, i2)
        trace.six_cycles += 1
    # what is left is one closed walk at the base through u**
    _tile(L, form, lo, hi(), u_star, i2)
    trace.six_cycles += 1


def _tile(L: Loop, form, s: int, e: int, u_star: Subspace, i2: int) -> None:
    total = u_star
    for u in L.v[s:e + 1]:
        total = total + u
    if not gf.is_isotropic(form, total) or total.dim > i2:
        raise AssertionError("segment does not fit in an isotropic i2-space")
    x = gf.extend_isotropic(form, total, i2)
    cone_off(L, s, e, x)


# the lazy cone on C_g^I

class SymplecticCone:
    """Paths from the base v0 = span(e_1..e_{i0}) and contractions on demand."""

    def __init__(self, g: int, p: int, I):
        if not colors_ok(g, I):
            raise PreconditionViolated(f"colors {sorted(I)} not admissible for g={g}")
        self.g, self.p = g, p
        self.I = tuple(sorted(I))
        self.oracle = SymplecticOracle(g, p, I)
        self.form = self.oracle.form
        i0 = self.I[0]
        self.base = Subspace.span(np.eye(2 * g, dtype=np.int64)[:i0], 2 * g, p)

    def path(self, u: Subspace) -> list:
        i0, i1, _ = self.I
        v0 = self.base
        if u == v0:
            return [v0]
        if u.dim == i0:
            return isotropic_path(self.g, self.p, v0, u, i1)
        if u.contains(v0):
            return [v0, u]
        w = gf.first_subspace_of(u, i0)
        return isotropic_path(self.g, self.p, v0, w, i1) + [u]

    def edge_loop(self, u: Subspace, w: Subspace) -> list:
        return self.path(u) + list(reversed(self.path(w)))

    def contract_edge(self, u: Subspace, w: Subspace) -> SymplecticTrace:
        return contract_cycle_symplectic(self.g, self.p, self.I, self.edge_loop(u, w), self.oracle)

    def random_edge(self, rng: np.random.Generator) -> tuple[Subspace, Subspace]:
        i0, i1, i2 = self.I
        x = gf.random_isotropic(self.form, i2, rng)
        y = gf.random_subspace_of(x, i1, rng)
        z = gf.random_subspace_of(y, i0, rng)
        return [(z, y), (z, x), (y, x)][rng.integers(3)]


@dataclass
class SampledConeReport:
    g: int
    p: int
    I: tuple
    samples: int
    seed: int
    diameter: int
    bound: Fraction | None
    all_valid: bool
    tr_counts: list
    envelope_ok: bool
    sampled: bool = True
    traces: list = field(default_factory=list)


def build_symplectic_cone(g: int, p: int, I, samples: int, seed: int = 0, keep_traces: bool = False) -> SampledConeReport:
    cone = SymplecticCone(g, p, I)
    rng = np.random.default_rng(seed)
    counts, valid, env, traces = [], True, True, []
    for _ in range(samples):
        u, w = cone.random_edge(rng)
        tr = cone.contract_edge(u, w)
        c = tr.contraction
        ok = c.start == cone.edge_loop(u, w) and replay(c, cone.oracle).ok
        valid = valid and ok
        counts.append(c.tr_count)
        env = env and c.tr_count <= 3 * tr.i2_vertices + 5 * tr.i0_vertices + 12 * tr.six_cycles
        if keep_traces:
            traces.append((u, w, tr))
    R = max(counts, default=0)
    bound = cone_bound(R, 2) if samples else None
    return SampledConeReport(g, p, tuple(sorted(I)), samples, seed, R, bound, valid, counts, env, True, traces)
