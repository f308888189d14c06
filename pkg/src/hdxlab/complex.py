"""Pure weighted simplicial complexes.

A complex is stored as its top faces with exact rational weights.  Lower
faces are produced on demand and cached per level.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import networkx as nx


class FaceNotInComplex(KeyError):
    pass


class IdCollision(ValueError):
    pass


class NotPartite(ValueError):
    pass


class NoCliquesAtLevel(ValueError):
    pass


class Disconnected(ValueError):
    def __init__(self, components: int):
        super().__init__(f"graph has {components} components")
        self.components = components


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class Complex:
    """Pure d-dimensional complex given by weighted top faces.

    Vertex ids are ints.  `colors` maps ids to colors, `labels` maps ids to
    domain objects (subspaces, lifted pairs, faces of another complex).
    The empty complex {()} of dimension -1 is allowed; it is the unit of join.
    """

    def __init__(self, top_faces, weights=None, colors=None, labels=None, p=None, check=True):
        faces = [tuple(sorted(f)) for f in top_faces]
        if not faces:
            raise ValueError("a complex needs at least one top face")
        if weights is None:
            w = Fraction(1, len(faces))
            weights = [w] * len(faces)
        else:
            weights = [Fraction(x) for x in weights]
        order = sorted(range(len(faces)), key=faces.__getitem__)
        self.top_faces = [faces[i] for i in order]
        self.weights = [weights[i] for i in order]
        self.dim = len(self.top_faces[0]) - 1
        self.p = p
        self.colors = dict(colors) if colors else None
        self.labels = dict(labels) if labels else None
        self._levels: dict[int, dict] = {}
        self._star = None
        if check:
            self._validate()

    def _validate(self):
        seen = set()
        for f, w in zip(self.top_faces, self.weights):
            if len(f) != self.dim + 1:
                raise ValueError("complex is not pure")
            if len(set(f)) != len(f):
                raise ValueError(f"repeated vertex in face {f}")
            if w <= 0:
                raise ValueError("weights must be positive")
            if f in seen:
                raise ValueError(f"duplicate top face {f}")
            seen.add(f)
        if sum(self.weights) != 1:
            raise ValueError("weights must sum to 1")
        if self.colors is not None:
            missing = set(self.vertices) - set(self.colors)
            if missing:
                raise ValueError(f"uncolored vertices {sorted(missing)[:5]}")
            for f in self.top_faces:
                cs = [self.colors[v] for v in f]
                if len(set(cs)) != len(cs):
                    raise NotPartite(f"face {f} repeats a color")
            self.colors = {v: self.colors[v] for v in self.vertices}

    # basic structure

    @property
    def vertices(self) -> list:
        if not hasattr(self, "_vertices"):
            self._vertices = sorted(set(itertools.chain.from_iterable(self.top_faces)))
        return self._vertices

    @property
    def is_colored(self) -> bool:
        return self.colors is not None

    @property
    def color_set(self) -> list:
        return sorted(set(self.colors.values())) if self.colors else []

    def label(self, v):
        return self.labels[v] if self.labels else v

    def color(self, v):
        return self.colors[v]

    def color_of(self, face) -> frozenset:
        return frozenset(self.colors[v] for v in face)

    def faces(self, i: int) -> list:
        return sorted(self.face_weights(i))

    def face_weights(self, i: int) -> dict:
        """Marginal weight of each i-face (top-down)."""
        if i in self._levels:
            return self._levels[i]
        if i > self.dim or i < -1:
            raise ValueError(f"level {i} out of range for dimension {self.dim}")
        if i == self.dim:
            out = dict(zip(self.top_faces, self.weights))
        else:
            den = reduce(_lcm, (w.denominator for w in self.weights), 1)
            acc = Counter()
            for f, w in zip(self.top_faces, self.weights):
                num = w.numerator * (den // w.denominator)
                for s in itertools.combinations(f, i + 1):
                    acc[s] += num
            total = den * math.comb(self.dim + 1, i + 1)
            out = {s: Fraction(c, total) for s, c in sorted(acc.items())}
        self._levels[i] = out
        return out

    def count(self, i: int) -> int:
        return len(self.face_weights(i))

    @property
    def star_index(self) -> dict:
        if self._star is None:
            star = defaultdict(list)
            for k, f in enumerate(self.top_faces):
                for v in f:
                    star[v].append(k)
            self._star = {v: frozenset(ks) for v, ks in star.items()}
        return self._star

    def top_containing(self, s) -> list[int]:
        s = tuple(s)
        if not s:
            return list(range(len(self.top_faces)))
        try:
            ks = reduce(frozenset.intersection, (self.star_index[v] for v in s))
        except KeyError:
            return []
        return sorted(ks)

    def is_face(self, s) -> bool:
        s = tuple(sorted(set(s)))
        if len(s) > self.dim + 1:
            return False
        return bool(self.top_containing(s))

    def neighbors(self, v) -> set:
        out = set()
        for k in self.star_index.get(v, ()):
            out.update(self.top_faces[k])
        out.discard(v)
        return out

    def graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(self.vertices)
        if self.dim >= 1:
            G.add_edges_from(self.face_weights(1))
        return G

    def _derived(self, top_faces, weights, colors=True) -> "Complex":
        vs = set(itertools.chain.from_iterable(top_faces))
        cols = {v: self.colors[v] for v in vs} if (colors and self.colors) else None
        labs = {v: self.labels[v] for v in vs} if self.labels else None
        return Complex(top_faces, weights, cols, labs, self.p)

    def relabel(self, mapping) -> "Complex":
        """Rename vertex ids via mapping (dict or callable)."""
        m = mapping if callable(mapping) else mapping.__getitem__
        faces = [tuple(m(v) for v in f) for f in self.top_faces]
        cols = {m(v): c for v, c in self.colors.items()} if self.colors else None
        labs = {m(v): self.label(v) for v in self.vertices} if self.labels else None
        return Complex(faces, self.weights, cols, labs, self.p)

    def shift_ids(self, offset: int) -> "Complex":
        return self.relabel(lambda v: v + offset)

    def with_colors(self, colors) -> "Complex":
        return Complex(self.top_faces, self.weights, colors, self.labels, self.p)

    def canonical(self) -> dict:
        """Label-level description used to compare complexes with different ids."""
        return {frozenset(self.label(v) for v in f): w for f, w in zip(self.top_faces, self.weights)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return (self.top_faces == other.top_faces and self.weights == other.weights
                and self.colors == other.colors)

    def __repr__(self) -> str:
        return f"Complex(dim={self.dim}, vertices={len(self.vertices)}, top_faces={len(self.top_faces)})"

    # serialization

    def to_json(self) -> dict:
        out = {}
        if self.p is not None:
            out["p"] = self.p
        vs = []
        for v in self.vertices:
            e = {"id": v}
            if self.colors is not None:
                e["color"] = self.colors[v]
            if self.labels is not None:
                e["label"] = _encode_label(self.labels[v])
            vs.append(e)
        out["vertices"] = vs
        out["top_faces"] = [{"verts": list(f), "weight": f"{w.numerator}/{w.denominator}"}
                            for f, w in zip(self.top_faces, self.weights)]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "Complex":
        vs = d["vertices"]
        colors = {e["id"]: e["color"] for e in vs} if vs and all("color" in e for e in vs) else None
        labels = {e["id"]: _decode_label(e["label"]) for e in vs} if vs and all("label" in e for e in vs) else None
        faces = [tuple(t["verts"]) for t in d["top_faces"]]
        weights = [Fraction(t["weight"]) for t in d["top_faces"]]
        return cls(faces, weights, colors, labels, d.get("p"))


def _encode_label(x):
    from .gf import Subspace

    if isinstance(x, Subspace):
        return {"subspace": x.to_json()}
    if isinstance(x, (tuple, list)):
        return {"tuple": [_encode_label(y) for y in x]}
    if isinstance(x, frozenset):
        return {"set": sorted((_encode_label(y) for y in x), key=repr)}
    return x


def _decode_label(x):
    from .gf import Subspace

    if isinstance(x, dict):
        if "subspace" in x:
            return Subspace.from_json(x["subspace"])
        if "tuple" in x:
            return tuple(_decode_label(y) for y in x["tuple"])
        if "set" in x:
            return frozenset(_decode_label(y) for y in x["set"])
    return x


EMPTY = Complex([()])


def complete(n: int) -> Complex:
    """The full simplex on vertices 0..n (n+1 vertices, dimension n)."""
    return Complex([tuple(range(n + 1))])


def link(X: Complex, s) -> Complex:
    s = tuple(sorted(set(s)))
    ks = X.top_containing(s)
    if not ks:
        raise FaceNotInComplex(s)
    ss = set(s)
    faces = [tuple(v for v in X.top_faces[k] if v not in ss) for k in ks]
    total = sum(X.weights[k] for k in ks)
    weights = [X.weights[k] / total for k in ks]
    return X._derived(faces, weights)


def join(parts) -> Complex:
    parts = [P for P in parts]
    seen = set()
    for P in parts:
        vs = set(P.vertices)
        if vs & seen:
            raise IdCollision(f"shared vertex ids {sorted(vs & seen)[:5]}")
        seen |= vs
    colored = all(P.colors is not None or P.dim < 0 for P in parts)
    colors = {} if colored else None
    labels = {} if all(P.labels is not None or P.dim < 0 for P in parts) else None
    top = 0
    for P in parts:
        if P.dim < 0:
            continue
        if colored:
            shift = top + 1 - min(P.colors.values()) if colors else 0
            for v, c in P.colors.items():
                colors[v] = c + shift
            top = max(colors.values())
        if labels is not None:
            labels.update({v: P.labels[v] for v in P.vertices})
    faces, weights = [], []
    for combo in itertools.product(*[list(zip(P.top_faces, P.weights)) for P in parts]):
        faces.append(tuple(itertools.chain.from_iterable(f for f, _ in combo)))
        weights.append(reduce(lambda a, b: a * b, (w for _, w in combo), Fraction(1)))
    p = next((P.p for P in parts if P.p is not None), None)
    return Complex(faces, weights, colors or None, labels or None, p)


def color_restrict(X: Complex, I) -> Complex:
    if X.colors is None:
        raise NotPartite("color restriction needs a colored complex")
    I = set(I)
    if not I <= set(X.color_set):
        raise ValueError(f"colors {sorted(I - set(X.color_set))} not present")
    acc = defaultdict(Fraction)
    for f, w in zip(X.top_faces, X.weights):
        sub = tuple(v for v in f if X.colors[v] in I)
        if len(sub) != len(I):
            raise NotPartite(f"top face {f} is missing colors of {sorted(I)}")
        acc[sub] += w
    faces = sorted(acc)
    return X._derived(faces, [acc[f] for f in faces])


def skeleton(X: Complex, k: int) -> Complex:
    if k > X.dim:
        raise ValueError("skeleton level above dimension")
    fw = X.face_weights(k)
    faces = sorted(fw)
    return X._derived(faces, [fw[f] for f in faces])


def clique_complex(G, d: int) -> Complex:
    """Top faces = (d+1)-cliques of a graph (a networkx graph or a complex's 1-skeleton)."""
    src = None
    if isinstance(G, Complex):
        src = G
        G = G.graph()
    cliques = []
    for c in nx.enumerate_all_cliques(G):
        if len(c) > d + 1:
            break
        if len(c) == d + 1:
            cliques.append(tuple(sorted(c)))
    if not cliques:
        raise NoCliquesAtLevel(f"no cliques of size {d + 1}")
    if src is not None:
        return src._derived(cliques, None)
    return Complex(cliques)


def is_clique_complex(X: Complex) -> bool:
    """Every clique of the 1-skeleton is a face and there are no larger cliques."""
    if X.dim < 1:
        return True
    for c in nx.enumerate_all_cliques(X.graph()):
        if len(c) > X.dim + 1:
            return False
        if len(c) >= 3 and not X.is_face(c):
            return False
    return True


@dataclass(frozen=True)
class FaceDistribution:
    level: int
    probs: dict

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))


def face_distribution(X: Complex, i: int) -> FaceDistribution:
    return FaceDistribution(i, dict(X.face_weights(i)))


def push_down(dist: FaceDistribution) -> FaceDistribution:
    """Level-(i-1) marginal of a level-i distribution."""
    acc = defaultdict(Fraction)
    k = dist.level + 1
    for s, w in dist.probs.items():
        for t in itertools.combinations(s, k - 1):
            acc[t] += w / k
    return FaceDistribution(dist.level - 1, dict(acc))


def components(X: Complex) -> int:
    return nx.number_connected_components(X.graph())


def is_connected(X: Complex) -> bool:
    return X.dim >= 0 and nx.is_connected(X.graph())


def diameter(X: Complex) -> int:
    G = X.graph()
    c = nx.number_connected_components(G)
    if c != 1:
        raise Disconnected(c)
    return nx.diameter(G)


def torus7() -> Complex:
    """The 7-vertex triangulated torus: triangles {i,i+1,i+3} and {i,i+2,i+3} mod 7."""
    tri = set()
    for i in range(7):
        tri.add(tuple(sorted((i, (i + 1) % 7, (i + 3) % 7))))
        tri.add(tuple(sorted((i, (i + 2) % 7, (i + 3) % 7))))
    return Complex(sorted(tri))


def cycle_graph(n: int) -> Complex:
    return Complex([tuple(sorted((i, (i + 1) % n))) for i in range(n)])


def annulus(n: int) -> Complex:
    """Flag triangulation of an annulus: inner cycle 0..n-1, outer cycle n..2n-1.

    Triangles {a_i, a_i+1, b_i} and {a_i+1, b_i, b_i+1}; a clique complex for n >= 4."""
    tri = []
    for i in range(n):
        j = (i + 1) % n
        tri.append((i, j, n + i))
        tri.append((j, n + i, n + j))
    return Complex(tri)
