"""Faces complexes F^r X, colored faces complexes, well-spread colors and the
tensor decomposition of faces-complex links of joins."""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binomtest

from .buildings import DEFAULT_BUDGET, BudgetExceeded
from .complex import Complex, color_restrict, link


class NotAJoin(ValueError):
    pass


def _partitions(items: tuple, size: int, blocks: int):
    """Unordered collections of `blocks` disjoint `size`-subsets of items."""
    if blocks == 0:
        yield ()
        return
    if len(items) < size * blocks:
        return
    first, rest = items[0], items[1:]
    # either the first item opens a block or it is left over
    for others in itertools.combinations(rest, size - 1):
        block = (first,) + others
        left = tuple(x for x in rest if x not in others)
        for tail in _partitions(left, size, blocks - 1):
            yield (block,) + tail
    if len(rest) >= size * blocks:
        yield from _partitions(rest, size, blocks)


def count_partitions(n: int, size: int, blocks: int) -> int:
    used = size * blocks
    return math.comb(n, used) * math.factorial(used) // (math.factorial(size) ** blocks * math.factorial(blocks))


def faces_complex(X: Complex, r: int, budget: int = DEFAULT_BUDGET) -> Complex:
    """F^r X.  Vertices are the r-faces of X (labels are the base tuples).

    Top faces come from the two-step sampler: a top face t of X, then a
    uniform collection of floor((d+1)/(r+1)) disjoint (r+1)-subsets of t;
    leftover vertices of t are dropped."""
    d = X.dim
    if not 0 <= r <= d:
        raise ValueError(f"need 0 <= r <= dim = {d}")
    blocks = (d + 1) // (r + 1)
    per = count_partitions(d + 1, r + 1, blocks)
    projected = len(X.top_faces) * per
    if projected > budget:
        raise BudgetExceeded(projected, budget)
    ids = {f: k for k, f in enumerate(X.faces(r))}
    acc = defaultdict(Fraction)
    for t, w in zip(X.top_faces, X.weights):
        share = w / per
        for part in _partitions(t, r + 1, blocks):
            acc[tuple(sorted(ids[b] for b in part))] += share
    faces = sorted(acc)
    labels = {k: f for f, k in ids.items()}
    used = set(itertools.chain.from_iterable(faces))
    return Complex(faces, [acc[f] for f in faces], None, {k: labels[k] for k in used}, X.p)


def faces_link(X: Complex, r: int, s) -> Complex:
    """The link of s (a face of F^r X given as base r-faces) computed as F^r(X_{cup s})."""
    s = [tuple(sorted(b)) for b in s]
    union = set(itertools.chain.from_iterable(s))
    if len(union) != sum(len(b) for b in s):
        raise ValueError("blocks of s are not disjoint")
    Xs = link(X, tuple(union))
    if Xs.dim < r:
        return Complex([()])
    return faces_complex(Xs, r)


def direct_faces_link(F: Complex, s) -> Complex:
    """The link of s inside an already built faces complex (for comparison)."""
    inv = {lab: v for v, lab in F.labels.items()}
    return link(F, [inv[tuple(sorted(b))] for b in s])


def same_weighted(A: Complex, B: Complex) -> bool:
    return A.canonical() == B.canonical()


# color sets

@dataclass(frozen=True)
class ColorSet:
    blocks: tuple  # tuple of frozensets, empty blocks allowed

    def __post_init__(self):
        seen = set()
        for c in self.blocks:
            if c & seen:
                raise ValueError("color blocks must be pairwise disjoint")
            seen |= c

    @classmethod
    def of(cls, blocks) -> "ColorSet":
        return cls(tuple(frozenset(c) for c in blocks))

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def union(self) -> frozenset:
        return frozenset().union(*self.blocks)

    def __le__(self, other: "ColorSet") -> bool:
        return self.m == other.m and all(a <= b for a, b in zip(self.blocks, other.blocks))

    def to_json(self) -> list:
        return [sorted(c) for c in self.blocks]

    @classmethod
    def from_json(cls, d) -> "ColorSet":
        return cls.of(d)


def bins(N, c) -> list[frozenset]:
    """The c-bins of the ordered set N: elements strictly between consecutive elements of c."""
    N = sorted(N)
    cs = sorted(c)
    if not cs:
        return [frozenset(N)]
    out = [frozenset(i for i in N if i < cs[0])]
    for a, b in zip(cs, cs[1:]):
        out.append(frozenset(i for i in N if a < i < b))
    out.append(frozenset(i for i in N if i > cs[-1]))
    return out


def classify_bin(B: frozenset, blocks) -> str:
    hit = sum(1 for c in blocks if B & c)
    return "crowded" if hit >= 2 else "lonely" if hit == 1 else "empty"


@dataclass
class SpreadReport:
    ok: bool
    failed: str | None = None
    detail: str = ""


def well_spread_check(J, n: int, d1: int, m: int | None = None) -> SpreadReport:
    """All clauses of the well-spread definition on colors N = {0, ..., n}; natural logs."""
    blocks = [frozenset(c) for c in (J.blocks if isinstance(J, ColorSet) else J)]
    m = len(blocks) if m is None else m
    if m <= 5 or len(blocks) != m:
        return SpreadReport(False, "size", f"need m = |J| > 5, got |J| = {len(blocks)}, m = {m}")
    for a, b in itertools.combinations(range(m), 2):
        if blocks[a] & blocks[b]:
            return SpreadReport(False, "disjoint", f"blocks {a} and {b} meet")
    pts = sorted(set().union(*blocks) | {0, n})
    gap = n / (m * (d1 + 1)) ** 3
    for a, b in zip(pts, pts[1:]):
        if b - a < gap:
            return SpreadReport(False, "spacing", f"|{b} - {a}| < {gap:.4g}")
    N = range(n + 1)
    L = math.log(d1 + 1)
    max_bin = 100 * n * L / ((d1 + 1) * m)
    max_crowded = 100 * (d1 + 1) * L / (m * math.log(m))
    max_hit = 20 * L / math.log(m)
    for Jp in itertools.combinations(range(m), 5):
        cstar = frozenset().union(*(blocks[j] for j in range(m) if j not in Jp))
        Bs = bins(N, cstar)
        for B in Bs:
            if len(B) > max_bin:
                return SpreadReport(False, "bin-size", f"bin of size {len(B)} > {max_bin:.4g} for J' = {Jp}")
        kinds = [classify_bin(B, [blocks[j] for j in Jp]) for B in Bs]
        for j in Jp:
            crowded = sum(len(B & blocks[j]) for B, k in zip(Bs, kinds) if k == "crowded")
            if crowded > max_crowded:
                return SpreadReport(False, "crowded", f"block {j} has {crowded} colors in crowded bins")
            worst = max(len(B & blocks[j]) for B in Bs)
            if worst > max_hit:
                return SpreadReport(False, "per-bin", f"block {j} puts {worst} colors in one bin")
    return SpreadReport(True)


def random_colorset(n: int, d1: int, m: int, rng: np.random.Generator) -> list:
    """m independent uniform (d1+1)-subsets of {0..n}; may overlap."""
    return [frozenset(rng.choice(n + 1, size=d1 + 1, replace=False).tolist()) for _ in range(m)]


@dataclass
class Estimate:
    value: float
    lo: float
    hi: float
    successes: int
    trials: int


def wilson(successes: int, trials: int, level: float = 0.95) -> Estimate:
    if trials == 0:
        return Estimate(float("nan"), 0.0, 1.0, 0, 0)
    ci = binomtest(successes, trials).proportion_ci(confidence_level=level, method="wilson")
    return Estimate(successes / trials, float(ci.low), float(ci.high), successes, trials)


def well_spread_probability(n: int, d1: int, m: int, trials: int, seed: int = 0) -> Estimate:
    rng = np.random.default_rng([seed, n, d1, m])
    hits = sum(well_spread_check(random_colorset(n, d1, m, rng), n, d1, m).ok for _ in range(trials))
    return wilson(hits, trials)


# colored faces complexes and the tensor decomposition

def color_class_weights(X: Complex, cset) -> dict:
    """Marginal weights of the faces of X with color set exactly cset."""
    cset = frozenset(cset)
    acc = defaultdict(Fraction)
    for f, w in zip(X.top_faces, X.weights):
        acc[tuple(v for v in f if X.colors[v] in cset)] += w
    return dict(acc)


def colored_faces(X: Complex, J: ColorSet) -> Complex:
    """F X[J]: vertices are faces of X colored by one block of J (an empty block
    gives one vertex, the empty face); top faces partition a face of color
    cup J along the blocks.  Vertex color j, label (j, base face)."""
    acc = color_class_weights(X, J.union)
    labels, ids = {}, {}

    def vid(j, face):
        key = (j, face)
        if key not in ids:
            ids[key] = len(ids)
            labels[ids[key]] = key
        return ids[key]

    faces = {}
    for wbar, w in acc.items():
        top = tuple(vid(j, tuple(v for v in wbar if X.colors[v] in c)) for j, c in enumerate(J.blocks))
        faces[top] = faces.get(top, 0) + w
    keys = sorted(faces, key=lambda f: sorted(f))
    return Complex(keys, [faces[f] for f in keys], {v: j for v, (j, _) in labels.items()}, labels, X.p)


def tensor(parts: list[Complex]) -> Complex:
    """Tensor product of m-partite complexes with colors 0..m-1 and labels (j, face):
    vertex (j, union of the j-parts), top faces and weights multiply."""
    m = len(parts[0].top_faces[0])
    labels, ids = {}, {}
    faces = defaultdict(Fraction)
    for combo in itertools.product(*[list(zip(P.top_faces, P.weights)) for P in parts]):
        w = Fraction(1)
        pieces = [[] for _ in range(m)]
        for P, (f, wf) in zip(parts, combo):
            w *= wf
            for v in f:
                j, face = P.label(v)
                pieces[j].extend(face)
        top = []
        for j in range(m):
            key = (j, tuple(sorted(pieces[j])))
            if key not in ids:
                ids[key] = len(ids)
                labels[ids[key]] = key
            top.append(ids[key])
        faces[tuple(top)] += w
    keys = list(faces)
    return Complex(keys, [faces[f] for f in keys], {v: j for v, (j, _) in labels.items()}, labels)


@dataclass
class Factor:
    bin: frozenset
    kind: str  # crowded, lonely or empty
    blocks: ColorSet
    complex: Complex


@dataclass
class TensorReport:
    factors: list
    direct: Complex
    product: Complex
    ok: bool
    complete_partite: list = field(default_factory=list)


def is_complete_partite(Z: Complex) -> bool:
    sizes = defaultdict(int)
    for v in Z.vertices:
        sizes[Z.colors[v]] += 1
    return len(Z.top_faces) == math.prod(sizes.values())


def _check_join(L: Complex, parts: list[Complex]) -> bool:
    want = {}
    for combo in itertools.product(*[list(zip(P.top_faces, P.weights)) for P in parts]):
        f = tuple(sorted(itertools.chain.from_iterable(c[0] for c in combo)))
        want[f] = math.prod((c[1] for c in combo), start=Fraction(1))
    return want == dict(zip(L.top_faces, L.weights))


def tensor_decompose_link(X: Complex, w, J: ColorSet) -> TensorReport:
    """Split the colored faces complex of the link of w along the col(w)-bins."""
    if X.colors is None:
        raise NotAJoin("need a colored complex")
    w = tuple(sorted(w))
    L = link(X, w) if w else X
    cw = {X.colors[v] for v in w}
    if J.union & cw:
        raise ValueError("J must avoid the colors of w")
    Bs = bins(X.color_set, cw)
    restr = [color_restrict(L, B) for B in Bs]
    if not _check_join(L, restr):
        raise NotAJoin("link is not the join of its bin restrictions")
    factors = []
    for B, S in zip(Bs, restr):
        Jt = ColorSet(tuple(c & B for c in J.blocks))
        factors.append(Factor(B, classify_bin(B, J.blocks), Jt, colored_faces(S, Jt)))
    direct = colored_faces(L, J)
    prod = tensor([f.complex for f in factors])
    cp = [is_complete_partite(f.complex) for f in factors]
    return TensorReport(factors, direct, prod, same_weighted(direct, prod), cp)
