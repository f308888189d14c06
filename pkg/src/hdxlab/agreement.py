"""Agreement tests: ensembles, V/Z tests and their extensions, agreement
estimates, a plurality decoder and the cover counterexample.

Ensembles are lazy: f_s is a deterministic function of (seed, s), so huge
complexes such as the full simplex on 61 vertices are handled by sampling.
"""
from __future__ import annotations

import csv
import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complex import Complex
from .covers import CoverMap
from .faces import wilson

EXACT_LIMIT = 10**6


class ParameterError(ValueError):
    pass


# ensembles

class Ensemble:
    """F = {f_s : s -> Sigma}; values(s) returns f_s on sorted(s)."""

    q: int

    def values(self, s) -> np.ndarray:
        raise NotImplementedError

    def table(self, faces) -> "TableEnsemble":
        return TableEnsemble(self.q, {tuple(sorted(s)): tuple(int(x) for x in self.values(s)) for s in faces})


def _rng(seed: int, tag: int, s) -> np.random.Generator:
    return np.random.default_rng([seed, tag, *map(int, s)])


@dataclass
class PlantedEnsemble(Ensemble):
    G: dict
    q: int
    eta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.eta < 1:
            raise ValueError("noise rate must lie in [0, 1)")

    def values(self, s) -> np.ndarray:
        s = sorted(s)
        out = np.array([self.G[v] for v in s], dtype=np.int64)
        if self.eta > 0:
            r = _rng(self.seed, 1, s)
            hit = r.random(len(s)) < self.eta
            out[hit] = r.integers(0, self.q, size=int(hit.sum()))
        return out


@dataclass
class IIDEnsemble(Ensemble):
    q: int
    seed: int = 0

    def values(self, s) -> np.ndarray:
        return _rng(self.seed, 2, sorted(s)).integers(0, self.q, size=len(s))


@dataclass
class MixtureEnsemble(Ensemble):
    """Each face independently follows `a` with probability lam, else `b`."""
    a: Ensemble
    b: Ensemble
    lam: float
    seed: int = 0

    @property
    def q(self) -> int:
        return max(self.a.q, self.b.q)

    def values(self, s) -> np.ndarray:
        pick = _rng(self.seed, 3, sorted(s)).random() < self.lam
        return (self.a if pick else self.b).values(s)


@dataclass
class TableEnsemble(Ensemble):
    q: int
    f: dict  # sorted face tuple -> tuple of symbols

    def values(self, s) -> np.ndarray:
        return np.array(self.f[tuple(sorted(s))], dtype=np.int64)

    def to_json(self) -> dict:
        return {"q": self.q, "faces": [{"face": list(s), "values": list(v)} for s, v in sorted(self.f.items())]}

    @classmethod
    def from_json(cls, d) -> "TableEnsemble":
        return cls(d["q"], {tuple(e["face"]): tuple(e["values"]) for e in d["faces"]})


def plant(X: Complex, G: dict, eta: float, seed: int = 0, q: int | None = None) -> PlantedEnsemble:
    q = q if q is not None else max(G.values()) + 1
    return PlantedEnsemble(dict(G), q, eta, seed)


def plant_cover(cov: CoverMap, G: dict, k: int, rule: str = "random", seed: int = 0, q: int | None = None) -> TableEnsemble:
    """f_s = G o (rho restricted to a chosen lift of s)^-1, one lift per k-face of the base.

    rule "random" picks a seeded-random lift; "first" takes the lift through
    the first vertex of the fiber over min(s)."""
    X = cov.base
    q = q if q is not None else max(G.values()) + 1
    f = {}
    for s in X.faces(k):
        lifts = cov.lifts(s)
        if rule == "random":
            lift = lifts[int(_rng(seed, 4, s).integers(len(lifts)))]
        elif rule == "first":
            lift = lifts[0]
        else:
            raise ValueError(f"unknown lift rule {rule}")
        f[s] = tuple(G[y] for y in lift)  # lift[i] lies over s[i]
    return TableEnsemble(q, f)


# test distributions

@dataclass(frozen=True)
class TestDistribution:
    """V: two k-faces meeting in r vertices; Z: s1-s2 and s2-s3 meet in r, s1 and s3 disjoint.

    kind "V" and "Z" use r = sqrt(k+1); "custom" is V-shaped with a given r."""
    kind: str
    k: int
    r: int

    __test__ = False  # not a pytest class

    @classmethod
    def v_test(cls, k: int) -> "TestDistribution":
        return cls("V", k, _root(k))

    @classmethod
    def z_test(cls, k: int) -> "TestDistribution":
        r = _root(k)
        if k + 1 < 2 * r:
            raise ParameterError(f"Z-test needs k+1 >= 2 sqrt(k+1), got k={k}")
        return cls("Z", k, r)

    @classmethod
    def custom(cls, k: int, r: int) -> "TestDistribution":
        if not 0 <= r <= k + 1:
            raise ParameterError("overlap out of range")
        return cls("custom", k, r)

    @property
    def queries(self) -> int:
        return 3 if self.kind == "Z" else 2

    @property
    def d(self) -> int:
        m = self.k + 1
        return (3 * m - 2 * self.r if self.kind == "Z" else 2 * m - self.r) - 1

    def split(self, perm) -> tuple:
        """Cut an ordering of t into the queried faces."""
        m, r = self.k + 1, self.r
        if self.kind == "Z":
            s1 = perm[:m]
            s2 = perm[m - r:2 * m - r]
            s3 = perm[2 * m - 2 * r:]
            return tuple(tuple(sorted(x)) for x in (s1, s2, s3))
        return tuple(sorted(perm[:m])), tuple(sorted(perm[m - r:]))

    def tuples(self, t) -> list:
        """All query tuples inside t (uniform under the test)."""
        t = tuple(t)
        m, r = self.k + 1, self.r
        out = []
        if self.kind == "Z":
            for s1 in itertools.combinations(t, m):
                rest = [v for v in t if v not in s1]
                for a in itertools.combinations(s1, r):
                    for s3 in itertools.combinations(rest, m):
                        mid = [v for v in rest if v not in s3]
                        for b in itertools.combinations(s3, r):
                            s2 = tuple(sorted(a + tuple(mid) + b))
                            out.append((s1, s2, s3))
        else:
            for s1 in itertools.combinations(t, m):
                rest = tuple(v for v in t if v not in s1)
                for a in itertools.combinations(s1, r):
                    out.append((s1, tuple(sorted(a + rest))))
        return out

    def tuples_per_face(self) -> int:
        m, r, n = self.k + 1, self.r, self.d + 1
        if self.kind == "Z":
            return math.comb(n, m) * math.comb(m, r) * math.comb(n - m, m) * math.comb(m, r)
        return math.comb(n, m) * math.comb(m, r)


def _root(k: int) -> int:
    r = math.isqrt(k + 1)
    if r * r != k + 1:
        raise ParameterError(f"k+1 = {k + 1} is not a perfect square")
    return r


def _check_dims(X: Complex, D: TestDistribution) -> None:
    if D.d > X.dim:
        raise ParameterError(f"test needs {D.d}-faces but dim X = {X.dim}")


def sample_tuple(X: Complex, D: TestDistribution, rng: np.random.Generator, probs=None) -> tuple:
    """Extension: t from X(d) (a top face, then a uniform (d+1)-subset), then the test inside t."""
    T = X.top_faces[rng.choice(len(X.top_faces), p=probs) if len(X.top_faces) > 1 else 0]
    t = rng.choice(np.array(T), size=D.d + 1, replace=False)
    return D.split(rng.permutation(t).tolist())


def _top_probs(X: Complex):
    return np.array([float(w) for w in X.weights]) if len(X.top_faces) > 1 else None


def exact_size(X: Complex, D: TestDistribution) -> int:
    return len(X.top_faces) * math.comb(X.dim + 1, D.d + 1) * D.tuples_per_face()


def weighted_tuples(X: Complex, D: TestDistribution):
    """Yield (tuple, weight) over the whole extended test; weights sum to 1."""
    per_t = D.tuples_per_face()
    sub = math.comb(X.dim + 1, D.d + 1)
    for T, w in zip(X.top_faces, X.weights):
        share = w / (sub * per_t)
        for t in itertools.combinations(T, D.d + 1):
            for tup in D.tuples(t):
                yield tup, share


def agree_event(F: Ensemble, tup) -> bool:
    vals = [dict(zip(s, F.values(s))) for s in tup]
    for a, b in itertools.combinations(range(len(tup)), 2):
        for v in set(tup[a]) & set(tup[b]):
            if vals[a][v] != vals[b][v]:
                return False
    return True


def explained_event(F: Ensemble, G: dict, tup, eta: float) -> bool:
    if not agree_event(F, tup):
        return False
    for s in tup:
        f = F.values(s)
        miss = sum(int(x != G.get(v)) for v, x in zip(s, f))
        if miss > eta * len(s) + 1e-12:
            return False
    return True


@dataclass
class AgreeEstimate:
    value: float
    lo: float
    hi: float
    exact: bool
    trials: int
    fraction: Fraction | None = None


def _estimate(X, D, event, trials, seed) -> AgreeEstimate:
    _check_dims(X, D)
    if exact_size(X, D) <= EXACT_LIMIT:
        acc = Fraction(0)
        for tup, w in weighted_tuples(X, D):
            if event(tup):
                acc += w
        v = float(acc)
        return AgreeEstimate(v, v, v, True, 0, acc)
    probs = _top_probs(X)
    hits = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        hits += bool(event(sample_tuple(X, D, rng, probs)))
    e = wilson(hits, trials)
    return AgreeEstimate(e.value, e.lo, e.hi, False, trials)


def agree(X: Complex, F: Ensemble, D: TestDistribution, trials: int = 10**5, seed: int = 0) -> AgreeEstimate:
    """Pr over the extended test that all queried local functions agree on overlaps."""
    return _estimate(X, D, lambda tup: agree_event(F, tup), trials, seed)


# decoding

def sample_face(X: Complex, k: int, rng: np.random.Generator, probs=None) -> tuple:
    T = X.top_faces[rng.choice(len(X.top_faces), p=probs) if len(X.top_faces) > 1 else 0]
    return tuple(sorted(rng.choice(np.array(T), size=k + 1, replace=False).tolist()))


def plurality(X: Complex, F: Ensemble, k: int, votes: int | None = None, seed: int = 0) -> dict:
    """G(v) = most common f_s(v) over k-faces s containing v (ties to the smaller symbol).

    Votes come from all k-faces when they can be listed, else from `votes`
    faces drawn from the k-face distribution."""
    tally = defaultdict(Counter)
    n_k = len(X.top_faces) * math.comb(X.dim + 1, k + 1)
    if votes is None and n_k <= EXACT_LIMIT:
        for s, w in X.face_weights(k).items():
            for v, x in zip(s, F.values(s)):
                tally[v][int(x)] += w
    else:
        rng = np.random.default_rng([seed, 7])
        probs = _top_probs(X)
        for _ in range(votes or 10**4):
            s = sample_face(X, k, rng, probs)
            for v, x in zip(s, F.values(s)):
                tally[v][int(x)] += 1
    return {v: min(c, key=lambda x: (-c[x], x)) for v, c in tally.items()}


@dataclass
class DecodeResult:
    G: dict
    explained: float  # Pr[event | the test accepts]
    joint: AgreeEstimate  # Pr[G explains every query and the test accepts]
    agree: AgreeEstimate


def decode_global(X: Complex, F: Ensemble, D: TestDistribution, eta: float, trials: int = 10**5,
                  seed: int = 0, votes: int | None = None) -> DecodeResult:
    """Plurality decoder; measures how much of the accepted mass G explains within eta."""
    G = plurality(X, F, D.k, votes, seed)
    joint = _estimate(X, D, lambda tup: explained_event(F, G, tup, eta), trials, seed)
    ag = agree(X, F, D, trials, seed)
    if ag.exact:
        ex = float(joint.fraction / ag.fraction) if ag.fraction else 0.0
    else:
        ex = joint.value / ag.value if ag.value else 0.0
    return DecodeResult(G, ex, joint, ag)


# sweeps

@dataclass
class SweepRow:
    family: str
    param: float
    agree: float
    ci_lo: float
    ci_hi: float
    explained: float


def soundness_sweep(X: Complex, D: TestDistribution, family, grid, eta: float, trials: int = 2000,
                    seed: int = 0) -> list[SweepRow]:
    """family(param) -> (name, Ensemble); one row of (Agree, explained) per grid point."""
    rows = []
    for x in grid:
        name, F = family(x)
        res = decode_global(X, F, D, eta, trials, seed)
        a = res.agree
        rows.append(SweepRow(name, x, a.value, a.lo, a.hi, res.explained))
    return rows


def mixture_family(X: Complex, G: dict, q: int, eta: float = 0.0, seed: int = 0):
    def fam(lam):
        return "mixture", MixtureEnsemble(PlantedEnsemble(G, q, eta, seed), IIDEnsemble(q, seed + 1), lam, seed + 2)
    return fam


def write_sweep(rows: list[SweepRow], path, digits: int = 6) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "param", "agree", "ci_lo", "ci_hi", "explained"])
        for r in rows:
            w.writerow([r.family, f"{r.param:g}"] + [f"{x:.{digits}f}" for x in (r.agree, r.ci_lo, r.ci_hi, r.explained)])


def intersection_sizes(tup) -> dict:
    return {(a, b): len(set(tup[a]) & set(tup[b])) for a, b in itertools.combinations(range(len(tup)), 2)}
