"""Spectra of complexes, swap walks and Grassmann posets.

Everything is dense.  A walk with joint law B (a nonnegative matrix whose
entries sum to 1) is analysed through the symmetric normalization
Dr^{-1/2} B Dc^{-1/2}; its top singular value is 1 and the second one is the
quantity we call lambda.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gf
from .buildings import BudgetExceeded
from .complex import Complex, Disconnected, color_restrict, link, skeleton
from .gf import Subspace, SymplecticForm

TOL = 1e-9
MAX_DENSE = 20000


@dataclass
class SpectralReport:
    lambda2: float
    lambda2_abs: float
    n: int
    eigenvalues: np.ndarray | None = None
    gammas: list = field(default_factory=list)
    tolerance: float = TOL

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1]) if self.eigenvalues is not None else float("nan")


def _normalize(B: np.ndarray):
    r = B.sum(axis=1)
    c = B.sum(axis=0)
    if (r <= 0).any() or (c <= 0).any():
        raise ValueError("walk has an isolated state")
    return B / np.sqrt(np.outer(r, c)), r, c


def adjacency(X: Complex) -> tuple[list, np.ndarray]:
    """Vertices and symmetric edge-weight matrix of the 1-skeleton."""
    vs = X.vertices
    idx = {v: i for i, v in enumerate(vs)}
    W = np.zeros((len(vs), len(vs)))
    for (a, b), w in X.face_weights(1).items():
        W[idx[a], idx[b]] = W[idx[b], idx[a]] = float(w) / 2
    return vs, W


def _components(W: np.ndarray) -> int:
    from scipy.sparse.csgraph import connected_components

    return connected_components(W > 0, directed=False)[0]


def graph_report(W: np.ndarray, require_connected: bool = True) -> SpectralReport:
    n = W.shape[0]
    if n > MAX_DENSE:
        raise BudgetExceeded(n, MAX_DENSE)
    if require_connected:
        c = _components(W)
        if c != 1:
            raise Disconnected(c)
    S, _, _ = _normalize(W)
    ev = np.sort(np.linalg.eigvalsh((S + S.T) / 2))[::-1]
    if n == 1:
        return SpectralReport(0.0, 0.0, 1, ev)
    lam = float(ev[1])
    lam_abs = float(max(abs(ev[1]), abs(ev[-1])))
    return SpectralReport(lam, lam_abs, n, ev)


def bipartite_report(B: np.ndarray, require_connected: bool = True) -> SpectralReport:
    """Second singular value of a bipartite walk with joint law B."""
    if max(B.shape) > MAX_DENSE:
        raise BudgetExceeded(max(B.shape), MAX_DENSE)
    if require_connected:
        m, n = B.shape
        full = np.zeros((m + n, m + n))
        full[:m, m:] = B
        full[m:, :m] = B.T
        c = _components(full)
        if c != 1:
            raise Disconnected(c)
    S, _, _ = _normalize(B)
    sv = np.linalg.svd(S, compute_uv=False)
    lam = float(sv[1]) if len(sv) > 1 else 0.0
    return SpectralReport(lam, lam, sum(B.shape), sv)


def lambda2(X: Complex, colors: tuple | None = None) -> SpectralReport:
    """Second eigenvalue of the 1-skeleton, or of the bipartite graph between two colors."""
    if colors is None:
        _, W = adjacency(X)
        return graph_report(W)
    return bipartite_report(colored_swap(X, [colors[0]], [colors[1]]).joint)


@dataclass
class WalkMatrix:
    rows: list
    cols: list
    joint: np.ndarray  # joint probability of (row, col)

    @property
    def matrix(self) -> np.ndarray:
        return self.joint / self.joint.sum(axis=1, keepdims=True)

    @property
    def stationary(self) -> np.ndarray:
        return self.joint.sum(axis=1)

    def report(self, require_connected: bool = False) -> SpectralReport:
        return bipartite_report(self.joint, require_connected)


def swap_walk(X: Complex, k: int, l: int) -> WalkMatrix:
    """S_{k,l}: pick a (k+l+1)-face and split it into a k-face and an l-face."""
    if k < 0 or l < 0 or k + l + 1 > X.dim:
        raise ValueError(f"swap walk ({k},{l}) needs k+l+1 <= dim = {X.dim}")
    rows, cols = X.faces(k), X.faces(l)
    ri = {s: i for i, s in enumerate(rows)}
    ci = {s: i for i, s in enumerate(cols)}
    B = np.zeros((len(rows), len(cols)))
    m = k + l + 2
    splits = math.comb(m, k + 1)
    for u, w in X.face_weights(k + l + 1).items():
        wu = float(w) / splits
        for t in itertools.combinations(u, k + 1):
            rest = tuple(v for v in u if v not in t)
            B[ri[t], ci[rest]] += wu
    return WalkMatrix(rows, cols, B)


def colored_swap(X: Complex, J1, J2) -> WalkMatrix:
    J1, J2 = set(J1), set(J2)
    if J1 & J2:
        raise ValueError("color sets must be disjoint")
    Y = color_restrict(X, J1 | J2)
    pairs = {}
    for f, w in zip(Y.top_faces, Y.weights):
        a = tuple(v for v in f if X.colors[v] in J1)
        b = tuple(v for v in f if X.colors[v] in J2)
        pairs[(a, b)] = pairs.get((a, b), 0.0) + float(w)
    rows = sorted({a for a, _ in pairs})
    cols = sorted({b for _, b in pairs})
    ri = {s: i for i, s in enumerate(rows)}
    ci = {s: i for i, s in enumerate(cols)}
    B = np.zeros((len(rows), len(cols)))
    for (a, b), w in pairs.items():
        B[ri[a], ci[b]] += w
    return WalkMatrix(rows, cols, B)


def local_spectra(X: Complex) -> dict:
    """Report for the 1-skeleton of every link X_s with s in X^{<= d-2}, including s = ()."""
    out = {}
    for i in range(-1, X.dim - 1):
        for s in (X.faces(i) if i >= 0 else [()]):
            L = link(X, s) if s else X
            _, W = adjacency(L)
            out[s] = graph_report(W, require_connected=False)
    return out


def two_sided_lambda(X: Complex) -> float:
    return max(r.lambda2_abs for r in local_spectra(X).values())


def one_sided_lambda(X: Complex) -> float:
    return max(r.lambda2 for r in local_spectra(X).values())


def swap_bound_check(X: Complex, k: int, l: int, tol: float = TOL) -> tuple[float, float, bool]:
    lam = swap_walk(X, k, l).report().lambda2
    bound = (k + 1) * (l + 1) * two_sided_lambda(X)
    return lam, bound, lam <= bound + tol


@dataclass
class TrickleReport:
    tau: float
    lam: float
    global_min: float
    global_max: float
    lower: float
    upper: float
    ok: bool


def trickle_check(X: Complex, tol: float = TOL) -> TrickleReport:
    """Vertex-link spectra in [-tau, lam] force the global nontrivial spectrum
    into [-tau/(1+tau), lam/(1-lam)]."""
    if X.dim < 2:
        raise ValueError("trickle-down needs dimension >= 2")
    tau, lam = 0.0, -1.0
    for v in X.vertices:
        _, W = adjacency(link(X, (v,)))
        r = graph_report(W, require_connected=True)
        tau = max(tau, -r.lambda_min)
        lam = max(lam, r.lambda2)
    _, W = adjacency(X)
    g = graph_report(W)
    nontrivial = g.eigenvalues[1:]
    lo = -tau / (1 + tau)
    hi = lam / (1 - lam) if lam < 1 else math.inf
    ok = bool(nontrivial.min() >= lo - tol and nontrivial.max() <= hi + tol)
    return TrickleReport(tau, lam, float(nontrivial.min()), float(nontrivial.max()), lo, hi, ok)


def partite_check(X: Complex, tol: float = TOL) -> tuple[float, float, bool]:
    """Global lambda2 against the worst color-pair bipartite lambda."""
    worst = 0.0
    for a, b in itertools.combinations(X.color_set, 2):
        worst = max(worst, colored_swap(X, [a], [b]).report().lambda2)
    g = lambda2(X).lambda2
    return g, worst, g <= worst + tol


# Grassmann posets

@dataclass
class Poset:
    """Levels P(0..d) of subspaces with the flag measure induced from the top."""

    p: int
    levels: list  # list of lists of Subspace
    measures: list  # list of np.ndarray
    up: list  # up[i][v_index in P(i+1)] = list of indices in P(i) contained in it

    @property
    def d(self) -> int:
        return len(self.levels) - 1


def _poset(p: int, n: int, levels: list) -> Poset:
    index = [{v: k for k, v in enumerate(L)} for L in levels]
    up = []
    for i in range(len(levels) - 1):
        local = gf.enumerate_subspaces(i + 1, p, i)
        rel = []
        for v in levels[i + 1]:
            if i == 0:
                rel.append([0])
            else:
                rel.append([index[i][Subspace.span((w.array @ v.array) % p, n, p)] for w in local])
        up.append(rel)
    d = len(levels) - 1
    mus = [None] * (d + 1)
    mus[d] = np.full(len(levels[d]), 1.0 / len(levels[d]))
    for i in range(d - 1, -1, -1):
        mu = np.zeros(len(levels[i]))
        for j, below in enumerate(up[i]):
            mu[below] += mus[i + 1][j] / len(below)
        mus[i] = mu
    return Poset(p, levels, mus, up)


def grassmann_poset(n: int, p: int, d: int, budget: int = 10**6) -> Poset:
    total = sum(gf.gaussian_binomial(n, k, p) for k in range(d + 1))
    if total > budget:
        raise BudgetExceeded(total, budget)
    return _poset(p, n, [gf.enumerate_subspaces(n, p, k) for k in range(d + 1)])


def isotropic_poset(g: int, p: int, d: int | None = None, budget: int = 10**6) -> Poset:
    d = g if d is None else d
    total = sum(gf.count_isotropic(g, p, k) for k in range(d + 1))
    if total > budget:
        raise BudgetExceeded(total, budget)
    form = SymplecticForm.standard(g, p)
    return _poset(p, 2 * g, [gf.enumerate_isotropic(form, k) for k in range(d + 1)])


def containment_joint(P: Poset, i: int) -> np.ndarray:
    """Joint law of (v in P(i), u in P(i+1)) with v a uniform hyperplane of u."""
    J = np.zeros((len(P.levels[i]), len(P.levels[i + 1])))
    for j, below in enumerate(P.up[i]):
        J[below, j] += P.measures[i + 1][j] / len(below)
    return J


def containment_joint_direct(P: Poset, i: int, j: int) -> np.ndarray:
    """Joint law of (v in P(i), u in P(j)), v uniform among i-subspaces of u."""
    n = P.levels[j][0].n
    index = {v: k for k, v in enumerate(P.levels[i])}
    local = gf.enumerate_subspaces(j, P.p, i)
    J = np.zeros((len(P.levels[i]), len(P.levels[j])))
    for k, u in enumerate(P.levels[j]):
        for w in local:
            v = Subspace.span((w.array @ u.array) % P.p, n, P.p) if i else Subspace.zero(n, P.p)
            J[index[v], k] += P.measures[j][k] / len(local)
    return J


def up_down(P: Poset, i: int) -> tuple[np.ndarray, np.ndarray]:
    """U_i as a |P(i+1)| x |P(i)| Markov matrix and its adjoint D_{i+1}."""
    J = containment_joint(P, i)
    U = (J / J.sum(axis=0, keepdims=True)).T
    D = J / J.sum(axis=1, keepdims=True)
    return U, D


def _sym(A: np.ndarray, mu: np.ndarray) -> np.ndarray:
    s = np.sqrt(mu)
    return (s[:, None] * A) / s[None, :]


def adjoint_defect(P: Poset, i: int) -> float:
    U, D = up_down(P, i)
    return float(np.abs(P.measures[i][:, None] * D - (P.measures[i + 1][:, None] * U).T).max())


def upper_walk(P: Poset, i: int) -> np.ndarray:
    U, D = up_down(P, i)
    return D @ U


def nonlazy_upper(P: Poset, i: int) -> np.ndarray:
    A = upper_walk(P, i)
    stay = np.diag(A).copy()
    M = A.copy()
    np.fill_diagonal(M, 0.0)
    return M / (1 - stay)[:, None]


def lower_walk(P: Poset, i: int) -> np.ndarray:
    U, D = up_down(P, i - 1)
    return U @ D


def laziness_identity_defect(P: Poset, i: int) -> float:
    c = (P.p - 1) / (P.p ** (i + 1) - 1)
    A = upper_walk(P, i)
    M = nonlazy_upper(P, i)
    return float(np.abs(A - (c * np.eye(A.shape[0]) + (1 - c) * M)).max())


def op_norm(A: np.ndarray, mu: np.ndarray) -> float:
    return float(np.linalg.norm(_sym(A, mu), 2))


def second_eigenvalue(A: np.ndarray, mu: np.ndarray) -> float:
    S = _sym(A, mu)
    ev = np.sort(np.linalg.eigvalsh((S + S.T) / 2))[::-1]
    return float(ev[1]) if len(ev) > 1 else 0.0


@dataclass
class EposetReport:
    gammas: list
    lambdas: list  # lambda(D_{i+1} U_i) for i = 1..d-1
    bounds: list
    ok: bool
    tolerance: float = TOL


def eposet_check(P: Poset, tol: float = TOL) -> EposetReport:
    d = P.d
    gammas = [0.0]
    for i in range(1, d):
        diff = nonlazy_upper(P, i) - lower_walk(P, i)
        gammas.append(op_norm(diff, P.measures[i]))
    lambdas, bounds = [], []
    for i in range(1, d):
        lambdas.append(second_eigenvalue(upper_walk(P, i), P.measures[i]))
        bounds.append(sum(P.p ** -t for t in range(1, i + 1)) + sum(gammas[: i + 1]))
    ok = all(l <= b + tol for l, b in zip(lambdas, bounds))
    return EposetReport(gammas, lambdas, bounds, ok, tol)


def containment_lambda(P: Poset, i: int, j: int) -> float:
    return bipartite_report(containment_joint_direct(P, i, j), require_connected=False).lambda2


def product_law_check(P: Poset, tol: float = TOL) -> list[tuple]:
    """(i, j, lambda2(C(P,i,j)), product of consecutive lambdas, ok) for all i < j."""
    steps = [bipartite_report(containment_joint(P, t), require_connected=False).lambda2 for t in range(P.d)]
    out = []
    for i, j in itertools.combinations(range(P.d + 1), 2):
        lam = containment_lambda(P, i, j)
        prod = float(np.prod(steps[i:j]))
        out.append((i, j, lam, prod, lam <= prod + tol))
    return out


def write_csv(path, rows) -> None:
    """rows: (walk name, n, lambda2, lambda2_abs, bound, pass)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["walk", "n", "lambda2", "lambda2_abs", "bound", "pass"])
        for r in rows:
            name, n, l2, la, bound, ok = r
            w.writerow([name, n, f"{l2:.12g}", f"{la:.12g}", "" if bound is None else f"{bound:.12g}",
                        "pass" if ok else "fail"])
