"""Linear algebra over F_p and symplectic geometry on F_p^{2g}.

Subspaces are stored in reduced row-echelon form, so equality and hashing
are plain tuple comparisons.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np


class NonIsotropic(ValueError):
    pass


class NoExtension(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not (2 <= p <= 1 << 16) or not is_prime(p):
        raise ValueError(f"not a supported field prime: {p}")
    return p


@lru_cache(maxsize=None)
def inverses(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    return inv


def rref_array(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduce M over F_p. Returns the nonzero rows and the pivot columns."""
    A = np.array(M, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    A %= p
    nrows, ncols = A.shape
    inv = inverses(p)
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        if A[r, c] != 1:
            A[r] = (A[r] * inv[A[r, c]]) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            A[rows] = (A[rows] - np.outer(col[rows], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M, p: int) -> int:
    return len(rref_array(M, p)[1])


def nullspace_array(M, p: int, ncols: int | None = None) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    A = np.array(M, dtype=np.int64)
    if A.size == 0:
        n = ncols if ncols is not None else A.shape[-1]
        return np.eye(n, dtype=np.int64)
    R, piv = rref_array(A, p)
    n = A.shape[1]
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        out[i, f] = 1
        for r, c in enumerate(piv):
            out[i, c] = (-R[r, f]) % p
    return out


@dataclass(frozen=True)
class Subspace:
    n: int
    p: int
    rows: tuple

    @classmethod
    def span(cls, M, n: int, p: int) -> "Subspace":
        A = np.asarray(M, dtype=np.int64)
        if A.size == 0:
            return cls(n, p, ())
        if A.ndim == 1:
            A = A.reshape(1, -1)
        if A.shape[1] != n:
            raise ValueError(f"ambient mismatch: rows of length {A.shape[1]}, expected {n}")
        R, _ = rref_array(A, p)
        return cls(n, p, tuple(map(tuple, R.tolist())))

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls(n, p, ())

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls.span(np.eye(n, dtype=np.int64), n, p)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def array(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array(self.rows, dtype=np.int64)

    @cached_property
    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(r) if x) for r in self.rows]

    def to_bytes(self) -> bytes:
        return np.ascontiguousarray(self.array, dtype=np.int64).tobytes()

    def _residual(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.int64)) % self.p
        if not self.rows:
            return X
        coeff = X[:, self.pivots]
        return (X - coeff @ self.array) % self.p

    def contains_vectors(self, X) -> np.ndarray:
        return ~self._residual(X).any(axis=1)

    def contains_vector(self, x) -> bool:
        return bool(self.contains_vectors(x)[0])

    def __contains__(self, x) -> bool:
        return self.contains_vector(x)

    def contains(self, other: "Subspace") -> bool:
        self._same_ambient(other)
        if other.dim == 0:
            return True
        if other.dim > self.dim:
            return False
        return bool(self.contains_vectors(other.array).all())

    def __le__(self, other: "Subspace") -> bool:
        return other.contains(self)

    def __lt__(self, other: "Subspace") -> bool:
        return self.dim < other.dim and other.contains(self)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace.span(np.vstack([self.array, other.array]), self.n, self.p)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.n, self.p)
        # a.A = b.B  <=>  (a, -b) in the left kernel of [A; B]
        stacked = np.vstack([self.array, other.array])
        K = nullspace_array(stacked.T, self.p)
        if K.size == 0:
            return Subspace.zero(self.n, self.p)
        return Subspace.span((K[:, : self.dim] @ self.array) % self.p, self.n, self.p)

    def coords(self, X) -> np.ndarray:
        """Coordinates of vectors of this subspace in its canonical basis."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64)) % self.p
        return X[:, self.pivots]

    def sort_key(self) -> tuple:
        return tuple(itertools.chain.from_iterable(self.rows))

    def _same_ambient(self, other: "Subspace") -> None:
        if self.n != other.n or self.p != other.p:
            raise ValueError("ambient mismatch")

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, d: dict) -> "Subspace":
        return cls.span(d["rows"], d["n"], d["p"]) if d["rows"] else cls.zero(d["n"], d["p"])

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, p={self.p}, rows={[list(r) for r in self.rows]})"


def rref(M, p: int, n: int | None = None) -> Subspace:
    A = np.asarray(M, dtype=np.int64)
    if n is None:
        n = A.shape[-1]
    if A.size and ((A < 0).any() or (A >= p).any()):
        raise ValueError("entries must lie in [0, p)")
    return Subspace.span(A, n, p)


def standard_gram(g: int, p: int) -> np.ndarray:
    I = np.eye(g, dtype=np.int64)
    Z = np.zeros((g, g), dtype=np.int64)
    return np.block([[Z, I], [(-I) % p, Z]]) % p


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    gram: np.ndarray
    p: int

    def __post_init__(self):
        G = np.asarray(self.gram, dtype=np.int64) % self.p
        object.__setattr__(self, "gram", G)
        if G.shape[0] != G.shape[1] or G.shape[0] % 2:
            raise ValueError("gram must be square of even size")
        if ((G + G.T) % self.p).any() or np.diag(G).any():
            raise ValueError("gram must be alternating")
        if rank(G, self.p) != G.shape[0]:
            raise ValueError("gram is degenerate")

    @classmethod
    def standard(cls, g: int, p: int) -> "SymplecticForm":
        check_prime(p)
        return cls(standard_gram(g, p), p)

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @property
    def g(self) -> int:
        return self.n // 2

    def pair(self, x, y) -> int:
        return int(np.asarray(x, dtype=np.int64) @ self.gram @ np.asarray(y, dtype=np.int64) % self.p)

    def pairing(self, A, B) -> np.ndarray:
        return (np.atleast_2d(A) @ self.gram @ np.atleast_2d(B).T) % self.p

    def __eq__(self, other) -> bool:
        return isinstance(other, SymplecticForm) and self.p == other.p and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash((self.p, self.gram.tobytes()))


def _check(form: SymplecticForm, v: Subspace) -> None:
    if v.n != form.n or v.p != form.p:
        raise ValueError("dimension mismatch between subspace and form")


def perp(form: SymplecticForm, v: Subspace) -> Subspace:
    _check(form, v)
    if v.dim == 0:
        return Subspace.full(form.n, form.p)
    K = nullspace_array((v.array @ form.gram) % form.p, form.p)
    return Subspace.span(K, form.n, form.p) if K.size else Subspace.zero(form.n, form.p)


def is_isotropic(form: SymplecticForm, v: Subspace) -> bool:
    _check(form, v)
    if v.dim <= 1:
        return True
    return not form.pairing(v.array, v.array).any()


def symplectic_basis(gram: np.ndarray, p: int) -> np.ndarray:
    """Rows e_1..e_m, f_1..f_m with <e_i, f_j> = delta_ij and the rest zero."""
    G = np.asarray(gram, dtype=np.int64) % p
    inv = inverses(p)
    rest = [row for row in np.eye(G.shape[0], dtype=np.int64)]
    es, fs = [], []
    form = lambda a, b: int(a @ G @ b % p)
    while rest:
        e = rest.pop(0)
        j = next((j for j, y in enumerate(rest) if form(e, y)), None)
        if j is None:
            raise ValueError("degenerate form")
        f = rest.pop(j)
        f = (f * inv[form(e, f)]) % p
        nxt = []
        for y in rest:
            a, b = form(y, f), form(y, e)
            nxt.append((y - a * e + b * f) % p)
        rest = nxt
        es.append(e)
        fs.append(f)
    return np.array(es + fs, dtype=np.int64).reshape(-1, G.shape[0])


def solve_left(B: np.ndarray, X: np.ndarray, p: int) -> np.ndarray:
    """Solve C @ B = X for C, with B square invertible."""
    n = B.shape[0]
    aug = np.hstack([B.T % p, np.atleast_2d(X).T % p])
    R, piv = rref_array(aug, p)
    if piv[:n] != list(range(n)) or len(piv) > n:
        raise ValueError("singular system")
    return R[:n, n:].T


@dataclass(frozen=True, eq=False)
class QuotientForm:
    """The form induced on v^perp / v, with representatives lifted to v^perp."""

    base: SymplecticForm
    v: Subspace
    reps: np.ndarray
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    def project(self, X) -> np.ndarray:
        """Quotient coordinates of vectors in v^perp."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64)) % self.base.p
        basis = np.vstack([self.reps, self.v.array]) if self.v.dim else self.reps
        C = solve_left(basis, X, self.base.p)
        return C[:, : self.dim]

    @cached_property
    def _standard_change(self) -> np.ndarray:
        return symplectic_basis(self.gram, self.base.p)

    def standard_coords(self, X) -> np.ndarray:
        """Coordinates in a basis where the induced form is the standard one."""
        return solve_left(self._standard_change, self.project(X), self.base.p)

    def image(self, u: Subspace) -> Subspace:
        """(u + v)/v as a subspace of F_p^{dim} with the standard form."""
        if not (u + self.v).contains(u) or not perp(self.base, self.v).contains(u):
            raise ValueError("subspace is not inside v^perp")
        if u.dim == 0:
            return Subspace.zero(self.dim, self.base.p)
        return Subspace.span(self.standard_coords(u.array), self.dim, self.base.p)

    def as_form(self) -> SymplecticForm:
        return SymplecticForm(self.gram, self.base.p)


def quotient_form(form: SymplecticForm, v: Subspace) -> QuotientForm:
    _check(form, v)
    if not is_isotropic(form, v):
        raise NonIsotropic("quotient form needs an isotropic subspace")
    W = perp(form, v)
    cur = v
    reps = []
    for row in W.array:
        if not cur.contains_vector(row):
            reps.append(row)
            cur = cur + Subspace.span(row, form.n, form.p)
    R = np.array(reps, dtype=np.int64).reshape(-1, form.n)
    return QuotientForm(form, v, R, form.pairing(R, R) if len(R) else np.zeros((0, 0), dtype=np.int64))


def _rref_patterns(n: int, k: int, p: int):
    """All k x n RREF matrices, pattern by pattern, as (pivots, free-slot list)."""
    for piv in itertools.combinations(range(n), k):
        ps = set(piv)
        slots = [[c for c in range(piv[i] + 1, n) if c not in ps] for i in range(k)]
        yield piv, slots


def _row_candidates(n: int, pivot: int, slots: list[int], p: int) -> np.ndarray:
    m = len(slots)
    rows = np.zeros((p**m, n), dtype=np.int64)
    rows[:, pivot] = 1
    if m:
        rows[:, slots] = np.array(list(itertools.product(range(p), repeat=m)), dtype=np.int64)
    return rows


def enumerate_subspaces(n: int, p: int, k: int) -> list[Subspace]:
    """Every k-subspace of F_p^n, in lexicographic order of canonical matrices."""
    if k < 0 or k > n:
        return []
    if k == 0:
        return [Subspace.zero(n, p)]
    out = []
    for piv, slots in _rref_patterns(n, k, p):
        cands = [_row_candidates(n, piv[i], slots[i], p) for i in range(k)]
        for combo in itertools.product(*[range(c.shape[0]) for c in cands]):
            rows = tuple(tuple(cands[i][j].tolist()) for i, j in enumerate(combo))
            out.append(Subspace(n, p, rows))
    out.sort(key=Subspace.sort_key)
    return out


def enumerate_isotropic(form: SymplecticForm, k: int) -> list[Subspace]:
    """Every isotropic k-subspace, in lexicographic order of canonical matrices.

    Rows are filled one at a time and pruned as soon as a pair pairs nontrivially.
    """
    n, p = form.n, form.p
    if k < 0 or k > form.g:
        return []
    if k == 0:
        return [Subspace.zero(n, p)]
    G = form.gram
    out = []
    for piv, slots in _rref_patterns(n, k, p):
        cands = [_row_candidates(n, piv[i], slots[i], p) for i in range(k)]

        def rec(i, chosen):
            if i == k:
                out.append(Subspace(n, p, tuple(tuple(r.tolist()) for r in chosen)))
                return
            C = cands[i]
            if chosen:
                ok = ~((C @ G @ np.array(chosen).T) % p).any(axis=1)
                C = C[ok]
            for row in C:
                chosen.append(row)
                rec(i + 1, chosen)
                chosen.pop()

        rec(0, [])
    out.sort(key=Subspace.sort_key)
    return out


def least_outside(K: Subspace, C: Subspace) -> np.ndarray | None:
    """Lexicographically least vector of K that is not in C (None if K <= C).

    With K in RREF, the least vector outside C is the lowest basis row not in C.
    """
    for row in reversed(K.rows):
        if not C.contains_vector(row):
            return np.array(row, dtype=np.int64)
    return None


def extend_isotropic(form: SymplecticForm, v: Subspace, target_dim: int, within: Subspace | None = None) -> Subspace:
    _check(form, v)
    if not is_isotropic(form, v):
        raise NonIsotropic("cannot extend a non-isotropic subspace")
    if target_dim < v.dim or target_dim > form.g:
        raise NoExtension(f"target dimension {target_dim} out of range")
    if within is not None and not within.contains(v):
        raise NoExtension("v is not inside the given subspace")
    cur = v
    while cur.dim < target_dim:
        K = perp(form, cur)
        if within is not None:
            K = K & within
        x = least_outside(K, cur)
        if x is None:
            raise NoExtension(f"stuck at dimension {cur.dim}")
        cur = cur + Subspace.span(x, form.n, form.p)
    return cur


def random_vector_in(S: Subspace, rng: np.random.Generator) -> np.ndarray:
    c = rng.integers(0, S.p, size=S.dim)
    return (c @ S.array) % S.p


def random_isotropic(form: SymplecticForm, k: int, rng: np.random.Generator, inside: Subspace | None = None) -> Subspace:
    """A random isotropic k-subspace, built one random vector at a time."""
    cur = Subspace.zero(form.n, form.p)
    while cur.dim < k:
        K = perp(form, cur)
        if inside is not None:
            K = K & inside
        if K.dim <= cur.dim:
            raise NoExtension("no room to extend")
        while True:
            x = random_vector_in(K, rng)
            if not cur.contains_vector(x):
                break
        cur = cur + Subspace.span(x, form.n, form.p)
    return cur


def random_subspace_of(S: Subspace, k: int, rng: np.random.Generator) -> Subspace:
    while True:
        C = rng.integers(0, S.p, size=(k, S.dim))
        U = Subspace.span((C @ S.array) % S.p, S.n, S.p) if k else Subspace.zero(S.n, S.p)
        if U.dim == k:
            return U


def first_subspace_of(S: Subspace, k: int) -> Subspace:
    """Span of the first k canonical basis rows."""
    if k == 0:
        return Subspace.zero(S.n, S.p)
    return Subspace(S.n, S.p, S.rows[:k])


def gaussian_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def count_isotropic(g: int, p: int, k: int) -> int:
    if k < 0 or k > g:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (2 * (g - i)) - 1
        den *= p ** (i + 1) - 1
    return num // den
