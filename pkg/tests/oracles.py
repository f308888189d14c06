"""Brute-force reference implementations used only by the tests.

Each one is deliberately naive and shares no code with the package: vectors
are enumerated exhaustively, ranks come from a plain fraction-free sweep.
"""
import itertools
from fractions import Fraction


def rank_mod_p(rows, p):
    M = [list(map(int, r)) for r in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] % p), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], p - 2, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c] % p:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def all_vectors(n, p):
    return list(itertools.product(range(p), repeat=n))


def span_set(rows, p):
    n = len(rows[0])
    out = set()
    for coef in itertools.product(range(p), repeat=len(rows)):
        out.add(tuple(sum(c * r[i] for c, r in zip(coef, rows)) % p for i in range(n)))
    return frozenset(out)


def all_subspaces(n, p, k):
    """Every k-dim subspace of F_p^n as the frozenset of its vectors."""
    if k == 0:
        return {frozenset([tuple([0] * n)])}
    vecs = [v for v in all_vectors(n, p) if any(v)]
    seen = set()
    for rows in itertools.combinations(vecs, k):
        if rank_mod_p(rows, p) == k:
            seen.add(span_set(rows, p))
    return seen


def std_pair(x, y, g, p):
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g)) % p


def isotropic_count(g, p, k):
    n = 2 * g
    return sum(1 for S in all_subspaces(n, p, k)
               if all(std_pair(x, y, g, p) == 0 for x in S for y in S))


def cohomology_dims_bruteforce(top_faces, ell):
    """dim Z^1 and dim B^1 over Z/ell by counting cochains (small complexes only)."""
    verts = sorted({v for f in top_faces for v in f})
    edges = sorted({e for f in top_faces for e in itertools.combinations(sorted(f), 2)})
    tris = sorted({t for f in top_faces for t in itertools.combinations(sorted(f), 3)})
    eidx = {e: i for i, e in enumerate(edges)}
    Z = 0
    for f in itertools.product(range(ell), repeat=len(edges)):
        if all((f[eidx[(a, b)]] + f[eidx[(b, c)]] - f[eidx[(a, c)]]) % ell == 0 for a, b, c in tris):
            Z += 1
    B = set()
    for h in itertools.product(range(ell), repeat=len(verts)):
        hv = dict(zip(verts, h))
        B.add(tuple((hv[a] - hv[b]) % ell for a, b in edges))
    import math
    return round(math.log(Z, ell)), round(math.log(len(B), ell))


def h1_bruteforce(top_faces, ell):
    """min over non-cocycles f of wt(delta f) / dist(f, Z^1), uniform top weights, Z/ell."""
    verts = sorted({v for f in top_faces for v in f})
    edges = sorted({e for f in top_faces for e in itertools.combinations(sorted(f), 2)})
    tris = sorted({t for f in top_faces for t in itertools.combinations(sorted(f), 3)})
    # marginal weights from uniform top faces
    ew = {e: Fraction(0) for e in edges}
    tw = {t: Fraction(0) for t in tris}
    wtop = Fraction(1, len(top_faces))
    for f in top_faces:
        f = sorted(f)
        es = list(itertools.combinations(f, 2))
        ts = list(itertools.combinations(f, 3))
        for e in es:
            ew[e] += wtop / len(es)
        for t in ts:
            tw[t] += wtop / len(ts)
    eidx = {e: i for i, e in enumerate(edges)}

    def bad(f):
        return [(a, b, c) for a, b, c in tris
                if (f[eidx[(a, b)]] + f[eidx[(b, c)]] - f[eidx[(a, c)]]) % ell]

    cochains = list(itertools.product(range(ell), repeat=len(edges)))
    Z = [f for f in cochains if not bad(f)]
    best = None
    for f in cochains:
        bt = bad(f)
        if not bt:
            continue
        wd = sum(tw[t] for t in bt)
        dist = min(sum(ew[e] for e, x, y in zip(edges, f, z) if x != y) for z in Z)
        r = wd / dist
        best = r if best is None or r < best else best
    return best
