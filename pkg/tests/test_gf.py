import numpy as np
import pytest
from hypothesis import given, strategies as st

from hdxlab import gf
from hdxlab.gf import Subspace, SymplecticForm

import oracles

primes = st.sampled_from([2, 3, 5])


@st.composite
def matrices(draw, max_rows=5, max_n=6):
    p = draw(primes)
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, max_rows))
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=m, max_size=m))
    return p, n, np.array(rows, dtype=np.int64).reshape(m, n)


@given(matrices())
def test_rank_matches_oracle(data):
    p, n, M = data
    S = Subspace.span(M, n, p)
    assert S.dim == (oracles.rank_mod_p(M.tolist(), p) if len(M) else 0)


@given(matrices(), st.data())
def test_rref_is_canonical(data, draw):
    p, n, M = data
    S = Subspace.span(M, n, p)
    if len(M) == 0:
        return
    # an invertible mix of the rows spans the same space
    k = len(M)
    while True:
        C = np.array(draw.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=k, max_size=k),
                                        min_size=k, max_size=k)), dtype=np.int64)
        if oracles.rank_mod_p(C.tolist(), p) == k:
            break
    assert Subspace.span(C @ M % p, n, p) == S


@given(matrices(), matrices())
def test_sum_intersection_dimension(a, b):
    p, n, A = a
    _, m, B = b
    if m != n or b[0] != p:
        B = np.zeros((0, n), dtype=np.int64)
    SA, SB = Subspace.span(A, n, p), Subspace.span(B, n, p)
    assert (SA + SB).dim + (SA & SB).dim == SA.dim + SB.dim
    assert SA.contains(SA & SB) and SB.contains(SA & SB)
    assert (SA + SB).contains(SA)


@given(matrices())
def test_json_roundtrip(data):
    p, n, M = data
    S = Subspace.span(M, n, p)
    assert Subspace.from_json(S.to_json()) == S


def test_rref_rejects_bad_entries():
    with pytest.raises(ValueError):
        gf.rref([[0, 5]], 3, 2)


@pytest.mark.parametrize("n,p,k,count", [(3, 2, 1, 7), (3, 2, 2, 7), (4, 2, 2, 35), (4, 3, 2, 130)])
def test_enumerate_subspaces_counts(n, p, k, count):
    subs = gf.enumerate_subspaces(n, p, k)
    assert len(subs) == count == gf.gaussian_binomial(n, k, p)
    assert len(set(subs)) == count


def test_enumeration_matches_bruteforce_sets():
    got = {frozenset(oracles.span_set(S.rows, 2)) for S in gf.enumerate_subspaces(4, 2, 2)}
    assert got == oracles.all_subspaces(4, 2, 2)


@pytest.mark.parametrize("g,p", [(2, 2), (2, 3)])
def test_isotropic_counts(g, p):
    form = SymplecticForm.standard(g, p)
    for k in range(g + 1):
        assert len(gf.enumerate_isotropic(form, k)) == oracles.isotropic_count(g, p, k) == gf.count_isotropic(g, p, k)


def test_symplectic_form_validation():
    with pytest.raises(ValueError):
        SymplecticForm(np.eye(2, dtype=np.int64), 3)
    with pytest.raises(ValueError):
        SymplecticForm(np.zeros((2, 2), dtype=np.int64), 3)


@given(st.sampled_from([(2, 2), (2, 3), (3, 2), (4, 3)]), st.integers(0, 2**32 - 1), st.data())
def test_perp_and_quotient_laws(gp, seed, data):
    g, p = gp
    form = SymplecticForm.standard(g, p)
    rng = np.random.default_rng(seed)
    k = data.draw(st.integers(0, 2 * g))
    M = rng.integers(0, p, size=(k, 2 * g))
    v = Subspace.span(M, 2 * g, p)
    W = gf.perp(form, v)
    assert W.dim == 2 * g - v.dim
    assert gf.perp(form, W) == v
    assert not form.pairing(W.array, v.array).any() if v.dim and W.dim else True
    j = data.draw(st.integers(0, g))
    u = gf.random_isotropic(form, j, rng)
    q = gf.quotient_form(form, u)
    assert q.dim == 2 * (g - j)
    if q.dim:
        q.as_form()  # raises when degenerate
        img = q.image(gf.perp(form, u))
        assert img.dim == q.dim


def test_quotient_rejects_non_isotropic():
    form = SymplecticForm.standard(2, 3)
    v = Subspace.span([[1, 0, 0, 0], [0, 0, 1, 0]], 4, 3)
    with pytest.raises(gf.NonIsotropic):
        gf.quotient_form(form, v)


@given(st.integers(0, 2**32 - 1))
def test_least_outside_is_lex_least(seed):
    rng = np.random.default_rng(seed)
    p, n = 3, 4
    K = Subspace.span(rng.integers(0, p, size=(3, n)), n, p)
    C = Subspace.span(rng.integers(0, p, size=(1, n)), n, p) & K
    x = gf.least_outside(K, C)
    outside = sorted(v for v in oracles.span_set(K.rows, p) if not C.contains_vector(v)) if K.dim else []
    if not outside:
        assert x is None
    else:
        assert tuple(x) == outside[0]


@given(st.sampled_from([(3, 2), (4, 3), (6, 2)]), st.integers(0, 2**32 - 1), st.data())
def test_extend_isotropic(gp, seed, data):
    g, p = gp
    form = SymplecticForm.standard(g, p)
    rng = np.random.default_rng(seed)
    a = data.draw(st.integers(0, g))
    b = data.draw(st.integers(a, g))
    v = gf.random_isotropic(form, a, rng)
    w = gf.extend_isotropic(form, v, b)
    assert w.dim == b and w.contains(v) and gf.is_isotropic(form, w)
    # deterministic
    assert gf.extend_isotropic(form, v, b) == w


def test_extend_errors():
    form = SymplecticForm.standard(2, 2)
    v = Subspace.span([[1, 0, 0, 0], [0, 0, 1, 0]], 4, 2)
    with pytest.raises(gf.NonIsotropic):
        gf.extend_isotropic(form, v, 2)
    u = Subspace.span([[1, 0, 0, 0]], 4, 2)
    with pytest.raises(gf.NoExtension):
        gf.extend_isotropic(form, u, 3)
    with pytest.raises(gf.NoExtension):
        gf.extend_isotropic(form, u, 2, within=Subspace.span([[1, 0, 0, 0], [0, 0, 1, 0]], 4, 2))


def test_symplectic_basis_is_standard():
    form = SymplecticForm.standard(3, 5)
    rng = np.random.default_rng(1)
    while True:
        A = rng.integers(0, 5, size=(6, 6))
        if oracles.rank_mod_p(A.tolist(), 5) == 6:
            break
    G = A @ form.gram @ A.T % 5
    B = gf.symplectic_basis(G, 5)
    assert np.array_equal(B @ G @ B.T % 5, gf.standard_gram(3, 5))
