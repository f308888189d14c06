import itertools
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from hdxlab import complex as cx
from hdxlab.complex import Complex


@st.composite
def small_complexes(draw):
    n = draw(st.integers(4, 8))
    d = draw(st.integers(1, 3))
    pool = list(itertools.combinations(range(n), d + 1))
    faces = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=8, unique=True))
    ws = draw(st.lists(st.integers(1, 5), min_size=len(faces), max_size=len(faces)))
    tot = sum(ws)
    return Complex(faces, [Fraction(w, tot) for w in ws])


def test_complete_counts():
    X = cx.complete(5)
    assert len(X.vertices) == 6 and X.dim == 5
    assert X.count(1) == 15 and X.count(2) == 20


@given(small_complexes())
def test_marginals_sum_to_one(X):
    for i in range(-1, X.dim + 1):
        assert sum(X.face_weights(i).values()) == 1


@given(small_complexes())
def test_push_down_agrees_with_marginals(X):
    for i in range(1, X.dim + 1):
        assert cx.push_down(cx.face_distribution(X, i)).probs == X.face_weights(i - 1)


@given(small_complexes())
def test_json_roundtrip(X):
    assert Complex.from_json(X.to_json()) == X


@given(small_complexes(), st.data())
def test_link_weights_are_conditional(X, data):
    s = data.draw(st.sampled_from(X.faces(0)))
    L = cx.link(X, s)
    assert sum(L.weights) == 1
    assert not set(L.vertices) & set(s)
    for f in L.top_faces:
        assert X.is_face(f + s)


def test_link_missing_face():
    with pytest.raises(cx.FaceNotInComplex):
        cx.link(cx.complete(2), (7,))


def test_join_weights_multiply():
    A = Complex([(0, 1), (1, 2)], [Fraction(1, 3), Fraction(2, 3)])
    B = Complex([(10,), (11,)])
    J = cx.join([A, B])
    assert J.dim == 2 and len(J.top_faces) == 4
    assert dict(zip(J.top_faces, J.weights))[(1, 2, 11)] == Fraction(1, 3)
    with pytest.raises(cx.IdCollision):
        cx.join([A, A])
    assert cx.join([A, cx.EMPTY]) == A


def test_validation_errors():
    with pytest.raises(ValueError):
        Complex([(0, 1), (2,)])
    with pytest.raises(ValueError):
        Complex([(0, 1)], [Fraction(1, 2)])
    with pytest.raises(cx.NotPartite):
        Complex([(0, 1)], colors={0: 1, 1: 1})


def test_color_restrict():
    X = Complex([(0, 1, 2), (0, 1, 3)], colors={0: 1, 1: 2, 2: 3, 3: 3})
    R = cx.color_restrict(X, {1, 2})
    assert R.top_faces == [(0, 1)] and R.weights == [1]


def test_clique_complex_and_flags():
    G = nx.complete_graph(5)
    X = cx.clique_complex(G, 2)
    assert len(X.top_faces) == 10
    assert not cx.is_clique_complex(X)  # K5 has 4-cliques that are not faces
    assert cx.is_clique_complex(cx.complete(3))
    assert not cx.is_clique_complex(cx.torus7())
    with pytest.raises(cx.NoCliquesAtLevel):
        cx.clique_complex(nx.path_graph(3), 2)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_annulus(n):
    A = cx.annulus(n)
    assert len(A.vertices) == 2 * n and len(A.top_faces) == 2 * n
    assert cx.is_clique_complex(A) and cx.is_connected(A)


def test_torus_structure():
    T = cx.torus7()
    assert len(T.vertices) == 7 and T.count(1) == 21 and T.count(2) == 14
    assert cx.diameter(T) == 1
    for v in T.vertices:
        L = cx.link(T, (v,))
        assert nx.is_isomorphic(L.graph(), nx.cycle_graph(6))


def test_diameter_disconnected():
    with pytest.raises(cx.Disconnected):
        cx.diameter(Complex([(0, 1), (2, 3)]))
