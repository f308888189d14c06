import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdxlab import buildings as bd
from hdxlab import complex as cx
from hdxlab import faces as fc
from hdxlab.faces import ColorSet


@given(st.integers(1, 9), st.integers(1, 4), st.integers(0, 4))
def test_partition_count(n, size, blocks):
    items = tuple(range(n))
    got = list(fc._partitions(items, size, blocks))
    want = fc.count_partitions(n, size, blocks) if size * blocks <= n else 0
    assert len(got) == len(set(got)) == want
    for part in got:
        flat = [x for b in part for x in b]
        assert len(flat) == len(set(flat)) == size * blocks


@pytest.mark.parametrize("n,verts,tops", [(5, 15, 15), (7, 28, 105)])
def test_faces_complex_counts(n, verts, tops):
    F = fc.faces_complex(cx.complete(n), 1)
    assert len(F.vertices) == verts and len(F.top_faces) == tops
    assert F.dim == (n + 1) // 2 - 1


def test_faces_complex_leftover_vertex():
    # odd top faces: one vertex is dropped, weights follow the two-step sampler
    F = fc.faces_complex(cx.complete(4), 1)
    assert F.dim == 1 and len(F.top_faces) == 15
    assert sum(F.weights) == 1


def test_faces_budget():
    with pytest.raises(bd.BudgetExceeded):
        fc.faces_complex(cx.complete(11), 1, budget=100)


def test_faces_link_simplex7_all_vertices():
    X = cx.complete(7)
    F = fc.faces_complex(X, 1)
    for v in F.vertices:
        s = [F.labels[v]]
        assert fc.same_weighted(fc.faces_link(X, 1, s), fc.direct_faces_link(F, s))
    s = [(0, 1), (2, 3)]
    assert fc.same_weighted(fc.faces_link(X, 1, s), fc.direct_faces_link(F, s))


def test_faces_link_building():
    X = bd.type_a(4, 2)
    F = fc.faces_complex(X, 1)
    assert (len(F.vertices), len(F.top_faces)) == (4650, 29295)
    for v in F.vertices[::500]:
        s = [F.labels[v]]
        assert fc.same_weighted(fc.faces_link(X, 1, s), fc.direct_faces_link(F, s))


def test_faces_link_rejects_overlap():
    with pytest.raises(ValueError):
        fc.faces_link(cx.complete(5), 1, [(0, 1), (1, 2)])


def test_colorset():
    J = ColorSet.of([{1, 3}, set(), {4}])
    assert J.m == 3 and J.union == {1, 3, 4}
    assert ColorSet.from_json(J.to_json()) == J
    assert ColorSet.of([{1}, set(), set()]) <= J
    with pytest.raises(ValueError):
        ColorSet.of([{1}, {1}])


@given(st.sets(st.integers(0, 30), max_size=8))
def test_bins_partition_complement(c):
    N = range(31)
    Bs = fc.bins(N, c)
    assert len(Bs) == len(c) + 1
    flat = [x for B in Bs for x in B]
    assert sorted(flat) == sorted(set(N) - set(c))


def test_classify_bin():
    B = frozenset({2, 3, 4})
    assert fc.classify_bin(B, [{2}, {9}]) == "lonely"
    assert fc.classify_bin(B, [{2}, {4}]) == "crowded"
    assert fc.classify_bin(B, [{7}]) == "empty"


def test_tensor_law():
    X = bd.build_symplectic_like("A:n=2,p=2+C:g=2,p=2")
    w = next(v for v in X.vertices if X.colors[v] == 2)
    r = fc.tensor_decompose_link(X, (w,), ColorSet.of([{1, 3}, {4}]))
    assert r.ok
    assert [f.kind for f in r.factors] == ["lonely", "crowded"]
    assert r.complete_partite == [True, False]


def test_tensor_law_empty_face():
    X = bd.build_symplectic_like("A:n=2,p=2+C:g=1,p=2")
    r = fc.tensor_decompose_link(X, (), ColorSet.of([{1}, {3}]))
    assert r.ok and len(r.factors) == 1


def test_tensor_law_rejects_colored_w():
    X = bd.build_symplectic_like("A:n=2,p=2+C:g=1,p=2")
    w = next(v for v in X.vertices if X.colors[v] == 1)
    with pytest.raises(ValueError):
        fc.tensor_decompose_link(X, (w,), ColorSet.of([{1}, {3}]))


def test_well_spread_clauses():
    n = 100
    spread = [{10 * j + 1, 10 * j + 4, 10 * j + 7} for j in range(6)]
    assert fc.well_spread_check(spread, n, 2).ok
    assert fc.well_spread_check(spread[:5], n, 2).failed == "size"
    bad = [set(b) for b in spread]
    bad[1].add(1)
    assert fc.well_spread_check(bad, n, 2).failed == "disjoint"
    n = 6000
    tight = [{1000 * j + 1, 1000 * j + 2, 1000 * j + 500} for j in range(6)]
    assert fc.well_spread_check(tight, n, 2).failed == "spacing"


def test_wilson():
    e = fc.wilson(50, 100)
    assert e.value == 0.5 and e.lo < 0.5 < e.hi
    z = fc.wilson(0, 100)
    assert z.lo == 0.0 and z.hi > 0


def test_well_spread_probability_deterministic_and_monotone():
    a = fc.well_spread_probability(64, 2, 6, 300, seed=1)
    assert a == fc.well_spread_probability(64, 2, 6, 300, seed=1)
    vals = [fc.well_spread_probability(n, 2, 6, 300, seed=1).value for n in (18, 64, 256)]
    assert vals == sorted(vals) and vals[0] == 0.0 and vals[-1] > 0.3
