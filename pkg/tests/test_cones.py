import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdxlab import buildings as bd
from hdxlab import complex as cx
from hdxlab import cones as cn
from hdxlab import gf
from hdxlab.cones import Contraction, Loop, Move
from hdxlab.gf import Subspace, SymplecticForm

I = (1, 2, 6)
G, P = 17, 2


def test_moves_are_checked():
    X = cx.complete(3)
    L = Loop([0, 1, 0], X)
    with pytest.raises(cn.BadMove):
        L.tr_delete(0)  # (0,1,0) is not a triangle
    L.bt_delete(0)
    assert L.trivial
    T = cx.cycle_graph(4)
    L = Loop([0, 1, 2, 3, 0], T)
    with pytest.raises(cn.BadMove):
        L.tr_insert(0, 2)
    with pytest.raises(cn.BadMove):
        L.bt_insert(0, 2)


def test_triangle_loop_contracts():
    X = cx.complete(2)
    c = Contraction([0, 1, 2, 0], [Move("tr_delete", 0), Move("bt_delete", 0)])
    r = cn.replay(c, X)
    assert r.ok and r.tr_count == 1


def test_replay_reports_failures():
    X = cx.complete(2)
    assert not cn.replay(Contraction([0, 1, 2, 0], [Move("tr_delete", 0)]), X).ok
    assert not cn.replay(Contraction([0, 1, 2], []), X).ok
    r = cn.replay(Contraction([0, 1, 0], [Move("tr_delete", 0)]), X)
    assert not r.ok and r.bad_move == 0


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_mirror_replays(seed):
    # random contraction of a loop in a simplex, mirrored, must still replay
    rng = np.random.default_rng(seed)
    X = cx.complete(5)
    n = int(rng.integers(3, 7))
    walk = [0]
    for _ in range(n - 1):
        walk.append(int(rng.choice([v for v in range(6) if v != walk[-1]])))
    if walk[-1] == 0:
        walk.append(int(rng.choice(range(1, 6))))
    walk.append(0)
    L = Loop(walk, X)
    while not L.trivial:
        L.reduce_backtracks()
        if L.trivial:
            break
        L.tr_delete(0)
    c = Contraction(walk, L.moves)
    assert cn.replay(c, X).ok
    m = cn.mirror(c)
    assert m.start == walk[::-1]
    assert cn.replay(m, X).ok and m.tr_count == c.tr_count


def test_star_cone():
    X = cx.skeleton(cx.complete(5), 2)
    C = cn.star_cone(X, 0)
    r = cn.validate_cone(X, C)
    assert r.ok and r.diameter == 1
    assert cn.cone_bound(C, 2) == 1


def test_star_cone_precondition():
    with pytest.raises(cn.PreconditionViolated):
        cn.star_cone(cx.annulus(5), 0)


def test_join_cone_triangles():
    A = cx.skeleton(cx.complete(2), 1)
    B = cx.skeleton(cx.complete(2), 1).shift_ids(10)
    Z, C = cn.join_cone(A, B)
    r = cn.validate_cone(Z, C)
    assert r.ok and r.diameter <= 2 * cx.diameter(A) + 2


def test_join_cone_path_and_point():
    A = cx.Complex([(0, 1), (1, 2), (2, 3)])
    B = cx.Complex([(10,)])
    Z, C = cn.join_cone(A, B)
    r = cn.validate_cone(Z, C)
    assert r.ok and r.diameter <= 2 * cx.diameter(A) + 2


def test_join_cone_disconnected_side():
    A = cx.Complex([(0,), (1,), (2,)])
    B = cx.Complex([(10,), (11,), (12,)])
    with pytest.raises(cx.Disconnected):
        cn.join_cone(A, B)


def test_validate_catches_tampering():
    X = cx.skeleton(cx.complete(4), 2)
    C = cn.star_cone(X, 0)
    e = next(k for k, c in C.contractions.items() if c.moves)
    c = C.contractions[e]
    C.contractions[e] = Contraction(c.start, c.moves[:-1])
    assert not cn.validate_cone(X, C).ok


def test_colors_ok():
    assert cn.colors_ok(17, (1, 2, 6))
    assert not cn.colors_ok(16, (1, 2, 6))
    assert not cn.colors_ok(17, (1, 2, 5))
    with pytest.raises(cn.PreconditionViolated):
        cn.SymplecticCone(10, 2, (1, 2, 6))


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_u_perp(seed, i0):
    form = SymplecticForm.standard(G, P)
    t0 = gf.random_isotropic(form, G - 12, np.random.default_rng(seed))
    u, order = cn.build_u_perp(form, t0, 12)
    assert u.dim == 12 and gf.is_isotropic(form, u)
    assert (u & t0).dim == 0
    assert not form.pairing(u.array, t0.array).any()
    # prefixes are the nested u* and u**
    a = cn._first_rows(order, i0, form.n, P)
    b = cn._first_rows(order, 2, form.n, P)
    assert (a.contains(b) if i0 >= 2 else b.contains(a))


def test_contract_rejects_bad_loops():
    cone = cn.SymplecticCone(G, P, I)
    u, w = cone.random_edge(np.random.default_rng(0))
    loop = cone.edge_loop(u, w)
    with pytest.raises(cn.PreconditionViolated):
        cn.contract_cycle_symplectic(G, P, I, loop[:-1])
    with pytest.raises(cn.PreconditionViolated):
        cn.contract_cycle_symplectic(G, P, (1, 2, 5), loop)


@pytest.mark.parametrize("seed", range(8))
def test_symplectic_contraction_replays(seed):
    cone = cn.SymplecticCone(G, P, I)
    u, w = cone.random_edge(np.random.default_rng(seed))
    tr = cone.contract_edge(u, w)
    c = tr.contraction
    assert c.start == cone.edge_loop(u, w)
    assert cn.replay(c, cone.oracle).ok
    assert cn.replay(cn.mirror(c), cone.oracle).ok
    assert c.tr_count <= 3 * tr.i2_vertices + 5 * tr.i0_vertices + 12 * tr.six_cycles


def test_paths_are_walks():
    cone = cn.SymplecticCone(G, P, I)
    rng = np.random.default_rng(3)
    for _ in range(5):
        u, w = cone.random_edge(rng)
        for x in (u, w):
            path = cone.path(x)
            assert path[0] == cone.base and path[-1] == x
            assert all(cone.oracle.is_face([a, b]) for a, b in zip(path, path[1:]))


def test_build_symplectic_cone_deterministic():
    a = cn.build_symplectic_cone(G, P, I, samples=6, seed=5)
    b = cn.build_symplectic_cone(G, P, I, samples=6, seed=5)
    assert a.tr_counts == b.tr_counts and a.all_valid and a.envelope_ok and a.sampled
    assert a.bound == cn.cone_bound(a.diameter, 2)


def test_trace_json():
    cone = cn.SymplecticCone(G, P, I)
    u, w = cone.random_edge(np.random.default_rng(1))
    c = cone.contract_edge(u, w).contraction
    d = c.to_json(with_states=True, oracle=cone.oracle)
    assert d["tr_count"] == c.tr_count and len(d["states"]) == len(c.moves) + 1
    assert len(d["states"][-1]) == 1
