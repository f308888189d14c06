import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdxlab import cohomology as co
from hdxlab import complex as cx
from hdxlab import covers as cv
from hdxlab.cohomology import Cochain, FiniteGroup

TORUS = cx.torus7()
CS3 = co.cocycle_space(TORUS, 3)


def cocycle_from(coef):
    vec = np.array(coef, dtype=np.int64) @ CS3.Z.array % 3
    return CS3.cochain(TORUS, vec)


@settings(max_examples=25)
@given(st.lists(st.integers(0, 2), min_size=8, max_size=8))
def test_connected_iff_not_coboundary(coef):
    phi = cocycle_from(coef)
    cov = cv.cover_from_cocycle(TORUS, phi)
    assert cx.is_connected(cov.total) == (not CS3.is_coboundary(phi))
    assert cv.verify_cover(cov).ok


def test_trivial_cocycle_gives_disjoint_copies():
    cov = cv.cover_from_cocycle(TORUS, co.constant(TORUS, 1, FiniteGroup.cyclic(3)))
    assert cx.components(cov.total) == 3


def test_rejects_non_cocycle():
    f = co.constant(TORUS, 1, FiniteGroup.cyclic(3))
    f.values[(0, 1)] = 1
    with pytest.raises(co.NotCocycle):
        cv.cover_from_cocycle(TORUS, f)


def test_strict_clique_rejects_torus():
    with pytest.raises(cv.NotCliqueComplex):
        cv.cover_from_cocycle(TORUS, CS3.witness, strict_clique=True)


def test_strict_clique_annulus():
    A = cx.annulus(6)
    cs = co.cocycle_space(A, 2)
    cov = cv.cover_from_cocycle(A, cs.witness, strict_clique=True)
    assert cx.is_connected(cov.total) and cv.verify_cover(cov).ok
    assert cx.is_clique_complex(cov.total)


def test_symmetric_group_cover():
    X = cx.complete(2)
    G = FiniteGroup.symmetric(3)
    phi = co.delta(Cochain(X, 0, G, {(0,): 1, (1,): 2, (2,): 3}))
    cov = cv.cover_from_cocycle(X, phi)
    assert len(cov.total.vertices) == 9 and cv.verify_cover(cov).ok
    assert cx.components(cov.total) == 3


def test_verify_cover_detects_bad_map():
    cov = cv.cover_from_cocycle(TORUS, CS3.witness)
    rho = dict(cov.rho)
    y = next(iter(rho))
    rho[y] = (rho[y] + 1) % 7
    assert not cv.verify_cover(cv.CoverMap(cov.total, TORUS, rho, 3)).ok


def test_lifts():
    cov = cv.cover_from_cocycle(TORUS, CS3.witness)
    for f in TORUS.top_faces[:5]:
        ls = cov.lifts(f)
        assert len(ls) == 3
        assert all(cov.total.is_face(tuple(sorted(l))) for l in ls)


def test_tower_sizes():
    log, Xs = cv.tower(TORUS, 3, 180)
    assert log.status == "OK"
    assert [s.vertices for s in log.steps] == [7, 21, 63, 189]
    assert all(s.verified and s.connected for s in log.steps[:-1])


def test_tower_fails_without_cohomology():
    log, _ = cv.tower(cx.complete(4), 3, 50)
    assert log.status == "FAIL"


def test_deck_quotient_roundtrip():
    cov = cv.cover_from_cocycle(TORUS, CS3.witness)
    Q, qmap = cv.deck_quotient_check(cov.total, cv.deck_group(cov), min_dist=3)
    assert cv.quotient_matches_base(cov, Q, qmap)
    with pytest.raises(cv.NotProper):
        cv.deck_quotient_check(cov.total, cv.deck_group(cov), min_dist=4)


def test_tower_csv(tmp_path):
    log, _ = cv.tower(TORUS, 3, 60)
    path = tmp_path / "t.csv"
    log.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("step,vertices") and lines[-1].startswith("status,OK")
