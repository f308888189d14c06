import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdxlab import agreement as ag
from hdxlab import cohomology as co
from hdxlab import complex as cx
from hdxlab import covers as cv
from hdxlab.agreement import TestDistribution


def test_test_dimensions():
    assert TestDistribution.v_test(15).d == 27
    assert TestDistribution.z_test(15).d == 39
    assert TestDistribution.v_test(3).queries == 2 and TestDistribution.z_test(3).queries == 3
    with pytest.raises(ag.ParameterError):
        TestDistribution.v_test(4)
    with pytest.raises(ag.ParameterError):
        TestDistribution.z_test(0)
    with pytest.raises(ag.ParameterError):
        TestDistribution.custom(1, 3)


@given(st.sampled_from([("V", 3), ("Z", 3), ("V", 8), ("Z", 8), ("V", 15)]), st.randoms(use_true_random=False))
def test_split_overlaps(kind_k, rnd):
    kind, k = kind_k
    D = TestDistribution.v_test(k) if kind == "V" else TestDistribution.z_test(k)
    perm = list(range(D.d + 1))
    rnd.shuffle(perm)
    tup = D.split(perm)
    assert all(len(s) == k + 1 for s in tup)
    sizes = ag.intersection_sizes(tup)
    assert sizes[(0, 1)] == D.r
    if kind == "Z":
        assert sizes[(1, 2)] == D.r and sizes[(0, 2)] == 0
    assert set().union(*tup) == set(perm)


@pytest.mark.parametrize("kind", ["V", "Z"])
def test_tuples_enumeration(kind):
    D = TestDistribution.v_test(3) if kind == "V" else TestDistribution.z_test(3)
    ts = D.tuples(range(D.d + 1))
    assert len(ts) == len(set(ts)) == D.tuples_per_face()
    assert all(ag.intersection_sizes(t)[(0, 1)] == D.r for t in ts)


def test_weighted_tuples_sum_to_one():
    X = cx.complete(6)
    D = TestDistribution.v_test(3)
    assert sum(w for _, w in ag.weighted_tuples(X, D)) == 1


def test_planted_is_perfect():
    X = cx.complete(7)
    G = {v: v % 3 for v in X.vertices}
    for D in (TestDistribution.v_test(3), TestDistribution.z_test(3)):
        a = ag.agree(X, ag.plant(X, G, 0.0), D)
        assert a.exact and a.fraction == 1
        r = ag.decode_global(X, ag.plant(X, G, 0.0), D, 0.0)
        assert r.G == G and r.explained == 1.0


def test_iid_near_power_of_two():
    # exact enumeration over one seeded realization; average over a few seeds
    X = cx.complete(7)
    D = TestDistribution.v_test(3)
    vals = [ag.agree(X, ag.IIDEnsemble(2, s), D).value for s in range(4)]
    assert abs(np.mean(vals) - 2 ** -D.r) < 0.05
    Z = TestDistribution.z_test(3)
    vals = [ag.agree(X, ag.IIDEnsemble(2, s), Z).value for s in range(4)]
    assert abs(np.mean(vals) - 2 ** (-2 * Z.r)) < 0.03


def test_monte_carlo_path_and_determinism():
    X = cx.complete(30)
    D = TestDistribution.v_test(8)
    assert ag.exact_size(X, D) > ag.EXACT_LIMIT
    a = ag.agree(X, ag.IIDEnsemble(2, 0), D, trials=20000, seed=10)
    b = ag.agree(X, ag.IIDEnsemble(2, 0), D, trials=20000, seed=10)
    assert a == b and not a.exact
    assert a.lo <= 2 ** -3 <= a.hi


def test_dimension_error():
    with pytest.raises(ag.ParameterError):
        ag.agree(cx.complete(5), ag.IIDEnsemble(2), TestDistribution.v_test(8))


def test_ensembles_are_deterministic():
    X = cx.complete(5)
    G = {v: 1 for v in X.vertices}
    P = ag.plant(X, G, 0.3, seed=2, q=4)
    assert (P.values((0, 1, 2)) == P.values((2, 1, 0))).all()
    M = ag.MixtureEnsemble(P, ag.IIDEnsemble(4, 1), 0.5, 3)
    T = M.table(X.faces(2))
    assert ag.TableEnsemble.from_json(T.to_json()) == T
    with pytest.raises(ValueError):
        ag.plant(X, G, 1.0)


def test_plurality_ties_to_smaller():
    X = cx.complete(1)
    F = ag.TableEnsemble(3, {(0,): (2,), (1,): (1,)})
    assert ag.plurality(X, F, 0) == {0: 2, 1: 1}
    X = cx.Complex([(0, 1), (0, 2)])
    F = ag.TableEnsemble(3, {(0, 1): (2, 0), (0, 2): (1, 0)})
    assert ag.plurality(X, F, 1)[0] == 1


def test_cover_counterexample_small():
    A = cx.annulus(6)
    cs = co.cocycle_space(A, 2)
    cov = cv.cover_from_cocycle(A, cs.witness, strict_clique=True)
    Gy = {y: 2 * cov.rho[y] + cov.total.label(y)[1] for y in cov.total.vertices}
    E = TestDistribution.custom(1, 1)
    F = ag.plant_cover(cov, Gy, 1, "random", seed=0)
    r = ag.decode_global(A, F, E, 0.25)
    assert r.agree.exact and r.agree.value >= 0.4 and r.explained <= 0.75
    P = ag.plant(A, {v: 2 * v for v in A.vertices}, 0.0)
    assert ag.decode_global(A, P, E, 0.25).explained == 1.0


def test_plant_cover_rule_first_is_consistent():
    A = cx.annulus(6)
    cov = cv.cover_from_cocycle(A, co.cocycle_space(A, 2).witness)
    Gy = {y: 2 * cov.rho[y] + cov.total.label(y)[1] for y in cov.total.vertices}
    F = ag.plant_cover(cov, Gy, 1, "first")
    assert set(F.f) == set(A.faces(1))
    with pytest.raises(ValueError):
        ag.plant_cover(cov, Gy, 1, "bogus")


def test_sweep(tmp_path):
    X = cx.complete(7)
    G = {v: v % 2 for v in X.vertices}
    rows = ag.soundness_sweep(X, TestDistribution.v_test(3), ag.mixture_family(X, G, 2), [0.0, 0.5, 1.0], 0.0)
    assert rows[-1].agree == 1.0 and rows[0].agree < rows[-1].agree
    path = tmp_path / "s.csv"
    ag.write_sweep(rows, path)
    assert path.read_text().splitlines()[0] == "family,param,agree,ci_lo,ci_hi,explained"
