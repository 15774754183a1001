from fractions import Fraction

import pytest

from totconn.forms import (PolyForm, SimplicialOperator, integrate_over_simplex,
                           simplex_dt, simplex_monomials, simplex_t)


def test_d_of_coordinate():
    n = 2
    t1 = simplex_t(n, 1)
    assert t1.d() == simplex_dt(n, 1)
    assert simplex_dt(n, 1).d().is_zero()
    # d^2 = 0 on a spanning set
    for w in simplex_monomials(2, 3):
        assert w.d().d().is_zero()


def test_wedge_antisymmetry():
    n = 2
    dt1, dt2 = simplex_dt(n, 1), simplex_dt(n, 2)
    assert dt1.wedge(dt1).is_zero()
    assert dt1.wedge(dt2) == dt2.wedge(dt1).scale(-1)


def test_wedge_graded_commutative():
    n = 3
    for a in simplex_monomials(n, 2):
        for b in simplex_monomials(n, 2)[:20]:
            da = a.homogeneous_degree()
            db = b.homogeneous_degree()
            sign = -1 if (da * db) % 2 else 1
            assert a.wedge(b) == b.wedge(a).scale(sign)


def test_leibniz():
    n = 2
    for a in simplex_monomials(n, 2):
        for b in simplex_monomials(n, 2)[:15]:
            da = a.homogeneous_degree()
            lhs = a.wedge(b).d()
            rhs = a.d().wedge(b) + a.wedge(b.d()).scale((-1) ** da)
            assert lhs == rhs


def test_barycentric_relations_eliminated():
    n = 2
    total = simplex_t(n, 0) + simplex_t(n, 1) + simplex_t(n, 2)
    assert total == PolyForm.one(n)
    dtotal = simplex_dt(n, 0) + simplex_dt(n, 1) + simplex_dt(n, 2)
    assert dtotal.is_zero()


def test_codegeneracy_pullback_collapse():
    # s^0: (t0, t1, t2) -> (t0 + t1, t2); substituting per that formula
    # sends the elementary edge form to the sum of the two collapsed edges
    s0 = SimplicialOperator.codegeneracy(1, 0)
    w = simplex_t(1, 0).wedge(simplex_dt(1, 1)) - simplex_t(1, 1).wedge(simplex_dt(1, 0))
    want = (simplex_t(2, 0).wedge(simplex_dt(2, 2)) - simplex_t(2, 2).wedge(simplex_dt(2, 0))
            + simplex_t(2, 1).wedge(simplex_dt(2, 2)) - simplex_t(2, 2).wedge(simplex_dt(2, 1)))
    assert s0.pullback(w) == want
    # collapsing the interval to either vertex region kills the edge form
    for i in (0, 1):
        assert SimplicialOperator.coface(0, i).pullback(w).is_zero()


def test_coface_pullback_formula():
    # d^1: [0] -> [1] sends (t0, t1) to the vertex with t1 = 0
    d1 = SimplicialOperator.coface(0, 1)
    assert d1.pullback(simplex_t(1, 1)).is_zero()
    assert d1.pullback(simplex_t(1, 0)) == PolyForm.one(0)


def test_pullback_is_algebra_map():
    theta = SimplicialOperator.codegeneracy(1, 0)
    for a in simplex_monomials(1, 2):
        for b in simplex_monomials(1, 2):
            assert theta.pullback(a.wedge(b)) == theta.pullback(a).wedge(theta.pullback(b))
            assert theta.pullback(a.d()) == theta.pullback(a).d()


def test_simplicial_identities_on_forms():
    # d^j d^i = d^i d^{j-1} for i < j, checked through pullbacks
    for i in range(2):
        for j in range(i + 1, 3):
            left = SimplicialOperator.coface(1, j).compose(SimplicialOperator.coface(0, i))
            right = SimplicialOperator.coface(1, i).compose(SimplicialOperator.coface(0, j - 1))
            assert left.images == right.images


def test_integrate_interval():
    w = simplex_dt(1, 1)
    assert integrate_over_simplex(w, 1) == 1


def test_integrate_factorial_formula():
    # t1 t2 dt1 dt2 over the 2-simplex = 1!1!/(1+1+2)! = 1/24
    n = 2
    w = simplex_t(n, 1).wedge(simplex_t(n, 2)).wedge(
        simplex_dt(n, 1)).wedge(simplex_dt(n, 2))
    assert integrate_over_simplex(w, 2) == Fraction(1, 24)


def test_integrate_non_top_degree_is_zero():
    assert integrate_over_simplex(simplex_t(2, 1), 2) == 0


def test_substitute_dimension_errors():
    w = simplex_t(2, 1)
    with pytest.raises(ValueError):
        SimplicialOperator.coface(0, 1).pullback(w)


def test_json_roundtrip():
    w = simplex_t(2, 0).wedge(simplex_dt(2, 2)).scale(Fraction(3, 7))
    again = PolyForm.from_json(2, w.to_json())
    assert again == w
