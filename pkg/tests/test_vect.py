from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from codense.errors import CarrierMismatch, InvalidStructure
from codense.vect import (
    DoubleDualElement,
    LinearMap,
    PrimeField,
    VectorSpace,
    all_linear_maps,
    beta_square_commutes,
    change_of_variables_holds,
    compose_linear,
    double_dual_comparison,
    double_dual_map,
    dual_map,
    enumerate_double_dual,
    linearity_for_free,
    naturality_holds,
    rank,
    skeleton_sweep,
    vect_codensity_carrier,
    vect_integrate,
    vect_monad_report,
)


@st.composite
def linear_maps(draw, p=None, max_dim=3, dom=None, cod=None):
    p = draw(st.sampled_from([2, 3])) if p is None else p
    F = PrimeField(p)
    n = draw(st.integers(0, max_dim)) if dom is None else dom
    m = draw(st.integers(0, max_dim)) if cod is None else cod
    rows = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=m, max_size=m))
    return LinearMap(VectorSpace(F, n), VectorSpace(F, m), tuple(map(tuple, rows)))


def test_prime_field_validation():
    with pytest.raises(InvalidStructure):
        PrimeField(4)
    assert PrimeField(5).inv(2) == 3


def test_vector_indexing_round_trip():
    V = VectorSpace(PrimeField(3), 2)
    assert [V.index(v) for v in V.vectors()] == list(range(9))
    assert all(V.vector(V.index(v)) == v for v in V.vectors())


def test_transpose_examples():
    F = PrimeField(2)
    k, k2 = VectorSpace(F, 1), VectorSpace(F, 2)
    assert dual_map(LinearMap.identity(k2)) == LinearMap.identity(k2)
    assert dual_map(LinearMap(k2, k, ((1, 0),))).matrix == ((1,), (0,))


@given(linear_maps())
def test_rank_matches_image_size(f):
    # |im f| = p^rank, counted directly
    assert f.dom.p ** rank(f) == len({f(v) for v in f.dom.vectors()})
    assert rank(dual_map(f)) == rank(f)


@given(st.data())
def test_dual_reverses_composition(data):
    f = data.draw(linear_maps(max_dim=2))
    g = data.draw(linear_maps(p=f.dom.p, max_dim=2, dom=f.cod.dim))
    assert dual_map(compose_linear(g, f)) == compose_linear(dual_map(f), dual_map(g))


@given(st.data())
def test_composition_is_pointwise(data):
    f = data.draw(linear_maps(max_dim=2))
    g = data.draw(linear_maps(p=f.dom.p, max_dim=2, dom=f.cod.dim))
    gf = compose_linear(g, f)
    assert all(gf(v) == g(f(v)) for v in f.dom.vectors())


def test_shape_errors():
    F = PrimeField(2)
    with pytest.raises(CarrierMismatch):
        LinearMap(VectorSpace(F, 2), VectorSpace(F, 1), ((1,),))
    with pytest.raises(CarrierMismatch):
        LinearMap(VectorSpace(F, 1), VectorSpace(PrimeField(3), 1), ((1,),))
    U = DoubleDualElement.evaluation(VectorSpace(F, 1), (1,))
    with pytest.raises(CarrierMismatch):
        vect_integrate(U, LinearMap.identity(VectorSpace(F, 2)))


@pytest.mark.parametrize("p,d", [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2)])
def test_double_dual_has_p_to_the_d_elements(p, d):
    X = VectorSpace(PrimeField(p), d)
    dd = enumerate_double_dual(X)
    assert len(dd) == p**d
    assert [U.coordinates() for U in dd] == X.vectors()
    assert {DoubleDualElement.evaluation(X, x) for x in X.vectors()} == set(dd)


def test_non_linear_table_rejected():
    X = VectorSpace(PrimeField(2), 1)
    with pytest.raises(InvalidStructure):
        DoubleDualElement(X, (1, 0))


def test_integration_examples():
    F = PrimeField(3)
    X, k = VectorSpace(F, 2), VectorSpace(F, 1)
    for U in enumerate_double_dual(X):
        for xi in X.vectors():
            assert vect_integrate(U, LinearMap(X, k, (xi,))) == (U(xi),)
        assert vect_integrate(U, LinearMap.zero(X, VectorSpace(F, 2))) == (0, 0)
    for x in X.vectors():
        ev = DoubleDualElement.evaluation(X, x)
        for f in all_linear_maps(X, X):
            assert vect_integrate(ev, f) == f(x)


@given(st.data())
def test_integral_laws(data):
    p = data.draw(st.sampled_from([2, 3]))
    f = data.draw(linear_maps(p=p, max_dim=2))
    theta = data.draw(linear_maps(p=p, max_dim=2, dom=f.cod.dim))
    g = data.draw(linear_maps(p=p, max_dim=2, dom=f.cod.dim))
    for U in enumerate_double_dual(f.dom):
        assert naturality_holds(U, theta, f)
        assert change_of_variables_holds(f, U, g)
        assert beta_square_commutes(U, f)
        assert double_dual_map(f, U) in enumerate_double_dual(f.cod)


@pytest.mark.parametrize("p,d", [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1)])
def test_carrier_is_the_double_dual(p, d):
    C = vect_codensity_carrier(p, d, 2)
    assert len(C) == p**d
    rep = double_dual_comparison(p, d, 2, C)
    assert rep.bijective and rep.recovery and rep.unit_is_evaluation
    assert linearity_for_free(C)


def test_carrier_matches_product_scan():
    C = vect_codensity_carrier(2, 1, 2)
    D = C.diagram
    scan = [a for a in itertools.product(*(range(s.size) for s in D.on_objects)) if D.is_compatible(a)]
    assert [e.assignment for e in C.elements] == scan


def test_skeleton_without_the_square_is_too_small():
    # with only k^0 and k^1 the constraints are I(0) = 0 and I(c xi) = c I(xi);
    # over F_2 that leaves any value on the three nonzero functionals of k^2
    C = vect_codensity_carrier(2, 2, 1)
    D = C.diagram
    scan = [a for a in itertools.product(*(range(s.size) for s in D.on_objects)) if D.is_compatible(a)]
    assert len(C) == len(scan) == 2**3
    assert not linearity_for_free(C)
    assert skeleton_sweep(2, 2, 2) == {1: 8, 2: 4}
    assert skeleton_sweep(2, 1, 3) == {1: 2, 2: 2, 3: 2}


def test_comparison_needs_a_line():
    with pytest.raises(InvalidStructure):
        double_dual_comparison(2, 1, 0)


@pytest.mark.parametrize("p,d", [(2, 0), (2, 1), (3, 0), (3, 1)])
def test_transported_monad(p, d):
    assert vect_monad_report(p, d).ok
