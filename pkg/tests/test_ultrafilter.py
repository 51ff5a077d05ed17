from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from codense.errors import CapExceeded, CarrierMismatch, InvalidStructure
from codense.finset import FiniteMap, FiniteSet, compose
from codense.ultrafilter import (
    EndofunctorData,
    SubsetFamily,
    Ultrafilter,
    alpha_is_natural,
    borger_alpha,
    constant_functor,
    doubling_functor,
    enumerate_ultrafilters,
    galvin_horn_exhaustive,
    identity_functor,
    is_filter,
    is_ultrafilter,
    multiplication_map,
    multiply,
    principal_family,
    pushforward,
    satisfies_partition_condition,
    square_functor,
    ultrafilter_map,
    ultrafilter_set,
    ultrafilter_unit_map,
    unit,
)

from strategies import composable_pair, finite_maps


def naive_is_ultrafilter(n: int, members: frozenset[int]) -> bool:
    """Textbook axioms checked subset by subset."""
    full = (1 << n) - 1
    subsets = range(1 << n)
    if 0 in members or full not in members:
        return False
    for a in members:
        for b in subsets:
            if a & b == a and b not in members:
                return False
        for b in members:
            if a & b not in members:
                return False
    return all((y in members) != ((full ^ y) in members) for y in subsets)


@pytest.mark.parametrize("n", range(4))
def test_axioms_match_naive_oracle(n):
    X = FiniteSet(n)
    for idx in range(1 << (1 << n)):
        F = SubsetFamily.from_index(X, idx)
        assert is_ultrafilter(F) == naive_is_ultrafilter(n, F.members)


@pytest.mark.parametrize("n", range(4))
def test_vectorised_scan_matches_scalar_checks(n):
    X = FiniteSet(n)
    rep = galvin_horn_exhaustive(X)
    for idx, uf, part_all, part3 in rep.rows():
        F = SubsetFamily.from_index(X, idx)
        assert uf == naive_is_ultrafilter(n, F.members)
        assert part3 == satisfies_partition_condition(F, 3)
        assert part_all == all(satisfies_partition_condition(F, k) for k in range(n + 2))


@pytest.mark.parametrize("n", range(5))
def test_galvin_horn_counts(n):
    rep = galvin_horn_exhaustive(FiniteSet(n))
    assert rep.families == 1 << (1 << n)
    assert rep.ultrafilter_count == n
    assert rep.equivalent


def test_galvin_horn_refuses_size_five():
    with pytest.raises(CapExceeded):
        galvin_horn_exhaustive(FiniteSet(5))


def test_partition_condition_two_is_not_enough():
    # "at least two elements" passes n = 1, 2 on a 3-set but is no ultrafilter
    X = FiniteSet(3)
    F = SubsetFamily.at_least(X, 2)
    assert satisfies_partition_condition(F, 1) and satisfies_partition_condition(F, 2)
    assert not satisfies_partition_condition(F, 3)
    assert not is_ultrafilter(F)


def test_empty_set_has_no_ultrafilters():
    assert enumerate_ultrafilters(FiniteSet(0)) == []
    assert ultrafilter_set(FiniteSet(0)).size == 0


def test_principal_family_members():
    X = FiniteSet(3)
    F = principal_family(X, 1)
    assert sorted(F.members) == [m for m in range(8) if m & 0b010]
    assert is_filter(F) and is_ultrafilter(F)


def test_ultrafilter_rejects_wrong_witness():
    X = FiniteSet(2)
    with pytest.raises(InvalidStructure):
        Ultrafilter(principal_family(X, 0), 1)
    with pytest.raises(InvalidStructure):
        Ultrafilter.from_family(SubsetFamily.power_set(X))


@given(finite_maps(max_dom=4, max_cod=4))
def test_pushforward_of_principal_is_principal(f):
    for x in f.dom:
        assert pushforward(f, unit(f.dom, x)) == unit(f.cod, f(x))


@given(composable_pair())
def test_ultrafilter_functor_preserves_composition(pair):
    f, g = pair
    assert ultrafilter_map(compose(g, f)) == compose(ultrafilter_map(g), ultrafilter_map(f))


@given(finite_maps())
def test_unit_is_natural(f):
    assert compose(ultrafilter_map(f), ultrafilter_unit_map(f.dom)) == compose(ultrafilter_unit_map(f.cod), f)


def _multiply_by_formula(W: Ultrafilter, n: int) -> frozenset[int]:
    ufs = enumerate_ultrafilters(FiniteSet(n))
    out = set()
    for Y in range(1 << n):
        big = sum(1 << i for i, U in enumerate(ufs) if Y in U.members)
        if big in W.members:
            out.add(Y)
    return frozenset(out)


@pytest.mark.parametrize("n", range(4))
def test_multiplication_formula(n):
    X = FiniteSet(n)
    UX = ultrafilter_set(X)
    for W in enumerate_ultrafilters(UX):
        assert multiply(W, X).members == _multiply_by_formula(W, n)


@pytest.mark.parametrize("n", range(4))
def test_monad_unit_laws(n):
    X = FiniteSet(n)
    mu = multiplication_map(X)
    ident = FiniteMap.identity(ultrafilter_set(X))
    assert compose(mu, ultrafilter_unit_map(ultrafilter_set(X))) == ident
    assert compose(mu, ultrafilter_map(ultrafilter_unit_map(X))) == ident


@pytest.mark.parametrize("n", range(3))
def test_monad_associativity(n):
    X = FiniteSet(n)
    mu = multiplication_map(X)
    assert compose(mu, multiplication_map(ultrafilter_set(X))) == compose(mu, ultrafilter_map(mu))


def test_multiply_checks_carrier():
    W = unit(FiniteSet(3), 0)
    with pytest.raises(CarrierMismatch):
        multiply(W, FiniteSet(2))


@pytest.mark.parametrize("n", range(4))
def test_borger_alpha_for_identity_is_the_unit(n):
    X = FiniteSet(n)
    S = identity_functor()
    for x in X:
        assert borger_alpha(S, X, x).members == unit(X, x).members


def test_borger_alpha_for_products_and_sums():
    X = FiniteSet(2)
    # sigma = (0, 1) in X x X: only X itself contains both coordinates
    sq = square_functor()
    assert borger_alpha(sq, X, 1).members == frozenset({0b11})
    # the second copy of 1 in X + X lies in the image of {1}
    dbl = doubling_functor()
    assert borger_alpha(dbl, X, 3).members == unit(X, 1).members


@pytest.mark.parametrize("S", [identity_functor(), constant_functor(2), doubling_functor(), square_functor()], ids=lambda S: S.name)
def test_borger_alpha_is_natural(S):
    assert alpha_is_natural(S)


def test_endofunctor_validation():
    with pytest.raises(InvalidStructure):
        # claims S(X) = X but sends every map to a constant
        EndofunctorData(
            "broken",
            lambda X: X,
            lambda f: FiniteMap(f.dom, f.cod, tuple(0 for _ in f.dom)) if f.cod.size else f,
        )


def test_family_index_round_trip():
    X = FiniteSet(2)
    for idx in range(16):
        assert SubsetFamily.from_index(X, idx).index == idx
