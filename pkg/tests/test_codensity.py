from __future__ import annotations

import itertools

import pytest

from codense.codensity import (
    CarrierTower,
    codensity_carrier,
    degenerate_report,
    endomorphism_monad_carrier,
    identity_fragment,
    is_equivariant,
    lawvere_equivariant_maps,
    monad_law_report,
    monad_witness,
    partition_12_families,
    prime_factors,
    ultrafilter_comparison,
    ultrafilter_embedding_into_endomorphisms,
    ultrafilter_fragment,
    unit_compatible_natural_maps,
    unit_is_evaluation,
    zn_fields_codensity,
)
from codense.errors import CapExceeded, HypothesisViolated
from codense.finset import FiniteSet, map_tables
from codense.ultrafilter import SubsetFamily, satisfies_partition_condition

KG_SIZES = [[3], [1, 2, 3], [1, 2, 3, 4], [0, 1, 2, 3]]


@pytest.mark.parametrize("sizes", KG_SIZES, ids=str)
@pytest.mark.parametrize("n", range(5))
def test_carrier_is_the_ultrafilters(sizes, n):
    X = FiniteSet(n)
    C = codensity_carrier(sizes, X)
    assert len(C) == n
    rep = ultrafilter_comparison(sizes, X, C)
    assert rep.bijective and rep.ultrafilter_count == n
    assert unit_is_evaluation(sizes, X, C)


def test_carrier_elements_are_natural_operators():
    C = codensity_carrier([1, 2, 3], FiniteSet(2))
    for i in range(len(C)):
        assert C.operator(i).is_natural()


def test_comparison_refuses_small_subcategories():
    with pytest.raises(HypothesisViolated):
        ultrafilter_comparison([1, 2], FiniteSet(2))


@pytest.mark.parametrize("n", range(1, 5))
def test_singleton_subcategory_collapses(n):
    assert len(codensity_carrier([1], FiniteSet(n))) == 1


def test_partition_families_on_three_points():
    # families F with X in F, empty set not in F, and exactly one of Y, X \ Y in F
    X = FiniteSet(3)
    oracle = []
    for idx in range(1 << 8):
        F = SubsetFamily.from_index(X, idx)
        m = F.members
        if 7 in m and 0 not in m and all((y in m) != ((7 ^ y) in m) for y in range(8)):
            oracle.append(F)
    assert partition_12_families(X) == oracle
    assert len(oracle) == 8


def test_one_two_subcategory_gives_eight_partition_families():
    rep = degenerate_report([1, 2], FiniteSet(3))
    assert rep.carrier_size == 8
    assert rep.matches
    assert all(satisfies_partition_condition(F, 1) and satisfies_partition_condition(F, 2) for F in rep.recovered)


def test_degenerate_report_needs_two():
    with pytest.raises(HypothesisViolated):
        degenerate_report([1], FiniteSet(2))


def test_non_full_two_gives_double_power_set():
    for n in range(3):
        assert len(codensity_carrier([2], FiniteSet(n), full=False)) == 2 ** (2**n)


def brute_force_equivariant(b: int, n: int) -> int:
    fs = map_tables(n, b)
    return sum(
        is_equivariant(dict(zip(fs, vals)), b) for vals in itertools.product(range(b), repeat=len(fs))
    )


@pytest.mark.parametrize("b,n", [(3, 1), (3, 2), (2, 1), (2, 2), (2, 3)])
def test_lawvere_counts_match_brute_force(b, n):
    res = lawvere_equivariant_maps(FiniteSet(b), FiniteSet(n))
    assert res.count == brute_force_equivariant(b, n)
    assert all(is_equivariant(phi, b) for phi in res.witnesses)


def test_lawvere_expected_values():
    assert lawvere_equivariant_maps(FiniteSet(3), FiniteSet(1)).count == 1
    assert lawvere_equivariant_maps(FiniteSet(3), FiniteSet(2)).count == 2
    assert lawvere_equivariant_maps(FiniteSet(2), FiniteSet(3)).count > 3


def test_endomorphism_carrier():
    assert endomorphism_monad_carrier(FiniteSet(2), FiniteSet(2)).size == 16
    assert endomorphism_monad_carrier(FiniteSet(2), FiniteSet(1)).size == 4
    with pytest.raises(CapExceeded):
        endomorphism_monad_carrier(FiniteSet(4), FiniteSet(4), cap=10**6)
    for n in range(4):
        emb = ultrafilter_embedding_into_endomorphisms(FiniteSet(2), FiniteSet(n))
        assert len(set(emb)) == n


@pytest.mark.parametrize("sizes", [[3], [1, 2, 3]], ids=str)
def test_transported_monad_laws(sizes):
    rep = monad_law_report(sizes, max_unit=2, max_assoc=2)
    assert rep.ok


def test_monad_witness_tables():
    w = monad_witness([1, 2, 3], 2)
    assert w.unit_table[2] == (0, 1)
    assert w.mult_table[2] == (0, 1)


def test_tower_needs_a_big_set():
    with pytest.raises(HypothesisViolated):
        CarrierTower([1, 2])


def test_comparison_maps_from_other_monads_are_unique():
    assert len(unit_compatible_natural_maps(identity_fragment(2), [1, 2, 3])) == 1
    assert len(unit_compatible_natural_maps(ultrafilter_fragment(2), [1, 2, 3])) == 1
    assert len(unit_compatible_natural_maps(ultrafilter_fragment(2), [2], full=False)) == 1


def radical_oracle(n: int) -> int:
    """Smallest m with n | m^n."""
    return next(m for m in range(1, n + 1) if pow(m, n, n) == 0 or n == 1)


def test_zn_examples():
    r = zn_fields_codensity(12)
    assert r.radical == 6 and r.describe() == "Z/6" and r.ok
    r = zn_fields_codensity(7)
    assert r.radical == 7 and r.unit_injective
    r = zn_fields_codensity(8)
    assert r.radical == 2 and r.kernel == (0, 2, 4, 6) == r.nilradical


@pytest.mark.parametrize("n", range(1, 201))
def test_zn_against_oracles(n):
    r = zn_fields_codensity(n)
    assert r.radical == radical_oracle(n)
    assert r.nilradical == tuple(k for k in range(n) if pow(k, n, n) == 0)
    assert r.ok


def test_zn_rejections():
    with pytest.raises(ValueError):
        zn_fields_codensity(0)
    with pytest.raises(CapExceeded):
        zn_fields_codensity(10**6 + 1)


def test_prime_factors():
    assert prime_factors(1) == ()
    assert prime_factors(360) == (2, 3, 5)
    assert prime_factors(997) == (997,)
