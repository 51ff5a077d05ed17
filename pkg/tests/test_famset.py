from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from codense.errors import CarrierMismatch, HypothesisViolated, InvalidStructure
from codense.famset import (
    FamMorphism,
    FamObject,
    V_object,
    V_on_morphism,
    all_families,
    fam_compose,
    functor_composition_holds,
    lemma_instances,
    monad_laws_report,
    monad_multiplication,
    monad_unit,
    principal_collapse,
    product_elements,
    random_morphism,
    ultraproduct,
    ultraproduct_via_elements,
    unit_compatible_multiplications,
)
from codense.finset import FiniteMap, FiniteSet, mask_elements
from codense.ultrafilter import enumerate_ultrafilters, unit

families = st.lists(st.integers(0, 3), min_size=1, max_size=3).map(FamObject.of)


def naive_ultraproduct_size(S: FamObject, U) -> int:
    """Classes of pairs (H, s) under agreement on some large L ⊆ H ∩ K."""
    nodes = [(H, t) for H in U.members for t in product_elements(S, H)]

    def agree(a, b):
        (H, s), (K, t) = a, b
        ds, dt = dict(zip(mask_elements(H), s)), dict(zip(mask_elements(K), t))
        return any(L & ~(H & K) == 0 and all(ds[x] == dt[x] for x in mask_elements(L)) for L in U.members)

    seen, classes = set(), 0
    for v in nodes:
        if v in seen:
            continue
        classes += 1
        stack = [v]
        seen.add(v)
        while stack:
            a = stack.pop()
            for b in nodes:
                if b not in seen and agree(a, b):
                    seen.add(b)
                    stack.append(b)
    return classes


def test_json_round_trip():
    S = FamObject.of([0, 2, 1])
    assert FamObject.from_json(S.to_json()) == S
    assert FamObject.from_json('{"index": 2, "components": [0, 1]}').sizes == (0, 1)


@pytest.mark.parametrize(
    "text",
    ['{"index": 2, "components": [1]}', '{"index": 1}', "[1, 2]", '{"index": 1, "components": [-1]}', "nope"],
)
def test_json_errors(text):
    with pytest.raises(InvalidStructure):
        FamObject.from_json(text)


def test_morphism_shapes():
    S, R = FamObject.of([2]), FamObject.of([1, 3])
    f = FiniteMap(S.index, R.index, (1,))
    m = FamMorphism(S, R, f, (FiniteMap(FiniteSet(3), FiniteSet(2), (0, 1, 1)),))
    assert m.target == R
    with pytest.raises(CarrierMismatch):
        FamMorphism(S, R, f, (FiniteMap(FiniteSet(1), FiniteSet(2), (0,)),))


def test_composition_runs_components_backwards():
    S, R, Q = FamObject.of([2]), FamObject.of([2]), FamObject.of([2])
    swap = FiniteMap(FiniteSet(2), FiniteSet(2), (1, 0))
    const = FiniteMap(FiniteSet(2), FiniteSet(2), (0, 0))
    idx = FiniteMap.identity(FiniteSet(1))
    m1, m2 = FamMorphism(S, R, idx, (swap,)), FamMorphism(R, Q, idx, (const,))
    # component of m2∘m1 is phi ∘ psi = swap ∘ const
    assert fam_compose(m2, m1).phis[0].table == (1, 1)


@given(st.integers(0, 10**6))
def test_composition_is_associative(seed):
    rng = random.Random(seed)
    objs = [FamObject.of([rng.randint(1, 2) for _ in range(rng.randint(1, 2))]) for _ in range(4)]
    ms = [random_morphism(rng, objs[i], objs[i + 1]) for i in range(3)]
    a, b, c = ms
    assert fam_compose(c, fam_compose(b, a)) == fam_compose(fam_compose(c, b), a)
    assert fam_compose(a, FamMorphism.identity(objs[0])) == a


@pytest.mark.parametrize("S", all_families(2, 2), ids=lambda S: str(S.sizes))
def test_ultraproduct_matches_naive_quotient(S):
    for U in enumerate_ultrafilters(S.index):
        assert len(ultraproduct(S, U)) == naive_ultraproduct_size(S, U)


@given(families, st.data())
def test_principal_collapse(S, data):
    w = data.draw(st.integers(0, S.index.size - 1))
    up = ultraproduct(S, unit(S.index, w))
    c = principal_collapse(up)
    assert len(up) == S.components[w].size
    assert c.is_injective() and c.is_surjective()


def test_empty_component_is_not_absorbing():
    S = FamObject.of([0, 1])
    assert len(ultraproduct(S, unit(S.index, 1))) == 1
    assert len(ultraproduct(S, unit(S.index, 0))) == 0


@given(st.integers(1, 3), st.integers(0, 3))
def test_constant_family(n, a):
    S = FamObject.of([a] * n)
    for U in enumerate_ultrafilters(S.index):
        assert len(ultraproduct(S, U)) == a


def test_section_represents_every_class():
    S = FamObject.of([2, 3])
    up = ultraproduct(S, unit(S.index, 1))
    assert [up.class_of(H, t) for H, t in up.section] == list(range(len(up)))


@given(families, st.data(), st.sampled_from([[3], [1, 2, 3], [0, 1, 2, 3], [2, 3]]))
def test_elements_colimit_is_isomorphic(S, data, sizes):
    w = data.draw(st.integers(0, S.index.size - 1))
    rep = ultraproduct_via_elements(S, unit(S.index, w), sizes)
    assert rep.bijective
    assert rep.lhs_size == S.components[w].size


def test_elements_colimit_needs_a_big_set():
    S = FamObject.of([1])
    with pytest.raises(HypothesisViolated):
        ultraproduct_via_elements(S, unit(S.index, 0), [1, 2])


def test_lemma_instances_are_seeded():
    a, b = lemma_instances(7, 20), lemma_instances(7, 20)
    assert [(S, U.witness_point, B) for S, U, B in a] == [(S, U.witness_point, B) for S, U, B in b]


def test_collapse_morphism_against_direct_computation():
    # f: {0, 1} -> {0}; the index part of V is constant and, at the ultrafilter
    # on 0 or 1, the component map is phi_x read through the collapses
    S, R = FamObject.of([2, 2]), FamObject.of([3])
    f = FiniteMap(S.index, R.index, (0, 0))
    phi0 = FiniteMap(FiniteSet(3), FiniteSet(2), (0, 1, 1))
    phi1 = FiniteMap(FiniteSet(3), FiniteSet(2), (1, 0, 0))
    Vm = V_on_morphism(FamMorphism(S, R, f, (phi0, phi1)))
    assert Vm.f.table == (0, 0)
    ups_s = [ultraproduct(S, U) for U in enumerate_ultrafilters(S.index)]
    up_r = ultraproduct(R, unit(R.index, 0))
    for x, phi in enumerate((phi0, phi1)):
        cs, cr = principal_collapse(ups_s[x]), principal_collapse(up_r)
        for r in range(3):
            assert Vm.phis[x](cr(r)) == cs(phi(r))


@pytest.mark.parametrize("S", all_families(2, 2), ids=lambda S: str(S.sizes))
def test_V_preserves_identities(S):
    assert V_on_morphism(FamMorphism.identity(S)) == FamMorphism.identity(V_object(S))


@given(st.integers(0, 10**6))
def test_V_preserves_composition(seed):
    rng = random.Random(seed)
    objs = [FamObject.of([rng.randint(0, 2) for _ in range(rng.randint(1, 3))]) for _ in range(3)]
    m1, m2 = random_morphism(rng, objs[0], objs[1]), random_morphism(rng, objs[1], objs[2])
    if m1 is None or m2 is None:
        return
    assert functor_composition_holds(m1, m2)


@given(st.integers(0, 10**6))
def test_unit_is_natural(seed):
    rng = random.Random(seed)
    S = FamObject.of([rng.randint(0, 2) for _ in range(rng.randint(1, 3))])
    R = FamObject.of([rng.randint(0, 2) for _ in range(rng.randint(1, 3))])
    m = random_morphism(rng, S, R)
    if m is None:
        return
    assert fam_compose(V_on_morphism(m), monad_unit(S)) == fam_compose(monad_unit(R), m)


@pytest.mark.parametrize("S", all_families(3, 3)[:40], ids=lambda S: str(S.sizes))
def test_unit_components_are_bijections(S):
    eta = monad_unit(S)
    assert all(p.is_injective() and p.is_surjective() for p in eta.phis)


def test_single_point_index():
    S = FamObject.of([2])
    eta = monad_unit(S)
    assert eta.phis[0].table == (0, 1)
    assert monad_multiplication(S).f.table == (0,)


def test_monad_laws_report():
    rep = monad_laws_report(2, 2)
    assert rep.ok and rep.instances == 13


@pytest.mark.parametrize("S", all_families(2, 2), ids=lambda S: str(S.sizes))
def test_multiplication_is_the_only_unit_compatible_one(S):
    assert unit_compatible_multiplications(S) == [monad_multiplication(S)]
