"""Families of finite sets, ultraproducts and the ultraproduct monad.

An ultraproduct is computed as the colimit, over the large sets ``H`` ordered
by reverse inclusion, of the products ``prod_{x in H} S_x``.  Elements of a
product are tuples indexed by the members of ``H`` in increasing order.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

from codense.errors import CarrierMismatch, HypothesisViolated, InvalidStructure
from codense.fincat import Colimit, FiniteCategory, SetDiagram, category_of_elements, colimit
from codense.finset import DEFAULT_CAP, FiniteMap, FiniteSet, check_cap, compose, map_tables, mask_elements
from codense.integration import integrate
from codense.ultrafilter import (
    Ultrafilter,
    enumerate_ultrafilters,
    multiplication_map,
    ultrafilter_map,
    ultrafilter_unit_map,
    unit,
)


@dataclass(frozen=True)
class FamObject:
    index: FiniteSet
    components: tuple[FiniteSet, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != self.index.size:
            raise InvalidStructure("need one component per index point")

    @classmethod
    def of(cls, sizes: Sequence[int]) -> FamObject:
        return cls(FiniteSet(len(sizes)), tuple(FiniteSet(s) for s in sizes))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.components)

    def to_json(self) -> str:
        return json.dumps({"index": self.index.size, "components": list(self.sizes)})

    @classmethod
    def from_json(cls, text: str) -> FamObject:
        try:
            data = json.loads(text)
            n, comps = data["index"], data["components"]
        except (ValueError, KeyError, TypeError) as e:
            raise InvalidStructure(f"bad family literal: {e}") from None
        if not isinstance(n, int) or not isinstance(comps, list) or any(
            not isinstance(c, int) or c < 0 for c in comps
        ):
            raise InvalidStructure("index must be an integer and components a list of sizes")
        if len(comps) != n:
            raise InvalidStructure("components list length must equal the index size")
        return cls.of(comps)


@dataclass(frozen=True)
class FamMorphism:
    """``(f, phi)`` from ``S`` over ``X`` to ``R`` over ``Y``; ``phi_x`` runs
    backwards, ``R_{f(x)} -> S_x``."""

    source: FamObject
    target: FamObject
    f: FiniteMap
    phis: tuple[FiniteMap, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phis", tuple(self.phis))
        S, R = self.source, self.target
        if self.f.dom != S.index or self.f.cod != R.index:
            raise CarrierMismatch("index map does not match the families")
        if len(self.phis) != S.index.size:
            raise CarrierMismatch("need one component map per source index point")
        for x, phi in enumerate(self.phis):
            if phi.dom != R.components[self.f(x)] or phi.cod != S.components[x]:
                raise CarrierMismatch(f"component map at {x} has the wrong shape")

    @classmethod
    def identity(cls, S: FamObject) -> FamMorphism:
        return cls(S, S, FiniteMap.identity(S.index), tuple(FiniteMap.identity(c) for c in S.components))


def fam_compose(m2: FamMorphism, m1: FamMorphism) -> FamMorphism:
    """``m2 ∘ m1``: index maps compose forwards, component maps backwards."""
    if m1.target != m2.source:
        raise CarrierMismatch("morphisms are not composable")
    phis = tuple(compose(m1.phis[x], m2.phis[m1.f(x)]) for x in range(m1.source.index.size))
    return FamMorphism(m1.source, m2.target, compose(m2.f, m1.f), phis)


# ---------------------------------------------------------------------------
# products over subsets


def product_elements(S: FamObject, H: int) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(S.components[x].size) for x in mask_elements(H))))


def product_size(S: FamObject, H: int) -> int:
    n = 1
    for x in mask_elements(H):
        n *= S.components[x].size
    return n


def restrict(S: FamObject, H: int, K: int, t: Sequence[int]) -> tuple[int, ...]:
    """Project a tuple over ``H`` to ``K ⊆ H``."""
    pos = {x: i for i, x in enumerate(mask_elements(H))}
    return tuple(t[pos[x]] for x in mask_elements(K))


def restriction_map(S: FamObject, H: int, K: int) -> FiniteMap:
    elems_h = product_elements(S, H)
    index_k = {t: i for i, t in enumerate(product_elements(S, K))}
    return FiniteMap(
        FiniteSet(len(elems_h)),
        FiniteSet(len(index_k)),
        tuple(index_k[restrict(S, H, K, t)] for t in elems_h),
    )


# ---------------------------------------------------------------------------
# ultraproducts


@dataclass
class Ultraproduct:
    family: FamObject
    ultrafilter: Ultrafilter
    members: tuple[int, ...]
    colim: Colimit = field(repr=False)

    @property
    def carrier(self) -> FiniteSet:
        return self.colim.carrier

    def __len__(self) -> int:
        return self.colim.carrier.size

    @cached_property
    def _positions(self) -> dict[int, dict[tuple[int, ...], int]]:
        return {H: {t: i for i, t in enumerate(product_elements(self.family, H))} for H in self.members}

    def class_of(self, H: int, t: Sequence[int]) -> int:
        o = self.members.index(H)
        return self.colim.class_of(o, self._positions[H][tuple(t)])

    @cached_property
    def section(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """The first ``(H, tuple)`` in each class."""
        reps: dict[int, tuple[int, tuple[int, ...]]] = {}
        for H in self.members:
            for t in product_elements(self.family, H):
                reps.setdefault(self.class_of(H, t), (H, t))
        return tuple(reps[c] for c in range(len(self)))

    def representatives(self) -> list[tuple[int, tuple[int, ...], int]]:
        """Every ``(H, tuple, class)``."""
        return [(H, t, self.class_of(H, t)) for H in self.members for t in product_elements(self.family, H)]


def ultraproduct(S: FamObject, U: Ultrafilter, cap: int | None = DEFAULT_CAP) -> Ultraproduct:
    if U.carrier != S.index:
        raise CarrierMismatch("ultrafilter must live on the family's index set")
    members = tuple(sorted(U.members, key=lambda m: (-bin(m).count("1"), m)))
    check_cap(sum(product_size(S, H) for H in members), cap, "ultraproduct disjoint union")
    # arrow i -> j whenever members[j] ⊆ members[i]
    cat = FiniteCategory.from_poset(members, lambda i, j: members[j] & ~members[i] == 0)
    maps = [restriction_map(S, members[a.src], members[a.tgt]) for a in cat.arrows]
    sets = [FiniteSet(product_size(S, H)) for H in members]
    diagram = SetDiagram(cat, sets, maps, check=False)
    return Ultraproduct(S, U, members, colimit(diagram, cap))


def principal_collapse(up: Ultraproduct) -> FiniteMap:
    """``S_w -> prod_U S``, ``s |-> [({w}, s)]``, for ``U`` principal at ``w``."""
    w = up.ultrafilter.witness_point
    Sw = up.family.components[w]
    return FiniteMap(Sw, up.carrier, tuple(up.class_of(1 << w, (s,)) for s in range(Sw.size)))


# ---------------------------------------------------------------------------
# the colimit over the category of elements


@dataclass(frozen=True)
class ElementsIsoReport:
    lhs_size: int
    rhs_size: int
    theta: tuple[int, ...]
    well_defined: bool
    natural: bool
    cocone: bool
    inverse_ok: bool

    @property
    def bijective(self) -> bool:
        return (
            self.lhs_size == self.rhs_size
            and sorted(self.theta) == list(range(self.rhs_size))
            and self.well_defined
            and self.natural
            and self.cocone
            and self.inverse_ok
        )


@lru_cache(maxsize=32)
def _elements_category(sizes: tuple[int, ...], n: int, cap: int | None) -> FiniteCategory:
    cat, _ = category_of_elements([FiniteSet(b) for b in sizes], FiniteSet(n), cap=cap)
    return cat


def ultraproduct_via_elements(
    S: FamObject, U: Ultrafilter, B_sizes: Sequence[int], cap: int | None = DEFAULT_CAP
) -> ElementsIsoReport:
    """Compare ``prod_U S`` with the colimit of ``prod_{x in f^{-1}(∫ f dU)} S_x``
    over the elements ``(B, f)`` of ``Set(X, -)`` restricted to ``B_sizes``."""
    sizes = tuple(sorted(set(B_sizes)))
    if not any(b >= 3 for b in sizes):
        raise HypothesisViolated("the subcategory needs a set with at least three elements")
    X = S.index
    lhs = ultraproduct(S, U, cap)
    B_sets = [FiniteSet(b) for b in sizes]
    cat = _elements_category(sizes, X.size, cap)

    def fibre(o: int) -> int:
        i, f = cat.objects[o]
        v = integrate(U, FiniteMap(X, B_sets[i], f))
        return sum(1 << x for x in range(X.size) if f[x] == v)

    fibres = [fibre(o) for o in range(len(cat.objects))]
    check_cap(sum(product_size(S, H) for H in fibres), cap, "elements colimit disjoint union")
    # the diagram is contravariant: an arrow (B, f) -> (B', g) projects the
    # product over g's large fibre onto the one over f's
    op = cat.opposite()
    restrictions: dict[tuple[int, int], FiniteMap] = {}

    def restr(H: int, K: int) -> FiniteMap:
        if (H, K) not in restrictions:
            restrictions[H, K] = restriction_map(S, H, K)
        return restrictions[H, K]

    maps = [restr(fibres[a.src], fibres[a.tgt]) for a in op.arrows]
    rhs_diagram = SetDiagram(op, [FiniteSet(product_size(S, H)) for H in fibres], maps, check=False)
    rhs = colimit(rhs_diagram, cap)

    omega = next(i for i, b in enumerate(sizes) if b >= 2)
    obj_of = {o: k for k, o in enumerate(cat.objects)}

    def chi_object(H: int) -> int:
        return obj_of[omega, tuple(1 if H >> x & 1 else 0 for x in range(X.size))]

    theta_H = {H: rhs.coprojections[chi_object(H)] for H in lhs.members}
    # (i) every (B, f) with large fibre H has the same coprojection as chi_H
    well_defined = all(rhs.coprojections[o] == theta_H[fibres[o]] for o in range(len(fibres)))
    # (ii) theta_H ∘ pr = theta_H' for H ⊆ H'
    natural = all(
        compose(theta_H[K], restr(H, K)) == theta_H[H]
        for H in lhs.members
        for K in lhs.members
        if K & ~H == 0
    )
    # one check per distinct (source, target, map) triple
    triples = {(a.src, a.tgt, fibres[a.src], fibres[a.tgt]) for a in op.arrows}
    cocone = all(
        compose(rhs.coprojections[t], restr(H, K)) == rhs.coprojections[s]
        for s, t, H, K in triples
    )
    theta = [None] * len(lhs)
    consistent = True
    for H, t, c in lhs.representatives():
        v = theta_H[H](lhs._positions[H][t])
        if theta[c] is None:
            theta[c] = v
        elif theta[c] != v:
            consistent = False
    # theta-tilde: component at (B, f) is the left coprojection at f's large fibre
    back: list[int | None] = [None] * rhs.carrier.size
    for o, H in enumerate(fibres):
        for k, t in enumerate(product_elements(S, H)):
            c = rhs.coprojections[o](k)
            v = lhs.class_of(H, t)
            if back[c] is None:
                back[c] = v
            elif back[c] != v:
                consistent = False
    inverse_ok = (
        consistent
        and None not in theta
        and None not in back
        and all(back[theta[c]] == c for c in range(len(lhs)))
        and all(theta[back[c]] == c for c in range(rhs.carrier.size))
    )
    return ElementsIsoReport(
        len(lhs),
        rhs.carrier.size,
        tuple(-1 if v is None else v for v in theta),
        well_defined and consistent,
        natural,
        cocone,
        inverse_ok,
    )


# ---------------------------------------------------------------------------
# the functor V and the monad


@lru_cache(maxsize=None)
def _V(S: FamObject) -> tuple[FamObject, tuple[Ultraproduct, ...]]:
    ufs = enumerate_ultrafilters(S.index)
    ups = tuple(ultraproduct(S, U) for U in ufs)
    return FamObject(FiniteSet(len(ufs)), tuple(up.carrier for up in ups)), ups


def V_object(S: FamObject) -> FamObject:
    """``(prod_U S)_{U in U(X)}``."""
    return _V(S)[0]


def ultraproducts_of(S: FamObject) -> tuple[Ultraproduct, ...]:
    return _V(S)[1]


def V_on_morphism(m: FamMorphism) -> FamMorphism:
    """Index part ``f_*``; at ``U`` the class of ``(r_y)_{y in K}`` goes to the
    class of ``(phi_x(r_{f(x)}))_{x in f^{-1} K}``."""
    S, R = m.source, m.target
    VS, ups_s = _V(S)
    VR, ups_r = _V(R)
    fstar = ultrafilter_map(m.f)
    phis = []
    for u, up_s in enumerate(ups_s):
        up_r = ups_r[fstar(u)]
        table: list[int | None] = [None] * len(up_r)
        for K, r, c in up_r.representatives():
            pre = 0
            for x in range(S.index.size):
                if K >> m.f(x) & 1:
                    pre |= 1 << x
            rk = dict(zip(mask_elements(K), r))
            image = tuple(m.phis[x](rk[m.f(x)]) for x in mask_elements(pre))
            v = up_s.class_of(pre, image)
            if table[c] is None:
                table[c] = v
            elif table[c] != v:
                raise AssertionError("component map is not well defined on classes")
        phis.append(FiniteMap(up_r.carrier, up_s.carrier, tuple(table)))
    return FamMorphism(VS, VR, fstar, tuple(phis))


def _inverse(f: FiniteMap) -> FiniteMap:
    if not (f.is_injective() and f.is_surjective()):
        raise AssertionError("canonical map is not a bijection")
    inv = [0] * f.cod.size
    for x, y in enumerate(f.table):
        inv[y] = x
    return FiniteMap(f.cod, f.dom, tuple(inv))


def monad_unit(S: FamObject) -> FamMorphism:
    """``S -> V(S)``: index part ``eta_X``, components the inverse collapses."""
    VS, ups = _V(S)
    eta = ultrafilter_unit_map(S.index)
    phis = tuple(_inverse(principal_collapse(ups[eta(x)])) for x in range(S.index.size))
    return FamMorphism(S, VS, eta, phis)


def monad_multiplication(S: FamObject) -> FamMorphism:
    """``V(V(S)) -> V(S)``, transported through principal collapses.

    An ultrafilter ``W`` on ``U(X)`` is principal at some ``U``; its component
    ``prod_U S -> prod_W V(S)`` is the collapse at ``U``.
    """
    VS, _ = _V(S)
    VVS, ups2 = _V(VS)
    mu = multiplication_map(S.index)
    phis = []
    for w, up in enumerate(ups2):
        u0 = up.ultrafilter.witness_point
        if mu(w) != u0:
            raise AssertionError("multiplication does not follow the principal witness")
        phis.append(principal_collapse(up))
    return FamMorphism(VVS, VS, mu, tuple(phis))


@dataclass(frozen=True)
class FamMonadReport:
    instances: int
    functor_identity: bool
    left_unit: bool
    right_unit: bool
    associative: bool
    unit_natural: bool
    multiplication_unique: bool

    @property
    def ok(self) -> bool:
        return (
            self.functor_identity
            and self.left_unit
            and self.right_unit
            and self.associative
            and self.unit_natural
            and self.multiplication_unique
        )


def all_families(max_index: int, max_component: int) -> list[FamObject]:
    return [
        FamObject.of(sizes)
        for n in range(max_index + 1)
        for sizes in itertools.product(range(max_component + 1), repeat=n)
    ]


def all_morphisms(S: FamObject, R: FamObject, cap: int = 10**5) -> list[FamMorphism]:
    out = []
    for f in map_tables(S.index.size, R.index.size):
        fm = FiniteMap(S.index, R.index, f)
        choices = [
            [FiniteMap(R.components[f[x]], S.components[x], t) for t in map_tables(R.components[f[x]].size, S.components[x].size)]
            for x in range(S.index.size)
        ]
        for phis in itertools.product(*choices):
            out.append(FamMorphism(S, R, fm, phis))
            if len(out) > cap:
                raise InvalidStructure("too many morphisms to enumerate")
    return out


def unit_compatible_multiplications(S: FamObject, cap: int = 10**5) -> list[FamMorphism]:
    """Every ``m: V(V(S)) -> V(S)`` with ``m ∘ eta_{V(S)} = id``."""
    VS = V_object(S)
    eta = monad_unit(VS)
    ident = FamMorphism.identity(VS)
    return [m for m in all_morphisms(V_object(VS), VS, cap) if fam_compose(m, eta) == ident]


def random_family(rng: random.Random, max_index: int, max_component: int, min_index: int = 0) -> FamObject:
    n = rng.randint(min_index, max_index)
    return FamObject.of([rng.randint(0, max_component) for _ in range(n)])


def random_morphism(rng: random.Random, S: FamObject, R: FamObject) -> FamMorphism | None:
    """A uniformly chosen index map and component maps, if any exist."""
    if S.index.size and not R.index.size:
        return None
    f = tuple(rng.randrange(R.index.size) for _ in range(S.index.size))
    phis = []
    for x in range(S.index.size):
        src, tgt = R.components[f[x]], S.components[x]
        if src.size and not tgt.size:
            return None
        phis.append(FiniteMap(src, tgt, tuple(rng.randrange(tgt.size) for _ in range(src.size))))
    return FamMorphism(S, R, FiniteMap(S.index, R.index, f), tuple(phis))


def monad_laws_report(
    max_index: int = 2, max_component: int = 2, random_morphisms: int = 50, seed: int = 0
) -> FamMonadReport:
    families = all_families(max_index, max_component)
    ident = left = right = assoc = nat = unique = True
    for S in families:
        VS = V_object(S)
        ident &= V_on_morphism(FamMorphism.identity(S)) == FamMorphism.identity(VS)
        mu, mu_v = monad_multiplication(S), monad_multiplication(VS)
        id_vs = FamMorphism.identity(VS)
        left &= fam_compose(mu, monad_unit(VS)) == id_vs
        right &= fam_compose(mu, V_on_morphism(monad_unit(S))) == id_vs
        assoc &= fam_compose(mu, mu_v) == fam_compose(mu, V_on_morphism(mu))
        unique &= unit_compatible_multiplications(S) == [mu]
    rng = random.Random(seed)
    done = 0
    while done < random_morphisms:
        S = random_family(rng, max_index, max_component)
        R = random_family(rng, max_index, max_component)
        m = random_morphism(rng, S, R)
        if m is None:
            continue
        nat &= fam_compose(V_on_morphism(m), monad_unit(S)) == fam_compose(monad_unit(R), m)
        done += 1
    return FamMonadReport(len(families), ident, left, right, assoc, nat, unique)


def functor_composition_holds(m1: FamMorphism, m2: FamMorphism) -> bool:
    return V_on_morphism(fam_compose(m2, m1)) == fam_compose(V_on_morphism(m2), V_on_morphism(m1))


def random_principal(rng: random.Random, X: FiniteSet) -> Ultrafilter:
    return unit(X, rng.randrange(X.size))


def lemma_instances(seed: int, count: int, max_index: int = 3, max_component: int = 3):
    """Seeded ``(S, U, B_sizes)`` triples with nonempty index."""
    rng = random.Random(seed)
    size_lists = ([3], [1, 2, 3], [0, 1, 2, 3], [2, 3], [1, 2, 3, 4], [3, 4])
    out = []
    for _ in range(count):
        S = random_family(rng, max_index, max_component, min_index=1)
        out.append((S, random_principal(rng, S.index), list(rng.choice(size_lists))))
    return out
