"""Codensity monads of subcategories of finite sets.

The carrier ``T(X)`` for a subcategory given by a list of sizes is the limit
of the category-of-elements diagram ``(B, f: X -> B) |-> B``; each point of it
is an integration operator.  The monad multiplication on carriers is
transported from the ultrafilter monad along the comparison bijection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from codense.errors import CapExceeded, HypothesisViolated
from codense.fincat import (
    DEFAULT_NODE_CAP,
    EndElement,
    FiniteCategory,
    SetDiagram,
    category_of_elements,
    limit,
)
from codense.finset import DEFAULT_CAP, FiniteMap, FiniteSet, check_cap, compose, map_tables
from codense.integration import IntegrationOperator, characteristic, integrate, recover_ultrafilter
from codense.ultrafilter import (
    SubsetFamily,
    enumerate_ultrafilters,
    multiplication_map,
    satisfies_partition_condition,
    ultrafilter_map,
    ultrafilter_set,
    ultrafilter_unit_map,
)


@dataclass
class CodensityCarrier:
    X: FiniteSet
    subcategory_sizes: tuple[int, ...]
    full: bool
    category: FiniteCategory = field(repr=False)
    diagram: SetDiagram = field(repr=False)
    object_index: dict[tuple[int, tuple[int, ...]], int] = field(repr=False)
    elements: list[EndElement] = field(repr=False)

    def __post_init__(self) -> None:
        self._position = {e.assignment: i for i, e in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def as_set(self) -> FiniteSet:
        return FiniteSet(len(self.elements))

    def component(self, element: int, b: int, f: Sequence[int]) -> int:
        """``I_B(f)`` for the ``element``-th point, ``B`` of size ``b``."""
        return self.elements[element][self.object_index[b, tuple(f)]]

    def index_of(self, assignment: Sequence[int]) -> int | None:
        return self._position.get(tuple(assignment))

    def assignment_from(self, rule) -> tuple[int, ...]:
        """Assignment ``(B, f) |-> rule(b, f)`` over this carrier's objects."""
        out = [0] * len(self.category.objects)
        for (b, f), o in self.object_index.items():
            out[o] = rule(b, f)
        return tuple(out)

    def operator(self, element: int) -> IntegrationOperator:
        comps: dict[int, dict[tuple[int, ...], int]] = {}
        for (b, f), o in self.object_index.items():
            comps.setdefault(b, {})[f] = self.elements[element][o]
        return IntegrationOperator(self.X, comps)


def _normalise_sizes(B_sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(sorted(set(B_sizes)))
    if not sizes:
        raise ValueError("subcategory must contain at least one set")
    if sizes[0] < 0:
        raise ValueError("set sizes must be non-negative")
    return sizes


def codensity_carrier(
    B_sizes: Sequence[int],
    X: FiniteSet,
    full: bool = True,
    cap: int | None = DEFAULT_CAP,
    node_cap: int | None = DEFAULT_NODE_CAP,
) -> CodensityCarrier:
    """``T(X)`` for the subcategory on ``B_sizes``; ``full=False`` keeps only identities."""
    sizes = _normalise_sizes(B_sizes)
    cat, diagram = category_of_elements([FiniteSet(b) for b in sizes], X, all_maps=full, cap=cap)
    object_index = {(sizes[i], f): o for o, (i, f) in enumerate(cat.objects)}
    elements = limit(diagram, node_cap=node_cap)
    return CodensityCarrier(X, sizes, full, cat, diagram, object_index, elements)


def integration_assignment(carrier: CodensityCarrier, U) -> tuple[int, ...]:
    X = carrier.X
    return carrier.assignment_from(lambda b, f: integrate(U, FiniteMap(X, FiniteSet(b), f)))


def evaluation_assignment(carrier: CodensityCarrier, x: int) -> tuple[int, ...]:
    return carrier.assignment_from(lambda b, f: f[x])


@dataclass(frozen=True)
class ComparisonReport:
    x_size: int
    subcategory_sizes: tuple[int, ...]
    carrier_size: int
    ultrafilter_count: int
    mapping: tuple[int | None, ...]

    @property
    def injective(self) -> bool:
        hit = [m for m in self.mapping if m is not None]
        return len(hit) == len(self.mapping) and len(set(hit)) == len(hit)

    @property
    def surjective(self) -> bool:
        return set(self.mapping) == set(range(self.carrier_size))

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective


def has_big_set(B_sizes: Sequence[int]) -> bool:
    return any(b >= 3 for b in B_sizes)


def ultrafilter_comparison(
    B_sizes: Sequence[int], X: FiniteSet, carrier: CodensityCarrier | None = None
) -> ComparisonReport:
    """Send each ultrafilter to its integration operator and locate it in ``T(X)``."""
    if not has_big_set(B_sizes):
        raise HypothesisViolated(
            "the subcategory has no set with three or more elements; "
            "use degenerate_report for the small-subcategory experiment"
        )
    if carrier is None:
        carrier = codensity_carrier(B_sizes, X)
    ufs = enumerate_ultrafilters(X)
    mapping = tuple(carrier.index_of(integration_assignment(carrier, U)) for U in ufs)
    return ComparisonReport(X.size, carrier.subcategory_sizes, len(carrier), len(ufs), mapping)


def unit_is_evaluation(B_sizes: Sequence[int], X: FiniteSet, carrier: CodensityCarrier | None = None) -> bool:
    """Evaluation at each point is a carrier element equal to the image of the
    principal ultrafilter there; when ``|X|`` is itself in the subcategory the
    unit is a bijection."""
    if carrier is None:
        carrier = codensity_carrier(B_sizes, X)
    ufs = enumerate_ultrafilters(X)
    hits = []
    for x in range(X.size):
        ev = evaluation_assignment(carrier, x)
        if carrier.index_of(ev) is None or ev != integration_assignment(carrier, ufs[x]):
            return False
        hits.append(carrier.index_of(ev))
    if X.size in carrier.subcategory_sizes:
        return len(set(hits)) == X.size == len(carrier)
    return True


# ---------------------------------------------------------------------------
# small subcategories


def partition_12_families(X: FiniteSet, max_size: int = 3) -> list[SubsetFamily]:
    """Families meeting the partition condition for ``n = 1`` and ``n = 2``,
    by scanning all ``2**(2**|X|)`` families."""
    if X.size > max_size:
        raise CapExceeded(f"|X|={X.size} too large for a full family scan")
    out = []
    for idx in range(1 << (1 << X.size)):
        F = SubsetFamily.from_index(X, idx)
        if satisfies_partition_condition(F, 1) and satisfies_partition_condition(F, 2):
            out.append(F)
    return out


@dataclass(frozen=True)
class DegenerateReport:
    x_size: int
    subcategory_sizes: tuple[int, ...]
    carrier_size: int
    recovered: tuple[SubsetFamily, ...]
    partition_families: tuple[SubsetFamily, ...]

    @property
    def matches(self) -> bool:
        return len(set(self.recovered)) == len(self.recovered) and set(self.recovered) == set(self.partition_families)


def degenerate_report(B_sizes: Sequence[int], X: FiniteSet) -> DegenerateReport:
    """For a subcategory containing 2 but nothing larger: recover a family from
    every carrier element and compare with the partition-condition families."""
    carrier = codensity_carrier(B_sizes, X)
    if 2 not in carrier.subcategory_sizes:
        raise HypothesisViolated("recovery needs a two-element set in the subcategory")
    recovered = tuple(recover_ultrafilter(carrier.operator(i), FiniteSet(2)) for i in range(len(carrier)))
    return DegenerateReport(X.size, carrier.subcategory_sizes, len(carrier), recovered, tuple(partition_12_families(X)))


@dataclass(frozen=True)
class LawvereResult:
    b_size: int
    x_size: int
    witnesses: tuple[dict[tuple[int, ...], int], ...]

    @property
    def count(self) -> int:
        return len(self.witnesses)


def lawvere_equivariant_maps(B: FiniteSet, X: FiniteSet, cap: int | None = DEFAULT_CAP) -> LawvereResult:
    """Maps ``phi: [X, B] -> B`` with ``phi(theta∘f) = theta(phi(f))`` for every
    endomorphism ``theta`` of ``B``.  These are the limit points of the
    one-object category of elements, solved by the constraint engine."""
    carrier = codensity_carrier([B.size], X, cap=cap)
    fs = map_tables(X.size, B.size)
    witnesses = tuple({f: carrier.component(i, B.size, f) for f in fs} for i in range(len(carrier)))
    return LawvereResult(B.size, X.size, witnesses)


def is_equivariant(phi: dict[tuple[int, ...], int], b: int) -> bool:
    for theta in map_tables(b, b):
        for f, v in phi.items():
            if phi[tuple(theta[y] for y in f)] != theta[v]:
                return False
    return True


def endomorphism_monad_carrier(B: FiniteSet, X: FiniteSet, cap: int | None = DEFAULT_CAP) -> FiniteSet:
    """``[[X, B], B]``, all maps with no naturality imposed.

    Element ``k`` is the map whose value table over ``map_tables(|X|, |B|)``
    is the ``k``-th table in lexicographic order.
    """
    n = B.size ** (B.size**X.size)
    check_cap(n, cap, "endomorphism monad carrier")
    return FiniteSet(n)


def endomorphism_element_index(values: Sequence[int], b: int) -> int:
    idx = 0
    for v in values:
        idx = idx * b + v
    return idx


def ultrafilter_embedding_into_endomorphisms(B: FiniteSet, X: FiniteSet) -> tuple[int, ...]:
    """Indices in ``[[X, B], B]`` of the ultrafilter integrals (one per ultrafilter)."""
    fs = map_tables(X.size, B.size)
    out = []
    for U in enumerate_ultrafilters(X):
        vals = [integrate(U, FiniteMap(X, B, f)) for f in fs]
        out.append(endomorphism_element_index(vals, B.size))
    return tuple(out)


# ---------------------------------------------------------------------------
# monad structure on carriers


def carrier_map(g: FiniteMap, src: CodensityCarrier, tgt: CodensityCarrier) -> FiniteMap:
    """``T(g)``: precompose every integrand with ``g``."""
    if src.subcategory_sizes != tgt.subcategory_sizes or src.full != tgt.full:
        raise ValueError("carriers must be built over the same subcategory")
    if g.dom != src.X or g.cod != tgt.X:
        raise ValueError("map does not run between the carriers' base sets")
    table = []
    for i in range(len(src)):
        a = tgt.assignment_from(lambda b, h: src.component(i, b, tuple(h[v] for v in g.table)))
        j = tgt.index_of(a)
        if j is None:
            raise AssertionError("pushed-forward operator is not natural")
        table.append(j)
    return FiniteMap(src.as_set, tgt.as_set, tuple(table))


def carrier_unit(carrier: CodensityCarrier) -> FiniteMap:
    table = []
    for x in range(carrier.X.size):
        j = carrier.index_of(evaluation_assignment(carrier, x))
        if j is None:
            raise AssertionError("evaluation is not a carrier element")
        table.append(j)
    return FiniteMap(carrier.X, carrier.as_set, tuple(table))


def comparison_map(carrier: CodensityCarrier) -> FiniteMap:
    """``U(X) -> T(X)``, ``U |-> ∫ - dU``."""
    rep = ultrafilter_comparison(carrier.subcategory_sizes, carrier.X, carrier)
    if not rep.bijective:
        raise AssertionError("comparison is not a bijection")
    return FiniteMap(ultrafilter_set(carrier.X), carrier.as_set, rep.mapping)


def inverse(f: FiniteMap) -> FiniteMap:
    if not (f.is_injective() and f.is_surjective()):
        raise ValueError("map is not a bijection")
    inv = [0] * f.cod.size
    for x, y in enumerate(f.table):
        inv[y] = x
    return FiniteMap(f.cod, f.dom, tuple(inv))


class CarrierTower:
    """Carriers ``T(X), T(T(X)), ...`` over one subcategory, with the comparison
    bijections and the transported multiplication."""

    def __init__(self, B_sizes: Sequence[int]) -> None:
        if not has_big_set(B_sizes):
            raise HypothesisViolated("transport needs the ultrafilter comparison, so a set of size >= 3")
        self.sizes = _normalise_sizes(B_sizes)
        self._carriers: dict[int, CodensityCarrier] = {}

    def carrier(self, n: int) -> CodensityCarrier:
        if n not in self._carriers:
            self._carriers[n] = codensity_carrier(self.sizes, FiniteSet(n))
        return self._carriers[n]

    def T(self, n: int) -> int:
        return len(self.carrier(n))

    def on_map(self, g: FiniteMap) -> FiniteMap:
        return carrier_map(g, self.carrier(g.dom.size), self.carrier(g.cod.size))

    def unit(self, n: int) -> FiniteMap:
        return carrier_unit(self.carrier(n))

    def phi(self, n: int) -> FiniteMap:
        return comparison_map(self.carrier(n))

    def multiplication(self, n: int) -> FiniteMap:
        """``mu^T_X = phi_X ∘ mu^U_X ∘ (phi_{TX} ∘ U(phi_X))^{-1}``."""
        X = FiniteSet(n)
        phi_x = self.phi(n)
        psi = compose(self.phi(self.T(n)), ultrafilter_map(phi_x))
        return compose(phi_x, compose(multiplication_map(X), inverse(psi)))


@dataclass(frozen=True)
class MonadLawReport:
    subcategory_sizes: tuple[int, ...]
    max_unit: int
    max_assoc: int
    left_unit: bool
    right_unit: bool
    associative: bool
    multiplication_unique: bool
    unit_matches_ultrafilter: bool

    @property
    def ok(self) -> bool:
        return (
            self.left_unit
            and self.right_unit
            and self.associative
            and self.multiplication_unique
            and self.unit_matches_ultrafilter
        )


def monad_law_report(B_sizes: Sequence[int], max_unit: int = 2, max_assoc: int = 2) -> MonadLawReport:
    tower = CarrierTower(B_sizes)
    left = right = assoc = unique = unit_ok = True
    for n in range(max(max_unit, max_assoc) + 1):
        X = FiniteSet(n)
        tn = tower.T(n)
        mu = tower.multiplication(n)
        eta_t = tower.unit(tn)
        identity = FiniteMap.identity(FiniteSet(tn))
        if n <= max_unit:
            left &= compose(mu, eta_t) == identity
            right &= compose(mu, tower.on_map(tower.unit(n))) == identity
            # unit-compatible multiplications: every m with m∘eta_{TX} = id
            tt = tower.T(tn)
            cands = [
                t
                for t in itertools.product(range(tn), repeat=tt)
                if all(t[eta_t(y)] == y for y in range(tn))
            ]
            unique &= cands == [mu.table]
            unit_ok &= compose(tower.phi(n), ultrafilter_unit_map(X)) == tower.unit(n)
        if n <= max_assoc:
            lhs = compose(mu, tower.multiplication(tn))
            rhs = compose(mu, tower.on_map(mu))
            assoc &= lhs == rhs
    return MonadLawReport(tower.sizes, max_unit, max_assoc, left, right, assoc, unique, unit_ok)


# ---------------------------------------------------------------------------
# comparison maps out of other monads


@dataclass
class FiniteMonadFragment:
    """A monad given only on sets of size ``0..max_size``: carrier sizes, unit
    tables and the functor action on every map between those sets."""

    name: str
    max_size: int
    carrier_size: dict[int, int]
    unit: dict[int, FiniteMap]
    on_map: object  # Callable[[FiniteMap], FiniteMap]


def identity_fragment(max_size: int) -> FiniteMonadFragment:
    return FiniteMonadFragment(
        "identity",
        max_size,
        {n: n for n in range(max_size + 1)},
        {n: FiniteMap.identity(FiniteSet(n)) for n in range(max_size + 1)},
        lambda g: g,
    )


def ultrafilter_fragment(max_size: int) -> FiniteMonadFragment:
    return FiniteMonadFragment(
        "ultrafilter",
        max_size,
        {n: n for n in range(max_size + 1)},
        {n: ultrafilter_unit_map(FiniteSet(n)) for n in range(max_size + 1)},
        ultrafilter_map,
    )


def unit_compatible_natural_maps(
    S: FiniteMonadFragment, B_sizes: Sequence[int], full: bool = True, max_candidates: int = 10**6
) -> list[dict[int, FiniteMap]]:
    """Every family ``alpha_X: S(X) -> T(X)`` (``|X| <= S.max_size``) that is
    natural in ``X`` and satisfies ``alpha ∘ eta^S = eta^T``, by brute force."""
    carriers = {n: codensity_carrier(B_sizes, FiniteSet(n), full=full) for n in range(S.max_size + 1)}
    per_size: dict[int, list[FiniteMap]] = {}
    for n, C in carriers.items():
        src = FiniteSet(S.carrier_size[n])
        check_cap(len(C) ** src.size, max_candidates, "candidate comparison maps")
        eta_t = carrier_unit(C)
        eta_s = S.unit[n]
        per_size[n] = [
            FiniteMap(src, C.as_set, t)
            for t in itertools.product(range(len(C)), repeat=src.size)
            if all(t[eta_s(x)] == eta_t(x) for x in range(n))
        ]
    out = []
    sizes = sorted(carriers)
    for combo in itertools.product(*(per_size[n] for n in sizes)):
        alpha = dict(zip(sizes, combo))
        natural = True
        for a in sizes:
            for b in sizes:
                for table in map_tables(a, b):
                    g = FiniteMap(FiniteSet(a), FiniteSet(b), table)
                    Tg = carrier_map(g, carriers[a], carriers[b])
                    if compose(Tg, alpha[a]) != compose(alpha[b], S.on_map(g)):
                        natural = False
                        break
                if not natural:
                    break
            if not natural:
                break
        if natural:
            out.append(alpha)
    return out


# ---------------------------------------------------------------------------
# fields into rings, restricted to Z/n


def prime_factors(n: int) -> tuple[int, ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


@dataclass(frozen=True)
class ZnReport:
    n: int
    primes: tuple[int, ...]
    radical: int
    crt_isomorphism: bool
    kernel: tuple[int, ...]
    nilradical: tuple[int, ...]

    @property
    def kernel_is_nilradical(self) -> bool:
        return self.kernel == self.nilradical

    @property
    def unit_injective(self) -> bool:
        return self.kernel == (0,)

    @property
    def ok(self) -> bool:
        return self.crt_isomorphism and self.kernel_is_nilradical

    def describe(self) -> str:
        return f"Z/{self.radical}"


def zn_fields_codensity(n: int) -> ZnReport:
    """``T(Z/n)`` as the product of the residue fields ``Z/p`` over primes
    ``p | n``, checked isomorphic to ``Z/rad(n)`` with the unit's kernel equal
    to the nilpotents of ``Z/n``."""
    if n <= 0:
        raise ValueError("n must be a positive integer")
    if n > 10**6:
        raise CapExceeded("n above 10^6")
    primes = prime_factors(n)
    rad = 1
    for p in primes:
        rad *= p

    # k |-> (k mod p)_p from Z/rad into the product of fields.  A map out of a
    # cyclic ring that is additive and sends 1 to 1 is a ring map, so check
    # phi(k + 1) = phi(k) + 1 along the whole cycle plus bijectivity.
    one = tuple(1 % p for p in primes)

    def phi(k: int) -> tuple[int, ...]:
        return tuple(k % p for p in primes)

    additive = all(
        phi((k + 1) % rad) == tuple((a + b) % p for a, b, p in zip(phi(k), one, primes)) for k in range(rad)
    )
    size = 1
    for p in primes:
        size *= p
    bijective = size == rad and len({phi(k) for k in range(rad)}) == rad
    crt = additive and bijective and phi(1) == one

    kernel = tuple(k for k in range(n) if k % rad == 0)
    e = max(1, n.bit_length())
    nil = []
    for k in range(n):
        x = k % n
        for _ in range(e):
            if x == 0:
                break
            x = (x * k) % n
        if x == 0:
            nil.append(k)
    return ZnReport(n, primes, rad, crt, kernel, tuple(nil))


@dataclass(frozen=True)
class MonadWitness:
    """Unit and multiplication tables of the carrier monad for ``|X| <= max_size``."""

    subcategory_sizes: tuple[int, ...]
    unit_table: dict[int, tuple[int, ...]]
    mult_table: dict[int, tuple[int, ...]]


def monad_witness(B_sizes: Sequence[int], max_size: int = 2) -> MonadWitness:
    tower = CarrierTower(B_sizes)
    units = {n: tower.unit(n).table for n in range(max_size + 1)}
    mults = {n: tower.multiplication(n).table for n in range(max_size + 1)}
    return MonadWitness(tower.sizes, units, mults)
