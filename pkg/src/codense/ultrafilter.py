"""Filters and ultrafilters on finite carriers.

A :class:`SubsetFamily` stores its members as a frozenset of subset masks.  For
exhaustive scans a family on an ``n``-element carrier is also identified with
an integer of ``2**n`` bits (bit ``m`` set iff the subset with mask ``m`` is a
member), so the ``2**(2**n)`` families are just ``range(2**(2**n))``.

The set ``U(X)`` of ultrafilters on ``X`` is enumerated in order of witness
point, which makes it canonically the finite set ``{0..|X|-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from codense.errors import CapExceeded, CarrierMismatch, InvalidStructure
from codense.finset import (
    FiniteMap,
    FiniteSet,
    Subset,
    compose,
    enumerate_maps,
    image,
    partition_masks,
    preimage,
)


@dataclass(frozen=True)
class SubsetFamily:
    carrier: FiniteSet
    members: frozenset[int]

    def __post_init__(self) -> None:
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, "members", frozenset(self.members))
        limit = 1 << self.carrier.size
        for m in self.members:
            if not 0 <= m < limit:
                raise InvalidStructure(f"member mask {m} does not fit carrier of size {self.carrier.size}")

    @classmethod
    def of(cls, carrier: FiniteSet, subsets: Iterable[Subset | Iterable[int]]) -> SubsetFamily:
        masks = set()
        for s in subsets:
            if isinstance(s, Subset):
                if s.carrier != carrier:
                    raise CarrierMismatch("member on a different carrier")
                masks.add(s.mask)
            else:
                masks.add(Subset.of(carrier, list(s)).mask)
        return cls(carrier, frozenset(masks))

    @classmethod
    def from_index(cls, carrier: FiniteSet, index: int) -> SubsetFamily:
        members = frozenset(m for m in range(1 << carrier.size) if (index >> m) & 1)
        return cls(carrier, members)

    @classmethod
    def power_set(cls, carrier: FiniteSet) -> SubsetFamily:
        return cls(carrier, frozenset(range(1 << carrier.size)))

    @classmethod
    def at_least(cls, carrier: FiniteSet, k: int) -> SubsetFamily:
        """All subsets with at least ``k`` elements."""
        return cls(carrier, frozenset(m for m in range(1 << carrier.size) if bin(m).count("1") >= k))

    @property
    def index(self) -> int:
        out = 0
        for m in self.members:
            out |= 1 << m
        return out

    def __contains__(self, Y: object) -> bool:
        if isinstance(Y, Subset):
            return Y.carrier == self.carrier and Y.mask in self.members
        return Y in self.members

    def __len__(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)


def principal_family(X: FiniteSet, x: int) -> SubsetFamily:
    if x not in X:
        raise IndexError(f"point {x} not in a set of size {X.size}")
    bit = 1 << x
    return SubsetFamily(X, frozenset(m for m in range(1 << X.size) if m & bit))


@dataclass(frozen=True)
class Ultrafilter:
    """An ultrafilter on a finite carrier, necessarily principal at ``witness_point``."""

    underlying: SubsetFamily
    witness_point: int

    def __post_init__(self) -> None:
        if self.underlying != principal_family(self.underlying.carrier, self.witness_point):
            raise InvalidStructure("ultrafilter members disagree with its witness point")

    @property
    def carrier(self) -> FiniteSet:
        return self.underlying.carrier

    @property
    def members(self) -> frozenset[int]:
        return self.underlying.members

    def __contains__(self, Y: object) -> bool:
        return Y in self.underlying

    @classmethod
    def from_family(cls, F: SubsetFamily) -> Ultrafilter:
        if not is_ultrafilter(F):
            raise InvalidStructure("family is not an ultrafilter")
        meet = F.carrier.full_mask
        for m in F.members:
            meet &= m
        # a finite ultrafilter is closed under its (finite) total intersection
        witness = meet.bit_length() - 1
        return cls(F, witness)


def is_filter(F: SubsetFamily) -> bool:
    X = F.carrier
    full = X.full_mask
    mem = F.members
    if full not in mem:
        return False
    for a in mem:
        for b in range(1 << X.size):
            if a & ~b & full == 0 and b not in mem:
                return False
        for b in mem:
            if a & b not in mem:
                return False
    return True


def is_ultrafilter(U: SubsetFamily) -> bool:
    if not is_filter(U):
        return False
    full = U.carrier.full_mask
    for m in range(1 << U.carrier.size):
        if (m in U.members) == ((full & ~m) in U.members):
            return False
    return True


def satisfies_partition_condition(U: SubsetFamily, n: int, cap: int | None = 10**7) -> bool:
    """Every ordered ``n``-block partition has exactly one block in ``U``."""
    mem = U.members
    for blocks in partition_masks(U.carrier.size, n, cap):
        hits = 0
        for b in blocks:
            if b in mem:
                hits += 1
        if hits != 1:
            return False
    return True


@dataclass
class GalvinHornReport:
    size: int
    families: int
    ultrafilter_flags: np.ndarray = field(repr=False)
    partition_all_flags: np.ndarray = field(repr=False)
    partition_three_flags: np.ndarray = field(repr=False)
    principal_indices: tuple[int, ...]

    @property
    def ultrafilter_count(self) -> int:
        return int(self.ultrafilter_flags.sum())

    @property
    def equivalent(self) -> bool:
        uf = self.ultrafilter_flags
        if not (np.array_equal(uf, self.partition_all_flags) and np.array_equal(uf, self.partition_three_flags)):
            return False
        return tuple(int(i) for i in np.flatnonzero(uf)) == self.principal_indices

    def rows(self) -> Iterable[tuple[int, bool, bool, bool]]:
        for i in range(self.families):
            yield (
                i,
                bool(self.ultrafilter_flags[i]),
                bool(self.partition_all_flags[i]),
                bool(self.partition_three_flags[i]),
            )


GALVIN_HORN_MAX = 4


def galvin_horn_exhaustive(X: FiniteSet, max_size: int = GALVIN_HORN_MAX) -> GalvinHornReport:
    """Classify every family on ``X`` three ways: ultrafilter axioms, the
    partition condition for all ``n <= |X|+1``, and for ``n = 3`` alone.

    Runs vectorised over all ``2**(2**|X|)`` family indices at once.
    """
    n = X.size
    if n > max_size:
        raise CapExceeded(f"Galvin-Horn scan on |X|={n} needs 2^{2**n} families; cap is |X| <= {max_size}")
    nsub = 1 << n
    full = (1 << n) - 1
    fams = np.arange(1 << nsub, dtype=np.int64)
    bits = [((fams >> m) & 1).astype(bool) for m in range(nsub)]

    uf = bits[full].copy()
    for a in range(nsub):
        for b in range(nsub):
            if a & ~b & full == 0:
                uf &= ~bits[a] | bits[b]
            uf &= ~(bits[a] & bits[b]) | bits[a & b]
        uf &= bits[a] ^ bits[full & ~a]

    def partition_flags(k: int) -> np.ndarray:
        ok = np.ones(len(fams), dtype=bool)
        for blocks in partition_masks(n, k):
            hits = np.zeros(len(fams), dtype=np.int8)
            for b in blocks:
                hits += bits[b]
            ok &= hits == 1
        return ok

    part_all = np.ones(len(fams), dtype=bool)
    for k in range(0, n + 2):
        part_all &= partition_flags(k)
    part_three = partition_flags(3)

    principal = tuple(sorted(principal_family(X, x).index for x in range(n)))
    return GalvinHornReport(n, len(fams), uf, part_all, part_three, principal)


def unit(X: FiniteSet, x: int) -> Ultrafilter:
    """The principal ultrafilter at ``x``."""
    return Ultrafilter(principal_family(X, x), x)


principal = unit


def enumerate_ultrafilters(X: FiniteSet) -> list[Ultrafilter]:
    """``U(X)``, ordered by witness point."""
    return [unit(X, x) for x in range(X.size)]


def ultrafilter_set(X: FiniteSet) -> FiniteSet:
    """``U(X)`` as a finite set: element ``i`` is the ultrafilter principal at ``i``."""
    return FiniteSet(X.size)


def pushforward_family(f: FiniteMap, F: SubsetFamily) -> SubsetFamily:
    if F.carrier != f.dom:
        raise CarrierMismatch("family is not on the domain of the map")
    members = frozenset(
        m for m in range(1 << f.cod.size) if preimage(f, Subset(f.cod, m)).mask in F.members
    )
    return SubsetFamily(f.cod, members)


def pushforward(f: FiniteMap, U: Ultrafilter) -> Ultrafilter:
    return Ultrafilter(pushforward_family(f, U.underlying), f(U.witness_point))


def ultrafilter_map(f: FiniteMap) -> FiniteMap:
    """``U(f): U(X) -> U(Y)`` as a table over the witness enumeration."""
    ufs = enumerate_ultrafilters(f.dom)
    return FiniteMap(ultrafilter_set(f.dom), ultrafilter_set(f.cod), tuple(pushforward(f, u).witness_point for u in ufs))


def ultrafilter_unit_map(X: FiniteSet) -> FiniteMap:
    return FiniteMap(X, ultrafilter_set(X), tuple(unit(X, x).witness_point for x in X))


def multiply(W: Ultrafilter, X: FiniteSet) -> Ultrafilter:
    """Flatten an ultrafilter on ``U(X)`` to one on ``X``.

    ``mu(W) = {Y : {V in U(X) : Y in V} in W}``.
    """
    ufs = enumerate_ultrafilters(X)
    if W.carrier.size != len(ufs):
        raise CarrierMismatch(f"W lives on a set of size {W.carrier.size}, but |U(X)| = {len(ufs)}")
    members = set()
    for Y in range(1 << X.size):
        hat = 0
        for i, V in enumerate(ufs):
            if Y in V.members:
                hat |= 1 << i
        if hat in W.members:
            members.add(Y)
    return Ultrafilter.from_family(SubsetFamily(X, frozenset(members)))


def multiplication_map(X: FiniteSet) -> FiniteMap:
    """``mu_X: U(U(X)) -> U(X)`` as a table."""
    UX = ultrafilter_set(X)
    return FiniteMap(
        ultrafilter_set(UX), UX, tuple(multiply(W, X).witness_point for W in enumerate_ultrafilters(UX))
    )


# ---------------------------------------------------------------------------
# Endofunctors and the canonical transformation into U


@dataclass(frozen=True)
class EndofunctorData:
    """An endofunctor of finite sets, given by rules, validated up to ``cap``."""

    name: str
    object_map: Callable[[FiniteSet], FiniteSet]
    arrow_map: Callable[[FiniteMap], FiniteMap]
    cap: int = 3
    check: bool = True

    def __post_init__(self) -> None:
        if self.check:
            problem = functoriality_defect(self)
            if problem is not None:
                raise InvalidStructure(f"{self.name} is not a functor: {problem}")

    def __call__(self, X: FiniteSet) -> FiniteSet:
        return self.object_map(X)

    def on_map(self, f: FiniteMap) -> FiniteMap:
        return self.arrow_map(f)


def functoriality_defect(S: EndofunctorData) -> str | None:
    sets = [FiniteSet(n) for n in range(S.cap + 1)]
    maps = {(a.size, b.size): list(enumerate_maps(a, b)) for a in sets for b in sets}
    for A in sets:
        SA = S.object_map(A)
        if S.arrow_map(FiniteMap.identity(A)) != FiniteMap.identity(SA):
            return f"identity on {A.size} not preserved"
    for A in sets:
        for B in sets:
            for f in maps[A.size, B.size]:
                Sf = S.arrow_map(f)
                if Sf.dom != S.object_map(A) or Sf.cod != S.object_map(B):
                    return f"S(f) has the wrong shape for f={f.table}"
                for C in sets:
                    for g in maps[B.size, C.size]:
                        if S.arrow_map(compose(g, f)) != compose(S.arrow_map(g), Sf):
                            return f"composite {g.table} o {f.table} not preserved"
    return None


def identity_functor(cap: int = 3) -> EndofunctorData:
    return EndofunctorData("identity", lambda X: X, lambda f: f, cap)


def ultrafilter_functor(cap: int = 3) -> EndofunctorData:
    return EndofunctorData("ultrafilter", ultrafilter_set, ultrafilter_map, cap)


def constant_functor(value: int = 1, cap: int = 3) -> EndofunctorData:
    K = FiniteSet(value)
    return EndofunctorData(f"constant-{value}", lambda X: K, lambda f: FiniteMap.identity(K), cap)


def doubling_functor(cap: int = 3) -> EndofunctorData:
    """``X |-> X + X``; element ``(i, x)`` is encoded as ``i * |X| + x``."""

    def on_map(f: FiniteMap) -> FiniteMap:
        n, m = f.dom.size, f.cod.size
        return FiniteMap(FiniteSet(2 * n), FiniteSet(2 * m), tuple(f.table) + tuple(m + v for v in f.table))

    return EndofunctorData("doubling", lambda X: FiniteSet(2 * X.size), on_map, cap)


def square_functor(cap: int = 3) -> EndofunctorData:
    """``X |-> X x X``; element ``(x, y)`` is encoded as ``x * |X| + y``."""

    def on_map(f: FiniteMap) -> FiniteMap:
        n, m = f.dom.size, f.cod.size
        t = f.table
        return FiniteMap(FiniteSet(n * n), FiniteSet(m * m), tuple(t[x] * m + t[y] for x in range(n) for y in range(n)))

    return EndofunctorData("square", lambda X: FiniteSet(X.size * X.size), on_map, cap)


def borger_alpha(S: EndofunctorData, X: FiniteSet, sigma: int) -> SubsetFamily:
    """``{Y ⊆ X : sigma in im S(Y -> X)}``."""
    if X.size > S.cap:
        raise CapExceeded(f"|X|={X.size} exceeds the endofunctor's validated cap {S.cap}")
    if sigma not in S(X):
        raise IndexError(f"sigma={sigma} is not an element of S(X)")
    members = set()
    for Y in X.subsets():
        if sigma in image(S.on_map(FiniteMap.inclusion(Y))):
            members.add(Y.mask)
    return SubsetFamily(X, frozenset(members))


def alpha_is_natural(S: EndofunctorData) -> bool:
    """``alpha_{X'}(S(g) sigma) = g_* alpha_X(sigma)`` for all maps up to the cap."""
    sets = [FiniteSet(n) for n in range(S.cap + 1)]
    for A in sets:
        alphas = [borger_alpha(S, A, s) for s in S(A)]
        for B in sets:
            for g in enumerate_maps(A, B):
                Sg = S.on_map(g)
                for s, a in enumerate(alphas):
                    if borger_alpha(S, B, Sg(s)) != pushforward_family(g, a):
                        return False
    return True
