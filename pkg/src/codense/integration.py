"""Integration of functions against ultrafilters.

On a finite carrier every function is simple, so ``Simp(X, R)`` is just the
set of all maps ``X -> R``.  The integral of ``f`` against ``U`` is the unique
value whose fibre under ``f`` is ``U``-large.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from codense.errors import CarrierMismatch, InvalidStructure
from codense.finset import FiniteMap, FiniteSet, Subset, compose, enumerate_maps, map_tables, preimage
from codense.ultrafilter import SubsetFamily, Ultrafilter, pushforward


def integrate(U: Ultrafilter, f: FiniteMap) -> int:
    if U.carrier != f.dom:
        raise CarrierMismatch("integrand is not defined on the ultrafilter's carrier")
    found = [b for b in range(f.cod.size) if preimage(f, Subset(f.cod, 1 << b)).mask in U.members]
    if len(found) != 1:
        raise InvalidStructure(f"{len(found)} values have a large fibre; the ultrafilter is corrupt")
    return found[0]


def equalizer(f: FiniteMap, g: FiniteMap) -> Subset:
    if f.dom != g.dom or f.cod != g.cod:
        raise CarrierMismatch("maps must share domain and codomain")
    mask = 0
    for x, (a, b) in enumerate(zip(f.table, g.table)):
        if a == b:
            mask |= 1 << x
    return Subset(f.dom, mask)


def check_almost_everywhere(U: Ultrafilter, f: FiniteMap, g: FiniteMap) -> bool:
    """Whether ``f = g`` on a large set; if so their integrals must agree."""
    if U.carrier != f.dom:
        raise CarrierMismatch("maps are not defined on the ultrafilter's carrier")
    agree = equalizer(f, g).mask in U.members
    if agree and integrate(U, f) != integrate(U, g):
        raise AssertionError("maps equal almost everywhere but with different integrals")
    return agree


def naturality_in_codomain(U: Ultrafilter, theta: FiniteMap, f: FiniteMap) -> bool:
    """``theta(∫ f dU) == ∫ theta∘f dU``."""
    if theta.dom != f.cod:
        raise CarrierMismatch("theta must start where f ends")
    return theta(integrate(U, f)) == integrate(U, compose(theta, f))


def change_of_variables(p: FiniteMap, U: Ultrafilter, g: FiniteMap) -> bool:
    """``∫_X g∘p dU == ∫_Y g d(p_* U)``."""
    if g.dom != p.cod:
        raise CarrierMismatch("g must be defined on the codomain of p")
    return integrate(U, compose(g, p)) == integrate(pushforward(p, U), g)


@dataclass
class IntegrationOperator:
    """An element of ``T(X)`` viewed extensionally: for each target size ``b``
    a table sending every map ``X -> b`` (keyed by its table) to a value."""

    carrier: FiniteSet
    components: dict[int, dict[tuple[int, ...], int]] = field(default_factory=dict)

    def __call__(self, f: FiniteMap) -> int:
        if f.dom != self.carrier:
            raise CarrierMismatch("integrand is not defined on the operator's carrier")
        return self.components[f.cod.size][f.table]

    @classmethod
    def from_ultrafilter(cls, U: Ultrafilter, target_sizes: range | list[int] = range(4)) -> IntegrationOperator:
        X = U.carrier
        comps = {}
        for b in target_sizes:
            B = FiniteSet(b)
            comps[b] = {f.table: integrate(U, f) for f in enumerate_maps(X, B)}
        return cls(X, comps)

    @classmethod
    def evaluation(cls, X: FiniteSet, x: int, target_sizes: range | list[int] = range(4)) -> IntegrationOperator:
        comps = {b: {t: t[x] for t in map_tables(X.size, b)} for b in target_sizes}
        return cls(X, comps)

    @classmethod
    def from_components(cls, X: FiniteSet, comps: Mapping[int, Mapping[tuple[int, ...], int]]) -> IntegrationOperator:
        return cls(X, {b: dict(c) for b, c in comps.items()})

    def is_natural(self) -> bool:
        """The naturality square commutes for every ``theta`` between stored sizes."""
        sizes = sorted(self.components)
        for b in sizes:
            for c in sizes:
                for theta in map_tables(b, c):
                    comp_b, comp_c = self.components[b], self.components[c]
                    for t, v in comp_b.items():
                        if theta[v] != comp_c[tuple(theta[y] for y in t)]:
                            return False
        return True


def characteristic(Y: Subset, omega: FiniteSet) -> FiniteMap:
    """``chi_Y: X -> Omega`` with ``1`` on ``Y`` and ``0`` elsewhere."""
    if omega.size < 2:
        raise ValueError("Omega needs two distinct points 0 and 1")
    return FiniteMap(Y.carrier, omega, tuple(1 if x in Y else 0 for x in range(Y.carrier.size)))


def recover_ultrafilter(I: IntegrationOperator, omega: FiniteSet = FiniteSet(2)) -> SubsetFamily:
    """``{Y : I(chi_Y) = 1}``."""
    if omega.size < 2:
        raise ValueError("Omega needs at least two elements")
    if omega.size not in I.components:
        raise KeyError(f"operator has no component at a set of size {omega.size}")
    X = I.carrier
    return SubsetFamily(X, frozenset(Y.mask for Y in X.subsets() if I(characteristic(Y, omega)) == 1))


def unique_integration_candidates(U: Ultrafilter, R: FiniteSet) -> list[tuple[int, ...]]:
    """All maps ``[X, R] -> R`` satisfying the constant and almost-everywhere
    conditions, by brute force over the ``|R| ** |R| ** |X|`` candidates.

    Each candidate is returned as its value table over ``map_tables(|X|, |R|)``.
    """
    X = U.carrier
    fs = map_tables(X.size, R.size)
    if R.size ** len(fs) > 10**6:
        raise ValueError("candidate space too large for brute force")
    pos = {t: i for i, t in enumerate(fs)}
    consts = [(pos[(r,) * X.size], r) for r in range(R.size)]
    # pairs of integrands that agree on a large set
    linked = []
    for i, f in enumerate(fs):
        for j in range(i + 1, len(fs)):
            g = fs[j]
            eq = 0
            for x in range(X.size):
                if f[x] == g[x]:
                    eq |= 1 << x
            if eq in U.members:
                linked.append((i, j))
    survivors = []
    for cand in itertools.product(range(R.size), repeat=len(fs)):
        if all(cand[i] == r for i, r in consts) and all(cand[i] == cand[j] for i, j in linked):
            survivors.append(cand)
    return survivors
