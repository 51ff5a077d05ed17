"""Finite sets, total functions, subsets and ordered partitions.

Elements of a finite set of size ``n`` are the indices ``0..n-1``; labels are
cosmetic.  Subsets are bit masks (bit ``i`` set iff ``i`` is a member), which
keeps every exhaustive scan in this package a loop over small integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from codense.errors import CapExceeded, CarrierMismatch, InvalidStructure

DEFAULT_CAP = 10**7


def check_cap(count: int, cap: int | None, what: str) -> None:
    if cap is not None and count > cap:
        raise CapExceeded(f"{what}: {count} items exceeds cap {cap}")


@dataclass(frozen=True)
class FiniteSet:
    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.size < 0:
            raise InvalidStructure(f"negative set size {self.size}")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise InvalidStructure("labels must have one entry per element")
            if len(set(self.labels)) != self.size:
                raise InvalidStructure("labels must be distinct")

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.size))

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and 0 <= x < self.size

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels is not None else str(x)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def subsets(self) -> Iterator[Subset]:
        for mask in range(1 << self.size):
            yield Subset(self, mask)


@dataclass(frozen=True)
class FiniteMap:
    """A total function ``dom -> cod`` stored as its image table."""

    dom: FiniteSet
    cod: FiniteSet
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.table, tuple):
            object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.dom.size:
            raise InvalidStructure(
                f"table length {len(self.table)} != domain size {self.dom.size}"
            )
        for v in self.table:
            if not 0 <= v < self.cod.size:
                raise InvalidStructure(f"table entry {v} outside codomain of size {self.cod.size}")

    def __call__(self, x: int) -> int:
        return self.table[x]

    @classmethod
    def identity(cls, X: FiniteSet) -> FiniteMap:
        return cls(X, X, tuple(range(X.size)))

    @classmethod
    def constant(cls, X: FiniteSet, B: FiniteSet, value: int) -> FiniteMap:
        return cls(X, B, (value,) * X.size)

    @classmethod
    def inclusion(cls, Y: Subset) -> FiniteMap:
        """The inclusion of ``Y`` (re-indexed as ``0..|Y|-1`` in increasing order)."""
        elems = Y.elements()
        return cls(FiniteSet(len(elems)), Y.carrier, elems)

    def then(self, g: FiniteMap) -> FiniteMap:
        """Diagrammatic composite ``g ∘ self``."""
        return compose(g, self)

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.cod.size


def compose(g: FiniteMap, f: FiniteMap) -> FiniteMap:
    """``g ∘ f``."""
    if f.cod != g.dom:
        raise CarrierMismatch("cannot compose: codomain of f is not the domain of g")
    gt = g.table
    return FiniteMap(f.dom, g.cod, tuple(gt[v] for v in f.table))


@dataclass(frozen=True)
class Subset:
    carrier: FiniteSet
    mask: int

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask >> self.carrier.size:
            raise InvalidStructure(f"mask {self.mask:#b} longer than carrier size {self.carrier.size}")

    @classmethod
    def of(cls, carrier: FiniteSet, elements: Sequence[int]) -> Subset:
        mask = 0
        for x in elements:
            if x not in carrier:
                raise InvalidStructure(f"element {x} not in carrier")
            mask |= 1 << x
        return cls(carrier, mask)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and bool((self.mask >> x) & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def elements(self) -> tuple[int, ...]:
        return tuple(x for x in range(self.carrier.size) if (self.mask >> x) & 1)

    def complement(self) -> Subset:
        return Subset(self.carrier, self.carrier.full_mask & ~self.mask)


@dataclass(frozen=True)
class Partition:
    """An ordered partition into possibly-empty blocks."""

    carrier: FiniteSet
    blocks: tuple[Subset, ...]

    def __post_init__(self) -> None:
        seen = 0
        for b in self.blocks:
            if b.carrier != self.carrier:
                raise CarrierMismatch("partition block on a different carrier")
            if seen & b.mask:
                raise InvalidStructure("partition blocks overlap")
            seen |= b.mask
        if seen != self.carrier.full_mask:
            raise InvalidStructure("partition blocks do not cover the carrier")


def preimage(f: FiniteMap, Y: Subset) -> Subset:
    if Y.carrier != f.cod:
        raise CarrierMismatch("subset is not on the codomain of the map")
    m = Y.mask
    out = 0
    for x, v in enumerate(f.table):
        if (m >> v) & 1:
            out |= 1 << x
    return Subset(f.dom, out)


def image(f: FiniteMap) -> Subset:
    out = 0
    for v in f.table:
        out |= 1 << v
    return Subset(f.cod, out)


def map_count(X: FiniteSet, B: FiniteSet) -> int:
    return B.size**X.size


def enumerate_maps(X: FiniteSet, B: FiniteSet, cap: int | None = DEFAULT_CAP) -> Iterator[FiniteMap]:
    """Every total function ``X -> B``, in lexicographic order of tables."""
    check_cap(map_count(X, B), cap, f"maps {X.size} -> {B.size}")
    for table in itertools.product(range(B.size), repeat=X.size):
        yield FiniteMap(X, B, table)


def map_tables(n: int, m: int) -> list[tuple[int, ...]]:
    """Raw tables of all maps from an ``n``-set to an ``m``-set, lexicographic."""
    return list(itertools.product(range(m), repeat=n))


def enumerate_partitions(X: FiniteSet, n: int, cap: int | None = DEFAULT_CAP) -> Iterator[Partition]:
    """Every ordered partition of ``X`` into ``n`` possibly-empty blocks."""
    if n < 0:
        raise ValueError("number of blocks must be non-negative")
    for masks in partition_masks(X.size, n, cap):
        yield Partition(X, tuple(Subset(X, m) for m in masks))


def partition_masks(size: int, n: int, cap: int | None = DEFAULT_CAP) -> list[tuple[int, ...]]:
    """Ordered ``n``-block partitions of ``{0..size-1}`` as tuples of block masks.

    A partition is a block assignment ``element -> block``, so there are
    ``n**size`` of them; with ``size == n == 0`` the empty partition is the
    single one.
    """
    if n < 0:
        raise ValueError("number of blocks must be non-negative")
    check_cap(n**size, cap, f"partitions of {size} into {n}")
    out = []
    for assignment in itertools.product(range(n), repeat=size):
        blocks = [0] * n
        for x, b in enumerate(assignment):
            blocks[b] |= 1 << x
        out.append(tuple(blocks))
    return out


def mask_elements(mask: int) -> tuple[int, ...]:
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")
