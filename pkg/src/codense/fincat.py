"""Explicit finite categories, set-valued diagrams, limits and colimits.

Limits are solved as a constraint problem: one variable per object, ranging
over that object's set, and one functional constraint ``value(tgt) =
map(value(src))`` per arrow.  Domains are bit masks; the solver maintains arc
consistency and branches on the smallest open domain.  Colimits quotient the
disjoint union of the fibres with a union-find.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from codense.errors import CapExceeded, CarrierMismatch, InvalidStructure
from codense.finset import DEFAULT_CAP, FiniteMap, FiniteSet, check_cap, compose, map_tables

DEFAULT_NODE_CAP = 10**6


@dataclass(frozen=True)
class Arrow:
    src: int
    tgt: int
    label: Hashable = None


class FiniteCategory:
    """Objects ``0..n-1`` with arrows listed explicitly.

    Composition comes either from a table ``{(g, f): g∘f}`` or, for large
    generated categories, from a ``composer`` callable.  ``check_laws`` runs the
    exhaustive identity/associativity check; constructors validate tables by
    default.
    """

    def __init__(
        self,
        objects: Sequence[Hashable],
        arrows: Sequence[Arrow],
        identities: Sequence[int],
        composition: dict[tuple[int, int], int] | None = None,
        composer: Callable[[int, int], int] | None = None,
        check: bool = True,
    ) -> None:
        if (composition is None) == (composer is None):
            raise ValueError("give exactly one of a composition table or a composer")
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self.identities = tuple(identities)
        self._table = composition
        self._composer = composer
        self._out: list[list[int]] = [[] for _ in self.objects]
        self._in: list[list[int]] = [[] for _ in self.objects]
        self._homs: dict[tuple[int, int], list[int]] = {}
        for i, a in enumerate(self.arrows):
            self._out[a.src].append(i)
            self._in[a.tgt].append(i)
            self._homs.setdefault((a.src, a.tgt), []).append(i)
        if len(self.identities) != len(self.objects):
            raise InvalidStructure("need one identity per object")
        for o, i in enumerate(self.identities):
            a = self.arrows[i]
            if a.src != o or a.tgt != o:
                raise InvalidStructure(f"identity of object {o} is not an endo-arrow on it")
        if check:
            problem = self.check_laws()
            if problem is not None:
                raise InvalidStructure(problem)

    def __len__(self) -> int:
        return len(self.objects)

    def compose(self, g: int, f: int) -> int:
        """Index of ``g ∘ f``."""
        if self.arrows[f].tgt != self.arrows[g].src:
            raise CarrierMismatch(f"arrows {g} and {f} are not composable")
        if self._table is not None:
            return self._table[g, f]
        return self._composer(g, f)

    def hom(self, a: int, b: int) -> list[int]:
        return self._homs.get((a, b), [])

    def out_arrows(self, a: int) -> list[int]:
        return self._out[a]

    def in_arrows(self, b: int) -> list[int]:
        return self._in[b]

    def check_laws(self) -> str | None:
        arrows = self.arrows
        try:
            for f, a in enumerate(arrows):
                if self.compose(self.identities[a.tgt], f) != f or self.compose(f, self.identities[a.src]) != f:
                    return f"identity law fails at arrow {f}"
                for g in self._out[a.tgt]:
                    gf = self.compose(g, f)
                    ga = arrows[g]
                    if arrows[gf].src != a.src or arrows[gf].tgt != ga.tgt:
                        return f"composite of {g} and {f} has the wrong endpoints"
                    for h in self._out[ga.tgt]:
                        if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                            return f"associativity fails at ({h}, {g}, {f})"
        except KeyError as e:
            return f"composition table is missing the pair {e.args[0]}"
        return None

    def opposite(self) -> FiniteCategory:
        arrows = [Arrow(a.tgt, a.src, a.label) for a in self.arrows]
        return FiniteCategory(
            self.objects, arrows, self.identities, composer=lambda g, f: self.compose(f, g), check=False
        )

    # small constructors -------------------------------------------------

    @classmethod
    def discrete(cls, n: int) -> FiniteCategory:
        arrows = [Arrow(i, i, ("id", i)) for i in range(n)]
        return cls(range(n), arrows, range(n), {(i, i): i for i in range(n)})

    @classmethod
    def terminal(cls) -> FiniteCategory:
        return cls.discrete(1)

    @classmethod
    def from_poset(cls, objects: Sequence[Hashable], leq: Callable[[int, int], bool]) -> FiniteCategory:
        """The category with one arrow ``i -> j`` whenever ``leq(i, j)``."""
        n = len(objects)
        arrows, index = [], {}
        for i in range(n):
            for j in range(n):
                if leq(i, j):
                    index[i, j] = len(arrows)
                    arrows.append(Arrow(i, j, (i, j)))
        ids = [index[i, i] for i in range(n)]
        table = {}
        for (i, j), f in index.items():
            for k in range(n):
                if (j, k) in index:
                    if (i, k) not in index:
                        raise InvalidStructure("relation is not transitive")
                    table[index[j, k], f] = index[i, k]
        return cls(objects, arrows, ids, table)

    @classmethod
    def parallel_pair(cls) -> FiniteCategory:
        """``0 ⇉ 1``: two non-identity arrows from object 0 to object 1."""
        arrows = [Arrow(0, 0, "id0"), Arrow(1, 1, "id1"), Arrow(0, 1, "f"), Arrow(0, 1, "g")]
        table = {(0, 0): 0, (1, 1): 1, (2, 0): 2, (3, 0): 3, (1, 2): 2, (1, 3): 3}
        return cls((0, 1), arrows, (0, 1), table)


@dataclass(frozen=True)
class EndElement:
    """A compatible family: one element of each object's set."""

    assignment: tuple[int, ...]

    def __getitem__(self, obj: int) -> int:
        return self.assignment[obj]


class SetDiagram:
    def __init__(
        self,
        base: FiniteCategory,
        on_objects: Sequence[FiniteSet],
        on_arrows: Sequence[FiniteMap],
        check: bool = True,
    ) -> None:
        self.base = base
        self.on_objects = tuple(on_objects)
        self.on_arrows = tuple(on_arrows)
        if len(self.on_objects) != len(base.objects) or len(self.on_arrows) != len(base.arrows):
            raise InvalidStructure("diagram must assign a set to every object and a map to every arrow")
        for i, a in enumerate(base.arrows):
            m = self.on_arrows[i]
            if m.dom != self.on_objects[a.src] or m.cod != self.on_objects[a.tgt]:
                raise InvalidStructure(f"map assigned to arrow {i} has the wrong shape")
        if check:
            problem = self.functoriality_defect()
            if problem is not None:
                raise InvalidStructure(problem)

    def functoriality_defect(self) -> str | None:
        base = self.base
        for o, i in enumerate(base.identities):
            if self.on_arrows[i] != FiniteMap.identity(self.on_objects[o]):
                return f"identity of object {o} not sent to an identity"
        for f, a in enumerate(base.arrows):
            for g in base.out_arrows(a.tgt):
                if self.on_arrows[base.compose(g, f)] != compose(self.on_arrows[g], self.on_arrows[f]):
                    return f"composite of {g} and {f} not preserved"
        return None

    def is_compatible(self, assignment: Sequence[int]) -> bool:
        for i, a in enumerate(self.base.arrows):
            if self.on_arrows[i](assignment[a.src]) != assignment[a.tgt]:
                return False
        return True

    def reindexed(self, perm: Sequence[int]) -> SetDiagram:
        """The same diagram with object ``i`` renamed ``perm[i]``."""
        n = len(perm)
        inv = [0] * n
        for i, p in enumerate(perm):
            inv[p] = i
        base = self.base
        arrows = [Arrow(perm[a.src], perm[a.tgt], a.label) for a in base.arrows]
        cat = FiniteCategory(
            [base.objects[inv[j]] for j in range(n)],
            arrows,
            [base.identities[inv[j]] for j in range(n)],
            composer=base.compose,
            check=False,
        )
        return SetDiagram(cat, [self.on_objects[inv[j]] for j in range(n)], self.on_arrows, check=False)


# ---------------------------------------------------------------------------
# categories of elements


def category_of_elements(
    B_sets: Sequence[FiniteSet],
    X: FiniteSet,
    all_maps: bool = True,
    homs: Callable[[int, int], Iterable[tuple[int, ...]]] | None = None,
    cap: int | None = DEFAULT_CAP,
) -> tuple[FiniteCategory, SetDiagram]:
    """Elements of ``[X, -]`` restricted to the sets ``B_sets``.

    Objects are pairs ``(i, f)`` with ``f: X -> B_sets[i]`` (``f`` as a table);
    arrows ``(i, f) -> (j, g)`` are maps ``theta: B_i -> B_j`` with ``theta∘f = g``.
    With ``all_maps`` every ``theta`` is allowed; otherwise ``homs(i, j)`` lists
    the allowed tables, defaulting to identities only.  The diagram sends
    ``(i, f)`` to ``B_i`` and ``theta`` to itself.
    """
    check_cap(sum(B.size**X.size for B in B_sets), cap, "category of elements objects")
    sizes = [B.size for B in B_sets]
    objects: list[tuple[int, tuple[int, ...]]] = []
    obj_index: dict[tuple[int, tuple[int, ...]], int] = {}
    for i, b in enumerate(sizes):
        for t in map_tables(X.size, b):
            obj_index[i, t] = len(objects)
            objects.append((i, t))

    def allowed(i: int, j: int) -> list[tuple[int, ...]]:
        if all_maps:
            return map_tables(sizes[i], sizes[j])
        if homs is not None:
            return list(homs(i, j))
        return [tuple(range(sizes[i]))] if i == j else []

    hom_tables = {(i, j): allowed(i, j) for i in range(len(sizes)) for j in range(len(sizes))}
    for i in range(len(sizes)):
        if tuple(range(sizes[i])) not in hom_tables[i, i]:
            raise InvalidStructure(f"allowed homs omit the identity on B_{i}")

    arrows: list[Arrow] = []
    maps: list[FiniteMap] = []
    arrow_index: dict[tuple[int, int, tuple[int, ...]], int] = {}
    identities = [0] * len(objects)
    for o, (i, f) in enumerate(objects):
        for j in range(len(sizes)):
            for theta in hom_tables[i, j]:
                g = tuple(theta[v] for v in f)
                key = (o, j, theta)
                arrow_index[key] = len(arrows)
                arrows.append(Arrow(o, obj_index[j, g], (i, j, theta)))
                maps.append(FiniteMap(B_sets[i], B_sets[j], theta))
        identities[o] = arrow_index[o, i, tuple(range(sizes[i]))]

    def composer(g: int, f: int) -> int:
        _, j, tf = arrows[f].label
        _, k, tg = arrows[g].label
        return arrow_index[arrows[f].src, k, tuple(tg[v] for v in tf)]

    cat = FiniteCategory(objects, arrows, identities, composer=composer, check=False)
    diagram = SetDiagram(cat, [B_sets[i] for i, _ in objects], maps, check=False)
    return cat, diagram


# ---------------------------------------------------------------------------
# limits


class _Solver:
    def __init__(self, diagram: SetDiagram, node_cap: int | None) -> None:
        base = diagram.base
        self.n = len(base.objects)
        self.node_cap = node_cap
        self.nodes = 0
        self.domains0 = [(1 << s.size) - 1 for s in diagram.on_objects]
        table_ids: dict[tuple[int, ...], int] = {}
        self.tables: list[tuple[int, ...]] = []
        seen = set()
        cons = []
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, a in enumerate(base.arrows):
            tab = diagram.on_arrows[i].table
            if a.src == a.tgt and tab == tuple(range(len(tab))):
                continue
            tid = table_ids.get(tab)
            if tid is None:
                tid = table_ids[tab] = len(self.tables)
                self.tables.append(tab)
            key = (a.src, a.tgt, tid)
            if key in seen:
                continue
            seen.add(key)
            adj[a.src].append(len(cons))
            adj[a.tgt].append(len(cons))
            cons.append(key)
        self.cons = cons
        self.adj = adj
        self.memo: dict[tuple[int, int, int], tuple[int, int]] = {}

    def revise(self, tid: int, ds: int, dt: int) -> tuple[int, int]:
        key = (tid, ds, dt)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        tab = self.tables[tid]
        img = 0
        x, i = ds, 0
        while x:
            if x & 1:
                img |= 1 << tab[i]
            x >>= 1
            i += 1
        nt = dt & img
        ns = 0
        x, i = ds, 0
        while x:
            if x & 1 and (nt >> tab[i]) & 1:
                ns |= 1 << i
            x >>= 1
            i += 1
        self.memo[key] = (ns, nt)
        return ns, nt

    def propagate(self, dom: list[int], queue: list[int]) -> bool:
        cons, adj, revise = self.cons, self.adj, self.revise
        queued = set(queue)
        while queue:
            v = queue.pop()
            queued.discard(v)
            for ci in adj[v]:
                s, t, tid = cons[ci]
                ds, dt = dom[s], dom[t]
                ns, nt = revise(tid, ds, dt)
                if nt != dt:
                    if not nt:
                        return False
                    dom[t] = nt
                    if t not in queued:
                        queued.add(t)
                        queue.append(t)
                if ns != ds:
                    if not ns:
                        return False
                    dom[s] = ns
                    if s not in queued:
                        queued.add(s)
                        queue.append(s)
        return True

    def solve(self) -> list[tuple[int, ...]]:
        dom = list(self.domains0)
        if any(d == 0 for d in dom):
            return []
        if not self.propagate(dom, list(range(self.n))):
            return []
        out: list[tuple[int, ...]] = []
        self._search(dom, out)
        out.sort()
        return out

    def _search(self, dom: list[int], out: list[tuple[int, ...]]) -> None:
        self.nodes += 1
        if self.node_cap is not None and self.nodes > self.node_cap:
            raise CapExceeded(f"limit search exceeded {self.node_cap} nodes")
        best, best_count = -1, 0
        for v, d in enumerate(dom):
            if d & (d - 1):
                c = bin(d).count("1")
                if best < 0 or c < best_count:
                    best, best_count = v, c
                    if c == 2:
                        break
        if best < 0:
            out.append(tuple(d.bit_length() - 1 for d in dom))
            return
        d, value = dom[best], 0
        while d:
            if d & 1:
                trial = list(dom)
                trial[best] = 1 << value
                if self.propagate(trial, [best]):
                    self._search(trial, out)
            d >>= 1
            value += 1


def limit(diagram: SetDiagram, node_cap: int | None = DEFAULT_NODE_CAP) -> list[EndElement]:
    """All compatible families, sorted lexicographically by assignment."""
    return [EndElement(a) for a in _Solver(diagram, node_cap).solve()]


# ---------------------------------------------------------------------------
# colimits


class UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass(frozen=True)
class Colimit:
    carrier: FiniteSet
    coprojections: tuple[FiniteMap, ...]

    def class_of(self, obj: int, element: int) -> int:
        return self.coprojections[obj](element)


def colimit(diagram: SetDiagram, cap: int | None = DEFAULT_CAP) -> Colimit:
    """Disjoint union of the fibres modulo ``s ~ map(s)`` for every arrow.

    Classes are numbered in order of their first element in the disjoint
    union (objects in order, elements in order within each).
    """
    sizes = [s.size for s in diagram.on_objects]
    offsets = list(itertools.accumulate([0] + sizes))
    total = offsets[-1]
    check_cap(total, cap, "colimit disjoint union")
    uf = UnionFind(total)
    for i, a in enumerate(diagram.base.arrows):
        so, to = offsets[a.src], offsets[a.tgt]
        for x, y in enumerate(diagram.on_arrows[i].table):
            uf.union(so + x, to + y)
    class_id: dict[int, int] = {}
    labels = []
    for e in range(total):
        r = uf.find(e)
        if r not in class_id:
            class_id[r] = len(class_id)
        labels.append(class_id[r])
    Q = FiniteSet(len(class_id))
    coprojections = tuple(
        FiniteMap(diagram.on_objects[o], Q, tuple(labels[offsets[o] : offsets[o + 1]])) for o in range(len(sizes))
    )
    return Colimit(Q, coprojections)


# ---------------------------------------------------------------------------


def is_cofiltered(C: FiniteCategory) -> bool:
    n = len(C.objects)
    if n == 0:
        return False
    # objects reaching each target
    sources = [{C.arrows[f].src for f in C.in_arrows(b)} for b in range(n)]
    for a in range(n):
        for b in range(a, n):
            if not sources[a] & sources[b]:
                return False
    for a in range(n):
        for b in range(n):
            hs = C.hom(a, b)
            for i, f in enumerate(hs):
                for g in hs[i + 1 :]:
                    if not any(C.compose(f, h) == C.compose(g, h) for h in C.in_arrows(a)):
                        return False
    return True


def dump_diagram(diagram: SetDiagram) -> dict:
    """JSON-ready description: objects with fibre sizes, arrows with tables."""
    base = diagram.base
    return {
        "objects": [
            {"id": i, "label": _jsonable(o), "size": diagram.on_objects[i].size} for i, o in enumerate(base.objects)
        ],
        "arrows": [
            {
                "id": i,
                "src": a.src,
                "tgt": a.tgt,
                "label": _jsonable(a.label),
                "table": list(diagram.on_arrows[i].table),
            }
            for i, a in enumerate(base.arrows)
        ],
    }


def dumps_diagram(diagram: SetDiagram) -> str:
    return json.dumps(dump_diagram(diagram), sort_keys=True)


def _jsonable(x: object) -> object:
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, (int, str, float, bool)):
        return x
    return str(x)
