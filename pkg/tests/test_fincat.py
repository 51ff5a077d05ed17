from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, strategies as st

from codense.errors import CapExceeded, InvalidStructure
from codense.fincat import (
    Arrow,
    FiniteCategory,
    SetDiagram,
    category_of_elements,
    colimit,
    dump_diagram,
    dumps_diagram,
    is_cofiltered,
    limit,
)
from codense.finset import FiniteMap, FiniteSet


def scan_limit(D: SetDiagram) -> list[tuple[int, ...]]:
    return [a for a in itertools.product(*(range(s.size) for s in D.on_objects)) if D.is_compatible(a)]


def closure_classes(D: SetDiagram) -> int:
    """Connected components of the element graph, by repeated merging."""
    nodes = [(o, e) for o, s in enumerate(D.on_objects) for e in range(s.size)]
    comp = {v: {v} for v in nodes}
    for i, a in enumerate(D.base.arrows):
        for e in range(D.on_objects[a.src].size):
            u, v = (a.src, e), (a.tgt, D.on_arrows[i](e))
            if comp[u] is not comp[v]:
                merged = comp[u] | comp[v]
                for w in merged:
                    comp[w] = merged
    return len({id(c) for c in comp.values()})


def parallel_diagram(n: int, m: int, f: tuple[int, ...], g: tuple[int, ...]) -> SetDiagram:
    C = FiniteCategory.parallel_pair()
    A, B = FiniteSet(n), FiniteSet(m)
    maps = [FiniteMap.identity(A), FiniteMap.identity(B), FiniteMap(A, B, f), FiniteMap(A, B, g)]
    return SetDiagram(C, [A, B], maps)


def test_small_categories_satisfy_laws():
    for C in (FiniteCategory.discrete(3), FiniteCategory.terminal(), FiniteCategory.parallel_pair()):
        assert C.check_laws() is None
    P = FiniteCategory.from_poset(range(3), lambda i, j: i <= j)
    assert len(P.arrows) == 6 and P.check_laws() is None
    assert P.opposite().hom(2, 0) != []


def test_non_transitive_relation_rejected():
    with pytest.raises(InvalidStructure):
        FiniteCategory.from_poset(range(3), lambda i, j: i == j or j == i + 1)


def test_missing_identity_rejected():
    with pytest.raises(InvalidStructure):
        FiniteCategory((0, 1), [Arrow(0, 0)], [0], {(0, 0): 0})
    with pytest.raises(InvalidStructure):
        FiniteCategory((0, 1), [Arrow(0, 0), Arrow(0, 1)], [0, 1], {(0, 0): 0, (1, 0): 1})


def test_non_functorial_diagram_rejected():
    C = FiniteCategory.discrete(1)
    with pytest.raises(InvalidStructure):
        SetDiagram(C, [FiniteSet(2)], [FiniteMap(FiniteSet(2), FiniteSet(2), (1, 0))])


@given(st.integers(0, 3), st.integers(1, 3), st.data())
def test_parallel_pair_limit_is_equaliser(n, m, data):
    f = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))
    g = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))
    D = parallel_diagram(n, m, f, g)
    got = [e.assignment for e in limit(D)]
    assert got == [(a, f[a]) for a in range(n) if f[a] == g[a]]


@given(st.integers(0, 3), st.integers(1, 3), st.data())
def test_parallel_pair_colimit_matches_merging(n, m, data):
    f = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))
    g = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))
    D = parallel_diagram(n, m, f, g)
    Q = colimit(D)
    assert Q.carrier.size == closure_classes(D)
    for i, a in enumerate(D.base.arrows):
        for e in range(D.on_objects[a.src].size):
            assert Q.class_of(a.src, e) == Q.class_of(a.tgt, D.on_arrows[i](e))


def test_discrete_colimit_is_disjoint_union():
    C = FiniteCategory.discrete(3)
    sets = [FiniteSet(2), FiniteSet(0), FiniteSet(3)]
    D = SetDiagram(C, sets, [FiniteMap.identity(s) for s in sets])
    assert colimit(D).carrier.size == 5
    assert len(limit(D)) == 0


@pytest.mark.parametrize("sizes", [[1], [2], [1, 2], [3], [0, 2], [2, 3]])
@pytest.mark.parametrize("n", range(3))
def test_solver_matches_product_scan(sizes, n):
    _, D = category_of_elements([FiniteSet(b) for b in sizes], FiniteSet(n))
    assert [e.assignment for e in limit(D)] == scan_limit(D)


@pytest.mark.parametrize("sizes", [[2], [1, 2]])
@pytest.mark.parametrize("n", range(3))
def test_solver_matches_scan_on_non_full_subcategories(sizes, n):
    _, D = category_of_elements([FiniteSet(b) for b in sizes], FiniteSet(n), all_maps=False)
    assert [e.assignment for e in limit(D)] == scan_limit(D)


def test_category_of_elements_shape():
    C, D = category_of_elements([FiniteSet(2)], FiniteSet(1))
    assert len(C.objects) == 2
    assert len(C.arrows) == 2 * 4
    assert C.check_laws() is None
    assert D.functoriality_defect() is None


def test_custom_homs_must_include_identities():
    with pytest.raises(InvalidStructure):
        category_of_elements([FiniteSet(2)], FiniteSet(1), all_maps=False, homs=lambda i, j: [(0, 0)])


def test_node_cap():
    _, D = category_of_elements([FiniteSet(2)], FiniteSet(3), all_maps=False)
    with pytest.raises(CapExceeded):
        limit(D, node_cap=3)


def test_reindexing_preserves_limit_count():
    _, D = category_of_elements([FiniteSet(1), FiniteSet(2)], FiniteSet(2))
    perm = list(reversed(range(len(D.on_objects))))
    assert len(limit(D.reindexed(perm))) == len(limit(D))


def test_cofiltered():
    with_bottom = FiniteCategory.from_poset(range(3), lambda i, j: i == 0 or i == j)
    assert is_cofiltered(with_bottom)
    assert not is_cofiltered(FiniteCategory.discrete(2))
    assert not is_cofiltered(FiniteCategory.parallel_pair())


def test_diagram_dump():
    _, D = category_of_elements([FiniteSet(2)], FiniteSet(1))
    data = json.loads(dumps_diagram(D))
    assert data == json.loads(json.dumps(dump_diagram(D)))
    assert [o["size"] for o in data["objects"]] == [2, 2]
    assert len(data["arrows"]) == 8
    assert all(set(a) == {"id", "src", "tgt", "label", "table"} for a in data["arrows"])
