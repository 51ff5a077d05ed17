from __future__ import annotations

from hypothesis import strategies as st

from codense.finset import FiniteMap, FiniteSet


@st.composite
def finite_maps(draw, max_dom: int = 4, max_cod: int = 4, dom: int | None = None, cod: int | None = None):
    n = draw(st.integers(0, max_dom)) if dom is None else dom
    m = draw(st.integers(1 if n else 0, max_cod)) if cod is None else cod
    table = draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)) if m else []
    return FiniteMap(FiniteSet(n), FiniteSet(m), tuple(table))


@st.composite
def composable_pair(draw, max_size: int = 4):
    f = draw(finite_maps(max_size, max_size))
    g = draw(finite_maps(max_size, max_size, dom=f.cod.size))
    return f, g


@st.composite
def nonempty_maps(draw, max_dom: int = 4, max_cod: int = 4):
    n = draw(st.integers(1, max_dom))
    return draw(finite_maps(max_dom, max_cod, dom=n))
