"""Finite-dimensional linear algebra over prime fields and the double dual.

Vectors of ``k^n`` are tuples; ``vectors(n)`` lists them in lexicographic
order and ``vector_index`` is the matching base-``p`` position.  Dual spaces
are enumerated as row vectors in the same order, so a functional on ``X*`` is
a table indexed by ``vector_index``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from codense.errors import CapExceeded, CarrierMismatch, InvalidStructure
from codense.fincat import DEFAULT_NODE_CAP, Arrow, EndElement, FiniteCategory, SetDiagram, limit
from codense.finset import DEFAULT_CAP, FiniteMap, FiniteSet, check_cap

Vector = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise InvalidStructure(f"{self.p} is not prime")

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.p - 2, self.p)


@dataclass(frozen=True)
class VectorSpace:
    field: PrimeField
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError("dimension must be non-negative")

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def size(self) -> int:
        return self.p**self.dim

    @property
    def as_set(self) -> FiniteSet:
        return FiniteSet(self.size)

    def vectors(self) -> list[Vector]:
        return list(itertools.product(range(self.p), repeat=self.dim))

    def index(self, v: Sequence[int]) -> int:
        if len(v) != self.dim:
            raise CarrierMismatch("vector has the wrong length")
        i = 0
        for c in v:
            i = i * self.p + c % self.p
        return i

    def vector(self, i: int) -> Vector:
        out = []
        for _ in range(self.dim):
            i, r = divmod(i, self.p)
            out.append(r)
        return tuple(reversed(out))

    def zero(self) -> Vector:
        return (0,) * self.dim

    def add(self, u: Vector, v: Vector) -> Vector:
        return tuple((a + b) % self.p for a, b in zip(u, v))

    def scale(self, c: int, v: Vector) -> Vector:
        return tuple((c * a) % self.p for a in v)

    def basis(self) -> list[Vector]:
        return [tuple(1 if j == i else 0 for j in range(self.dim)) for i in range(self.dim)]


def dual_space(V: VectorSpace) -> VectorSpace:
    """``V*``, whose vectors are read as row vectors acting by dot product."""
    return VectorSpace(V.field, V.dim)


def dot(p: int, u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v)) % p


@dataclass(frozen=True)
class LinearMap:
    dom: VectorSpace
    cod: VectorSpace
    matrix: Matrix

    def __post_init__(self) -> None:
        if self.dom.field != self.cod.field:
            raise CarrierMismatch("maps must stay over one field")
        p = self.dom.p
        m = tuple(tuple(int(a) % p for a in row) for row in self.matrix)
        if len(m) != self.cod.dim or any(len(r) != self.dom.dim for r in m):
            raise CarrierMismatch(f"matrix must be {self.cod.dim}x{self.dom.dim}")
        object.__setattr__(self, "matrix", m)

    def __call__(self, v: Sequence[int]) -> Vector:
        if len(v) != self.dom.dim:
            raise CarrierMismatch("vector not in the domain")
        return tuple(dot(self.dom.p, row, v) for row in self.matrix)

    def rows(self) -> list[Vector]:
        return list(self.matrix)

    @classmethod
    def identity(cls, V: VectorSpace) -> LinearMap:
        return cls(V, V, tuple(tuple(1 if i == j else 0 for j in range(V.dim)) for i in range(V.dim)))

    @classmethod
    def zero(cls, V: VectorSpace, W: VectorSpace) -> LinearMap:
        return cls(V, W, tuple((0,) * V.dim for _ in range(W.dim)))

    @classmethod
    def from_function(cls, V: VectorSpace, W: VectorSpace, fn) -> LinearMap:
        """Matrix from the images of the basis; linearity is the caller's claim."""
        cols = [fn(e) for e in V.basis()]
        return cls(V, W, tuple(tuple(cols[j][i] for j in range(V.dim)) for i in range(W.dim)))

    def table(self) -> tuple[int, ...]:
        """The underlying function as a table of vector indices."""
        return tuple(self.cod.index(self(v)) for v in self.dom.vectors())

    def as_finite_map(self) -> FiniteMap:
        return FiniteMap(self.dom.as_set, self.cod.as_set, self.table())


def compose_linear(g: LinearMap, f: LinearMap) -> LinearMap:
    """``g ∘ f``."""
    if f.cod != g.dom:
        raise CarrierMismatch("maps are not composable")
    p = f.dom.p
    rows = tuple(
        tuple(sum(g.matrix[i][k] * f.matrix[k][j] for k in range(f.cod.dim)) % p for j in range(f.dom.dim))
        for i in range(g.cod.dim)
    )
    return LinearMap(f.dom, g.cod, rows)


def dual_map(f: LinearMap) -> LinearMap:
    """``f*: B* -> X*``, the transpose."""
    return LinearMap(
        dual_space(f.cod),
        dual_space(f.dom),
        tuple(tuple(f.matrix[i][j] for i in range(f.cod.dim)) for j in range(f.dom.dim)),
    )


def rank(f: LinearMap) -> int:
    """Rank by Gaussian elimination mod ``p``."""
    p = f.dom.p
    m = [list(r) for r in f.matrix]
    r = 0
    for c in range(f.dom.dim):
        piv = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [(a * inv) % p for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                k = m[i][c]
                m[i] = [(a - k * b) % p for a, b in zip(m[i], m[r])]
        r += 1
    return r


def all_linear_maps(V: VectorSpace, W: VectorSpace, cap: int | None = DEFAULT_CAP) -> list[LinearMap]:
    n = V.dim * W.dim
    check_cap(V.p**n, cap, "linear maps")
    out = []
    for flat in itertools.product(range(V.p), repeat=n):
        rows = tuple(tuple(flat[i * V.dim : (i + 1) * V.dim]) for i in range(W.dim))
        out.append(LinearMap(V, W, rows))
    return out


# ---------------------------------------------------------------------------
# the double dual


@dataclass(frozen=True)
class DoubleDualElement:
    """A linear functional on ``X*``, given by its value on every row vector."""

    space: VectorSpace
    functional_table: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.functional_table) != self.space.size:
            raise InvalidStructure("need one value per element of X*")
        if not is_linear_functional(self.space, self.functional_table):
            raise InvalidStructure("table is not linear on X*")

    def __call__(self, xi: Sequence[int]) -> int:
        return self.functional_table[self.space.index(xi)]

    def coordinates(self) -> Vector:
        """Values on the dual basis; these determine the element."""
        return tuple(self(e) for e in self.space.basis())

    @classmethod
    def evaluation(cls, X: VectorSpace, x: Sequence[int]) -> DoubleDualElement:
        return cls(X, tuple(dot(X.p, xi, x) for xi in X.vectors()))


def is_linear_functional(X: VectorSpace, table: Sequence[int]) -> bool:
    p = X.p
    vs = X.vectors()
    if any(not 0 <= t < p for t in table):
        return False
    if table[X.index(X.zero())] != 0:
        return False
    for u in vs:
        tu = table[X.index(u)]
        for v in vs:
            if table[X.index(X.add(u, v))] != (tu + table[X.index(v)]) % p:
                return False
        for c in range(p):
            if table[X.index(X.scale(c, u))] != (c * tu) % p:
                return False
    return True


def enumerate_double_dual(X: VectorSpace, cap: int | None = DEFAULT_CAP) -> list[DoubleDualElement]:
    """All of ``X**`` by filtering every table on ``X*`` for linearity.

    The result is ordered by coordinate vector, so element ``i`` has
    coordinates ``X.vector(i)``.
    """
    check_cap(X.p**X.size, cap, "tables on X*")
    found = [
        DoubleDualElement(X, t)
        for t in itertools.product(range(X.p), repeat=X.size)
        if is_linear_functional(X, t)
    ]
    found.sort(key=lambda U: X.index(U.coordinates()))
    return found


def vect_integrate(U: DoubleDualElement, f: LinearMap) -> Vector:
    """``(U(f_1), ..., U(f_n))`` where ``f_i`` are the rows of ``f``."""
    if f.dom != U.space:
        raise CarrierMismatch("integrand is not defined on the element's space")
    return tuple(U(row) for row in f.rows())


def double_dual_map(g: LinearMap, U: DoubleDualElement) -> DoubleDualElement:
    """``g**(U) = U ∘ g*``."""
    if U.space != g.dom:
        raise CarrierMismatch("element does not live on the map's domain")
    Y = g.cod
    gs = dual_map(g)
    return DoubleDualElement(Y, tuple(U(gs(eta)) for eta in Y.vectors()))


def naturality_holds(U: DoubleDualElement, theta: LinearMap, f: LinearMap) -> bool:
    """``theta(∫ f dU) == ∫ theta∘f dU``."""
    return theta(vect_integrate(U, f)) == vect_integrate(U, compose_linear(theta, f))


def change_of_variables_holds(pmap: LinearMap, U: DoubleDualElement, g: LinearMap) -> bool:
    """``∫_X g∘p dU == ∫_Y g d(p** U)``."""
    return vect_integrate(U, compose_linear(g, pmap)) == vect_integrate(double_dual_map(pmap, U), g)


def beta_square_commutes(U: DoubleDualElement, f: LinearMap) -> bool:
    """``beta(∫ f dU) = U(beta∘f)`` for every functional ``beta`` on the codomain."""
    v = vect_integrate(U, f)
    B = f.cod
    for beta in B.vectors():
        bf = tuple(dot(B.p, beta, col) for col in zip(*f.matrix)) if B.dim else (0,) * f.dom.dim
        if dot(B.p, beta, v) != U(bf):
            return False
    return True


# ---------------------------------------------------------------------------
# codensity carrier over a skeleton


@dataclass
class VectCarrier:
    X: VectorSpace
    skeleton_cap: int
    category: FiniteCategory = field(repr=False)
    diagram: SetDiagram = field(repr=False)
    object_index: dict[tuple[int, Matrix], int] = field(repr=False)
    elements: list[EndElement] = field(repr=False)

    def __post_init__(self) -> None:
        self._position = {e.assignment: i for i, e in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def as_set(self) -> FiniteSet:
        return FiniteSet(len(self.elements))

    def space(self, n: int) -> VectorSpace:
        return VectorSpace(self.X.field, n)

    def component(self, element: int, f: LinearMap) -> Vector:
        """``I_B(f)`` for ``B = k^n``."""
        o = self.object_index[f.cod.dim, f.matrix]
        return f.cod.vector(self.elements[element][o])

    def index_of(self, assignment: Sequence[int]) -> int | None:
        return self._position.get(tuple(assignment))

    def assignment_from(self, rule) -> tuple[int, ...]:
        """Assignment ``(k^n, f) |-> rule(f)`` with ``rule`` returning a vector."""
        out = [0] * len(self.category.objects)
        for (n, m), o in self.object_index.items():
            B = self.space(n)
            out[o] = B.index(rule(LinearMap(self.X, B, m)))
        return tuple(out)

    @cached_property
    def maps_by_dim(self) -> dict[int, list[LinearMap]]:
        out: dict[int, list[LinearMap]] = {}
        for n, m in self.object_index:
            out.setdefault(n, []).append(LinearMap(self.X, self.space(n), m))
        return out


def vect_codensity_carrier(
    p: int,
    d: int,
    N: int,
    cap: int | None = DEFAULT_CAP,
    node_cap: int | None = DEFAULT_NODE_CAP,
) -> VectCarrier:
    """Limit over the category of elements of ``Vect(k^d, -)`` on ``k^0..k^N``.

    Objects are ``(n, f)`` with ``f: k^d -> k^n`` linear; arrows are linear
    ``theta: k^n -> k^m`` with ``theta∘f = g``; each object carries the set
    ``k^n``.
    """
    F = PrimeField(p)
    X = VectorSpace(F, d)
    if N < 0:
        raise ValueError("skeleton cap must be non-negative")
    n_objects = sum(p ** (d * n) for n in range(N + 1))
    n_arrows = sum(p ** (d * n) * p ** (n * m) for n in range(N + 1) for m in range(N + 1))
    check_cap(n_objects, cap, "vector category-of-elements objects")
    check_cap(n_arrows, cap, "vector category-of-elements arrows")
    spaces = [VectorSpace(F, n) for n in range(N + 1)]
    objects: list[tuple[int, Matrix]] = []
    obj_index: dict[tuple[int, Matrix], int] = {}
    for n in range(N + 1):
        for f in all_linear_maps(X, spaces[n]):
            obj_index[n, f.matrix] = len(objects)
            objects.append((n, f.matrix))
    homs = {(n, m): all_linear_maps(spaces[n], spaces[m]) for n in range(N + 1) for m in range(N + 1)}
    tables = {(n, m): [t.table() for t in homs[n, m]] for n, m in homs}

    arrows: list[Arrow] = []
    maps: list[FiniteMap] = []
    arrow_index: dict[tuple[int, Matrix], int] = {}
    identities = [0] * len(objects)
    for o, (n, fm) in enumerate(objects):
        f = LinearMap(X, spaces[n], fm)
        for m in range(N + 1):
            for theta, table in zip(homs[n, m], tables[n, m]):
                g = compose_linear(theta, f)
                arrow_index[o, theta.matrix] = len(arrows)
                arrows.append(Arrow(o, obj_index[m, g.matrix], theta))
                maps.append(FiniteMap(spaces[n].as_set, spaces[m].as_set, table))
        identities[o] = arrow_index[o, LinearMap.identity(spaces[n]).matrix]

    def composer(g: int, f: int) -> int:
        return arrow_index[arrows[f].src, compose_linear(arrows[g].label, arrows[f].label).matrix]

    cat = FiniteCategory(objects, arrows, identities, composer=composer, check=False)
    diagram = SetDiagram(cat, [spaces[n].as_set for n, _ in objects], maps, check=False)
    elements = limit(diagram, node_cap=node_cap)
    return VectCarrier(X, N, cat, diagram, obj_index, elements)


def linearity_for_free(carrier: VectCarrier) -> bool:
    """Every component ``Vect(X, k^n) -> k^n`` is additive and homogeneous."""
    X = carrier.X
    p = X.p
    for i in range(len(carrier)):
        for n, fs in carrier.maps_by_dim.items():
            B = carrier.space(n)
            vals = {f.matrix: carrier.component(i, f) for f in fs}
            for f in fs:
                for g in fs:
                    s = LinearMap(X, B, tuple(tuple((a + b) % p for a, b in zip(r, q)) for r, q in zip(f.matrix, g.matrix)))
                    if vals[s.matrix] != B.add(vals[f.matrix], vals[g.matrix]):
                        return False
                for c in range(p):
                    s = LinearMap(X, B, tuple(tuple(c * a for a in r) for r in f.matrix))
                    if vals[s.matrix] != B.scale(c, vals[f.matrix]):
                        return False
    return True


@dataclass(frozen=True)
class DoubleDualReport:
    p: int
    d: int
    N: int
    carrier_size: int
    double_dual_size: int
    mapping: tuple[int | None, ...]
    recovery: bool
    unit_is_evaluation: bool

    @property
    def bijective(self) -> bool:
        hit = [m for m in self.mapping if m is not None]
        return (
            len(hit) == len(self.mapping)
            and len(set(hit)) == len(hit)
            and set(hit) == set(range(self.carrier_size))
        )

    @property
    def ok(self) -> bool:
        return self.bijective and self.recovery and self.unit_is_evaluation


def integration_assignment(carrier: VectCarrier, U: DoubleDualElement) -> tuple[int, ...]:
    return carrier.assignment_from(lambda f: vect_integrate(U, f))


def recover_functional(carrier: VectCarrier, element: int) -> DoubleDualElement:
    """``I_k`` as an element of ``X**``."""
    X = carrier.X
    k = carrier.space(1)
    return DoubleDualElement(X, tuple(carrier.component(element, LinearMap(X, k, (xi,)))[0] for xi in X.vectors()))


def double_dual_comparison(p: int, d: int, N: int, carrier: VectCarrier | None = None) -> DoubleDualReport:
    if N < 1:
        raise InvalidStructure("recovery reads the component at k^1, so the skeleton needs N >= 1")
    if carrier is None:
        carrier = vect_codensity_carrier(p, d, N)
    X = carrier.X
    dd = enumerate_double_dual(X)
    mapping = tuple(carrier.index_of(integration_assignment(carrier, U)) for U in dd)
    recovery = all(
        m is not None and recover_functional(carrier, m) == U for U, m in zip(dd, mapping)
    )
    unit_ok = True
    for x in X.vectors():
        ev = carrier.assignment_from(lambda f, x=x: f(x))
        if ev != integration_assignment(carrier, DoubleDualElement.evaluation(X, x)) or carrier.index_of(ev) is None:
            unit_ok = False
    return DoubleDualReport(p, d, N, len(carrier), len(dd), mapping, recovery, unit_ok)


def skeleton_sweep(p: int, d: int, max_N: int) -> dict[int, int]:
    """Carrier size for each skeleton cap ``1..max_N``."""
    return {N: len(vect_codensity_carrier(p, d, N)) for N in range(1, max_N + 1)}


# ---------------------------------------------------------------------------
# monad structure in coordinates


def coordinates(carrier: VectCarrier, element: int) -> Vector:
    """``(I_k(e_1*), ..., I_k(e_d*))``."""
    X = carrier.X
    k = carrier.space(1)
    return tuple(carrier.component(element, LinearMap(X, k, (e,)))[0] for e in X.basis())


def carrier_linear_map(g: LinearMap, src: VectCarrier, tgt: VectCarrier) -> FiniteMap:
    """``T(g)``: precompose every integrand with ``g``."""
    table = []
    for i in range(len(src)):
        a = tgt.assignment_from(lambda h: src.component(i, compose_linear(h, g)))
        j = tgt.index_of(a)
        if j is None:
            raise AssertionError("pushed-forward operator is not natural")
        table.append(j)
    return FiniteMap(src.as_set, tgt.as_set, tuple(table))


def double_dual_multiplication(X: VectorSpace) -> FiniteMap:
    """``mu: X**** -> X**`` with ``X**`` read as ``k^d`` through coordinates.

    ``(mu Phi)(xi) = Phi(ev_xi)``, where ``ev_xi`` in coordinates is the row of
    its values on the coordinate basis of ``X**``.
    """
    dd = enumerate_double_dual(X)
    basis = [dd[X.index(e)] for e in X.basis()]
    table = []
    for Phi in dd:  # an element of (X**)**, X** identified with X
        vals = []
        for xi in X.vectors():
            ev_row = tuple(b(xi) for b in basis)
            vals.append(Phi(ev_row))
        table.append(X.index(DoubleDualElement(X, tuple(vals)).coordinates()))
    return FiniteMap(X.as_set, X.as_set, tuple(table))


@dataclass(frozen=True)
class VectMonadReport:
    p: int
    d: int
    N: int
    coordinates_bijective: bool
    left_unit: bool
    right_unit: bool
    associative: bool
    multiplication_unique: bool

    @property
    def ok(self) -> bool:
        return (
            self.coordinates_bijective
            and self.left_unit
            and self.right_unit
            and self.associative
            and self.multiplication_unique
        )


def vect_monad_report(p: int, d: int, N: int = 2) -> VectMonadReport:
    """Monad laws for the multiplication transported from ``X****  -> X**``.

    ``T(X)`` is read as the space ``k^d`` through ``coordinates``, so
    ``T(T(X))`` is again the carrier over ``k^d``.
    """
    C = vect_codensity_carrier(p, d, N)
    X = C.X
    rep = double_dual_comparison(p, d, N, C)
    if not rep.bijective:
        raise AssertionError("comparison with the double dual is not a bijection")
    phi = FiniteMap(X.as_set, C.as_set, rep.mapping)  # coordinate index -> carrier element
    coord = tuple(X.index(coordinates(C, i)) for i in range(len(C)))
    coords_ok = sorted(coord) == list(range(len(C))) and all(coord[phi(i)] == i for i in range(len(C)))
    c = FiniteMap(C.as_set, X.as_set, coord)

    def as_linear(m: FiniteMap) -> LinearMap:
        """A map ``T(X) -> T(X)`` read as ``k^d -> k^d`` in coordinates."""
        fn = lambda v: X.vector(c(m(phi(X.index(v)))))
        L = LinearMap.from_function(X, X, fn)
        if any(L(v) != fn(v) for v in X.vectors()):
            raise AssertionError("map is not linear in coordinates")
        return L

    eta = FiniteMap(X.as_set, C.as_set, tuple(C.index_of(C.assignment_from(lambda f, x=x: f(x))) for x in X.vectors()))
    # T(T(X)) = C again; eta_{TX} = eta ∘ c
    eta_T = FiniteMap(C.as_set, C.as_set, tuple(eta(c(i)) for i in range(len(C))))
    mu_dd = double_dual_multiplication(X)
    mu = FiniteMap(C.as_set, C.as_set, tuple(phi(mu_dd(c(i))) for i in range(len(C))))
    ident = FiniteMap.identity(C.as_set)

    def then(g: FiniteMap, f: FiniteMap) -> FiniteMap:
        return FiniteMap(f.dom, g.cod, tuple(g(f(i)) for i in range(f.dom.size)))

    # eta_X as a linear map k^d -> k^d (TX read in coordinates)
    eta_lin = LinearMap.from_function(X, X, lambda v: X.vector(c(eta(X.index(v)))))
    T_eta = carrier_linear_map(eta_lin, C, C)
    left = then(mu, eta_T) == ident
    right = then(mu, T_eta) == ident
    T_mu = carrier_linear_map(as_linear(mu), C, C)
    assoc = then(mu, mu) == then(mu, T_mu)
    cands = [
        t for t in itertools.product(range(len(C)), repeat=len(C)) if all(t[eta_T(i)] == i for i in range(len(C)))
    ]
    unique = cands == [mu.table]
    return VectMonadReport(p, d, N, coords_ok, left, right, assoc, unique)
