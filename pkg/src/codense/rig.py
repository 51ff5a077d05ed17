"""Finite commutative rigs and rig-valued integrals.

A linear map ``Simp(X, R) -> R`` is determined by its values on the singleton
characteristic functions, so integrals are parameterised by coefficient
vectors in ``R^X``: ``I(f) = sum_x f(x) * c_x``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from codense.errors import HypothesisViolated, InvalidStructure
from codense.finset import DEFAULT_CAP, FiniteMap, FiniteSet, check_cap
from codense.integration import integrate
from codense.ultrafilter import Ultrafilter, enumerate_ultrafilters

Table = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RigSpec:
    name: str
    size: int
    add_table: Table
    mul_table: Table
    zero: int
    one: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "add_table", tuple(tuple(r) for r in self.add_table))
        object.__setattr__(self, "mul_table", tuple(tuple(r) for r in self.mul_table))
        problem = rig_defect(self)
        if problem is not None:
            raise InvalidStructure(f"rig {self.name!r}: {problem}")

    @property
    def carrier(self) -> FiniteSet:
        return FiniteSet(self.size)

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def sum(self, values: Iterable[int]) -> int:
        acc = self.zero
        for v in values:
            acc = self.add_table[acc][v]
        return acc

    def natural(self, k: int) -> int:
        """``1 + 1 + ... + 1`` (``k`` terms)."""
        return self.sum([self.one] * k)


def rig_defect(R: RigSpec) -> str | None:
    n = R.size
    A, M = R.add_table, R.mul_table
    if len(A) != n or len(M) != n or any(len(r) != n for r in A + M):
        return "tables must be square of the carrier size"
    if any(not 0 <= v < n for r in A + M for v in r):
        return "table entry outside the carrier"
    if not (0 <= R.zero < n and 0 <= R.one < n):
        return "zero/one outside the carrier"
    els = range(n)
    for op, unit, label in ((A, R.zero, "addition"), (M, R.one, "multiplication")):
        for a in els:
            if op[a][unit] != a:
                return f"{label} unit law fails at {a}"
            for b in els:
                if op[a][b] != op[b][a]:
                    return f"{label} not commutative at ({a}, {b})"
                for c in els:
                    if op[op[a][b]][c] != op[a][op[b][c]]:
                        return f"{label} not associative at ({a}, {b}, {c})"
    for a in els:
        if M[a][R.zero] != R.zero:
            return f"zero does not annihilate {a}"
        for b in els:
            for c in els:
                if M[a][A[b][c]] != A[M[a][b]][M[a][c]]:
                    return f"distributivity fails at ({a}, {b}, {c})"
    return None


def zmod(n: int) -> RigSpec:
    if not 1 <= n <= 12:
        raise ValueError("built-in Z/n rigs cover 1 <= n <= 12")
    els = range(n)
    return RigSpec(
        f"Z/{n}",
        n,
        tuple(tuple((a + b) % n for b in els) for a in els),
        tuple(tuple((a * b) % n for b in els) for a in els),
        0,
        1 % n,
    )


def boolean_rig() -> RigSpec:
    return RigSpec("bool", 2, ((0, 1), (1, 1)), ((0, 0), (0, 1)), 0, 1)


def tropical(k: int) -> RigSpec:
    """Min-plus rig on ``{0, ..., k, inf}``, sums above ``k`` saturating to ``inf``.

    Element ``i <= k`` stands for the number ``i``; element ``k + 1`` is ``inf``.
    Rig zero is ``inf`` and rig one is the number ``0``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    inf = k + 1
    els = range(k + 2)
    add = tuple(tuple(min(a, b) for b in els) for a in els)
    mul = tuple(tuple(min(a + b, inf) for b in els) for a in els)
    return RigSpec(f"tropical-{k}", k + 2, add, mul, inf, 0)


def builtin_rig(name: str) -> RigSpec:
    """Look up ``Z/n``, ``bool`` or ``tropical-k`` by name."""
    if name == "bool":
        return boolean_rig()
    if name.startswith("Z/"):
        return zmod(int(name[2:]))
    if name.startswith("tropical-"):
        return tropical(int(name.split("-", 1)[1]))
    raise KeyError(f"unknown built-in rig {name!r}")


# ---------------------------------------------------------------------------
# table file format


def parse_rig(text: str) -> RigSpec:
    """Parse ``rig <name> <size>``, ``size`` addition rows, ``size``
    multiplication rows, ``zero i`` and ``one j``.  Blank lines and ``#``
    comments are ignored."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidStructure("empty rig file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "rig":
        raise InvalidStructure("first line must be 'rig <name> <size>'")
    name, n = head[1], int(head[2])
    if len(lines) != 1 + 2 * n + 2:
        raise InvalidStructure(f"expected {2 * n} table rows plus zero/one lines")
    rows = [tuple(int(v) for v in ln.split()) for ln in lines[1 : 1 + 2 * n]]
    consts = {}
    for ln in lines[1 + 2 * n :]:
        key, _, val = ln.partition(" ")
        if key not in ("zero", "one"):
            raise InvalidStructure(f"unexpected line {ln!r}")
        consts[key] = int(val)
    if set(consts) != {"zero", "one"}:
        raise InvalidStructure("need both 'zero' and 'one' lines")
    return RigSpec(name, n, tuple(rows[:n]), tuple(rows[n:]), consts["zero"], consts["one"])


def format_rig(R: RigSpec) -> str:
    out = [f"rig {R.name} {R.size}"]
    out += [" ".join(map(str, r)) for r in R.add_table]
    out += [" ".join(map(str, r)) for r in R.mul_table]
    out += [f"zero {R.zero}", f"one {R.one}"]
    return "\n".join(out) + "\n"


def load_rig(path: str | Path) -> RigSpec:
    return parse_rig(Path(path).read_text())


# ---------------------------------------------------------------------------
# integrals


@dataclass(frozen=True)
class LinearIntegral:
    rig: RigSpec
    carrier: FiniteSet
    coefficients: tuple[int, ...]

    def __call__(self, f: Sequence[int]) -> int:
        R = self.rig
        return R.sum(R.mul(v, c) for v, c in zip(f, self.coefficients))

    def satisfies_image_condition(self) -> bool:
        return all(self(f) in f for f in itertools.product(range(self.rig.size), repeat=self.carrier.size))


def rig_three_neq_one(R: RigSpec) -> bool:
    return R.natural(3) != R.one


def _check_space(R: RigSpec, X: FiniteSet, cap: int | None) -> None:
    check_cap(R.size**X.size, cap, f"functions {X.size} -> |R|={R.size}")


def integral_is_linear(U: Ultrafilter, R: RigSpec, cap: int | None = DEFAULT_CAP) -> bool:
    """Additivity and homogeneity of ``f |-> ∫ f dU`` over all of ``R^X``."""
    X = U.carrier
    _check_space(R, X, cap)
    fs = list(itertools.product(range(R.size), repeat=X.size))
    val = {f: integrate(U, FiniteMap(X, R.carrier, f)) for f in fs}
    for f in fs:
        for g in fs:
            if val[tuple(R.add(a, b) for a, b in zip(f, g))] != R.add(val[f], val[g]):
                return False
        for c in range(R.size):
            if val[tuple(R.mul(c, a) for a in f)] != R.mul(c, val[f]):
                return False
    return True


def ultrafilter_integral(U: Ultrafilter, R: RigSpec) -> LinearIntegral:
    """``∫ - dU`` in coefficient form: its values on singleton indicators."""
    X = U.carrier
    coeffs = []
    for x in range(X.size):
        chi = tuple(R.one if y == x else R.zero for y in range(X.size))
        coeffs.append(integrate(U, FiniteMap(X, R.carrier, chi)))
    return LinearIntegral(R, X, tuple(coeffs))


def enumerate_integrals(X: FiniteSet, R: RigSpec, cap: int | None = DEFAULT_CAP) -> list[LinearIntegral]:
    """Every coefficient vector whose linear map sends each ``f`` into ``im f``."""
    _check_space(R, X, cap)
    fs = list(itertools.product(range(R.size), repeat=X.size))
    out = []
    for coeffs in itertools.product(range(R.size), repeat=X.size):
        I = LinearIntegral(R, X, coeffs)
        if all(I(f) in f for f in fs):
            out.append(I)
    return out


@dataclass(frozen=True)
class RigBijectionReport:
    rig: str
    carrier_size: int
    ultrafilter_count: int
    integral_count: int
    injective: bool
    surjective: bool
    agrees_with_integration: bool

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective and self.agrees_with_integration


def theorem_rig_bijection(X: FiniteSet, R: RigSpec, cap: int | None = DEFAULT_CAP) -> RigBijectionReport:
    """Check that ``U |-> ∫ - dU`` is a bijection onto the ``R``-valued integrals."""
    if not rig_three_neq_one(R):
        raise HypothesisViolated(
            f"3 = 1 in {R.name}; use enumerate_integrals to tabulate the integrals instead"
        )
    ufs = enumerate_ultrafilters(X)
    images = [ultrafilter_integral(U, R) for U in ufs]
    fs = list(itertools.product(range(R.size), repeat=X.size))
    agrees = all(
        I(f) == integrate(U, FiniteMap(X, R.carrier, f)) for U, I in zip(ufs, images) for f in fs
    )
    integrals = {I.coefficients for I in enumerate_integrals(X, R, cap)}
    coeffs = [I.coefficients for I in images]
    return RigBijectionReport(
        rig=R.name,
        carrier_size=X.size,
        ultrafilter_count=len(ufs),
        integral_count=len(integrals),
        injective=len(set(coeffs)) == len(coeffs),
        surjective=set(coeffs) == integrals,
        agrees_with_integration=agrees,
    )


def simple_decomposition_holds(X: FiniteSet, R: RigSpec, cap: int | None = DEFAULT_CAP) -> bool:
    """Every ``f`` equals ``sum_x f(x) * chi_{x}`` pointwise."""
    _check_space(R, X, cap)
    n = X.size
    chis = [tuple(R.one if y == x else R.zero for y in range(n)) for x in range(n)]
    for f in itertools.product(range(R.size), repeat=n):
        combo = tuple(R.sum(R.mul(f[x], chis[x][y]) for x in range(n)) for y in range(n))
        if combo != f:
            return False
    return True

