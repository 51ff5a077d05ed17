"""The verification matrix run by ``codense verify``.

Each check is a named function returning ``(inputs, expected, observed)``;
the verdict is equality, or pass when nothing was predicted.  Values are
JSON-ready so reports are stable.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

from codense import codensity, famset, integration, rig, ultrafilter, vect
from codense.finset import FiniteMap, FiniteSet, compose, enumerate_partitions, map_count, map_tables

MODULES = ("finset", "ultrafilter", "integration", "rig", "fincat", "codensity", "vect", "famset")


@dataclass(frozen=True)
class RunConfig:
    command: str = "verify"
    max_set: int = 4
    max_subcat: int = 4
    max_field_dim: int = 2
    skeleton_cap: int = 2
    solver_node_cap: int = 10**6
    seed: int = 0
    output_format: str = "table"
    output_path: str | None = None
    lemma_instances: int = 200

    def __post_init__(self) -> None:
        for name in ("max_set", "max_subcat", "max_field_dim", "skeleton_cap", "solver_node_cap", "lemma_instances"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def echo(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "max_set": self.max_set,
            "max_subcat": self.max_subcat,
            "max_field_dim": self.max_field_dim,
            "skeleton_cap": self.skeleton_cap,
            "solver_node_cap": self.solver_node_cap,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Record:
    name: str
    inputs: Any
    expected: Any
    observed: Any
    millis: int | None = None

    @property
    def passed(self) -> bool:
        # ``expected=None`` marks a measurement with no prediction to meet
        return self.expected is None or self.expected == self.observed

    def as_dict(self, timing: bool) -> dict[str, Any]:
        d = {
            "name": self.name,
            "inputs": self.inputs,
            "expected": self.expected,
            "observed": self.observed,
            "verdict": "pass" if self.passed else "fail",
        }
        if timing:
            d["millis"] = self.millis
        return d


@dataclass
class Report:
    command: dict[str, Any]
    records: list[Record] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def as_dict(self, timing: bool = False) -> dict[str, Any]:
        return {
            "schema": 1,
            "command": self.command,
            "verdict": "pass" if self.passed else "fail",
            "records": [r.as_dict(timing) for r in sorted(self.records, key=lambda r: r.name)],
        }


CheckFn = Callable[[RunConfig], tuple[Any, Any, Any]]


@dataclass(frozen=True)
class Check:
    name: str
    fn: CheckFn

    @property
    def module(self) -> str:
        return self.name.split(".", 1)[0]


# ---------------------------------------------------------------------------
# finset


def _finset_counts(cfg: RunConfig):
    sizes = [(n, m) for n in range(4) for m in range(4)]
    observed = [len(map_tables(n, m)) for n, m in sizes]
    expected = [map_count(FiniteSet(n), FiniteSet(m)) for n, m in sizes]
    return {"pairs": [list(p) for p in sizes]}, expected, observed


def _finset_partitions(cfg: RunConfig):
    cases = [(s, n) for s in range(4) for n in range(4)]
    observed = [sum(1 for _ in enumerate_partitions(FiniteSet(s), n)) for s, n in cases]
    return {"cases": [list(c) for c in cases]}, [n**s for s, n in cases], observed


# ---------------------------------------------------------------------------
# ultrafilter


def _galvin_horn(n: int) -> CheckFn:
    def run(cfg: RunConfig):
        r = ultrafilter.galvin_horn_exhaustive(FiniteSet(n))
        observed = {"families": 1 << (1 << n), "ultrafilters": r.ultrafilter_count, "equivalent": r.equivalent}
        return {"size": n}, {"families": 1 << (1 << n), "ultrafilters": n, "equivalent": True}, observed

    return run


def _uf_unit_laws(cfg: RunConfig):
    out = []
    for n in range(4):
        X = FiniteSet(n)
        UX = ultrafilter.ultrafilter_set(X)
        mu = ultrafilter.multiplication_map(X)
        ident = FiniteMap.identity(UX)
        left = compose(mu, ultrafilter.ultrafilter_unit_map(UX)) == ident
        right = compose(mu, ultrafilter.ultrafilter_map(ultrafilter.ultrafilter_unit_map(X))) == ident
        out.append(left and right)
    return {"sizes": [0, 1, 2, 3]}, [True] * 4, out


def _uf_assoc(cfg: RunConfig):
    out = []
    for n in range(3):
        X = FiniteSet(n)
        UX = ultrafilter.ultrafilter_set(X)
        mu = ultrafilter.multiplication_map(X)
        lhs = compose(mu, ultrafilter.multiplication_map(UX))
        rhs = compose(mu, ultrafilter.ultrafilter_map(mu))
        out.append(lhs == rhs)
    return {"sizes": [0, 1, 2]}, [True] * 3, out


def _borger_identity(cfg: RunConfig):
    S = ultrafilter.identity_functor()
    out = []
    for n in range(4):
        X = FiniteSet(n)
        out.append(all(ultrafilter.borger_alpha(S, X, x).members == ultrafilter.unit(X, x).members for x in range(n)))
    return {"sizes": [0, 1, 2, 3]}, [True] * 4, out


def _borger_naturality(cfg: RunConfig):
    functors = [
        ultrafilter.identity_functor(),
        ultrafilter.constant_functor(2),
        ultrafilter.doubling_functor(),
        ultrafilter.square_functor(),
    ]
    return {"functors": [S.name for S in functors]}, [True] * len(functors), [
        ultrafilter.alpha_is_natural(S) for S in functors
    ]


# ---------------------------------------------------------------------------
# integration


def _uniqueness(cfg: RunConfig):
    rows = []
    for n in range(3):
        X = FiniteSet(n)
        for r in range(3):
            R = FiniteSet(r)
            for U in ultrafilter.enumerate_ultrafilters(X):
                survivors = integration.unique_integration_candidates(U, R)
                integral = tuple(integration.integrate(U, FiniteMap(X, R, f)) for f in map_tables(n, r))
                rows.append(survivors == [integral])
    return {"x_sizes": [0, 1, 2], "r_sizes": [0, 1, 2]}, [True] * len(rows), rows


def _integration_laws(cfg: RunConfig):
    ok_nat = ok_cov = True
    for n in range(4):
        X = FiniteSet(n)
        for U in ultrafilter.enumerate_ultrafilters(X):
            for b in range(3):
                B = FiniteSet(b)
                for f in map_tables(n, b):
                    fm = FiniteMap(X, B, f)
                    for c in range(3):
                        for t in map_tables(b, c):
                            ok_nat &= integration.naturality_in_codomain(U, FiniteMap(B, FiniteSet(c), t), fm)
            for m in range(3):
                Y = FiniteSet(m)
                for p in map_tables(n, m):
                    pm = FiniteMap(X, Y, p)
                    for g in map_tables(m, 2):
                        ok_cov &= integration.change_of_variables(pm, U, FiniteMap(Y, FiniteSet(2), g))
    return {"x_max": 3, "b_max": 2}, {"naturality": True, "change_of_variables": True}, {
        "naturality": ok_nat,
        "change_of_variables": ok_cov,
    }


def _recovery(cfg: RunConfig):
    out = []
    for n in range(4):
        X = FiniteSet(n)
        for U in ultrafilter.enumerate_ultrafilters(X):
            I = integration.IntegrationOperator.from_ultrafilter(U, [2])
            out.append(integration.recover_ultrafilter(I).members == U.members)
    return {"x_max": 3}, [True] * len(out), out


# ---------------------------------------------------------------------------
# rig


def _rig_bijection(name: str, n: int) -> CheckFn:
    def run(cfg: RunConfig):
        rep = rig.theorem_rig_bijection(FiniteSet(n), rig.builtin_rig(name))
        return {"rig": name, "x": n}, {"integrals": n, "bijective": True}, {
            "integrals": rep.integral_count,
            "bijective": rep.bijective,
        }

    return run


def _rig_counterexample(name: str, n: int, expected: int) -> CheckFn:
    def run(cfg: RunConfig):
        R = rig.builtin_rig(name)
        return {"rig": name, "x": n}, {"three_is_one": True, "integrals": expected}, {
            "three_is_one": not rig.rig_three_neq_one(R),
            "integrals": len(rig.enumerate_integrals(FiniteSet(n), R)),
        }

    return run


def _rig_tropical(cfg: RunConfig):
    out = []
    for k in range(3):
        R = rig.tropical(k)
        out.append([rig.rig_three_neq_one(R), len(rig.enumerate_integrals(FiniteSet(3), R))])
    return {"k": [0, 1, 2], "x": 3}, [[False, 7], [False, 7], [False, 7]], out


# ---------------------------------------------------------------------------
# fincat


def _fincat_solver_oracle(cfg: RunConfig):
    """Limit engine against a plain scan of the product of the fibres."""
    from codense.fincat import category_of_elements, limit

    out = []
    for sizes in ([2], [1, 2], [3], [0, 2]):
        for n in range(3):
            _, D = category_of_elements([FiniteSet(b) for b in sizes], FiniteSet(n))
            fast = [e.assignment for e in limit(D)]
            slow = [a for a in itertools.product(*(range(s.size) for s in D.on_objects)) if D.is_compatible(a)]
            out.append(fast == slow)
    return {"subcats": [[2], [1, 2], [3], [0, 2]], "x_max": 2}, [True] * len(out), out


# ---------------------------------------------------------------------------
# codensity

KG_SIZES = ([3], [1, 2, 3], [1, 2, 3, 4], [0, 1, 2, 3])


def _kg(sizes: list[int]) -> CheckFn:
    def run(cfg: RunConfig):
        obs = []
        for n in range(cfg.max_set + 1):
            X = FiniteSet(n)
            C = codensity.codensity_carrier(sizes, X, node_cap=cfg.solver_node_cap)
            rep = codensity.ultrafilter_comparison(sizes, X, C)
            obs.append([len(C), rep.bijective, codensity.unit_is_evaluation(sizes, X, C)])
        exp = [[n, True, True] for n in range(cfg.max_set + 1)]
        return {"subcat": sizes, "x_max": cfg.max_set}, exp, obs

    return run


def _sharp_one(cfg: RunConfig):
    sizes = list(range(1, cfg.max_set + 1))
    obs = [len(codensity.codensity_carrier([1], FiniteSet(n))) for n in sizes]
    return {"subcat": [1], "x": sizes}, [1] * len(sizes), obs


def _sharp_one_two(cfg: RunConfig):
    rep = codensity.degenerate_report([1, 2], FiniteSet(3))
    return {"subcat": [1, 2], "x": 3}, {"carrier": 8, "partition_families": 8, "matches": True}, {
        "carrier": rep.carrier_size,
        "partition_families": len(rep.partition_families),
        "matches": rep.matches,
    }


def _lawvere(cfg: RunConfig):
    obs = {
        "b3_x1": codensity.lawvere_equivariant_maps(FiniteSet(3), FiniteSet(1)).count,
        "b3_x2": codensity.lawvere_equivariant_maps(FiniteSet(3), FiniteSet(2)).count,
        "b2_x3_exceeds_3": codensity.lawvere_equivariant_maps(FiniteSet(2), FiniteSet(3)).count > 3,
    }
    return {"cases": [[3, 1], [3, 2], [2, 3]]}, {"b3_x1": 1, "b3_x2": 2, "b2_x3_exceeds_3": True}, obs


def _double_power_set(cfg: RunConfig):
    obs = []
    for n in range(3):
        X = FiniteSet(n)
        C = codensity.codensity_carrier([2], X, full=False)
        E = codensity.endomorphism_monad_carrier(FiniteSet(2), X)
        emb = codensity.ultrafilter_embedding_into_endomorphisms(FiniteSet(2), X)
        obs.append([len(C), E.size, len(set(emb)) == n])
    return {"subcat": [2], "full": False}, [[1 << (1 << n), 1 << (1 << n), True] for n in range(3)], obs


def _codensity_monad(cfg: RunConfig):
    rep = codensity.monad_law_report([1, 2, 3], max_unit=2, max_assoc=2)
    return {"subcat": [1, 2, 3], "x_max": 2}, True, rep.ok


def _terminality(cfg: RunConfig):
    obs = {
        "identity": len(codensity.unit_compatible_natural_maps(codensity.identity_fragment(2), [1, 2, 3])),
        "ultrafilter": len(codensity.unit_compatible_natural_maps(codensity.ultrafilter_fragment(2), [1, 2, 3])),
        "ultrafilter_to_pp": len(
            codensity.unit_compatible_natural_maps(codensity.ultrafilter_fragment(2), [2], full=False)
        ),
    }
    return {"x_max": 2}, {"identity": 1, "ultrafilter": 1, "ultrafilter_to_pp": 1}, obs


def _zn(cfg: RunConfig):
    bad = [n for n in range(1, 1001) if not codensity.zn_fields_codensity(n).ok]
    return {"n_max": 1000}, [], bad


# ---------------------------------------------------------------------------
# vect


def _vect_cases(cfg: RunConfig) -> list[tuple[int, int]]:
    return [(2, d) for d in range(min(2, cfg.max_field_dim) + 1)] + [(3, d) for d in range(min(1, cfg.max_field_dim) + 1)]


def _vect_carrier(cfg: RunConfig):
    N = cfg.skeleton_cap
    exp, obs = [], []
    for p, d in _vect_cases(cfg):
        C = vect.vect_codensity_carrier(p, d, N, node_cap=cfg.solver_node_cap)
        rep = vect.double_dual_comparison(p, d, N, C)
        obs.append([p, d, len(C), rep.ok, vect.linearity_for_free(C)])
        exp.append([p, d, p**d, True, True])
    return {"cases": [list(c) for c in _vect_cases(cfg)], "skeleton_cap": N}, exp, obs


def _vect_laws(cfg: RunConfig):
    F = vect.PrimeField(2)
    spaces = [vect.VectorSpace(F, n) for n in range(3)]
    nat = cov = beta = True
    for X in spaces:
        for U in vect.enumerate_double_dual(X):
            for B in spaces:
                for f in vect.all_linear_maps(X, B):
                    beta &= vect.beta_square_commutes(U, f)
                    for C in spaces:
                        for theta in vect.all_linear_maps(B, C):
                            nat &= vect.naturality_holds(U, theta, f)
            for Y in spaces:
                for pm in vect.all_linear_maps(X, Y):
                    for g in vect.all_linear_maps(Y, spaces[1]):
                        cov &= vect.change_of_variables_holds(pm, U, g)
    keys = ("naturality", "change_of_variables", "functional_square")
    return {"p": 2, "dim_max": 2}, dict.fromkeys(keys, True), dict(zip(keys, (nat, cov, beta)))


def _vect_monad(cfg: RunConfig):
    cases = [(2, 0), (2, 1), (3, 0), (3, 1)]
    return {"cases": [list(c) for c in cases]}, [True] * 4, [vect.vect_monad_report(p, d).ok for p, d in cases]


# ---------------------------------------------------------------------------
# famset


def _principal_collapse(cfg: RunConfig):
    bad = 0
    total = 0
    for S in famset.all_families(3, 3):
        for U in ultrafilter.enumerate_ultrafilters(S.index):
            up = famset.ultraproduct(S, U)
            c = famset.principal_collapse(up)
            total += 1
            if not (c.is_injective() and c.is_surjective()):
                bad += 1
    return {"index_max": 3, "component_max": 3}, {"instances": total, "failures": 0}, {
        "instances": total,
        "failures": bad,
    }


def _empty_component(cfg: RunConfig):
    S = famset.FamObject.of([0, 1])
    return {"family": S.to_json(), "point": 1}, 1, len(famset.ultraproduct(S, ultrafilter.unit(S.index, 1)))


def _lemma(cfg: RunConfig):
    instances = famset.lemma_instances(cfg.seed, cfg.lemma_instances)
    bad = [i for i, (S, U, B) in enumerate(instances) if not famset.ultraproduct_via_elements(S, U, B).bijective]
    return {"seed": cfg.seed, "instances": len(instances)}, [], bad


def _functor_laws(cfg: RunConfig):
    rng = random.Random(cfg.seed)
    ident = all(
        famset.V_on_morphism(famset.FamMorphism.identity(S)) == famset.FamMorphism.identity(famset.V_object(S))
        for S in famset.all_families(3, 2)
    )
    done = comp = 0
    while done < 100:
        S, R, Q = (famset.random_family(rng, 3, 2) for _ in range(3))
        m1, m2 = famset.random_morphism(rng, S, R), famset.random_morphism(rng, R, Q)
        if m1 is None or m2 is None:
            continue
        done += 1
        comp += famset.functor_composition_holds(m1, m2)
    return {"seed": cfg.seed, "random_pairs": 100}, {"identity": True, "composition": 100}, {
        "identity": ident,
        "composition": comp,
    }


def _fam_monad(cfg: RunConfig):
    rep = famset.monad_laws_report(2, 2, seed=cfg.seed)
    return {"index_max": 2, "component_max": 2, "seed": cfg.seed}, True, rep.ok


# ---------------------------------------------------------------------------


def all_checks() -> list[Check]:
    checks = [
        Check("finset.map_counts", _finset_counts),
        Check("finset.partition_counts", _finset_partitions),
        *(Check(f"ultrafilter.galvin_horn.n{n}", _galvin_horn(n)) for n in range(5)),
        Check("ultrafilter.monad_unit_laws", _uf_unit_laws),
        Check("ultrafilter.monad_associativity", _uf_assoc),
        Check("ultrafilter.borger_identity_is_unit", _borger_identity),
        Check("ultrafilter.borger_naturality", _borger_naturality),
        Check("integration.uniqueness", _uniqueness),
        Check("integration.naturality_and_change_of_variables", _integration_laws),
        Check("integration.recovery", _recovery),
        *(Check(f"rig.bijection.{name}.x{n}", _rig_bijection(name, n)) for name in ("Z/3", "Z/5", "Z/6") for n in range(4)),
        Check("rig.counterexample.Z/2.x3", _rig_counterexample("Z/2", 3, 4)),
        Check("rig.counterexample.bool.x3", _rig_counterexample("bool", 3, 7)),
        Check("rig.tropical_truncations", _rig_tropical),
        Check("fincat.limit_vs_scan", _fincat_solver_oracle),
        *(Check("codensity.kg." + "-".join(map(str, s)), _kg(list(s))) for s in KG_SIZES),
        Check("codensity.sharp.singleton_only", _sharp_one),
        Check("codensity.sharp.one_two", _sharp_one_two),
        Check("codensity.lawvere", _lawvere),
        Check("codensity.double_power_set", _double_power_set),
        Check("codensity.monad_laws", _codensity_monad),
        Check("codensity.terminality_fragment", _terminality),
        Check("codensity.zn_radical", _zn),
        Check("vect.carrier_and_comparison", _vect_carrier),
        Check("vect.integral_laws", _vect_laws),
        Check("vect.monad_laws", _vect_monad),
        Check("famset.principal_collapse", _principal_collapse),
        Check("famset.empty_component", _empty_component),
        Check("famset.elements_colimit", _lemma),
        Check("famset.functor_laws", _functor_laws),
        Check("famset.monad_laws", _fam_monad),
    ]
    return sorted(checks, key=lambda c: c.name)


def _run_one(args: tuple[str, RunConfig]) -> Record:
    name, cfg = args
    check = next(c for c in all_checks() if c.name == name)
    t = time.perf_counter()
    inputs, expected, observed = check.fn(cfg)
    return Record(name, inputs, expected, observed, round((time.perf_counter() - t) * 1000))


def run_suite(cfg: RunConfig, only: str | None = None, workers: int = 1) -> Report:
    if only is not None and only not in MODULES:
        raise KeyError(only)
    names = [c.name for c in all_checks() if only is None or c.module == only]
    jobs = [(n, cfg) for n in names]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    return Report(cfg.echo() | {"only": only}, sorted(records, key=lambda r: r.name))
