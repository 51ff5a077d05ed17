"""``codense`` command-line driver.

Exit codes: 0 pass, 1 verification failure, 2 sizing/cap error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from codense import codensity, famset, rig, ultrafilter
from codense.errors import CapExceeded, CodenseError, HypothesisViolated, InvalidStructure
from codense.fincat import dumps_diagram
from codense.finset import FiniteSet
from codense.suite import MODULES, Record, Report, RunConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CAP, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _sizes(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated sizes") from None
    if not out or any(s < 0 for s in out):
        raise argparse.ArgumentTypeError("sizes must be non-negative and non-empty")
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-set", type=_positive, default=4, help="largest |X| allowed")
    p.add_argument("--max-subcat", type=_positive, default=4, help="largest set allowed in a subcategory")
    p.add_argument("--max-field-dim", type=_positive, default=2)
    p.add_argument("--skeleton-cap", type=_positive, default=2)
    p.add_argument("--solver-node-cap", type=_positive, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--output", help="also write the JSON report here")
    p.add_argument("--timing", action="store_true", help="include per-check milliseconds (breaks byte-stability)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="codense", description="Finite-scale checks of codensity and ultrafilter results.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("galvin-horn", help="classify every subset family of an n-element set")
    p.add_argument("--size", type=int, required=True)
    _common(p)

    p = sub.add_parser("codensity", help="codensity carrier of a subcategory of finite sets")
    p.add_argument("--subcat", type=_sizes, required=True, help="comma-separated set sizes, e.g. 1,2,3")
    p.add_argument("--x", type=int, required=True, help="size of X")
    p.add_argument("--non-full", action="store_true", help="keep only identity maps in the subcategory")
    p.add_argument("--dump-diagram", metavar="PATH", help="write the category-of-elements diagram as JSON")
    _common(p)

    p = sub.add_parser("rig", help="rig-valued integrals on a finite set")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--rig", help="built-in rig: Z/n, bool or tropical-k")
    g.add_argument("--rig-file", help="rig table file")
    p.add_argument("--x", type=int, required=True)
    _common(p)

    p = sub.add_parser("ultraproduct", help="ultraproduct of a family at a principal ultrafilter")
    p.add_argument("--family", required=True, help='JSON literal, e.g. {"index": 2, "components": [0, 1]}')
    p.add_argument("--point", type=int, required=True, help="witness point of the ultrafilter")
    p.add_argument("--subcat", type=_sizes, default=[1, 2, 3], help="subcategory for the colimit cross-check")
    _common(p)

    p = sub.add_parser("verify", help="run the verification matrix")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--only", choices=MODULES)
    p.add_argument("--workers", type=_positive, default=1)
    _common(p)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        max_set=args.max_set,
        max_subcat=args.max_subcat,
        max_field_dim=args.max_field_dim,
        skeleton_cap=args.skeleton_cap,
        solver_node_cap=args.solver_node_cap,
        seed=args.seed,
        output_format=args.format,
        output_path=args.output,
    )


def _timed(name: str, inputs: Any, expected: Any, fn) -> Record:
    t = time.perf_counter()
    observed = fn()
    return Record(name, inputs, expected, observed, round((time.perf_counter() - t) * 1000))


def cmd_galvin_horn(args: argparse.Namespace, cfg: RunConfig) -> Report:
    n = args.size
    if n < 0:
        raise UsageError("--size must be non-negative")
    if n > min(cfg.max_set, ultrafilter.GALVIN_HORN_MAX):
        raise CapExceeded(f"--size {n}: scanning 2^(2^{n}) families exceeds the cap (size <= {ultrafilter.GALVIN_HORN_MAX})")

    def run():
        r = ultrafilter.galvin_horn_exhaustive(FiniteSet(n))
        return {"families": 1 << (1 << n), "ultrafilters": r.ultrafilter_count, "equivalent": r.equivalent}

    rec = _timed("galvin_horn", {"size": n}, {"families": 1 << (1 << n), "ultrafilters": n, "equivalent": True}, run)
    return Report(cfg.echo() | {"size": n}, [rec])


def cmd_codensity(args: argparse.Namespace, cfg: RunConfig) -> Report:
    sizes, n, full = sorted(set(args.subcat)), args.x, not args.non_full
    if n < 0:
        raise UsageError("--x must be non-negative")
    if n > cfg.max_set:
        raise CapExceeded(f"|X| = {n} exceeds --max-set {cfg.max_set}")
    if max(sizes) > cfg.max_subcat:
        raise CapExceeded(f"subcategory set of size {max(sizes)} exceeds --max-subcat {cfg.max_subcat}")
    X = FiniteSet(n)
    inputs = {"subcat": sizes, "x": n, "full": full}
    t = time.perf_counter()
    C = codensity.codensity_carrier(sizes, X, full=full, node_cap=cfg.solver_node_cap)
    millis = round((time.perf_counter() - t) * 1000)
    if args.dump_diagram:
        Path(args.dump_diagram).write_text(dumps_diagram(C.diagram) + "\n")
    records = []
    if full and codensity.has_big_set(sizes):
        rep = codensity.ultrafilter_comparison(sizes, X, C)
        records.append(Record("carrier", inputs, n, len(C), millis))
        records.append(Record("comparison_bijective", inputs, True, rep.bijective))
        records.append(Record("unit_is_evaluation", inputs, True, codensity.unit_is_evaluation(sizes, X, C)))
    elif full and 2 in sizes and n <= 3:
        rep = codensity.degenerate_report(sizes, X)
        records.append(Record("carrier", inputs, len(rep.partition_families), len(C), millis))
        records.append(Record("recovered_partition_families", inputs, True, rep.matches))
    elif full:
        records.append(Record("carrier", inputs, None if n else 0, len(C), millis))
    else:
        expected = None
        if sizes == [2]:
            expected = 1 << (1 << n)
        records.append(Record("carrier", inputs, expected, len(C), millis))
    return Report(cfg.echo() | inputs, records)


def cmd_rig(args: argparse.Namespace, cfg: RunConfig) -> Report:
    n = args.x
    if n < 0:
        raise UsageError("--x must be non-negative")
    if n > cfg.max_set:
        raise CapExceeded(f"|X| = {n} exceeds --max-set {cfg.max_set}")
    try:
        R = rig.load_rig(args.rig_file) if args.rig_file else rig.builtin_rig(args.rig)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from None
    X = FiniteSet(n)
    inputs = {"rig": R.name, "x": n}
    if rig.rig_three_neq_one(R):
        rep = rig.theorem_rig_bijection(X, R)
        records = [
            Record("integrals", inputs, n, rep.integral_count),
            Record("bijective", inputs, True, rep.bijective),
        ]
    else:
        records = [Record("integrals", inputs | {"three_is_one": True}, None, len(rig.enumerate_integrals(X, R)))]
    return Report(cfg.echo() | inputs, records)


def cmd_ultraproduct(args: argparse.Namespace, cfg: RunConfig) -> Report:
    S = famset.FamObject.from_json(args.family)
    if not 0 <= args.point < S.index.size:
        raise UsageError("--point must index the family")
    if S.index.size > cfg.max_set:
        raise CapExceeded(f"index size {S.index.size} exceeds --max-set {cfg.max_set}")
    U = ultrafilter.unit(S.index, args.point)
    up = famset.ultraproduct(S, U)
    inputs = {"family": json.loads(S.to_json()), "point": args.point, "subcat": sorted(set(args.subcat))}
    records = [Record("carrier", inputs, S.components[args.point].size, len(up))]
    if codensity.has_big_set(args.subcat):
        rep = famset.ultraproduct_via_elements(S, U, args.subcat)
        records.append(Record("elements_colimit_bijective", inputs, True, rep.bijective))
    return Report(cfg.echo() | inputs, records)


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> Report:
    return run_suite(cfg, only=args.only, workers=args.workers)


COMMANDS = {
    "galvin-horn": cmd_galvin_horn,
    "codensity": cmd_codensity,
    "rig": cmd_rig,
    "ultraproduct": cmd_ultraproduct,
    "verify": cmd_verify,
}


def render_json(report: Report, timing: bool) -> str:
    return json.dumps(report.as_dict(timing), sort_keys=True, indent=2) + "\n"


def render_table(report: Report, timing: bool) -> str:
    rows = [("check", "verdict", "expected", "observed")]
    for r in sorted(report.records, key=lambda r: r.name):
        rows.append((r.name, "pass" if r.passed else "FAIL", json.dumps(r.expected), json.dumps(r.observed)))
        if timing:
            rows[-1] = rows[-1] + (f"{r.millis} ms",)
    widths = [min(max(len(row[i]) for row in rows), 60) for i in range(4)]
    lines = []
    for row in rows:
        cells = [c if len(c) <= 60 else c[:57] + "..." for c in row]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)) + ("  " + row[4] if len(row) > 4 else ""))
    lines.append(f"suite: {'pass' if report.passed else 'FAIL'} ({len(report.records)} check{'' if len(report.records) == 1 else 's'})")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _config(args)
        report = COMMANDS[args.command](args, cfg)
    except UsageError as e:
        sys.stderr.write(f"codense: usage error: {e}\n")
        return EXIT_USAGE
    except CapExceeded as e:
        sys.stderr.write(f"codense: sizing error: {e}\n")
        return EXIT_CAP
    except (HypothesisViolated, InvalidStructure) as e:
        sys.stderr.write(f"codense: {e}\n")
        return EXIT_USAGE
    except CodenseError as e:
        sys.stderr.write(f"codense: {e}\n")
        return EXIT_FAIL
    text = render_json(report, args.timing) if args.format == "json" else render_table(report, args.timing)
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(render_json(report, args.timing))
    return EXIT_OK if report.passed else EXIT_FAIL


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
