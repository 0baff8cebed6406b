"""Command-line entry point: ``gendescent <command> [options]``.

Exit status is 0 on success, 1 on input errors (including bad flags) and 2
when a capacity guard is exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .enumeration import (
    DEFAULT_ENUMERATION_LIMIT,
    exact_distribution,
    log_concavity_report,
    moments_from_table,
    oracle_eulerian,
    oracle_inversions,
    unimodality_check,
)
from .errors import CapacityError, InputError
from .io import CACHE_ENV, RunManifest, TableCache, canonical_json, with_manifest, write_csv
from .janson import (
    DEFAULT_MAX_VERTICES,
    Fixed,
    JansonCertificate,
    Power,
    auto_m,
    convergence_table,
    independence_audit,
    janson_bound,
)
from .montecarlo import (
    NormalityReport,
    SimulationConfig,
    draw_statistics,
    growth_window,
    summarize,
)
from .stats import (
    PairClass,
    Uniform,
    Vector,
    classify_pair,
    eligible_pairs,
    pair_class_tally,
    published_pair_class_counts,
)

log = logging.getLogger("gendescent")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_spec(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--d", type=int, help="uniform window size")
    g.add_argument("--vector", type=int, nargs="+", metavar="D_I", help="per-position windows d_1..d_{n-1}")


def _spec(args):
    return Vector(tuple(args.vector)) if args.vector else Uniform(args.d)


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, help="write to a file instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gendescent", description="Exact and Monte Carlo distributions of d-descents.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", help="exact distribution table by enumeration")
    p.add_argument("--n", type=int, required=True)
    _add_spec(p)
    p.add_argument("--limit", type=int, default=DEFAULT_ENUMERATION_LIMIT, help="enumeration limit on n")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", help="table cache directory (default: $GENDESCENT_CACHE_DIR)")
    _add_format(p)

    p = sub.add_parser("oracle", help="closed-form oracle tables")
    p.add_argument("kind", choices=("inversions", "eulerian"))
    p.add_argument("--n", type=int, required=True)
    _add_format(p)

    p = sub.add_parser("simulate", help="Monte Carlo normality diagnostics")
    p.add_argument("--n", type=int, nargs="+", help="one or more lengths")
    _add_spec(p, required=False)
    p.add_argument("--epsilon", type=float, help="growth mode: d = floor(n^(1-epsilon)) per n")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, nargs="+", default=[0])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump-samples", type=Path, help="CSV of standardised samples (single run only)")
    _add_format(p)

    p = sub.add_parser("janson", help="Janson condition certificates")
    p.add_argument("--n", type=int, nargs="+", required=True, help="n, or a schedule with --table")
    p.add_argument("--d", type=int, help="fixed window size")
    p.add_argument("--epsilon", type=float, help="d = floor(n^(1-epsilon))")
    p.add_argument("--m", type=int, help="exponent m (auto for --epsilon, else 3)")
    p.add_argument("--table", action="store_true", help="one certificate per scheduled n")
    p.add_argument("--exact-degree", action="store_true", help="materialise the graph for the degree")
    p.add_argument("--audit", action="store_true", help="exact joint-law audit of all indicator pairs")
    _add_format(p)

    p = sub.add_parser("pairs", help="pair-class counts for Uniform(d)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--dump", action="store_true", help="also list the class of every ordered pair")
    _add_format(p)

    p = sub.add_parser("report", help="run every acceptance check and write a summary")
    p.add_argument("--out", type=Path, default=Path("reproduction_report.json"))
    return parser


def _emit(args, doc: dict, rows=None, fields=None) -> None:
    out = open(args.out, "w", encoding="utf-8", newline="") if getattr(args, "out", None) else sys.stdout
    try:
        if args.format == "csv":
            write_csv(rows, fields, out)
        else:
            out.write(canonical_json(doc) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _params(args, *names) -> dict:
    return {k: getattr(args, k) for k in names if getattr(args, k, None) is not None}


def _table_output(args, table, manifest) -> None:
    doc = with_manifest(table.to_json(), manifest)
    rows = [{"k": k, "count": str(c)} for k, c in enumerate(table.counts)]
    _emit(args, doc, rows, ("k", "count"))


def cmd_exact(args) -> int:
    spec = _spec(args)
    cache = TableCache(args.cache_dir) if args.cache_dir or _env_cache() else None
    table = cache.lookup(args.n, spec) if cache else None
    if table is None:
        table = exact_distribution(args.n, spec, args.limit, args.workers)
        if cache:
            cache.store(table)
    params = {"n": args.n, "spec": spec.to_json(), "limit": args.limit}
    manifest = RunManifest("exact", params)
    doc = table.to_json()
    doc["moments"] = moments_from_table(table).to_json()
    doc["unimodal"] = unimodality_check(table)
    doc["log_concavity_violations"] = log_concavity_report(table)
    if args.format == "csv":
        _table_output(args, table, manifest)
    else:
        _emit(args, with_manifest(doc, manifest))
    return 0


def _env_cache() -> bool:
    return bool(os.environ.get(CACHE_ENV))


def cmd_oracle(args) -> int:
    table = oracle_inversions(args.n) if args.kind == "inversions" else oracle_eulerian(args.n)
    _table_output(args, table, RunManifest("oracle", {"kind": args.kind, "n": args.n}))
    return 0


def cmd_simulate(args) -> int:
    if not args.n:
        raise InputError("--n is required")
    runs = []
    for n in args.n:
        if args.epsilon is not None:
            if args.d or args.vector:
                raise InputError("--epsilon chooses d itself; drop --d/--vector")
            if not 0 < args.epsilon < 1:
                raise InputError("--epsilon must lie in (0, 1)")
            d = growth_window(n, args.epsilon)
            if n < 2 * d:
                log.warning("skipping n=%d: d=%d violates n >= 2d", n, d)
                continue
            spec = Uniform(d)
        elif args.d or args.vector:
            spec = _spec(args)
        else:
            raise InputError("one of --d, --vector or --epsilon is required")
        for seed in args.seed:
            runs.append(SimulationConfig(n, spec, args.trials, seed, args.workers))
    if args.dump_samples and len(runs) != 1:
        raise InputError("--dump-samples needs exactly one (n, seed) run")
    reports: list[NormalityReport] = []
    for cfg in runs:
        if cfg.n < 2:
            raise InputError("n must be at least 2 to standardise")
        x = draw_statistics(cfg)
        report = summarize(cfg, x)
        reports.append(report)
        if args.dump_samples:
            z = (x - float(report.mu)) / report.sigma
            np.savetxt(args.dump_samples, z, fmt="%.17g", header="z", comments="")
    manifest = RunManifest(
        "simulate",
        _params(args, "n", "d", "vector", "epsilon", "trials", "workers"),
        seed=args.seed[0] if len(args.seed) == 1 else None,
    )
    manifest.parameters["seeds"] = list(args.seed)
    doc = with_manifest({"reports": [r.to_json() for r in reports]}, manifest)
    _emit(args, doc, [r.csv_row() for r in reports], NormalityReport.CSV_FIELDS)
    return 0


def cmd_janson(args) -> int:
    manifest = RunManifest("janson", _params(args, "n", "d", "epsilon", "m", "table", "exact_degree", "audit"))
    if args.audit:
        if args.d is None or len(args.n) != 1:
            raise InputError("--audit needs a single --n and --d")
        ok = independence_audit(args.n[0], args.d)
        _emit(args, with_manifest({"n": args.n[0], "d": args.d, "audit_passed": ok}, manifest),
              [{"n": args.n[0], "d": args.d, "audit_passed": ok}], ("n", "d", "audit_passed"))
        return 0 if ok else 1
    if (args.d is None) == (args.epsilon is None):
        raise InputError("give exactly one of --d or --epsilon")
    rule = Fixed(args.d) if args.d is not None else Power(args.epsilon)
    if args.table or len(args.n) > 1:
        certs = convergence_table(rule, args.n, args.m, args.exact_degree)
        doc = {"certificates": [c.to_json() for c in certs]}
        if isinstance(rule, Power) and args.m is None:
            doc["auto_m"] = auto_m(rule.epsilon)
    else:
        n = args.n[0]
        d = args.d if args.d is not None else growth_window(n, args.epsilon)
        m = args.m if args.m is not None else (auto_m(args.epsilon) if args.epsilon else 3)
        certs = [janson_bound(n, d, m, args.exact_degree, DEFAULT_MAX_VERTICES)]
        doc = certs[0].to_json()
    _emit(args, with_manifest(doc, manifest), [c.csv_row() for c in certs], JansonCertificate.CSV_FIELDS)
    return 0


def cmd_pairs(args) -> int:
    counts = pair_class_tally(args.n, Uniform(args.d))
    doc = {
        "n": args.n,
        "d": args.d,
        "counts": counts._asdict(),
        "variance": str(counts.variance()),
    }
    if args.n >= 2 * args.d:
        doc["published_counts"] = published_pair_class_counts(args.n, args.d)._asdict()
    rows = [
        {"class": c.name.lower(), "count": getattr(counts, c.name.lower()), "expectation": str(c.expectation)}
        for c in PairClass
    ]
    fields = ("class", "count", "expectation")
    if args.dump:
        pairs = eligible_pairs(args.n, args.d)
        dump = [
            {"a": f"{a.i},{a.j}", "b": f"{b.i},{b.j}", "class": classify_pair(a, b).name.lower()}
            for a in pairs
            for b in pairs
        ]
        doc["pairs"] = dump
        if args.format == "csv":
            rows, fields = dump, ("a", "b", "class")
    _emit(args, with_manifest(doc, RunManifest("pairs", {"n": args.n, "d": args.d})), rows, fields)
    return 0


def cmd_report(args) -> int:
    from .reproduce import log_concavity_survey, run_all

    results = run_all(progress=lambda line: print(line, flush=True))
    survey = log_concavity_survey()
    violations = {f"{n},{d}": v for (n, d), v in survey.items() if v}
    doc = {
        "checks": [
            {"key": r.key, "title": r.title, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
        "log_concavity": {
            "tables_examined": len(survey),
            "violations": violations,
        },
    }
    args.out.write_text(canonical_json(with_manifest(doc, RunManifest("report", {}))) + "\n")
    print(f"log-concavity: {len(violations)} of {len(survey)} tables (n <= 9) have violations")
    print(f"summary written to {args.out}")
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "exact": cmd_exact,
    "oracle": cmd_oracle,
    "simulate": cmd_simulate,
    "janson": cmd_janson,
    "pairs": cmd_pairs,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
