"""Command-line front end: ``boxview solve | bench | verify``."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from importlib import resources
from typing import Optional, Sequence

from .engine import Brancher, ValueSelect, VarSelect
from .models import PROBLEMS, REPORTED_VARIANTS, RunResult, solve_model, spec_from_params
from .propagators import ModelVariant
from .views import to_text
from . import verify as verify_mod

RECORD_FIELDS = ("problem", "instance", "variant", "status", "time_ms", "propagations", "fails",
                 "domain_updates", "view_calls", "arith_ops", "solutions", "objective")
SEED_ENV = "BOXVIEW_SEED"
STATIC_DYNAMIC_PAIRS = (
    (ModelVariant.VIEWS_STATIC, ModelVariant.VIEWS_DYNAMIC),
    (ModelVariant.VIEWS_STATIC_GLOBAL, ModelVariant.VIEWS_DYNAMIC_GLOBAL),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # invalid arguments exit with 1; 2 is reserved for internal errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def env_seed(default: int) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def parse_brancher(text: str) -> Brancher:
    """``VAR[:VALUE]``, e.g. ``first-fail:bisect``."""
    var_part, _, val_part = text.partition(":")
    try:
        vs = VarSelect(var_part)
        us = ValueSelect(val_part) if val_part else ValueSelect.MIN_VALUE
    except ValueError:
        raise UsageError(
            f"bad brancher {text!r}; variable rules {[v.value for v in VarSelect]}, "
            f"value rules {[v.value for v in ValueSelect]}") from None
    return Brancher(vs, us, None)


def parse_variants(text: str) -> Optional[list[ModelVariant]]:
    """Comma separated variant names; ``all`` or ``reported`` (None means per-family)."""
    if text == "all":
        return list(ModelVariant)
    if text == "reported":
        return None
    try:
        return [ModelVariant(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise UsageError(str(e)) from None


# -- solve ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    params = {f.name: getattr(args, f.name) for f in fields(PROBLEMS[args.problem])
              if getattr(args, f.name) is not None}
    if "seed" in {f.name for f in fields(PROBLEMS[args.problem])} and args.seed is None:
        params["seed"] = env_seed(1)
    try:
        spec = spec_from_params(args.problem, params)
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from None
    try:
        variant = ModelVariant(args.variant)
    except ValueError:
        raise UsageError(f"unknown variant {args.variant!r}") from None
    brancher = parse_brancher(args.brancher) if args.brancher else None
    model = spec.build()
    if args.dump_model:
        sys.stderr.write(model.dump())
    if args.dump_views:
        posted = model.post(variant, balanced=args.balanced)
        for p in posted.decomposition.propagators:
            sys.stderr.write(f"{type(p).__name__}: {' | '.join(to_text(v.node) for v in p.views)}\n")
        if posted.objective is not None:
            sys.stderr.write(f"objective: {to_text(posted.objective.node)}\n")
    res = solve_model(model, variant, all_solutions=args.all_solutions, time_limit=args.time_limit,
                      brancher=brancher, balanced=args.balanced)
    print(json.dumps(res.record()))
    return 0


# -- bench ---------------------------------------------------------------------------


@dataclass
class BenchOptions:
    threshold: float = 0.02
    min_repeats: int = 10
    max_repeats: int = 30
    time_limit: Optional[float] = 60.0


def measure(model, variant: ModelVariant, opts: BenchOptions) -> dict:
    """Repeat until the runtime deviation is below the threshold; keep the minimum."""
    times = []
    first: Optional[RunResult] = None
    while True:
        r = solve_model(model, variant, time_limit=opts.time_limit)
        if first is None:
            first = r
        if r.status == "timeout":
            return r.record()
        times.append(r.stats.time_ms)
        n = len(times)
        if n >= opts.max_repeats:
            break
        if n >= opts.min_repeats:
            mean = statistics.fmean(times)
            if mean == 0 or statistics.stdev(times) < opts.threshold * mean:
                break
    rec = first.record()
    rec["time_ms"] = round(min(times), 3)
    return rec


def _bench_instance(entry: dict, variants: Optional[list], opts: BenchOptions) -> list[dict]:
    problem = entry["problem"]
    try:
        spec = spec_from_params(problem, entry.get("params", {}))
        model = spec.build()
    except Exception as e:  # recorded per row; the run continues
        return [{"problem": problem, "instance": json.dumps(entry.get("params")),
                 "variant": None, "status": f"error: {e}"}]
    chosen = variants if variants is not None else list(REPORTED_VARIANTS[problem])
    out = []
    for v in chosen:
        try:
            out.append(measure(model, v, opts))
        except Exception as e:
            out.append({"problem": problem, "instance": model.instance, "variant": v.value,
                        "status": f"error: {e}"})
    return out


def load_suite(path: Optional[str], full: bool = False) -> list[dict]:
    if path is None:
        name = "full.json" if full else "default.json"
        text = resources.files("boxview").joinpath("suites", name).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    suite = json.loads(text)
    if not isinstance(suite, list):
        raise UsageError("suite file must hold a JSON array of instance specs")
    for e in suite:
        if not isinstance(e, dict) or e.get("problem") not in PROBLEMS:
            raise UsageError(f"bad suite entry {e!r}")
    return suite


def run_bench(suite: list[dict], variants: Optional[list], opts: BenchOptions,
              jobs: int = 1, progress=None) -> list[dict]:
    records = []
    if jobs <= 1:
        for entry in suite:
            rows = _bench_instance(entry, variants, opts)
            records += rows
            if progress:
                progress(rows)
        return records
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_bench_instance, e, variants, opts) for e in suite]
        for f in futures:
            rows = f.result()
            records += rows
            if progress:
                progress(rows)
    return records


@dataclass
class RatioSummary:
    group: str
    geometric_mean: float
    stddev: float
    min: float
    max: float
    count: int

    @classmethod
    def of(cls, group: str, ratios: Sequence[float]) -> Optional[RatioSummary]:
        rs = [r for r in ratios if r > 0 and math.isfinite(r)]
        if not rs:
            return None
        logs = [math.log(r) for r in rs]
        sd = math.exp(statistics.stdev(logs)) if len(logs) > 1 else 1.0
        return cls(group, math.exp(statistics.fmean(logs)), sd, min(rs), max(rs), len(rs))


def _completed(records: list[dict]) -> dict:
    """(problem, instance) -> {variant: time_ms} for runs that finished."""
    table: dict = {}
    for r in records:
        if r.get("status") in ("sat", "unsat", "optimal"):
            table.setdefault((r["problem"], r["instance"]), {})[r["variant"]] = r["time_ms"]
    return table


def static_dynamic_ratios(records: list[dict]) -> list[tuple[str, str, float]]:
    out = []
    for (prob, inst), t in _completed(records).items():
        for s, d in STATIC_DYNAMIC_PAIRS:
            if s.value in t and d.value in t and t[d.value] > 0:
                out.append((prob, inst, t[s.value] / t[d.value]))
    return out


def views_vars_ratios(records: list[dict]) -> list[tuple[str, str, float]]:
    out = []
    for (prob, inst), t in _completed(records).items():
        views = [ms for v, ms in t.items() if ModelVariant(v).uses_views]
        plain = [ms for v, ms in t.items() if not ModelVariant(v).uses_views]
        if views and plain and min(plain) > 0:
            out.append((prob, inst, min(views) / min(plain)))
    return out


def summarize(ratios: list[tuple[str, str, float]]) -> list[RatioSummary]:
    groups: dict = {}
    for prob, _, r in ratios:
        groups.setdefault(prob, []).append(r)
    rows = [RatioSummary.of(g, rs) for g, rs in sorted(groups.items())]
    rows.append(RatioSummary.of("All", [r for _, _, r in ratios]))
    return [r for r in rows if r is not None]


def format_table(title: str, rows: list[RatioSummary]) -> str:
    lines = [title, f"{'group':<12}{'geo-mean':>10}{'geo-sd':>10}{'min':>10}{'max':>10}{'n':>5}"]
    for r in rows:
        lines.append(f"{r.group:<12}{r.geometric_mean:>10.3f}{r.stddev:>10.3f}"
                     f"{r.min:>10.3f}{r.max:>10.3f}{r.count:>5}")
    return "\n".join(lines)


def write_outputs(records: list[dict], prefix: str, tables: dict):
    os.makedirs(os.path.dirname(os.path.abspath(prefix)), exist_ok=True)
    with open(prefix + ".jsonl", "w") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")
    with open(prefix + ".csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RECORD_FIELDS, extrasaction="ignore")
        w.writeheader()
        for r in records:
            w.writerow(r)
    with open(prefix + ".summary.json", "w") as fh:
        json.dump({k: [vars(r) for r in rows] for k, rows in tables.items()}, fh, indent=2)


def cmd_bench(args) -> int:
    if not 0 < args.threshold < 1:
        raise UsageError("--threshold must be a fraction in (0, 1)")
    if args.repeats < 1 or args.max_repeats < args.repeats:
        raise UsageError("need 1 <= --repeats <= --max-repeats")
    suite = load_suite(args.suite, args.full)
    variants = parse_variants(args.variants)
    opts = BenchOptions(args.threshold, args.repeats, args.max_repeats, args.time_limit)

    def progress(rows):
        for r in rows:
            print(f"{r['problem']:<10} {str(r['instance']):<22} {str(r['variant']):<22} "
                  f"{r['status']:<8} {r.get('time_ms', '')}", file=sys.stderr)

    records = run_bench(suite, variants, opts, args.jobs, progress if not args.quiet else None)
    tables = {
        "static_vs_dynamic": summarize(static_dynamic_ratios(records)),
        "views_vs_vars": summarize(views_vars_ratios(records)),
    }
    print(format_table("runtime ratio views-static / views-dynamic", tables["static_vs_dynamic"]))
    print()
    print(format_table("runtime ratio best views / best vars", tables["views_vs_vars"]))
    if args.out:
        write_outputs(records, args.out, tables)
    return 0


# -- verify --------------------------------------------------------------------------

SUITES = {
    "approx-laws": lambda a: verify_mod.suite_approx_laws(a.seed),
    "taxonomy": lambda a: verify_mod.suite_taxonomy(),
    "view-conformance": lambda a: verify_mod.suite_view_conformance(a.exhaustive_bound, a.seed),
    "dispatch-equivalence": lambda a: verify_mod.suite_dispatch_equivalence(a.seed),
    "propagator-completeness": lambda a: verify_mod.suite_completeness(seed=a.seed),
    "status-audit": lambda a: verify_mod.suite_status_audit(seed=a.seed),
    "variant-equality": lambda a: verify_mod.suite_variant_equality(),
}
MAX_EXIT = 100


def cmd_verify(args) -> int:
    if not 1 <= args.exhaustive_bound <= verify_mod.MAX_EXHAUSTIVE_BOUND:
        raise UsageError(f"--exhaustive-bound must be in 1..{verify_mod.MAX_EXHAUSTIVE_BOUND}")
    if args.seed is None:
        args.seed = env_seed(verify_mod.DEFAULT_SEED)
    names = args.only.split(",") if args.only else list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    failing = 0
    for name in names:
        res = SUITES[name](args)
        print(f"{'PASS' if res.ok else 'FAIL'} {res.name} ({res.seconds:.1f}s)")
        for line in res.lines:
            print(f"    {line}")
        sys.stdout.flush()
        failing += not res.ok
    return min(failing, MAX_EXIT)


# -- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="boxview", description="Box view propagation experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="solve one instance and print a JSON record")
    probs = solve.add_subparsers(dest="problem", required=True, parser_class=_Parser)
    for name, cls in PROBLEMS.items():
        sp = probs.add_parser(name)
        for f in fields(cls):
            kind = str if f.name == "metric" else int
            sp.add_argument(f"--{f.name}", type=kind, default=None)
        sp.add_argument("--variant", default=ModelVariant.VIEWS_STATIC.value,
                        help=", ".join(v.value for v in ModelVariant))
        sp.add_argument("--brancher", default=None, help="VAR[:VALUE], e.g. first-fail:bisect")
        sp.add_argument("--time-limit", type=float, default=None, help="seconds")
        sp.add_argument("--all-solutions", action="store_true")
        sp.add_argument("--balanced", action="store_true", help="balanced binary sums")
        sp.add_argument("--dump-views", action="store_true", help="posted views to stderr")
        sp.add_argument("--dump-model", action="store_true", help="model dump to stderr")
        sp.set_defaults(func=cmd_solve)

    bench = sub.add_parser("bench", help="run a suite under several variants")
    bench.add_argument("--suite", default=None, help="JSON array of instance specs")
    bench.add_argument("--full", action="store_true", help="use the full-size shipped suite")
    bench.add_argument("--variants", default="all", help="comma list, 'all' or 'reported'")
    bench.add_argument("--repeats", type=int, default=10, help="minimum repetitions")
    bench.add_argument("--max-repeats", type=int, default=30)
    bench.add_argument("--threshold", type=float, default=0.02, help="relative stddev to stop at")
    bench.add_argument("--time-limit", type=float, default=60.0, help="seconds per run")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--out", default=None, help="output prefix for .jsonl/.csv/.summary.json")
    bench.add_argument("--quiet", action="store_true")
    bench.set_defaults(func=cmd_bench)

    ver = sub.add_parser("verify", help="run the oracle verification suites")
    ver.add_argument("--exhaustive-bound", type=int, default=5)
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--only", default=None, help="comma list of suites")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"boxview: error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # anything else is a bug or an environment problem
        print(f"boxview: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
