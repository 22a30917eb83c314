"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines
also appear in the terminal summary of a full ``pytest`` run.
"""
import math
import sys
import time

import pytest
from test_models import ecc_count, golfers_count, golomb_exists, labs_brute_force

from boxview.approx import ApproxKind, Box, TupleSet, beta_approx
from boxview.cli import BenchOptions, load_suite, run_bench
from boxview.engine import Status, Store
from boxview.models import EccSpec, GolfersSpec, GolombSpec, LabsSpec, LinearSpec, NonlinearSpec, solve_model
from boxview.oracle import (
    TAXONOMY_CONSTRAINT,
    TAXONOMY_EDGES,
    FuncSpec,
    box_view_propagate_ref,
    check_propagator,
    engine_propagator,
    linear_eq_ext,
    phi_psi_bound,
    rho_box_linear,
    taxonomy_witness,
)
from boxview.propagators import LinearEq, ModelVariant
from boxview.verify import (
    audit_status,
    check_view_kind,
    conformance_cases,
    dispatch_random,
    dispatch_shapes_check,
    dispatch_single_node,
    matrix_entries,
    neq_witness,
    suite_approx_laws,
    variant_solution_sets,
)
from boxview.views import DispatchMode, VarView, build_view, mul, var

V = ModelVariant


def test_criterion_01_approximation_laws(criterion):
    res = suite_approx_laws()
    ok = res.ok and res.seconds < 30
    criterion("approximation laws", ok, f"{res.seconds:.1f}s; " + "; ".join(res.lines[:4]))
    assert ok, res.lines


def test_criterion_02_taxonomy(criterion):
    t0 = time.perf_counter()
    witnessed = [taxonomy_witness(e) == (True, True) for e in TAXONOMY_EDGES]
    s = TupleSet.product({0, 1}, {0}, {0, 1, 2})
    domain_vs_bounds = (phi_psi_bound(TAXONOMY_CONSTRAINT, s, ApproxKind.DELTA, ApproxKind.DELTA).proj(2) == {0, 2}
                        and phi_psi_bound(TAXONOMY_CONSTRAINT, s, ApproxKind.DELTA, ApproxKind.BETA).proj(2)
                        == {0, 1, 2})
    # the real point (0.5, 0, 1) keeps z = 1 under the relaxation
    relaxed = rho_box_linear([2, 3, -1], 0, Box.of((0, 1), (0, 1), (1, 3)))[2] == Box.of((1, 3))[0]
    pairs = {(e.stronger, e.weaker) for e in TAXONOMY_EDGES}
    incomparable = {("range", "bounds(D)"), ("bounds(D)", "range")} <= pairs
    secs = time.perf_counter() - t0
    ok = all(witnessed) and domain_vs_bounds and relaxed and incomparable and secs < 5
    criterion("taxonomy reproduction", ok, f"{sum(witnessed)}/{len(witnessed)} edges witnessed, {secs:.2f}s")
    assert ok


def test_criterion_03_view_conformance(criterion):
    t0 = time.perf_counter()
    bad = []
    for label, node, cond in conformance_cases():
        for mode in DispatchMode:
            bad += [f"{label} {mode.value}: {b}" for b in check_view_kind(node, mode, 5, cond)]
    secs = time.perf_counter() - t0
    ok = not bad and secs < 120
    criterion("view/oracle conformance", ok,
              f"{len(conformance_cases())} kinds x 2 dispatch modes over [-5..5], "
              f"{len(bad)} violations, {secs:.1f}s")
    assert ok, bad[:5]


def test_criterion_04_box_view_example(criterion):
    engine = {}
    for mode in DispatchMode:
        st = Store()
        for n, (lo, hi) in zip(("x1", "x2", "x3"), ((2, 3), (2, 3), (9, 15))):
            st.new_var(lo, hi, n)
        prod = build_view(mul(var("x1"), var("x2")), mode, st)
        st.post(LinearEq([2, -1], [prod, VarView(st, st.var("x3"))], 0))
        engine[mode] = st.domains()[2]
    f = FuncSpec.scalar(2, lambda a, b: a * b).product(FuncSpec.identity(1))
    s = Box.of((2, 3), (2, 3), (9, 15)).tuples()
    weak = beta_approx(box_view_propagate_ref(linear_eq_ext([2, -1], 0), f, s, False))
    single = (weak[2].lo, weak[2].hi)
    ok = all(d == (10, 14) for d in engine.values()) and single == (9, 15)
    criterion("box view propagation example", ok,
              f"engine x3 static {engine[DispatchMode.STATIC]}, dynamic {engine[DispatchMode.DYNAMIC]}; "
              f"single-pass reference {single}")
    assert ok


def test_criterion_05_completeness_matrix(criterion):
    beta = ApproxKind.BETA
    rows, ok = [], True
    for e in matrix_entries():
        rep = check_propagator(engine_propagator(e.name, e.factory, e.names), e.constraint, beta, beta,
                               e.universe, limit=60000)
        good = rep.exhaustive and rep.contracting and rep.sound and (rep.complete or not e.complete)
        size = math.prod(d.hi - d.lo + 1 for d in e.universe)
        ok &= good and size <= 5 ** 4
        rows.append(f"{e.name}:{'ok' if good else 'FAIL'}")
    criterion("propagator completeness matrix", ok, " ".join(rows))
    assert ok


def test_criterion_06_status_audit(criterion):
    status, doms = neq_witness()
    n, idem, bad = audit_status(cases=10000)
    ok = status is not Status.IDEMPOTENT and not bad and n >= 10000
    criterion("idempotency-status audit", ok,
              f"{n} cases, {idem} idempotent reports, {len(bad)} violations; witness {status.name.lower()}")
    assert ok, bad[:5]


def test_criterion_07_dispatch_equivalence(criterion):
    parts = {
        "one-operator views over [-6..6]": dispatch_single_node(),
        "all depth-3 shapes": dispatch_shapes_check(samples=2),
        "random deeper trees": dispatch_random(cases=2000),
    }
    ok = all(not bad for _, bad in parts.values())
    criterion("dispatch equivalence", ok, ", ".join(f"{k}: {n} cases/{len(b)} bad" for k, (n, b) in parts.items()))
    assert ok


DESK = [LinearSpec(3, 2, 1, 2, seed=1), LinearSpec(6, 3, 2, 3, seed=5), NonlinearSpec(4, 2, 1, 2, 2, seed=7),
        NonlinearSpec(5, 3, 2, 2, 2, seed=3), NonlinearSpec(6, 3, 2, 3, 2, seed=4), GolombSpec(4, 6),
        GolombSpec(5, 12), GolombSpec(6, 17), GolfersSpec(2, 2, 2), GolfersSpec(3, 2, 2), LabsSpec(5),
        LabsSpec(8), EccSpec(2, 2, 3, 2), EccSpec(2, 3, 4, 2), EccSpec(4, 2, 2, 3, "lee")]


def test_criterion_08_variant_equivalence(criterion):
    differ, ratios = [], []
    for spec in DESK:
        sets = variant_solution_sets(spec)
        base, vars_fails = sets[V.VARS]
        if any(sols != base for sols, _ in sets.values()):
            differ.append(spec.instance_id)
        for v, (_, fails) in sets.items():
            if v.uses_views and fails != vars_fails:
                ratios.append(fails / vars_fails if vars_fails else float("inf"))
    ok = not differ and all(1.0 <= r <= 1.25 for r in ratios)
    criterion("variant search equivalence", ok,
              f"{len(DESK)} instances x {len(V)} variants, differing sets {differ}, "
              f"differing fail counts {len(ratios)}")
    assert ok


def test_criterion_09_benchmark_correctness(criterion):
    wrong = []
    for m, opt in {3: 3, 4: 6, 5: 11, 6: 17}.items():
        for length in (opt - 1, opt):
            want = "sat" if golomb_exists(m, length) else "unsat"
            for v in (V.VARS, V.VIEWS_STATIC):
                if solve_model(GolombSpec(m, length).build(), v).status != want:
                    wrong.append(f"golomb {m}-{length} {v.value}")
    for n in range(2, 15):
        if solve_model(LabsSpec(n).build(), V.VIEWS_STATIC).objective != labs_brute_force(n):
            wrong.append(f"labs {n}")
    counted = [(s, ecc_count) for s in (EccSpec(2, 2, 3, 2), EccSpec(4, 2, 2, 3, "lee"))]
    counted += [(s, golfers_count) for s in (GolfersSpec(2, 2, 2), GolfersSpec(3, 2, 2))]
    for spec, oracle in counted:
        want = oracle(spec)
        for v in (V.VARS_GLOBAL, V.VIEWS_STATIC):
            if solve_model(spec.build(), v, all_solutions=True).stats.solutions != want:
                wrong.append(f"{spec.instance_id} {v.value}")
    ok = not wrong
    criterion("benchmark correctness", ok, f"Golomb m<=6, LABS n<=14, ECC and golfers counts; wrong: {wrong}")
    assert ok


def _share(flags) -> float:
    return sum(flags) / len(flags) if flags else 0.0


def test_criterion_10_performance_direction(criterion):
    t0 = time.perf_counter()
    records = run_bench(load_suite(None), list(V), BenchOptions())
    secs = time.perf_counter() - t0
    table: dict = {}
    for r in records:
        if r.get("status") in ("sat", "unsat", "optimal"):
            table.setdefault((r["problem"], r["instance"]), {})[r["variant"]] = r
    static_dyn = [t[s.value]["time_ms"] <= t[d.value]["time_ms"]
                  for t in table.values()
                  for s, d in ((V.VIEWS_STATIC, V.VIEWS_DYNAMIC), (V.VIEWS_STATIC_GLOBAL, V.VIEWS_DYNAMIC_GLOBAL))
                  if s.value in t and d.value in t]
    views_vars = []
    counters = []
    for (prob, _), t in table.items():
        views = [r["time_ms"] for v, r in t.items() if V(v).uses_views]
        plain = [r["time_ms"] for v, r in t.items() if not V(v).uses_views]
        if prob in ("nonlinear", "labs"):
            views_vars.append(min(views) < min(plain))
        if prob in ("nonlinear", "golomb"):
            a, b = t[V.VIEWS_STATIC.value], t[V.VARS.value]
            counters.append(a["propagations"] < b["propagations"] and a["domain_updates"] < b["domain_updates"])
    a, b, c = _share(static_dyn), _share(views_vars), _share(counters)
    ok = a >= 0.8 and b >= 0.8 and c == 1.0 and secs < 15 * 60 and len(table) == len(load_suite(None))
    criterion("performance direction", ok,
              f"(a) static<=dynamic {a:.0%} of {len(static_dyn)}, (b) views<vars {b:.0%} of {len(views_vars)}, "
              f"(c) p,u views<vars {c:.0%} of {len(counters)}, suite {secs / 60:.1f} min")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
