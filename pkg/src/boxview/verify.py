"""Verification suites shared by ``boxview verify`` and the test suite.

Each suite returns a ``SuiteResult`` with a pass flag and printable lines.
The suites compare engine behaviour against the brute-force oracle.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .approx import (
    ApproxKind,
    Box,
    TupleSet,
    approx,
    beta_approx,
    intersect_box,
    is_phi_domain,
)
from .engine import Status, Store
from .oracle import (
    TAXONOMY_EDGES,
    box_view_propagate_ref,
    check_propagator,
    engine_propagator,
    kept_values,
    linear_eq_ext,
    relation,
    rho_box_linear,
    FuncSpec,
)
from .propagators import (
    DistinctBounds,
    EqProp,
    LeqProp,
    LinearEq,
    ModelVariant,
    MulEq,
    NeqProp,
    SumProp,
)
from .views import (
    DispatchMode,
    Kind,
    VarView,
    ViewNode,
    build_view,
    const,
    to_text,
    var,
)

DEFAULT_SEED = 20240601
MAX_EXHAUSTIVE_BOUND = 6


@dataclass
class SuiteResult:
    name: str
    ok: bool = True
    lines: list = field(default_factory=list)
    seconds: float = 0.0

    def fail(self, msg: str):
        self.ok = False
        self.lines.append("FAIL " + msg)

    def note(self, msg: str):
        self.lines.append(msg)


def _timed(fn):
    def run(*a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# -- approximation laws ----------------------------------------------------------------

# Universes small enough to enumerate every subset of.
LAW_GRIDS = (((0, 4),), ((0, 2), (0, 2)), ((0, 1), (0, 1), (0, 1)))
KINDS = (ApproxKind.IDENTITY, ApproxKind.DELTA, ApproxKind.BETA)


def _all_subsets(universe: Box) -> list[TupleSet]:
    pts = sorted(universe.tuples())
    out = []
    for mask in range(1 << len(pts)):
        out.append(TupleSet(universe.arity, frozenset(p for j, p in enumerate(pts) if mask >> j & 1)))
    return out


def law_violations(sets: list[TupleSet], pairs: bool = True) -> list[str]:
    """Check idempotency, the containment chain and monotonicity on ``sets``."""
    bad = []
    images = {}
    for s in sets:
        for k in KINDS:
            a = approx(s, k)
            images[s, k] = a
            if approx(a, k) != a:
                bad.append(f"idempotency {k.value} {s}")
            if not is_phi_domain(a, k):
                bad.append(f"image not a domain {k.value} {s}")
        if not (s <= images[s, ApproxKind.DELTA] <= images[s, ApproxKind.BETA]):
            bad.append(f"containment chain {s}")
    if pairs:
        for s1, s2 in itertools.product(sets, repeat=2):
            if s1 <= s2:
                for k in KINDS:
                    if not images[s1, k] <= images[s2, k]:
                        bad.append(f"monotonicity {k.value} {s1} {s2}")
            for k in (ApproxKind.DELTA, ApproxKind.BETA):
                both = images[s1, k] & images[s2, k]
                if approx(both, k) != both:
                    bad.append(f"intersection closure {k.value} {s1} {s2}")
    return bad


# Two sets whose approximations intersect although the sets are disjoint.
NON_DISTRIBUTIVE = (TupleSet.of((0, 0), (1, 1)), TupleSet.of((0, 1), (1, 0)))


def non_distributivity_witness(kind: ApproxKind) -> bool:
    a, b = NON_DISTRIBUTIVE
    return approx(a, kind) & approx(b, kind) != approx(a & b, kind)


@_timed
def suite_approx_laws(seed: int = DEFAULT_SEED, samples: int = 300) -> SuiteResult:
    res = SuiteResult("approx-laws")
    for grid in LAW_GRIDS:
        sets = _all_subsets(Box.of(*grid))
        bad = law_violations(sets)
        for b in bad[:3]:
            res.fail(b)
        res.note(f"{len(sets)} sets over {Box.of(*grid)}: {len(bad)} violations")
    rng = random.Random(seed)
    sampled = []
    for _ in range(samples):
        arity = rng.randint(1, 3)
        pts = list(itertools.product(range(5), repeat=arity))
        sampled.append(TupleSet(arity, frozenset(p for p in pts if rng.random() < 0.3)))
    bad = law_violations(sampled, pairs=False)
    for b in bad[:3]:
        res.fail(b)
    res.note(f"{samples} random sets over [0..4]^<=3: {len(bad)} violations")
    for k in (ApproxKind.DELTA, ApproxKind.BETA):
        if not non_distributivity_witness(k):
            res.fail(f"no non-distributivity witness for {k.value}")
    a, b = NON_DISTRIBUTIVE
    res.note(f"non-distributive pair {a} / {b}")
    box_a, box_b = Box.of((0, 5), (0, 5)), Box.of((3, 8), (-1, 2))
    if intersect_box(box_a, box_b) != Box.of((3, 5), (0, 2)):
        res.fail("box intersection")
    return res


# -- taxonomy -----------------------------------------------------------------------------


@_timed
def suite_taxonomy() -> SuiteResult:
    res = SuiteResult("taxonomy")
    names = "xyz"
    for e in TAXONOMY_EDGES:
        strong = kept_values(e.stronger, e.domain, e.variable)
        weak = kept_values(e.weaker, e.domain, e.variable)
        ok = e.value not in strong and e.value in weak
        dom = " x ".join("{" + ",".join(map(str, sorted(d))) + "}" for d in e.domain)
        line = (f"{e.stronger} -> {e.weaker}: {names[e.variable]}={e.value} on {dom}; "
                f"kept by {e.stronger}: {sorted(strong)}, by {e.weaker}: {sorted(weak)}")
        if ok:
            res.note(line)
        else:
            res.fail(line)
    real = rho_box_linear([2, 3, -1], 0, Box.of((0, 1), (0, 1), (1, 3)))
    if real[2] != Box.of((1, 3))[0]:
        res.fail(f"real relaxation pruned z: {real}")
    # box view example: idempotent inner propagation is strictly stronger
    c = linear_eq_ext([2, -1], 0)
    f = FuncSpec.scalar(2, lambda a, b: a * b).product(FuncSpec.identity(1))
    s = Box.of((2, 3), (2, 3), (9, 15)).tuples()
    strong = beta_approx(box_view_propagate_ref(c, f, s, True))
    weak = beta_approx(box_view_propagate_ref(c, f, s, False))
    res.note(f"box view example: idempotent {strong}, single pass {weak}")
    if strong != Box.of((2, 3), (2, 3), (10, 14)) or weak != Box.of((2, 3), (2, 3), (9, 15)):
        res.fail("box view propagation example")
    return res


# -- view / oracle conformance ---------------------------------------------------------

def _node(kind: Kind, arity: int, payload=None) -> ViewNode:
    return ViewNode(kind, tuple(var(f"c{j}") for j in range(arity)), payload)


def conformance_cases() -> list[tuple[str, ViewNode, bool]]:
    """(label, node over children c0.., boolean-condition flag)."""
    return [
        ("add", _node(Kind.ADD, 2), False),
        ("sub", _node(Kind.SUB, 2), False),
        ("neg", _node(Kind.NEG, 1), False),
        ("lin 3", _node(Kind.LINEAR, 1, 3), False),
        ("lin -2", _node(Kind.LINEAR, 1, -2), False),
        ("sum", _node(Kind.SUM, 2), False),
        ("mul", _node(Kind.MUL, 2), False),
        ("sqr", _node(Kind.SQR, 1), False),
        ("abs", _node(Kind.ABS, 1), False),
        ("min2", _node(Kind.MIN2, 2), False),
        ("max2", _node(Kind.MAX2, 2), False),
        ("reifeq", _node(Kind.REIF_EQ, 2), False),
        ("reifneq", _node(Kind.REIF_NEQ, 2), False),
        ("reifleq", _node(Kind.REIF_LEQ, 2), False),
        ("ite", _node(Kind.ITE, 3), True),
    ]


def _child_boxes(arity: int, bound: int, cond: bool):
    ivs = [(a, b) for a in range(-bound, bound + 1) for b in range(a, bound + 1)]
    per = [ivs] * arity
    if cond:
        per = [[(0, 0), (1, 1), (0, 1)]] + [ivs] * (arity - 1)
    return itertools.product(*per)


def check_view_kind(node: ViewNode, mode: DispatchMode, bound: int, cond: bool,
                    limit: Optional[int] = None, rng: Optional[random.Random] = None) -> list[str]:
    """Bounds equal the oracle hull; every update keeps the oracle support box."""
    names = sorted(node.variables())
    fn = FuncSpec.from_node(node, names)
    boxes = list(_child_boxes(len(names), bound, cond))
    if limit is not None and len(boxes) > limit:
        boxes = (rng or random.Random(0)).sample(boxes, limit)
    bad = []
    for box in boxes:
        st = Store()
        for nm, (lo, hi) in zip(names, box):
            st.new_var(lo, hi, nm)
        view = build_view(node, mode, st)
        pts = list(itertools.product(*(range(lo, hi + 1) for lo, hi in box)))
        vals = [fn(p)[0] for p in pts]
        lo, hi = min(vals), max(vals)
        if (view.min(), view.max()) != (lo, hi):
            bad.append(f"bounds {box}: view {(view.min(), view.max())} oracle {(lo, hi)}")
            continue
        order = sorted(range(len(pts)), key=lambda j: vals[j])
        for is_min in (True, False):
            for i in range(lo - 1, hi + 2):
                keep = [pts[j] for j in order if (vals[j] >= i if is_min else vals[j] <= i)]
                st.push()
                ok = view.upd_min(i) if is_min else view.upd_max(i)
                got = st.domains()
                st.pop()
                if not keep:
                    continue
                need = beta_approx(TupleSet(len(names), frozenset(keep)))
                inside = ok and all(a <= d.lo and d.hi <= b for (a, b), d in zip(got, need.dims))
                shrunk = all(a >= l0 and b <= h0 for (a, b), (l0, h0) in zip(got, box))
                if not inside or not shrunk:
                    op = "upd_min" if is_min else "upd_max"
                    bad.append(f"{op}({i}) on {box}: store {got if ok else 'failed'} oracle {need}")
    return bad


@_timed
def suite_view_conformance(bound: int = 5, seed: int = DEFAULT_SEED,
                           dynamic_sample: Optional[int] = None) -> SuiteResult:
    res = SuiteResult("view-conformance")
    rng = random.Random(seed)
    for label, node, cond in conformance_cases():
        bad = check_view_kind(node, DispatchMode.STATIC, bound, cond)
        bad += check_view_kind(node, DispatchMode.DYNAMIC, bound, cond, dynamic_sample, rng)
        for b in bad[:3]:
            res.fail(f"{label}: {b}")
        res.note(f"{label}: {len(bad)} violations")
    return res


# -- propagator completeness matrix -------------------------------------------------------


@dataclass
class MatrixEntry:
    name: str
    factory: Callable  # store -> propagator over variables named in ``names``
    constraint: object
    names: tuple
    universe: Box
    complete: bool = True


def _v(st, n):
    return VarView(st, st.var(n), var(n))


def matrix_entries() -> list[MatrixEntry]:
    def sub_view(st):
        return build_view(var("x") - var("y"), DispatchMode.STATIC, st)

    return [
        MatrixEntry("eq", lambda st: EqProp(_v(st, "x"), _v(st, "y")),
                    relation(2, lambda x, y: x == y), ("x", "y"), Box.of((0, 4), (0, 4))),
        MatrixEntry("leq", lambda st: LeqProp(_v(st, "x"), _v(st, "y")),
                    relation(2, lambda x, y: x <= y), ("x", "y"), Box.of((0, 4), (0, 4))),
        MatrixEntry("neq", lambda st: NeqProp(sub_view(st), 0),
                    relation(2, lambda x, y: x != y), ("x", "y"), Box.of((0, 4), (0, 4))),
        MatrixEntry("sum_eq", lambda st: SumProp([_v(st, "x"), _v(st, "y")], _v(st, "z"), "eq"),
                    relation(3, lambda x, y, z: x + y == z), ("x", "y", "z"),
                    Box.of((0, 4), (0, 4), (0, 4))),
        MatrixEntry("linear_eq",
                    lambda st: LinearEq([2, 3, -1], [_v(st, "x"), _v(st, "y"), _v(st, "z")], 0),
                    relation(3, lambda x, y, z: 2 * x + 3 * y == z), ("x", "y", "z"),
                    Box.of((0, 4), (0, 4), (0, 8))),
        MatrixEntry("distinct_bounds",
                    lambda st: DistinctBounds([_v(st, n) for n in ("a", "b", "c", "d")]),
                    relation(4, lambda *xs: len(set(xs)) == 4), ("a", "b", "c", "d"),
                    Box.of(*[(0, 4)] * 4)),
        MatrixEntry("mul_eq", lambda st: MulEq(_v(st, "x"), _v(st, "y"), _v(st, "z")),
                    relation(3, lambda x, y, z: x * y == z), ("x", "y", "z"),
                    Box.of((-2, 2), (-2, 2), (-4, 4)), complete=False),
    ]


@_timed
def suite_completeness(overrides: Optional[dict] = None, limit: int = 60000,
                       seed: int = DEFAULT_SEED) -> SuiteResult:
    """ββ check of every engine propagator; ``overrides`` replaces factories by name."""
    res = SuiteResult("propagator-completeness")
    overrides = overrides or {}
    for e in matrix_entries():
        factory = overrides.get(e.name, e.factory)
        p = engine_propagator(e.name, factory, e.names)
        rep = check_propagator(p, e.constraint, ApproxKind.BETA, ApproxKind.BETA, e.universe,
                               limit=limit, seed=seed)
        ok = rep.contracting and rep.sound and (rep.complete or not e.complete)
        line = (f"{e.name}: {rep.domains} domains, contracting={rep.contracting} "
                f"sound={rep.sound} complete={rep.complete}"
                + ("" if e.complete else " (completeness not claimed)"))
        if ok:
            res.note(line)
        else:
            res.fail(line)
            res.note(f"  counterexample: {rep.counterexample}")
    return res


# -- static / dynamic dispatch equivalence ------------------------------------------------

DISPATCH_BOUND = 6
_UNARY = ((Kind.NEG, None), (Kind.LINEAR, 3), (Kind.LINEAR, -2), (Kind.SQR, None), (Kind.ABS, None))
_BINARY = tuple((k, None) for k in (Kind.ADD, Kind.SUB, Kind.SUM, Kind.MUL, Kind.MIN2, Kind.MAX2,
                                    Kind.REIF_EQ, Kind.REIF_NEQ, Kind.REIF_LEQ))
_REIF = (Kind.REIF_EQ, Kind.REIF_NEQ, Kind.REIF_LEQ)


def dispatch_shapes(depth: int = 3) -> list[ViewNode]:
    """Every expression tree of at most ``depth`` levels (a leaf is one level).

    Leaves are placeholder variables ``_``, renamed apart later.  The
    condition of an if-then-else is a 0/1 leaf ``?`` or a reified node.
    """
    if depth <= 1:
        return [var("_")]
    sub = dispatch_shapes(depth - 1)
    conds = [var("?")] + [n for n in sub if n.kind in _REIF]
    out = [var("_")]
    out += [ViewNode(k, (a,), p) for k, p in _UNARY for a in sub]
    out += [ViewNode(k, (a, b), p) for k, p in _BINARY for a in sub for b in sub]
    out += [ViewNode(Kind.ITE, (c, t, f)) for c in conds for t in sub for f in sub]
    return out


def _rename(n: ViewNode, counter: list) -> ViewNode:
    if n.kind is Kind.VAR:
        counter[0] += 1
        prefix = "b" if n.payload == "?" else "v"
        return var(f"{prefix}{counter[0]}")
    return ViewNode(n.kind, tuple(_rename(c, counter) for c in n.children), n.payload)


def dispatch_trace(node: ViewNode, domains: dict, ops, mode: DispatchMode) -> list:
    """Bounds and store domains after each update of ``ops`` in one dispatch mode."""
    st = Store()
    for name in sorted(domains):
        st.new_var(*domains[name], name)
    view = build_view(node, mode, st)
    trace = [view.bounds()]
    for is_min, i in ops:
        ok = view.upd_min(i) if is_min else view.upd_max(i)
        trace.append((ok, st.domains()))
        if not ok:
            break
        trace.append(view.bounds())
    return trace


def _random_domain(rng: random.Random, name: str, bound: int) -> tuple[int, int]:
    if name.startswith("b"):
        return rng.choice(((0, 0), (1, 1), (0, 1)))
    a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
    return (a, b) if a <= b else (b, a)


def _random_ops(rng: random.Random, lo: int, hi: int, n: int = 3):
    return [(rng.random() < 0.5, rng.randint(lo - 1, hi + 1)) for _ in range(n)]


def check_dispatch(node: ViewNode, domains: dict, ops) -> Optional[str]:
    static = dispatch_trace(node, domains, ops, DispatchMode.STATIC)
    dynamic = dispatch_trace(node, domains, ops, DispatchMode.DYNAMIC)
    if static != dynamic:
        return f"{to_text(node)} on {domains} with {ops}: static {static} dynamic {dynamic}"
    return None


def dispatch_single_node(bound: int = DISPATCH_BOUND, seed: int = DEFAULT_SEED) -> tuple[int, list]:
    """Every one-operator view over every child interval combination in [-bound..bound]."""
    rng = random.Random(seed)
    count, bad = 0, []
    for _, node, cond in conformance_cases():
        names = sorted(node.variables())
        for box in _child_boxes(len(names), bound, cond):
            doms = dict(zip(names, box))
            lo, hi = dispatch_trace(node, doms, (), DispatchMode.STATIC)[0]
            ops = _random_ops(rng, lo, hi, 2)
            count += 1
            msg = check_dispatch(node, doms, ops)
            if msg:
                bad.append(msg)
    return count, bad


def dispatch_shapes_check(depth: int = 3, samples: int = 2, bound: int = DISPATCH_BOUND,
                          seed: int = DEFAULT_SEED) -> tuple[int, list]:
    """Every tree shape up to ``depth`` levels, ``samples`` random domain/update draws each."""
    rng = random.Random(seed)
    count, bad = 0, []
    for shape in dispatch_shapes(depth):
        node = _rename(shape, [0])
        for _ in range(samples):
            doms = {n: _random_domain(rng, n, bound) for n in node.variables()}
            lo, hi = dispatch_trace(node, doms, (), DispatchMode.STATIC)[0]
            count += 1
            msg = check_dispatch(node, doms, _random_ops(rng, lo, hi))
            if msg:
                bad.append(msg)
    return count, bad


def dispatch_random(cases: int = 2000, depth: int = 5, bound: int = DISPATCH_BOUND,
                    seed: int = DEFAULT_SEED) -> tuple[int, list]:
    """Deeper random trees with shared variables and constants."""
    rng = random.Random(seed)
    names = ["x", "y", "z"]
    bad = []
    for _ in range(cases):
        node = _random_expr(rng, names, depth)
        doms = {n: _random_domain(rng, n, bound) for n in names}
        try:
            lo, hi = dispatch_trace(node, doms, (), DispatchMode.STATIC)[0]
        except OverflowError:
            continue
        msg = check_dispatch(node, doms, _random_ops(rng, lo, hi, 4))
        if msg:
            bad.append(msg)
    return cases, bad


@_timed
def suite_dispatch_equivalence(seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("dispatch-equivalence")
    for label, (n, bad) in (("one-operator views", dispatch_single_node(seed=seed)),
                            ("tree shapes up to depth 3", dispatch_shapes_check(seed=seed)),
                            ("random deeper trees", dispatch_random(seed=seed))):
        for b in bad[:3]:
            res.fail(f"{label}: {b}")
        res.note(f"{label}: {n} cases, {len(bad)} mismatches")
    return res


# -- idempotency-status audit -----------------------------------------------------------

def neq_witness() -> tuple[Status, list]:
    """x = y1 + y2 with both in [1..2] and k = 4: the update does not persist."""
    st = Store()
    st.new_var(1, 2, "y1")
    st.new_var(1, 2, "y2")
    p = NeqProp(build_view(var("y1") + var("y2"), DispatchMode.STATIC, st), 4)
    status = p.propagate(st)
    return status, st.domains()


def _random_expr(rng: random.Random, names, depth: int) -> ViewNode:
    if depth == 0 or rng.random() < 0.3:
        return var(rng.choice(names)) if rng.random() < 0.85 else const(rng.randint(-2, 2))
    pick = rng.choice(("add", "sub", "mul", "abs", "lin", "min", "sqr", "sum"))
    a = _random_expr(rng, names, depth - 1)
    if pick in ("abs", "sqr"):
        return ViewNode(Kind.ABS if pick == "abs" else Kind.SQR, (a,))
    if pick == "lin":
        return ViewNode(Kind.LINEAR, (a,), rng.choice((-3, -2, 2, 3)))
    b = _random_expr(rng, names, depth - 1)
    if pick == "sum":
        return ViewNode(Kind.SUM, (a, b, _random_expr(rng, names, depth - 1)))
    kind = {"add": Kind.ADD, "sub": Kind.SUB, "mul": Kind.MUL, "min": Kind.MIN2}[pick]
    return ViewNode(kind, (a, b))


def _random_prop(rng: random.Random, st: Store, mode: DispatchMode):
    names = list(st.names)
    expr = lambda: build_view(_random_expr(rng, names, 2), mode, st)  # noqa: E731
    kind = rng.choice(("eq", "leq", "neq", "sum", "linear", "mul", "distinct"))
    if kind == "eq":
        return EqProp(expr(), expr())
    if kind == "leq":
        return LeqProp(expr(), expr())
    if kind == "neq":
        return NeqProp(expr(), rng.randint(-4, 8))
    if kind == "sum":
        return SumProp([expr() for _ in range(rng.randint(1, 3))], expr(), rng.choice(("eq", "le", "ge")))
    if kind == "linear":
        n = rng.randint(1, 3)
        return LinearEq([rng.choice((-3, -2, -1, 1, 2, 3)) for _ in range(n)],
                        [expr() for _ in range(n)], rng.randint(-6, 6))
    if kind == "mul":
        return MulEq(expr(), expr(), expr())
    return DistinctBounds([expr() for _ in range(rng.randint(2, 4))])


def audit_status(cases: int = 10000, seed: int = DEFAULT_SEED) -> tuple[int, int, list]:
    """(cases run, idempotent reports, violations) over random propagators and stores."""
    rng = random.Random(seed)
    idem = 0
    bad = []
    status, doms = neq_witness()
    if status is Status.IDEMPOTENT:
        bad.append(f"neq witness reported idempotent with {doms}")
    for case in range(cases):
        st = Store()
        for j in range(rng.randint(1, 4)):
            lo = rng.randint(-4, 4)
            st.new_var(lo, lo + rng.randint(0, 5), f"x{j}")
        mode = rng.choice((DispatchMode.STATIC, DispatchMode.DYNAMIC))
        try:
            p = _random_prop(rng, st, mode)
        except OverflowError:
            continue
        first = p.propagate(st)
        if first is not Status.IDEMPOTENT:
            continue
        idem += 1
        before = (st.domain_updates, st.domains())
        again = p.propagate(st)
        if st.domain_updates != before[0] or again is Status.FAILED:
            bad.append(f"case {case}: {p!r} on {before[1]} changed to {st.domains()}")
    return cases + 1, idem, bad


@_timed
def suite_status_audit(cases: int = 10000, seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("status-audit")
    status, doms = neq_witness()
    res.note(f"neq witness y1+y2 != 4 on [1..2]^2: {status.name.lower()}, domains {doms}")
    n, idem, bad = audit_status(cases, seed)
    for b in bad[:5]:
        res.fail(b)
    res.note(f"{n} cases, {idem} idempotent reports, {len(bad)} violations")
    return res


# -- variant solution-set equality ----------------------------------------------------

def tiny_specs():
    from .models import EccSpec, GolfersSpec, GolombSpec, LabsSpec, LinearSpec, NonlinearSpec
    return [
        LinearSpec(3, 2, 1, 2, seed=1),
        LinearSpec(6, 3, 2, 3, seed=5),
        NonlinearSpec(4, 2, 1, 2, 2, seed=7),
        NonlinearSpec(5, 3, 2, 2, 2, seed=3),
        GolfersSpec(2, 2, 2),
        GolombSpec(4, 6),
        GolombSpec(4, 5),
        LabsSpec(5),
        EccSpec(2, 2, 3, 2, "hamming"),
        EccSpec(4, 2, 2, 3, "lee"),
    ]


def variant_solution_sets(spec) -> dict:
    from .models import solve_model
    model = spec.build()
    out = {}
    for v in ModelVariant:
        r = solve_model(model, v, all_solutions=True, keep=True)
        out[v] = (frozenset(r.solutions), r.stats.fails)
    return out


@_timed
def suite_variant_equality() -> SuiteResult:
    res = SuiteResult("variant-equality")
    for spec in tiny_specs():
        sets = variant_solution_sets(spec)
        base = sets[ModelVariant.VARS][0]
        label = f"{type(spec).__name__} {spec.instance_id}"
        if any(s != base for s, _ in sets.values()):
            res.fail(f"{label}: solution sets differ")
        else:
            fails = {v.value: f for v, (_, f) in sets.items()}
            res.note(f"{label}: {len(base)} solutions in every variant, fails {fails}")
    return res


def run_all(bound: int = 5, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    if bound > MAX_EXHAUSTIVE_BOUND:
        raise ValueError(f"exhaustive bound {bound} exceeds {MAX_EXHAUSTIVE_BOUND}")
    return [
        suite_approx_laws(seed),
        suite_taxonomy(),
        suite_view_conformance(bound, seed),
        suite_dispatch_equivalence(seed),
        suite_completeness(seed=seed),
        suite_status_audit(seed=seed),
        suite_variant_equality(),
    ]
