import pytest

from boxview.approx import ApproxKind
from boxview.engine import Status, Store
from boxview.propagators import (
    Constraint,
    DistinctBounds,
    EqProp,
    LeqProp,
    LinearEq,
    ModelVariant,
    MulEq,
    NeqProp,
    ObjectiveCut,
    SumProp,
    hall_filter,
    post_decomposed,
)
from boxview.oracle import check_propagator, engine_propagator
from boxview.verify import audit_status, matrix_entries, neq_witness
from boxview.views import (
    ConstView,
    DispatchMode,
    VarView,
    abs_,
    build_view,
    const,
    lin,
    sub,
    sum_,
    var,
)

BETA = ApproxKind.BETA


def store(**doms) -> Store:
    s = Store()
    for name, (lo, hi) in doms.items():
        s.new_var(lo, hi, name)
    return s


def v(s: Store, name: str) -> VarView:
    return VarView(s, s.var(name))


def run(s: Store, p) -> Status:
    return p.propagate(s)


def test_eq_examples():
    s = store(x=(1, 4), y=(3, 6))
    run(s, EqProp(v(s, "x"), v(s, "y")))
    assert s.domains() == [(3, 4), (3, 4)]
    s = store(x=(2, 2), y=(2, 2))
    assert run(s, EqProp(v(s, "x"), v(s, "y"))) is Status.IDEMPOTENT
    s = store(x=(1, 2), y=(5, 6))
    assert run(s, EqProp(v(s, "x"), v(s, "y"))) is Status.FAILED


def test_neq_examples():
    s = store(x=(4, 7))
    assert run(s, NeqProp(v(s, "x"), 4)) is Status.IDEMPOTENT
    assert s.domains() == [(5, 7)]
    status, doms = neq_witness()
    assert status is Status.SUSPEND and doms == [(1, 2), (1, 2)]
    s = store(x=(4, 4))
    assert run(s, NeqProp(v(s, "x"), 4)) is Status.FAILED


def test_leq_examples():
    s = store(x=(3, 9), y=(1, 5))
    run(s, LeqProp(v(s, "x"), v(s, "y")))
    assert s.domains() == [(3, 5), (3, 5)]
    s = store(x=(1, 2), y=(2, 4))
    assert run(s, LeqProp(v(s, "x"), v(s, "y"))) is Status.IDEMPOTENT
    assert s.domains() == [(1, 2), (2, 4)]
    s = store(x=(5, 6), y=(1, 4))
    assert run(s, LeqProp(v(s, "x"), v(s, "y"))) is Status.FAILED


def test_sum_examples():
    s = store(x=(1, 3), y=(2, 5), z=(0, 4))
    assert s.post(SumProp([v(s, "x"), v(s, "y")], v(s, "z")))
    assert s.domains() == [(1, 2), (2, 3), (3, 4)]
    s = store(x=(1, 1), y=(2, 2), z=(3, 3))
    assert run(s, SumProp([v(s, "x"), v(s, "y")], v(s, "z"))) is Status.IDEMPOTENT
    s = store(x=(3, 4), y=(2, 5), z=(0, 4))
    assert run(s, SumProp([v(s, "x"), v(s, "y")], v(s, "z"))) is Status.FAILED


def test_sum_inequalities():
    s = store(x=(0, 5), y=(0, 5))
    assert s.post(SumProp([v(s, "x"), v(s, "y")], ConstView(3), "le"))
    assert s.domains() == [(0, 3), (0, 3)]
    s = store(x=(0, 5), y=(0, 1))
    assert s.post(SumProp([v(s, "x"), v(s, "y")], ConstView(5), "ge"))
    assert s.domains() == [(4, 5), (0, 1)]


def test_linear_examples():
    s = store(x=(0, 1), y=(0, 1), z=(0, 5))
    assert s.post(LinearEq([2, 3, -1], [v(s, "x"), v(s, "y"), v(s, "z")], 0))
    assert s.domains() == [(0, 1), (0, 1), (0, 5)]
    s = store(x=(0, 1), y=(0, 1), z=(1, 1))
    assert not s.post(LinearEq([2, 3, -1], [v(s, "x"), v(s, "y"), v(s, "z")], 0))
    s = store(x=(-9, 9))
    assert s.post(LinearEq([1], [v(s, "x")], 4))
    assert s.domains() == [(4, 4)]
    with pytest.raises(ValueError):
        LinearEq([1, 0], [v(s, "x"), v(s, "x")], 0)


def test_mul_examples():
    s = store(x=(2, 3), y=(2, 3), z=(9, 15))
    assert s.post(MulEq(v(s, "x"), v(s, "y"), v(s, "z")))
    assert s.domains() == [(3, 3), (3, 3), (9, 9)]
    s = store(x=(0, 0), y=(-4, 7), z=(-50, 50))
    assert s.post(MulEq(v(s, "x"), v(s, "y"), v(s, "z")))
    assert s.domains()[2] == (0, 0)
    s = store(x=(2, 2), y=(3, 3), z=(1, 1))
    assert not s.post(MulEq(v(s, "x"), v(s, "y"), v(s, "z")))


def test_distinct_examples():
    s = store(a=(1, 2), b=(1, 2), c=(1, 3))
    assert s.post(DistinctBounds([v(s, n) for n in "abc"]))
    assert s.domains()[2] == (3, 3)
    s = store(a=(1, 1), b=(2, 2), c=(3, 3))
    assert run(s, DistinctBounds([v(s, n) for n in "abc"])) is Status.IDEMPOTENT
    s = store(a=(1, 2), b=(1, 2), c=(1, 2))
    assert not s.post(DistinctBounds([v(s, n) for n in "abc"]))


def test_hall_filter_pushes_both_sides():
    lo, hi = [2, 2, 1, 1], [3, 3, 4, 4]
    assert hall_filter(lo, hi)
    assert lo[2:] == [1, 1] and hi[2:] == [4, 4]
    lo, hi = [1, 1, 1], [2, 2, 3]
    assert hall_filter(lo, hi)
    assert (lo[2], hi[2]) == (3, 3)


def test_distinct_over_views():
    s = store(x=(0, 3), y=(0, 3))
    diff = build_view(sub(var("x"), var("y")), DispatchMode.STATIC, s)
    ok = s.post(DistinctBounds([diff, ConstView(0)]))
    assert ok and s.domains() == [(0, 3), (0, 3)]


def test_objective_cut():
    s = store(x=(0, 9))
    cut = ObjectiveCut(v(s, "x"))
    assert s.post(cut) and s.domains() == [(0, 9)]
    cut.bound = 4
    s.schedule(cut)
    assert s.fixpoint() and s.domains() == [(0, 4)]


def test_box_view_propagation_reaches_example_box():
    for mode in DispatchMode:
        s = store(x1=(2, 3), x2=(2, 3), x3=(9, 15))
        prod = build_view(var("x1") * var("x2"), mode, s)
        assert s.post(LinearEq([2, -1], [prod, v(s, "x3")], 0))
        assert s.domains() == [(2, 3), (2, 3), (10, 14)]


def _counts(c: Constraint, variant: ModelVariant, **doms):
    s = store(**doms)
    d = post_decomposed(c, variant, s)
    return len(d.aux), len(d.propagators)


def test_decomposition_counts():
    x1, x2, x3 = var("x1"), var("x2"), var("x3")
    c = Constraint("eq", (abs_(sub(x1, x2)), lin(2, x3)))
    doms = dict(x1=(0, 5), x2=(0, 5), x3=(0, 5))
    assert _counts(c, ModelVariant.VIEWS_STATIC, **doms) == (0, 1)
    assert _counts(c, ModelVariant.VARS, **doms) == (3, 4)
    n = 6
    names = {f"x{i}": (-3, 3) for i in range(n)}
    total = Constraint("eq", (sum_(var(k) for k in names), const(0)))
    assert _counts(total, ModelVariant.VARS, **names)[0] == n - 2
    assert _counts(total, ModelVariant.VARS_GLOBAL, **names) == (0, 1)


@pytest.mark.parametrize("entry", matrix_entries(), ids=lambda e: e.name)
def test_completeness_matrix(entry):
    p = engine_propagator(entry.name, entry.factory, entry.names)
    rep = check_propagator(p, entry.constraint, BETA, BETA, entry.universe, limit=60000)
    assert rep.exhaustive and rep.contracting and rep.sound, rep.counterexample
    if entry.complete:
        assert rep.complete, rep.counterexample


def test_status_audit_small():
    n, idem, bad = audit_status(cases=2000, seed=7)
    assert bad == [] and idem > 500
