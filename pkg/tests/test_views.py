import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxview.engine import Event, Store
from boxview.verify import (
    check_view_kind,
    conformance_cases,
    dispatch_random,
    dispatch_shapes,
    dispatch_shapes_check,
    dispatch_single_node,
)
from boxview.views import (
    DispatchMode,
    Kind,
    ViewNode,
    abs_,
    add,
    add_chain,
    build_view,
    const,
    evaluate,
    ite,
    lin,
    max2,
    min2,
    mul,
    neg,
    parse,
    reif_eq,
    sqr,
    sub,
    sum_,
    to_text,
    trigger_map,
    var,
)

MODES = list(DispatchMode)
KIND_CASES = [pytest.param(*case, id=case[0]) for case in conformance_cases()]
x, y, z = var("x"), var("y"), var("z")


def store(**doms) -> Store:
    s = Store()
    for name, (lo, hi) in doms.items():
        s.new_var(lo, hi, name)
    return s


def dom(s: Store, name: str) -> tuple[int, int]:
    v = s.var(name)
    return s.lo[v], s.hi[v]


@pytest.fixture(params=MODES, ids=lambda m: m.value)
def mode(request):
    return request.param


def test_leaf_views(mode):
    s = store(x=(1, 3))
    five = build_view(const(5), mode, s)
    assert (five.min(), five.max()) == (5, 5)
    assert five.upd_min(5) and not five.upd_min(6)
    vx = build_view(x, mode, s)
    assert (vx.min(), vx.max()) == (1, 3)


def test_a_plus_b_times_c(mode):
    s = store(a=(1, 2), b=(2, 3), c=(-1, 4))
    v = build_view(add(var("a"), mul(var("b"), var("c"))), mode, s)
    assert (v.min(), v.max()) == (1 - 3, 2 + 12)


def test_add_examples(mode):
    s = store(x=(1, 3), y=(2, 5))
    v = build_view(add(x, y), mode, s)
    assert (v.min(), v.max()) == (3, 8)
    assert v.upd_max(4)
    assert dom(s, "x") == (1, 2) and dom(s, "y") == (2, 3)


def test_neg_example(mode):
    s = store(x=(1, 3))
    v = build_view(neg(x), mode, s)
    assert (v.min(), v.max()) == (-3, -1)
    assert v.upd_min(-2)
    assert dom(s, "x") == (1, 2)


@pytest.mark.parametrize("child,expected", [((2, 5), (2, 5)), ((-5, -2), (2, 5)), ((-3, 2), (0, 3))])
def test_abs_bounds(mode, child, expected):
    s = store(x=child)
    v = build_view(abs_(x), mode, s)
    assert (v.min(), v.max()) == expected


def test_abs_update_in_mixed_case(mode):
    s = store(x=(-3, 2))
    assert build_view(abs_(x), mode, s).upd_max(1)
    assert dom(s, "x") == (-1, 1)


def test_mul_examples(mode):
    s = store(x=(2, 3), y=(2, 3))
    v = build_view(mul(x, y), mode, s)
    assert (v.min(), v.max()) == (4, 9)
    assert not v.upd_min(10)
    s = store(x=(-2, 3))
    assert (lambda w: (w.min(), w.max()))(build_view(sqr(x), mode, s)) == (0, 9)


def test_min2_examples(mode):
    s = store(x=(1, 5), y=(3, 4))
    v = build_view(min2(x, y), mode, s)
    assert (v.min(), v.max()) == (1, 4)
    assert v.upd_min(3)
    assert dom(s, "x") == (3, 5) and dom(s, "y") == (3, 4)
    s = store(x=(1, 5), y=(3, 4))
    assert build_view(min2(x, y), mode, s).upd_max(2)
    assert dom(s, "x") == (1, 2) and dom(s, "y") == (3, 4)


def test_max2_is_dual(mode):
    s = store(x=(1, 5), y=(3, 4))
    v = build_view(max2(x, y), mode, s)
    assert (v.min(), v.max()) == (3, 5)
    assert v.upd_min(5)
    assert dom(s, "x") == (5, 5)


def test_reified_examples(mode):
    s = store(x=(2, 2), y=(2, 2))
    v = build_view(reif_eq(x, y), mode, s)
    assert (v.min(), v.max()) == (1, 1)
    s = store(x=(0, 1), y=(3, 4))
    v = build_view(reif_eq(x, y), mode, s)
    assert (v.min(), v.max()) == (0, 0)
    s = store(x=(1, 4), y=(3, 6))
    assert build_view(reif_eq(x, y), mode, s).upd_min(1)
    assert dom(s, "x") == (3, 4) and dom(s, "y") == (3, 4)


def test_ite_examples(mode):
    s = store(c=(0, 1), t=(1, 2), f=(5, 6))
    node = ite(var("c"), var("t"), var("f"))
    v = build_view(node, mode, s)
    assert (v.min(), v.max()) == (1, 6)
    assert not v.upd_max(0)
    s = store(c=(1, 1), t=(1, 2), f=(5, 6))
    v = build_view(node, mode, s)
    assert (v.min(), v.max()) == (1, 2)


def test_linear_rounds_inward(mode):
    s = store(x=(-5, 5))
    v = build_view(lin(3, x), mode, s)
    assert v.upd_min(4) and v.upd_max(10)
    assert dom(s, "x") == (2, 3)
    s = store(x=(-5, 5))
    assert build_view(lin(-2, x), mode, s).upd_min(3)
    assert dom(s, "x") == (-5, -2)


def test_unknown_variable_is_an_error(mode):
    with pytest.raises(KeyError):
        build_view(add(x, var("nope")), mode, store(x=(0, 1)))


def test_trigger_map_examples():
    s = store(x=(0, 3), y=(0, 3))
    both = (Event.MIN_CHANGE, Event.MAX_CHANGE)
    vx, vy = s.var("x"), s.var("y")
    assert trigger_map(add(x, y), both, s) == {(vx, e) for e in both} | {(vy, e) for e in both}
    assert trigger_map(neg(x), Event.MIN_CHANGE, s) == {(vx, Event.MAX_CHANGE)}
    assert trigger_map(const(4), both, s) == set()


def test_trigger_map_ite_keeps_branches_until_condition_is_ground():
    s = store(c=(0, 1), t=(0, 3), f=(0, 3))
    node = ite(var("c"), var("t"), var("f"))
    names = lambda trig: {s.names[v] for v, _ in trig}  # noqa: E731
    assert names(trigger_map(node, Event.MIN_CHANGE, s)) == {"c", "t", "f"}
    s.set_lo(s.var("c"), 1)
    assert names(trigger_map(node, Event.MIN_CHANGE, s)) == {"c", "t"}


def test_add_chain_shapes():
    xs = [var(f"x{i}") for i in range(5)]
    left = add_chain(xs)
    assert to_text(left).count("(add") == 4
    assert evaluate(add_chain(xs, balanced=True), {f"x{i}": i for i in range(5)}) == 10


def test_text_form_example():
    assert to_text(add(var("x1"), mul(var("x2"), var("x3")))) == "(add (var x1) (mul (var x2) (var x3)))"


def _trees():
    leaves = st.one_of(st.sampled_from("abc").map(var), st.integers(-9, 9).map(const))

    def extend(kids):
        return st.one_of(
            st.tuples(st.sampled_from([Kind.NEG, Kind.ABS, Kind.SQR]), kids).map(
                lambda t: ViewNode(t[0], (t[1],))),
            st.tuples(st.sampled_from([-3, 2, 5]), kids).map(lambda t: lin(*t)),
            st.tuples(st.sampled_from([Kind.ADD, Kind.SUB, Kind.MUL, Kind.MIN2, Kind.MAX2,
                                       Kind.REIF_EQ, Kind.REIF_NEQ, Kind.REIF_LEQ]), kids, kids).map(
                lambda t: ViewNode(t[0], (t[1], t[2]))),
            st.lists(kids, min_size=1, max_size=4).map(sum_),
            st.tuples(kids, kids, kids).map(lambda t: ite(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(_trees())
def test_text_round_trip(node):
    assert parse(to_text(node)) == node


@settings(max_examples=200, deadline=None)
@given(_trees(), st.tuples(*[st.integers(-4, 4)] * 3))
def test_ground_views_evaluate_exactly(node, point):
    env = dict(zip("abc", point))
    s = store(**{k: (v, v) for k, v in env.items()})
    for m in MODES:
        v = build_view(node, m, s)
        assert v.min() == v.max() == evaluate(node, env)


def test_operator_sugar():
    assert x + 1 == add(x, const(1))
    assert 2 * x == lin(2, x)
    assert x - y == sub(x, y)
    assert -x == neg(x)
    assert abs(x) == abs_(x)


@pytest.mark.parametrize("label,node,cond", KIND_CASES)
def test_view_conformance_static_exhaustive(label, node, cond):
    assert check_view_kind(node, DispatchMode.STATIC, 4, cond) == []


@pytest.mark.parametrize("label,node,cond", KIND_CASES)
def test_view_conformance_dynamic_exhaustive(label, node, cond):
    assert check_view_kind(node, DispatchMode.DYNAMIC, 3, cond) == []


def test_dispatch_shape_counts():
    # 5 unary + 9 binary kinds over a leaf, plus if-then-else with a 0/1 leaf condition
    assert len(dispatch_shapes(2)) == 1 + 5 + 9 + 1
    assert len(dispatch_shapes(3)) == 3409


def test_dispatch_equivalence_single_operator_exhaustive():
    n, bad = dispatch_single_node()
    assert n > 90000 and bad == []


def test_dispatch_equivalence_all_depth3_shapes():
    n, bad = dispatch_shapes_check(samples=2)
    assert n == 2 * 3409 and bad == []


def test_dispatch_equivalence_random_deep():
    _, bad = dispatch_random(cases=1500)
    assert bad == []
