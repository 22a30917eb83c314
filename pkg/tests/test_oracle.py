import pytest

from boxview.approx import ApproxKind, Box, TupleSet, UnsupportedApprox
from boxview.engine import Store
from boxview.oracle import (
    TAXONOMY_CONSTRAINT,
    TAXONOMY_EDGES,
    FuncSpec,
    PropagatorSpec,
    box_view_propagate_ref,
    check_propagator,
    contracting_object,
    engine_propagator,
    exact_fixpoint,
    identity_propagator,
    image,
    kept_values,
    linear_eq_ext,
    phi_psi_bound,
    preimage,
    relation,
    rho_box_linear,
    taxonomy_witness,
    view_propagate,
)
from boxview.propagators import SumProp
from boxview.verify import suite_taxonomy
from boxview.views import VarView

D, B = ApproxKind.DELTA, ApproxKind.BETA
succ = FuncSpec.scalar(1, lambda x: x + 1)
plus = FuncSpec.scalar(2, lambda x, y: x + y)
equal = relation(2, lambda a, b: a == b)


def test_image_examples():
    assert image(succ, TupleSet.unary({1, 2, 3})) == TupleSet.unary({2, 3, 4})
    assert image(plus, TupleSet.product({1, 2, 3}, {1, 2, 3})) == TupleSet.unary(range(2, 7))
    assert image(succ, TupleSet(1, frozenset())) == TupleSet(1, frozenset())


def test_preimage_examples():
    assert preimage(succ, TupleSet.unary({2, 3, 4}), Box.of((0, 10))) == TupleSet.unary({1, 2, 3})
    square = FuncSpec.scalar(1, lambda x: x * x)
    assert preimage(square, TupleSet.unary({4}), Box.of((-5, 5))) == TupleSet.unary({-2, 2})
    assert not preimage(square, TupleSet(1, frozenset()), Box.of((-5, 5)))


def test_contracting_object_examples():
    s1 = TupleSet.product({1, 2, 3}, {1, 2, 3})
    assert contracting_object(plus, TupleSet.unary(range(2, 7)), s1) == s1
    assert contracting_object(plus, TupleSet.unary({2}), s1) == TupleSet.of((1, 1))
    assert not contracting_object(plus, TupleSet(1, frozenset()), s1)


def test_exact_fixpoint_examples():
    assert exact_fixpoint(equal, TupleSet.of((3, 3), (9, 6))) == TupleSet.of((3, 3))
    inside = TupleSet.of((1, 1), (2, 2))
    assert exact_fixpoint(equal, inside) == inside
    assert not exact_fixpoint(equal, TupleSet.of((1, 2)))


def test_phi_psi_bound_examples():
    s = TupleSet.product({0, 1}, {0}, {0, 1, 2})
    assert phi_psi_bound(TAXONOMY_CONSTRAINT, s, D, D).proj(2) == {0, 2}
    assert phi_psi_bound(TAXONOMY_CONSTRAINT, s, D, B).proj(2) == {0, 1, 2}
    anything = relation(3, lambda *t: True)
    assert s <= phi_psi_bound(anything, s, B, B)
    with pytest.raises(UnsupportedApprox):
        phi_psi_bound(TAXONOMY_CONSTRAINT, s, ApproxKind.RHO_LINEAR, B)


def test_view_propagate_example():
    f = FuncSpec.scalar(3, lambda a, b, c: a + b).fanout(FuncSpec.projection(3, 2))
    s = TupleSet.of((1, 2, 3), (4, 5, 6))
    assert view_propagate(equal, f, s) == TupleSet.of((1, 2, 3))
    sol = TupleSet.of((1, 2, 3))
    assert view_propagate(equal, f, sol) == sol
    assert not view_propagate(equal, f, TupleSet.of((4, 5, 6)))


def test_box_view_reference_idempotent_vs_single_pass():
    f = FuncSpec.scalar(3, lambda a, b, c: a * b).fanout(FuncSpec.projection(3, 2))
    double = linear_eq_ext([2, -1], 0)
    s = Box.of((2, 3), (2, 3), (9, 15)).tuples()
    strong = box_view_propagate_ref(double, f, s)
    weak = box_view_propagate_ref(double, f, s, inner_idempotent=False)
    assert Box.of(*[(min(v), max(v)) for v in (strong.proj(i) for i in range(3))]) == \
        Box.of((2, 3), (2, 3), (10, 14))
    assert weak == s
    point = TupleSet.of((2, 3, 12))
    assert box_view_propagate_ref(double, f, point) == point


def test_rho_box_linear_examples():
    b = Box.of((0, 1), (0, 1), (1, 3))
    assert rho_box_linear([2, 3, -1], 0, b) == b
    s = b.tuples()
    bz = phi_psi_bound(TAXONOMY_CONSTRAINT, s, B, B)
    assert Box.of(*[(min(bz.proj(i)), max(bz.proj(i))) for i in range(3)]) == \
        Box.of((0, 1), (0, 1), (2, 3))
    point = Box.of((1, 1), (0, 0), (2, 2))
    assert rho_box_linear([2, 3, -1], 0, point) == point


@pytest.mark.parametrize("edge", TAXONOMY_EDGES, ids=lambda e: f"{e.stronger}>{e.weaker}")
def test_taxonomy_edges(edge):
    assert taxonomy_witness(edge) == (True, True)


def test_taxonomy_named_witnesses():
    assert kept_values("domain", ({0, 1}, {0}, {0, 1, 2}), 2) == {0, 2}
    assert kept_values("bounds(D)", ({0, 1}, {0}, {0, 1, 2}), 2) == {0, 1, 2}
    assert kept_values("bounds(Z)", ({0, 1}, {0, 1}, {1, 2, 3}), 2) == {2, 3}
    assert kept_values("bounds(R)", ({0, 1}, {0, 1}, {1, 2, 3}), 2) == {1, 2, 3}


def test_taxonomy_suite_passes():
    assert suite_taxonomy().ok


def _sum_factory(st: Store):
    return SumProp([VarView(st, st.var("x")), VarView(st, st.var("y"))], VarView(st, st.var("z")))


def test_check_propagator_sum_eq_is_bounds_complete():
    p = engine_propagator("sum_eq", _sum_factory, ["x", "y", "z"])
    c = relation(3, lambda x, y, z: x + y == z)
    rep = check_propagator(p, c, B, B, Box.of((0, 4), (0, 4), (0, 4)))
    assert rep.exhaustive and rep.ok


def test_check_propagator_identity_is_not_complete():
    c = relation(2, lambda x, y: x < y)
    rep = check_propagator(identity_propagator(), c, D, D, Box.of((0, 2), (0, 2)))
    assert rep.contracting and rep.sound and not rep.complete
    assert rep.counterexample["property"] == "complete"


def test_check_propagator_empty_is_unsound():
    wipe = PropagatorSpec("wipe", lambda s: TupleSet(s.arity, frozenset()))
    c = relation(2, lambda x, y: x < y)
    rep = check_propagator(wipe, c, B, B, Box.of((0, 2), (0, 2)))
    assert not rep.sound and rep.counterexample["property"] == "sound"
