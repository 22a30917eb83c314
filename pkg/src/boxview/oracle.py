"""Reference semantics over explicit tuple sets.

Everything here is deliberately naive: functions are evaluated tuple by
tuple and propagation is computed by enumeration.  The engine is tested
against these definitions.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Callable, Iterable, Optional, Sequence

from .approx import (
    MAX_MATERIALIZE,
    ApproxKind,
    Box,
    Interval,
    MaterializationError,
    TupleSet,
    UnsupportedApprox,
    approx,
    beta_approx,
    conv,
)
from .views import ViewNode, evaluate


@dataclass(frozen=True)
class FuncSpec:
    """A total function from ``in_arity``-tuples to ``out_arity``-tuples."""

    in_arity: int
    out_arity: int
    eval: Callable[[tuple], tuple]

    def __call__(self, t: tuple) -> tuple:
        return self.eval(tuple(t))

    @classmethod
    def scalar(cls, arity: int, fn: Callable[..., int]) -> FuncSpec:
        return cls(arity, 1, lambda t: (fn(*t),))

    @classmethod
    def projection(cls, arity: int, i: int) -> FuncSpec:
        return cls(arity, 1, lambda t: (t[i],))

    @classmethod
    def identity(cls, arity: int) -> FuncSpec:
        return cls(arity, arity, lambda t: t)

    @classmethod
    def from_node(cls, node: ViewNode, names: Sequence[str]) -> FuncSpec:
        names = list(names)
        return cls(len(names), 1, lambda t: (evaluate(node, dict(zip(names, t))),))

    @classmethod
    def tupled(cls, nodes: Sequence[ViewNode], names: Sequence[str]) -> FuncSpec:
        """The function x -> (n1(x), ..., nk(x)) over shared inputs."""
        names = list(names)
        return cls(len(names), len(nodes),
                   lambda t: tuple(evaluate(n, dict(zip(names, t))) for n in nodes))

    def compose(self, inner: FuncSpec) -> FuncSpec:
        """self after inner."""
        if inner.out_arity != self.in_arity:
            raise ValueError("arity mismatch in composition")
        return FuncSpec(inner.in_arity, self.out_arity, lambda t: self.eval(inner.eval(t)))

    def product(self, other: FuncSpec) -> FuncSpec:
        """(x, y) -> (self(x), other(y)) with x the first ``self.in_arity`` inputs."""
        k = self.in_arity
        return FuncSpec(k + other.in_arity, self.out_arity + other.out_arity,
                        lambda t: self.eval(t[:k]) + other.eval(t[k:]))

    def fanout(self, other: FuncSpec) -> FuncSpec:
        """x -> (self(x), other(x)); both read the same inputs."""
        if self.in_arity != other.in_arity:
            raise ValueError("arity mismatch in fan-out")
        return FuncSpec(self.in_arity, self.out_arity + other.out_arity,
                        lambda t: self.eval(t) + other.eval(t))


@dataclass(frozen=True)
class ConstraintExt:
    """A constraint given by a membership predicate.

    ``propagate_once`` optionally models a single non-idempotent filtering
    pass on boxes, used to replay weak inner propagators.
    """

    arity: int
    pred: Callable[[tuple], bool]
    propagate_once: Optional[Callable[[Box], Box]] = None

    def __contains__(self, t) -> bool:
        return bool(self.pred(tuple(t)))

    def on(self, f: FuncSpec) -> ConstraintExt:
        """The composed constraint c after f."""
        if f.out_arity != self.arity:
            raise ValueError("arity mismatch in composition")
        return ConstraintExt(f.in_arity, lambda t: self.pred(f.eval(t)))

    def extension(self, universe: Box) -> TupleSet:
        return universe.tuples().filter(self.pred)


def relation(arity: int, pred: Callable[..., bool]) -> ConstraintExt:
    return ConstraintExt(arity, lambda t: pred(*t))


def linear_eq_ext(coeffs: Sequence[int], rhs: int) -> ConstraintExt:
    """sum(coeffs * x) = rhs, with a single interval-rule pass.

    The single pass visits the variables from last to first, narrowing each
    one against the current bounds of the others with inward rounding.
    """
    coeffs = list(coeffs)

    def once(b: Box) -> Box:
        dims = [(d.lo, d.hi) for d in b.dims]
        if b.is_empty():
            return b
        for j in range(len(coeffs) - 1, -1, -1):
            a = coeffs[j]
            rmin = rmax = 0
            for k, (lo, hi) in enumerate(dims):
                if k == j:
                    continue
                p, q = coeffs[k] * lo, coeffs[k] * hi
                rmin += min(p, q)
                rmax += max(p, q)
            lo_r, hi_r = Fraction(rhs - rmax, a), Fraction(rhs - rmin, a)
            if a < 0:
                lo_r, hi_r = hi_r, lo_r
            lo, hi = dims[j]
            dims[j] = (max(lo, ceil(lo_r)), min(hi, floor(hi_r)))
            if dims[j][0] > dims[j][1]:
                return Box(tuple(Interval.empty() for _ in dims))
        return Box.of(*dims)

    return ConstraintExt(len(coeffs), lambda t: sum(a * v for a, v in zip(coeffs, t)) == rhs, once)


# -- views as tuple-set functions ------------------------------------------------


def _check_arity(s: TupleSet, n: int, what: str):
    if s.arity != n:
        raise ValueError(f"{what}: expected arity {n}, got {s.arity}")


def image(f: FuncSpec, s: TupleSet) -> TupleSet:
    _check_arity(s, f.in_arity, "image")
    return TupleSet(f.out_arity, frozenset(f.eval(t) for t in s))


def preimage(f: FuncSpec, s: TupleSet, universe: Box) -> TupleSet:
    _check_arity(s, f.out_arity, "preimage")
    if universe.arity != f.in_arity:
        raise ValueError("preimage: universe arity does not match the function")
    if not s or universe.is_empty():
        return TupleSet(f.in_arity, frozenset())
    return universe.tuples().filter(lambda t: f.eval(t) in s.tuples)


def hull_box(s: TupleSet) -> Box:
    return beta_approx(s)


def contracting_object(f: FuncSpec, s2: TupleSet, s1: TupleSet) -> TupleSet:
    _check_arity(s2, f.out_arity, "contracting_object")
    _check_arity(s1, f.in_arity, "contracting_object")
    return s1.filter(lambda t: f.eval(t) in s2.tuples)


def exact_fixpoint(c: ConstraintExt, s: TupleSet) -> TupleSet:
    _check_arity(s, c.arity, "exact_fixpoint")
    return s.filter(c.pred)


def phi_psi_bound(c: ConstraintExt, s: TupleSet, phi: ApproxKind, psi: ApproxKind) -> TupleSet:
    """(con(c) intersected with s^phi)^psi."""
    if ApproxKind.RHO_LINEAR in (phi, psi):
        raise UnsupportedApprox("use rho_box_linear for the real relaxation")
    return approx(exact_fixpoint(c, approx(s, phi)), psi)


def view_propagate(c: ConstraintExt, f: FuncSpec, s: TupleSet) -> TupleSet:
    """Filter ``s`` for c after f by propagating c on the image and mapping back."""
    _check_arity(s, f.in_arity, "view_propagate")
    return contracting_object(f, exact_fixpoint(c, image(f, s)), s)


def _box_filter(universe: Box, pred) -> TupleSet:
    return universe.tuples().filter(pred)


def box_view_propagate_ref(c: ConstraintExt, f: FuncSpec, s: TupleSet,
                           inner_idempotent: bool = True) -> TupleSet:
    """Box-view propagation: hull of the image, inner ββ filtering, hull of the preimage.

    With ``inner_idempotent`` false the inner step is one pass of
    ``c.propagate_once`` instead of the strongest ββ fixpoint.
    """
    _check_arity(s, f.in_arity, "box_view_propagate_ref")
    if not s:
        return s
    sbox = beta_approx(s)
    img = beta_approx(image(f, sbox.tuples()))
    if inner_idempotent:
        inner = beta_approx(_box_filter(img, c.pred))
    else:
        if c.propagate_once is None:
            raise ValueError("constraint has no single-pass rule")
        inner = c.propagate_once(img)
    if inner.is_empty():
        return TupleSet(s.arity, frozenset())
    back = beta_approx(sbox.tuples().filter(lambda t: f.eval(t) in inner))
    if back.is_empty():
        return TupleSet(s.arity, frozenset())
    return s.filter(lambda t: t in back)


def rho_box_linear(coeffs: Sequence[int], rhs: int, b: Box) -> Box:
    """Integer box kept by bounds reasoning over the reals for sum(coeffs*x) = rhs.

    Each bound is recomputed from the real extremes of the other terms and
    rounded inward; this repeats until nothing changes.  Exact rationals
    decide every comparison.
    """
    if len(coeffs) != b.arity:
        raise ValueError("one coefficient per dimension")
    if b.is_empty():
        return b
    dims = [(d.lo, d.hi) for d in b.dims]
    changed = True
    while changed:
        changed = False
        for j, a in enumerate(coeffs):
            rmin = rmax = 0
            for k, (lo, hi) in enumerate(dims):
                if k != j:
                    p, q = coeffs[k] * lo, coeffs[k] * hi
                    rmin += min(p, q)
                    rmax += max(p, q)
            lo_r, hi_r = Fraction(rhs - rmax, a), Fraction(rhs - rmin, a)
            if a < 0:
                lo_r, hi_r = hi_r, lo_r
            lo, hi = dims[j]
            nlo, nhi = max(lo, ceil(lo_r)), min(hi, floor(hi_r))
            if nlo > nhi:
                return Box(tuple(Interval.empty() for _ in dims))
            if (nlo, nhi) != (lo, hi):
                dims[j] = (nlo, nhi)
                changed = True
    return Box.of(*dims)


# -- propagator checking -----------------------------------------------------------


@dataclass
class PropagatorSpec:
    """A propagator under test: a function from tuple sets to tuple sets."""

    name: str
    apply: Callable[[TupleSet], TupleSet]


def identity_propagator() -> PropagatorSpec:
    return PropagatorSpec("identity", lambda s: s)


def engine_propagator(name: str, factory: Callable, names: Sequence[str]) -> PropagatorSpec:
    """Wrap an engine propagator: run it on the hull of S, intersect with S.

    ``factory(store)`` must return the propagator, building its views over
    variables called ``names`` (already created with the hull's bounds).
    """
    from .engine import Store

    names = list(names)

    def run(s: TupleSet) -> TupleSet:
        if not s:
            return s
        box = beta_approx(s)
        st = Store()
        for n, d in zip(names, box.dims):
            st.new_var(d.lo, d.hi, n)
        if not st.post(factory(st)):
            return TupleSet(s.arity, frozenset())
        out = Box.of(*st.domains())
        return s.filter(lambda t: t in out)

    return PropagatorSpec(name, run)


@dataclass
class CheckReport:
    name: str
    phi: ApproxKind
    psi: ApproxKind
    domains: int = 0
    exhaustive: bool = True
    contracting: bool = True
    sound: bool = True
    complete: bool = True
    counterexample: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.contracting and self.sound and self.complete

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "phi": self.phi.value,
            "psi": self.psi.value,
            "contracting": self.contracting,
            "sound": self.sound,
            "complete": self.complete,
            "counterexample": self.counterexample,
        }


def _intervals(d: Interval):
    return [(a, b) for a in d for b in d if a <= b]


def _subsets(values):
    vals = list(values)
    for r in range(1, len(vals) + 1):
        yield from itertools.combinations(vals, r)


def count_phi_domains(universe: Box, phi: ApproxKind) -> int:
    if phi is ApproxKind.BETA:
        n = 1
        for d in universe.dims:
            n *= d.width * (d.width + 1) // 2
        return n
    if phi is ApproxKind.DELTA:
        n = 1
        for d in universe.dims:
            n *= 2 ** d.width - 1
        return n
    if phi is ApproxKind.IDENTITY:
        return 2 ** universe.size() - 1
    raise UnsupportedApprox(str(phi))


def phi_domains(universe: Box, phi: ApproxKind, limit: int = 20000, seed: int = 0):
    """Non-empty Φ-domains inside ``universe``.

    Yields (exhaustive, TupleSet) pairs: every domain when there are at most
    ``limit`` of them, otherwise ``limit`` seeded random draws.
    """
    if universe.size() > MAX_MATERIALIZE:
        raise MaterializationError("universe exceeds the materialization cap")
    total = count_phi_domains(universe, phi)
    exhaustive = total <= limit
    rng = random.Random(seed)
    if phi is ApproxKind.BETA:
        per_dim = [_intervals(d) for d in universe.dims]
        if exhaustive:
            choices = itertools.product(*per_dim)
        else:
            choices = (tuple(rng.choice(p) for p in per_dim) for _ in range(limit))
        for dims in choices:
            yield exhaustive, Box.of(*dims).tuples()
    elif phi is ApproxKind.DELTA:
        if exhaustive:
            per_dim = [list(_subsets(d)) for d in universe.dims]
            choices = itertools.product(*per_dim)
        else:
            def draw():
                out = []
                for d in universe.dims:
                    vals = [v for v in d if rng.random() < 0.5] or [rng.choice(list(d))]
                    out.append(vals)
                return out
            choices = (draw() for _ in range(limit))
        for sets in choices:
            yield exhaustive, TupleSet.product(*sets)
    elif phi is ApproxKind.IDENTITY:
        all_tuples = sorted(universe.tuples())
        if exhaustive:
            for sub in _subsets(all_tuples):
                yield True, TupleSet(universe.arity, frozenset(sub))
        else:
            for _ in range(limit):
                sub = [t for t in all_tuples if rng.random() < 0.5] or [rng.choice(all_tuples)]
                yield False, TupleSet(universe.arity, frozenset(sub))
    else:
        raise UnsupportedApprox(str(phi))


def _fix(p: PropagatorSpec, s: TupleSet, max_rounds: int = 1000) -> TupleSet:
    for _ in range(max_rounds):
        r = p.apply(s)
        if r == s:
            return r
        s = r
    return s


def check_propagator(p: PropagatorSpec, c: ConstraintExt, phi: ApproxKind, psi: ApproxKind,
                     universe: Box, *, limit: int = 20000, seed: int = 0) -> CheckReport:
    """Check contraction, soundness and ΦΨ-completeness over Φ-domains of ``universe``."""
    rep = CheckReport(p.name, phi, psi)
    for exhaustive, s in phi_domains(universe, phi, limit, seed):
        rep.exhaustive = exhaustive
        rep.domains += 1
        r = p.apply(s)
        sol = exact_fixpoint(c, s)
        if not r <= s and rep.contracting:
            rep.contracting = False
            rep.counterexample = rep.counterexample or _cex("contracting", s, r)
        if not sol <= r and rep.sound:
            rep.sound = False
            rep.counterexample = rep.counterexample or _cex("sound", s, r)
        if rep.complete:
            fx = _fix(p, r) if r != s else r
            bound = phi_psi_bound(c, s, phi, psi)
            if not fx <= bound:
                rep.complete = False
                rep.counterexample = rep.counterexample or _cex("complete", s, fx)
    return rep


def _cex(prop: str, s: TupleSet, r: TupleSet) -> dict:
    return {"property": prop, "input": sorted(s.tuples), "output": sorted(r.tuples)}


# -- the 2x + 3y = z completeness example ----------------------------------------------

TAXONOMY_CONSTRAINT = linear_eq_ext([2, 3, -1], 0)

CONSISTENCY = {
    "domain": (ApproxKind.DELTA, ApproxKind.DELTA),
    "bounds(D)": (ApproxKind.DELTA, ApproxKind.BETA),
    "range": (ApproxKind.BETA, ApproxKind.DELTA),
    "bounds(Z)": (ApproxKind.BETA, ApproxKind.BETA),
}


@dataclass(frozen=True)
class TaxonomyEdge:
    stronger: str
    weaker: str
    domain: tuple  # per-variable value sets for (x, y, z)
    variable: int
    value: int


TAXONOMY_EDGES = (
    TaxonomyEdge("domain", "bounds(D)", ({0, 1}, {0}, {0, 1, 2}), 2, 1),
    TaxonomyEdge("domain", "range", ({0, 1}, {0, 1}, {0, 3}), 0, 1),
    TaxonomyEdge("bounds(D)", "bounds(Z)", ({0, 1}, {0, 1}, {0, 3}), 0, 1),
    TaxonomyEdge("range", "bounds(Z)", ({0}, {0, 1}, {0, 2, 3}), 2, 2),
    TaxonomyEdge("bounds(Z)", "bounds(R)", ({0, 1}, {0, 1}, {1, 2, 3}), 2, 1),
    # the two arrows between the incomparable classes
    TaxonomyEdge("range", "bounds(D)", ({0}, {0, 1}, {0, 1, 3}), 2, 1),
    TaxonomyEdge("bounds(D)", "range", ({0, 1}, {0, 1}, {0, 3}), 0, 1),
)


def kept_values(cls: str, domain, variable: int) -> set:
    """Values of ``variable`` surviving the strongest propagator of class ``cls``."""
    s = TupleSet.product(*domain)
    if cls == "bounds(R)":
        box = rho_box_linear([2, 3, -1], 0, beta_approx(s))
        return set(box[variable]) & set(domain[variable])
    phi, psi = CONSISTENCY[cls]
    return phi_psi_bound(TAXONOMY_CONSTRAINT, s, phi, psi).proj(variable) & set(domain[variable])


def taxonomy_witness(edge: TaxonomyEdge) -> tuple[bool, bool]:
    """(stronger prunes the value, weaker keeps it)."""
    strong = kept_values(edge.stronger, edge.domain, edge.variable)
    weak = kept_values(edge.weaker, edge.domain, edge.variable)
    return edge.value not in strong, edge.value in weak
