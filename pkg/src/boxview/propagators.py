"""Propagators over box views and the decomposition of constraints into them.

Every propagator copies the bounds of its views into locals, narrows them
there, and writes the result back through ``upd_min``/``upd_max``.  Because
updates through composite views need not persist, each execution repeats
this read/narrow/write cycle until a whole pass leaves the store unchanged.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .engine import BOTH, Event, Status, Store
from .views import (
    ConstView,
    DispatchMode,
    Kind,
    VarView,
    ViewNode,
    add_chain,
    build_view,
    mul_bounds,
    mul_support_ge,
    mul_support_le,
    sub,
    to_text,
    trigger_map,
)

FAILED = Status.FAILED
IDEMPOTENT = Status.IDEMPOTENT
SUSPEND = Status.SUSPEND


def read(v) -> tuple[int, int]:
    """Both bounds of a view, using its combined accessor when it has one."""
    b = getattr(v, "bounds", None)
    if b is not None:
        return b()
    return v.min(), v.max()


def _has_ite(n: ViewNode) -> bool:
    return n.kind is Kind.ITE or any(_has_ite(c) for c in n.children)


class Propagator:
    """Base class: subscription management and scheduling flags."""

    dynamic_triggers = False

    def __init__(self, views: Sequence, events: Optional[Sequence] = None):
        self.views = list(views)
        self.events = list(events) if events is not None else [BOTH] * len(self.views)
        self.queued = False
        self.id = -1
        self._subs: frozenset = frozenset()

    def _wanted(self, st: Store) -> frozenset:
        out = set()
        for v, ev in zip(self.views, self.events):
            out |= trigger_map(v.node, ev, st)
        return frozenset(out)

    def attach(self, st: Store):
        self.dynamic_triggers = any(_has_ite(v.node) for v in self.views)
        self._set_subs(st, frozenset(), self._wanted(st))

    def _set_subs(self, st, old, new):
        for var, ev in old - new:
            st.unsubscribe(self, var, ev)
        for var, ev in new - old:
            st.subscribe(self, var, ev)
        self._subs = new

    def refresh(self, st: Store):
        """Move subscriptions when an if-then-else condition became ground."""
        new = self._wanted(st)
        old = self._subs
        if new != old:
            self._set_subs(st, old, new)
            st.on_undo(lambda: self._set_subs(st, new, old))

    def propagate(self, st: Store) -> Status:
        raise NotImplementedError

    def __repr__(self):
        inner = ", ".join(to_text(v.node) for v in self.views)
        return f"{type(self).__name__}({inner})"


class EqProp(Propagator):
    """X = Y at bounds strength."""

    def __init__(self, x, y):
        super().__init__([x, y])
        self.x, self.y = x, y

    def propagate(self, st):
        x, y = self.x, self.y
        while True:
            before = st.domain_updates
            xl, xh = read(x)
            yl, yh = read(y)
            lo = xl if xl > yl else yl
            hi = xh if xh < yh else yh
            if lo > hi:
                return FAILED
            if xl < lo and not x.upd_min(lo):
                return FAILED
            if xh > hi and not x.upd_max(hi):
                return FAILED
            if yl < lo and not y.upd_min(lo):
                return FAILED
            if yh > hi and not y.upd_max(hi):
                return FAILED
            if st.domain_updates == before:
                break
        return IDEMPOTENT if read(x) == read(y) else SUSPEND


class LeqProp(Propagator):
    """X <= Y at bounds strength."""

    def __init__(self, x, y):
        super().__init__([x, y], [Event.MIN_CHANGE, Event.MAX_CHANGE])
        self.x, self.y = x, y

    def propagate(self, st):
        x, y = self.x, self.y
        while True:
            before = st.domain_updates
            xl, xh = read(x)
            yl, yh = read(y)
            if xl > yh:
                return FAILED
            if xh > yh and not x.upd_max(yh):
                return FAILED
            if yl < xl and not y.upd_min(xl):
                return FAILED
            if st.domain_updates == before:
                break
        xl, xh = read(x)
        yl, yh = read(y)
        # only report idempotence once the re-read shows both updates stuck
        return IDEMPOTENT if xh <= yh and yl >= xl else SUSPEND


class NeqProp(Propagator):
    """X != k, pruning k only when it is a bound of X."""

    def __init__(self, x, k: int):
        super().__init__([x])
        self.x = x
        self.k = k

    def propagate(self, st):
        x, k = self.x, self.k
        lo, hi = read(x)
        if lo > k or hi < k:
            return IDEMPOTENT
        if lo == k:
            if not x.upd_min(k + 1):
                return FAILED
            return IDEMPOTENT if x.min() > k else SUSPEND
        if hi == k:
            if not x.upd_max(k - 1):
                return FAILED
            return IDEMPOTENT if x.max() < k else SUSPEND
        return SUSPEND


def _narrow_linear(coef, lo, hi, rel: str) -> bool:
    """Bounds reasoning for sum(coef[j] * x[j]) rel 0 on local intervals.

    ``lo``/``hi`` are narrowed in place to a local fixpoint; returns False
    on an empty interval.  ``rel`` is one of ``eq``, ``le``, ``ge``.
    """
    n = len(coef)
    while True:
        smin = smax = 0
        for j in range(n):
            a = coef[j]
            if a > 0:
                smin += a * lo[j]
                smax += a * hi[j]
            else:
                smin += a * hi[j]
                smax += a * lo[j]
        if (rel != "ge" and smin > 0) or (rel != "le" and smax < 0):
            return False
        changed = False
        for j in range(n):
            a = coef[j]
            if a > 0:
                tmin, tmax = a * lo[j], a * hi[j]
            else:
                tmin, tmax = a * hi[j], a * lo[j]
            # a*x_j <= -(smin - tmin) and, for eq/ge, a*x_j >= -(smax - tmax)
            up = tmin - smin if rel != "ge" else None
            down = tmax - smax if rel != "le" else None
            if a > 0:
                nl = -((-down) // a) if down is not None else lo[j]
                nh = up // a if up is not None else hi[j]
            else:
                nl = -((-up) // a) if up is not None else lo[j]
                nh = down // a if down is not None else hi[j]
            if nl > lo[j]:
                lo[j] = nl
                changed = True
            if nh < hi[j]:
                hi[j] = nh
                changed = True
            if lo[j] > hi[j]:
                return False
        if not changed:
            return True


class SumProp(Propagator):
    """sum(terms) rel K for rel in {eq, le, ge}, all coefficients one."""

    def __init__(self, terms: Sequence, k, rel: str = "eq"):
        if rel not in ("eq", "le", "ge"):
            raise ValueError(f"unknown relation {rel!r}")
        if not terms:
            raise ValueError("sum needs at least one term")
        if isinstance(k, int):
            k = ConstView(k)
        te, ke = {
            "eq": (BOTH, BOTH),
            "le": (Event.MIN_CHANGE, Event.MAX_CHANGE),
            "ge": (Event.MAX_CHANGE, Event.MIN_CHANGE),
        }[rel]
        super().__init__(list(terms) + [k], [te] * len(terms) + [ke])
        self.rel = rel
        self.coef = [1] * len(terms) + [-1]

    def propagate(self, st):
        views, coef, rel = self.views, self.coef, self.rel
        while True:
            before = st.domain_updates
            lo, hi = [], []
            for v in views:
                a, b = read(v)
                lo.append(a)
                hi.append(b)
            olo, ohi = list(lo), list(hi)
            st.arith_ops += 4 * len(views)
            if not _narrow_linear(coef, lo, hi, rel):
                return FAILED
            for j, v in enumerate(views):
                if lo[j] > olo[j] and not v.upd_min(lo[j]):
                    return FAILED
                if hi[j] < ohi[j] and not v.upd_max(hi[j]):
                    return FAILED
            if st.domain_updates == before:
                return IDEMPOTENT


class LinearEq(Propagator):
    """sum(coeffs[j] * xs[j]) = k with integer-supported bounds.

    Plain bounds reasoning is followed by shaving: each bound is kept only
    if some integer point of the current box satisfies the equation with
    that variable at that bound.
    """

    def __init__(self, coeffs: Sequence[int], xs: Sequence, k: int, shave: bool = True):
        if len(coeffs) != len(xs):
            raise ValueError("one coefficient per term")
        if any(a == 0 for a in coeffs):
            raise ValueError("coefficients must be non-zero")
        super().__init__(xs)
        self.coef = list(coeffs)
        self.k = k
        self.shave = shave

    def propagate(self, st):
        views, coef, k = self.views, self.coef, self.k
        cs = coef + [-1]
        while True:
            before = st.domain_updates
            lo, hi = [], []
            for v in views:
                a, b = read(v)
                lo.append(a)
                hi.append(b)
            olo, ohi = list(lo), list(hi)
            lo.append(k)
            hi.append(k)
            if not _narrow_linear(cs, lo, hi, "eq"):
                return FAILED
            lo.pop()
            hi.pop()
            if self.shave and not _shave(coef, k, lo, hi):
                return FAILED
            for j, v in enumerate(views):
                if lo[j] > olo[j] and not v.upd_min(lo[j]):
                    return FAILED
                if hi[j] < ohi[j] and not v.upd_max(hi[j]):
                    return FAILED
            if st.domain_updates == before:
                return IDEMPOTENT


def _has_solution(coef, target, lo, hi, fixed: int) -> bool:
    """Is there x in the box with x[fixed] = lo[fixed] and sum(coef*x) = target?"""
    order = [j for j in range(len(coef)) if j != fixed]
    rest = target - coef[fixed] * lo[fixed]
    # suffix ranges of the remaining terms, for pruning
    smin = [0] * (len(order) + 1)
    smax = [0] * (len(order) + 1)
    for p in range(len(order) - 1, -1, -1):
        j = order[p]
        a, b = coef[j] * lo[j], coef[j] * hi[j]
        smin[p] = smin[p + 1] + min(a, b)
        smax[p] = smax[p + 1] + max(a, b)

    def search(p, r):
        if not (smin[p] <= r <= smax[p]):
            return False
        if p == len(order):
            return r == 0
        j = order[p]
        a = coef[j]
        if p == len(order) - 1:
            return r % a == 0 and lo[j] <= r // a <= hi[j]
        for v in range(lo[j], hi[j] + 1):
            if search(p + 1, r - a * v):
                return True
        return False

    return search(0, rest)


def _shave(coef, k, lo, hi) -> bool:
    for j in range(len(coef)):
        while lo[j] <= hi[j]:
            saved = lo[j]
            if _has_solution(coef, k, lo, hi, j):
                break
            lo[j] = saved + 1
        if lo[j] > hi[j]:
            return False
        while True:
            keep = lo[j]
            lo[j] = hi[j]
            ok = _has_solution(coef, k, lo, hi, j)
            lo[j] = keep
            if ok:
                break
            hi[j] -= 1
            if lo[j] > hi[j]:
                return False
    return True


class MulEq(Propagator):
    """x * y = z with sign-case interval division for the factors."""

    def __init__(self, x, y, z):
        super().__init__([x, y, z])
        self.x, self.y, self.z = x, y, z

    def propagate(self, st):
        x, y, z = self.x, self.y, self.z
        while True:
            before = st.domain_updates
            xl, xh = read(x)
            yl, yh = read(y)
            pl, ph = mul_bounds(xl, xh, yl, yh)
            st.arith_ops += 4
            if not (z.upd_min(pl) and z.upd_max(ph)):
                return FAILED
            for a, b in ((x, y), (y, x)):
                zl, zh = read(z)
                bl, bh = read(b)
                for lo, hi in (mul_support_ge(zl, bl, bh), mul_support_le(zh, bl, bh)):
                    if lo is not None and hi is not None and lo > hi:
                        return FAILED
                    if lo is not None and not a.upd_min(lo):
                        return FAILED
                    if hi is not None and not a.upd_max(hi):
                        return FAILED
            if st.domain_updates == before:
                return IDEMPOTENT


# -- bounds-consistent alldifferent ---------------------------------------------


def _pathset(t, start, end, to):
    k = l = start
    while True:
        k = l
        if k == end:
            break
        l = t[k]
        t[k] = to


def _pathmin(t, i):
    while t[i] < i:
        i = t[i]
    return i


def _pathmax(t, i):
    while t[i] > i:
        i = t[i]
    return i


def hall_filter(lo: list[int], hi: list[int], minorder=None, maxorder=None) -> bool:
    """Narrow ``lo``/``hi`` in place to bounds consistency for alldifferent.

    Union-find formulation over Hall intervals (sorted bounds, path
    compression).  ``minorder``/``maxorder`` are optional index lists that
    are re-sorted in place; passing the previous call's lists makes the
    sorts nearly linear.  Returns False if some Hall interval is
    over-subscribed.
    """
    n = len(lo)
    if n == 0:
        return True
    if minorder is None:
        minorder = list(range(n))
    if maxorder is None:
        maxorder = list(range(n))
    minorder.sort(key=lo.__getitem__)
    maxorder.sort(key=hi.__getitem__)
    minrank = [0] * n
    maxrank = [0] * n
    bounds = [0] * (2 * n + 2)

    cur_min = lo[minorder[0]]
    cur_max = hi[maxorder[0]] + 1
    last = cur_min - 2
    nb = 0
    bounds[0] = last
    i = j = 0
    while True:
        if i < n and cur_min <= cur_max:
            if cur_min != last:
                nb += 1
                bounds[nb] = last = cur_min
            minrank[minorder[i]] = nb
            i += 1
            if i < n:
                cur_min = lo[minorder[i]]
        else:
            if cur_max != last:
                nb += 1
                bounds[nb] = last = cur_max
            maxrank[maxorder[j]] = nb
            j += 1
            if j == n:
                break
            cur_max = hi[maxorder[j]] + 1
    bounds[nb + 1] = bounds[nb] + 2

    size = nb + 2
    t = [0] * size
    d = [0] * size
    h = [0] * size

    # raise lower bounds
    for r in range(1, nb + 2):
        t[r] = h[r] = r - 1
        d[r] = bounds[r] - bounds[r - 1]
    new_lo = list(lo)
    for v in maxorder:
        x, y = minrank[v], maxrank[v]
        z = _pathmax(t, x + 1)
        jj = t[z]
        d[z] -= 1
        if d[z] == 0:
            t[z] = z + 1
            z = _pathmax(t, t[z])
            t[z] = jj
        _pathset(t, x + 1, z, z)
        if d[z] < bounds[z] - bounds[y]:
            return False
        if h[x] > x:
            w = _pathmax(h, h[x])
            new_lo[v] = bounds[w]
            _pathset(h, x, w, w)
        if d[z] == bounds[z] - bounds[y]:
            _pathset(h, h[y], jj - 1, y)
            h[y] = jj - 1

    # lower upper bounds
    for r in range(0, nb + 1):
        t[r] = h[r] = r + 1
        d[r] = bounds[r + 1] - bounds[r]
    new_hi = list(hi)
    for v in reversed(minorder):
        x, y = maxrank[v], minrank[v]
        z = _pathmin(t, x - 1)
        jj = t[z]
        d[z] -= 1
        if d[z] == 0:
            t[z] = z - 1
            z = _pathmin(t, t[z])
            t[z] = jj
        _pathset(t, x - 1, z, z)
        if d[z] < bounds[y] - bounds[z]:
            return False
        if h[x] < x:
            w = _pathmin(h, h[x])
            new_hi[v] = bounds[w] - 1
            _pathset(h, x, w, w)
        if d[z] == bounds[y] - bounds[z]:
            _pathset(h, h[y], jj + 1, y)
            h[y] = jj + 1

    for v in range(n):
        if new_lo[v] > new_hi[v]:
            return False
    lo[:] = new_lo
    hi[:] = new_hi
    return True


class DistinctBounds(Propagator):
    """alldifferent over views, bounds consistent on the views' intervals.

    The sort permutations survive between executions as a hint; they are
    never relied on for correctness, so they need no trailing.
    """

    def __init__(self, xs: Sequence):
        if not xs:
            raise ValueError("distinct needs at least one view")
        super().__init__(xs)
        self._minorder = list(range(len(xs)))
        self._maxorder = list(range(len(xs)))

    def propagate(self, st):
        views = self.views
        while True:
            before = st.domain_updates
            lo, hi = [], []
            for v in views:
                a, b = read(v)
                lo.append(a)
                hi.append(b)
            olo, ohi = list(lo), list(hi)
            st.arith_ops += 2 * len(views)
            if not hall_filter(lo, hi, self._minorder, self._maxorder):
                return FAILED
            for j, v in enumerate(views):
                if lo[j] > olo[j] and not v.upd_min(lo[j]):
                    return FAILED
                if hi[j] < ohi[j] and not v.upd_max(hi[j]):
                    return FAILED
            if st.domain_updates == before:
                return IDEMPOTENT


class ObjectiveCut(Propagator):
    """objective <= bound, where ``bound`` is tightened by branch-and-bound.

    The bound is deliberately not trailed: it only ever decreases, and the
    search reschedules the cut after every backtrack.
    """

    def __init__(self, objective, bound: Optional[int] = None):
        super().__init__([objective], [Event.MIN_CHANGE])
        self.objective = objective
        self.bound = bound

    def propagate(self, st):
        if self.bound is None:
            return SUSPEND
        if not self.objective.upd_max(self.bound):
            return FAILED
        return IDEMPOTENT if self.objective.max() <= self.bound else SUSPEND


# -- decomposition ---------------------------------------------------------------


class ModelVariant(enum.Enum):
    VARS = "vars"
    VARS_GLOBAL = "vars-global"
    VIEWS_STATIC = "views-static"
    VIEWS_DYNAMIC = "views-dynamic"
    VIEWS_STATIC_GLOBAL = "views-static-global"
    VIEWS_DYNAMIC_GLOBAL = "views-dynamic-global"

    @property
    def uses_views(self) -> bool:
        return self.value.startswith("views")

    @property
    def is_global(self) -> bool:
        return self.value.endswith("global")

    @property
    def mode(self) -> DispatchMode:
        return DispatchMode.DYNAMIC if "dynamic" in self.value else DispatchMode.STATIC


RELATIONS = ("eq", "le", "ge", "ne", "distinct")


@dataclass(frozen=True)
class Constraint:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")
        if self.op == "distinct":
            if not self.args:
                raise ValueError("distinct needs arguments")
        elif len(self.args) != 2:
            raise ValueError(f"{self.op} is binary")

    def text(self) -> str:
        return f"({self.op} {' '.join(to_text(a) for a in self.args)})"


@dataclass
class Decomposition:
    """Options and bookkeeping for posting constraints under one variant."""

    variant: ModelVariant
    balanced: bool = False
    share: bool = False
    project_terms: bool = False
    cache: bool = True
    aux: list = field(default_factory=list)
    propagators: list = field(default_factory=list)
    _shared: dict = field(default_factory=dict)

    # -- helpers -----------------------------------------------------------

    def _view(self, st: Store, n: ViewNode):
        return build_view(n, self.variant.mode, st, cache=self.cache)

    def _post(self, st: Store, p: Propagator) -> bool:
        self.propagators.append(p)
        return st.post(p)

    def _expand_sums(self, n: ViewNode, top: bool = True) -> ViewNode:
        """Non-global variants see n-ary sums as chains of binary additions.

        View variants only chain a sum sitting at the root of a constraint;
        sums nested in a view tree stay n-ary Sum views.
        """
        if n.is_leaf or self.variant.is_global:
            return n
        if self.variant.uses_views:
            if top and n.kind is Kind.SUM:
                return add_chain(list(n.children), self.balanced)
            return n
        kids = tuple(self._expand_sums(c) for c in n.children)
        if n.kind is Kind.SUM:
            return add_chain(list(kids), self.balanced)
        return ViewNode(n.kind, kids, n.payload)

    def _aux_var(self, st: Store, defining: ViewNode) -> ViewNode:
        v = build_view(defining, DispatchMode.STATIC, st)
        lo, hi = read(v)
        name = f"_aux{st.nvars}"
        st.new_var(lo, hi, name)
        self.aux.append(name)
        return ViewNode(Kind.VAR, (), name)

    def flatten(self, st: Store, n: ViewNode) -> ViewNode:
        """Replace ``n`` by a leaf, adding an auxiliary variable per internal node."""
        if n.is_leaf:
            return n
        kids = tuple(self.flatten(st, c) for c in n.children)
        shallow = ViewNode(n.kind, kids, n.payload)
        key = to_text(shallow)
        if self.share and key in self._shared:
            return self._shared[key]
        aux = self._aux_var(st, shallow)
        auxview = VarView(st, st.var(aux.payload), aux)
        if n.kind is Kind.SUM:
            prop = SumProp([_leaf_view(st, k) for k in kids], auxview, "eq")
        else:
            prop = EqProp(build_view(shallow, DispatchMode.STATIC, st), auxview)
        self._post(st, prop)
        if self.share:
            self._shared[key] = aux
        return aux

    def _shallow(self, st, n):
        if n.is_leaf:
            return n
        return ViewNode(n.kind, tuple(self.flatten(st, c) for c in n.children), n.payload)

    # -- posting -------------------------------------------------------------

    def post(self, st: Store, c: Constraint) -> bool:
        args = tuple(self._expand_sums(a) for a in c.args)
        op = c.op
        if op == "distinct":
            if self.variant.uses_views:
                views = [self._view(st, a) for a in args]
            else:
                views = [_leaf_view(st, self.flatten(st, a)) for a in args]
            return self._post(st, DistinctBounds(views))
        lhs, rhs = args
        if op == "ne":
            if rhs.kind is not Kind.CONST:
                lhs, rhs = sub(lhs, rhs), ViewNode(Kind.CONST, (), 0)
            if self.variant.uses_views:
                x = self._view(st, lhs)
            else:
                x = build_view(self._shallow(st, lhs), DispatchMode.STATIC, st)
            return self._post(st, NeqProp(x, rhs.payload))
        if op == "ge":
            lhs, rhs, op = rhs, lhs, "le"
        if self.variant.is_global and (lhs.kind is Kind.SUM or rhs.kind is Kind.SUM):
            return self._post_sum(st, op, lhs, rhs)
        if self.variant.uses_views:
            x, y = self._view(st, lhs), self._view(st, rhs)
        elif lhs.is_leaf or rhs.is_leaf:
            x = build_view(self._shallow(st, lhs), DispatchMode.STATIC, st)
            y = build_view(self._shallow(st, rhs), DispatchMode.STATIC, st)
        else:
            x = _leaf_view(st, self.flatten(st, lhs))
            y = _leaf_view(st, self.flatten(st, rhs))
        return self._post(st, EqProp(x, y) if op == "eq" else LeqProp(x, y))

    def _post_sum(self, st, op, lhs, rhs) -> bool:
        rel = op
        if lhs.kind is not Kind.SUM:
            lhs, rhs = rhs, lhs
            rel = {"eq": "eq", "le": "ge"}[op]
        terms = []
        for t in lhs.children:
            if not self.variant.uses_views:
                terms.append(_leaf_view(st, self.flatten(st, t)))
            elif self.project_terms and not t.is_leaf:
                aux = self._aux_var(st, t)
                view = VarView(st, st.var(aux.payload), aux)
                self._post(st, EqProp(self._view(st, t), view))
                terms.append(view)
            else:
                terms.append(self._view(st, t))
        if self.variant.uses_views:
            other = self._view(st, rhs)
        else:
            other = _leaf_view(st, self.flatten(st, rhs))
        return self._post(st, SumProp(terms, other, rel))

    def objective(self, st: Store, n: ViewNode):
        """A view of ``n`` suitable for branch-and-bound under this variant."""
        if self.variant.uses_views:
            return self._view(st, n)
        n = self._expand_sums(n)
        return _leaf_view(st, self.flatten(st, n))


def _leaf_view(st: Store, n: ViewNode):
    if n.kind is Kind.CONST:
        return ConstView(n.payload)
    return VarView(st, st.var(n.payload), n)


def post_decomposed(c: Constraint, variant: ModelVariant, store: Store, **options) -> Decomposition:
    """Post one constraint under ``variant``; returns the bookkeeping record."""
    d = Decomposition(variant, **options)
    d.post(store, c)
    return d
