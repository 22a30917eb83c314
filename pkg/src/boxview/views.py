"""Box views over integer expressions.

A ``ViewNode`` is a syntactic expression tree.  ``build_view`` turns it into
an object exposing ``min()``, ``max()``, ``upd_min(i)`` and ``upd_max(i)``
over a ``Store``, in one of two ways:

* ``DispatchMode.DYNAMIC`` builds one object per node; every node method
  is a separately dispatched call and is counted in ``store.view_calls``.
* ``DispatchMode.STATIC`` generates straight-line Python source for the
  whole tree (child bound computations and updates are inlined) and
  compiles it once per tree shape.

Both realizations run the same algorithm, node by node, so they leave
identical stores after identical update sequences.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from math import isqrt
from typing import Iterable, Optional

from .approx import check_int64
from .engine import BOTH, Event, Store


class Kind(enum.Enum):
    VAR = "var"
    CONST = "const"
    ADD = "add"
    SUB = "sub"
    NEG = "neg"
    MUL = "mul"
    ABS = "abs"
    SQR = "sqr"
    MIN2 = "min"
    MAX2 = "max"
    LINEAR = "lin"
    SUM = "sum"
    REIF_EQ = "reifeq"
    REIF_NEQ = "reifneq"
    REIF_LEQ = "reifleq"
    ITE = "ite"


_ARITY = {
    Kind.VAR: 0, Kind.CONST: 0,
    Kind.NEG: 1, Kind.ABS: 1, Kind.SQR: 1, Kind.LINEAR: 1,
    Kind.ADD: 2, Kind.SUB: 2, Kind.MUL: 2, Kind.MIN2: 2, Kind.MAX2: 2,
    Kind.REIF_EQ: 2, Kind.REIF_NEQ: 2, Kind.REIF_LEQ: 2,
    Kind.ITE: 3,
}

REIFIED = frozenset({Kind.REIF_EQ, Kind.REIF_NEQ, Kind.REIF_LEQ})


class DispatchMode(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True, eq=True)
class ViewNode:
    kind: Kind
    children: tuple = ()
    payload: object = None

    def __post_init__(self):
        n = len(self.children)
        if self.kind is Kind.SUM:
            if n < 1:
                raise ValueError("sum needs at least one child")
        elif n != _ARITY[self.kind]:
            raise ValueError(f"{self.kind.value} takes {_ARITY[self.kind]} children, got {n}")
        if self.kind is Kind.LINEAR and not self.payload:
            raise ValueError("linear term needs a non-zero coefficient")

    # operator sugar, so models read like the arithmetic they encode
    def __add__(self, o):
        return add(self, lift(o))

    def __radd__(self, o):
        return add(lift(o), self)

    def __sub__(self, o):
        return sub(self, lift(o))

    def __rsub__(self, o):
        return sub(lift(o), self)

    def __mul__(self, o):
        if isinstance(o, int):
            return lin(o, self)
        return mul(self, o)

    def __rmul__(self, o):
        if isinstance(o, int):
            return lin(o, self)
        return mul(lift(o), self)

    def __neg__(self):
        return neg(self)

    def __abs__(self):
        return abs_(self)

    def __str__(self):
        return to_text(self)

    @property
    def is_leaf(self) -> bool:
        return self.kind is Kind.VAR or self.kind is Kind.CONST

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        _collect_vars(self, seen)
        return list(seen)


def _collect_vars(n: ViewNode, seen: dict):
    if n.kind is Kind.VAR:
        seen.setdefault(n.payload, None)
    for c in n.children:
        _collect_vars(c, seen)


def lift(o) -> ViewNode:
    if isinstance(o, ViewNode):
        return o
    if isinstance(o, int):
        return const(o)
    raise TypeError(f"cannot use {o!r} in an expression")


def var(name: str) -> ViewNode:
    return ViewNode(Kind.VAR, (), name)


def const(k: int) -> ViewNode:
    return ViewNode(Kind.CONST, (), int(k))


def add(x, y) -> ViewNode:
    return ViewNode(Kind.ADD, (lift(x), lift(y)))


def sub(x, y) -> ViewNode:
    return ViewNode(Kind.SUB, (lift(x), lift(y)))


def neg(x) -> ViewNode:
    return ViewNode(Kind.NEG, (lift(x),))


def mul(x, y) -> ViewNode:
    return ViewNode(Kind.MUL, (lift(x), lift(y)))


def abs_(x) -> ViewNode:
    return ViewNode(Kind.ABS, (lift(x),))


def sqr(x) -> ViewNode:
    return ViewNode(Kind.SQR, (lift(x),))


def min2(x, y) -> ViewNode:
    return ViewNode(Kind.MIN2, (lift(x), lift(y)))


def max2(x, y) -> ViewNode:
    return ViewNode(Kind.MAX2, (lift(x), lift(y)))


def lin(a: int, x) -> ViewNode:
    return ViewNode(Kind.LINEAR, (lift(x),), int(a))


def sum_(xs: Iterable) -> ViewNode:
    return ViewNode(Kind.SUM, tuple(lift(x) for x in xs))


def reif_eq(x, y) -> ViewNode:
    return ViewNode(Kind.REIF_EQ, (lift(x), lift(y)))


def reif_neq(x, y) -> ViewNode:
    return ViewNode(Kind.REIF_NEQ, (lift(x), lift(y)))


def reif_leq(x, y) -> ViewNode:
    return ViewNode(Kind.REIF_LEQ, (lift(x), lift(y)))


def ite(c, t, f) -> ViewNode:
    return ViewNode(Kind.ITE, (lift(c), lift(t), lift(f)))


def add_chain(xs: list, balanced: bool = False) -> ViewNode:
    """Binary addition tree: left-leaning by default, balanced on request."""
    xs = [lift(x) for x in xs]
    if not xs:
        raise ValueError("empty sum")
    if balanced:
        while len(xs) > 1:
            xs = [add(xs[i], xs[i + 1]) if i + 1 < len(xs) else xs[i] for i in range(0, len(xs), 2)]
        return xs[0]
    acc = xs[0]
    for x in xs[1:]:
        acc = add(acc, x)
    return acc


# -- canonical text ---------------------------------------------------------


def to_text(n: ViewNode) -> str:
    if n.kind is Kind.VAR:
        return f"(var {n.payload})"
    if n.kind is Kind.CONST:
        return f"(const {n.payload})"
    inner = " ".join(to_text(c) for c in n.children)
    if n.kind is Kind.LINEAR:
        return f"(lin {n.payload} {inner})"
    return f"({n.kind.value} {inner})"


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse(text: str) -> ViewNode:
    """Inverse of ``to_text``."""
    tokens = _TOKEN.findall(text)
    node, pos = _parse(tokens, 0)
    if pos != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return node


def _parse(tokens, pos):
    if tokens[pos] != "(":
        raise ValueError(f"expected '(' at token {pos}")
    tag = tokens[pos + 1]
    pos += 2
    if tag == "var":
        return var(tokens[pos]), pos + 2
    if tag == "const":
        return const(int(tokens[pos])), pos + 2
    payload = None
    if tag == "lin":
        payload = int(tokens[pos])
        pos += 1
    kids = []
    while tokens[pos] != ")":
        k, pos = _parse(tokens, pos)
        kids.append(k)
    return ViewNode(Kind(tag), tuple(kids), payload), pos + 1


# -- ground evaluation --------------------------------------------------------


def evaluate(n: ViewNode, env) -> int:
    """Value of ``n`` under a total assignment ``env`` (name -> int)."""
    k = n.kind
    if k is Kind.VAR:
        return env[n.payload]
    if k is Kind.CONST:
        return n.payload
    vals = [evaluate(c, env) for c in n.children]
    if k is Kind.ADD:
        return vals[0] + vals[1]
    if k is Kind.SUB:
        return vals[0] - vals[1]
    if k is Kind.NEG:
        return -vals[0]
    if k is Kind.MUL:
        return vals[0] * vals[1]
    if k is Kind.ABS:
        return abs(vals[0])
    if k is Kind.SQR:
        return vals[0] * vals[0]
    if k is Kind.MIN2:
        return min(vals)
    if k is Kind.MAX2:
        return max(vals)
    if k is Kind.LINEAR:
        return n.payload * vals[0]
    if k is Kind.SUM:
        return sum(vals)
    if k is Kind.REIF_EQ:
        return int(vals[0] == vals[1])
    if k is Kind.REIF_NEQ:
        return int(vals[0] != vals[1])
    if k is Kind.REIF_LEQ:
        return int(vals[0] <= vals[1])
    if k is Kind.ITE:
        return vals[1] if vals[0] >= 1 else vals[2]
    raise AssertionError(k)


# -- triggers -----------------------------------------------------------------

_FLIP = {Event.MIN_CHANGE: Event.MAX_CHANGE, Event.MAX_CHANGE: Event.MIN_CHANGE}


def trigger_map(n: ViewNode, events, store: Store) -> set[tuple[int, Event]]:
    """Expand expression-level bound events into variable subscriptions.

    ``events`` is one ``Event`` or an iterable of them.  An if-then-else
    drops the subscriptions of the unselected branch only once its
    condition reads as ground on ``store``.
    """
    if isinstance(events, Event):
        events = (events,)
    out: set = set()
    _triggers(n, frozenset(events), store, out)
    return out


def _triggers(n, events, st, out):
    k = n.kind
    if k is Kind.CONST:
        return
    if k is Kind.VAR:
        v = st.var(n.payload)
        for e in events:
            out.add((v, e))
        return
    if k is Kind.ADD or k is Kind.SUM or (k is Kind.LINEAR and n.payload > 0):
        for c in n.children:
            _triggers(c, events, st, out)
        return
    flipped = frozenset(_FLIP.get(e, e) for e in events)
    if k is Kind.NEG or k is Kind.LINEAR:
        _triggers(n.children[0], flipped, st, out)
        return
    if k is Kind.SUB:
        _triggers(n.children[0], events, st, out)
        _triggers(n.children[1], flipped, st, out)
        return
    both = frozenset(BOTH)
    if k is Kind.ITE:
        c, t, f = n.children
        _triggers(c, both, st, out)
        lo, hi = bounds(c, st)
        # only a ground condition may drop a branch
        if lo == hi:
            _triggers(t if lo >= 1 else f, both, st, out)
        else:
            _triggers(t, both, st, out)
            _triggers(f, both, st, out)
        return
    for c in n.children:
        _triggers(c, both, st, out)


def bounds(n: ViewNode, st: Store) -> tuple[int, int]:
    """Current (min, max) of ``n`` on ``st`` without counting calls."""
    v = build_view(n, DispatchMode.STATIC, st)
    return v.min(), v.max()


# -- shared arithmetic helpers --------------------------------------------------


def _cdiv(a: int, b: int) -> int:
    return -((-a) // b)


def mul_bounds(xl, xh, yl, yh):
    a, b, c, d = xl * yl, xl * yh, xh * yl, xh * yh
    lo = min(a, b, c, d)
    hi = max(a, b, c, d)
    check_int64(lo)
    check_int64(hi)
    return lo, hi


def mul_support_ge(i, yl, yh):
    """Hull of {x : x*y >= i for some y in [yl..yh]} as (lo, hi); None = unbounded."""
    if yl <= 0 <= yh and i <= 0:
        return None, None
    pos = yh >= 1
    negp = yl <= -1
    if pos and negp:
        return None, None
    if pos:
        p1 = max(yl, 1)
        return min(_cdiv(i, p1), _cdiv(i, yh)), None
    if negp:
        n2 = min(yh, -1)
        return None, max(i // yl, i // n2)
    return 1, 0


def mul_support_le(i, yl, yh):
    """Hull of {x : x*y <= i for some y in [yl..yh]} as (lo, hi); None = unbounded."""
    if yl <= 0 <= yh and i >= 0:
        return None, None
    pos = yh >= 1
    negp = yl <= -1
    if pos and negp:
        return None, None
    if pos:
        p1 = max(yl, 1)
        return None, max(i // p1, i // yh)
    if negp:
        n2 = min(yh, -1)
        return min(_cdiv(i, yl), _cdiv(i, n2)), None
    return 1, 0


def sqr_bounds(lo, hi):
    if lo >= 0:
        r = lo * lo, hi * hi
    elif hi <= 0:
        r = hi * hi, lo * lo
    else:
        r = 0, max(lo * lo, hi * hi)
    check_int64(r[1])
    return r


def ceil_sqrt(i: int) -> int:
    r = isqrt(i)
    return r if r * r == i else r + 1


# -- views over plain variables -------------------------------------------------


class VarView:
    """A bare variable used as a view; reads the store directly."""

    __slots__ = ("st", "v", "node")

    def __init__(self, st: Store, v: int, node: Optional[ViewNode] = None):
        self.st = st
        self.v = v
        self.node = node if node is not None else var(st.names[v])

    def min(self):
        return self.st.lo[self.v]

    def max(self):
        return self.st.hi[self.v]

    def bounds(self):
        return self.st.lo[self.v], self.st.hi[self.v]

    def upd_min(self, i):
        return self.st.set_lo(self.v, i)

    def upd_max(self, i):
        return self.st.set_hi(self.v, i)

    def __repr__(self):
        return f"VarView({self.st.names[self.v]})"


class ConstView:
    __slots__ = ("k", "node")

    def __init__(self, k: int):
        self.k = k
        self.node = const(k)

    def min(self):
        return self.k

    def max(self):
        return self.k

    def bounds(self):
        return self.k, self.k

    def upd_min(self, i):
        return i <= self.k

    def upd_max(self, i):
        return i >= self.k


# -- dynamic realization --------------------------------------------------------


class DynView:
    """Base of the runtime-dispatched view objects.

    Composite nodes cache their bounds against ``store.version``; the cache
    needs no trailing because every bound change and every backtrack bumps
    the version.
    """

    __slots__ = ("st", "node", "cache", "_ver", "_lo", "_hi")

    def __init__(self, st, node, cache=True):
        self.st = st
        self.node = node
        self.cache = cache
        self._ver = -1
        self._lo = 0
        self._hi = 0

    def min(self):
        st = self.st
        st.view_calls += 1
        if not self.cache or self._ver != st.version:
            self._lo, self._hi = self.compute()
            self._ver = st.version
        return self._lo

    def max(self):
        st = self.st
        st.view_calls += 1
        if not self.cache or self._ver != st.version:
            self._lo, self._hi = self.compute()
            self._ver = st.version
        return self._hi

    def bounds(self):
        return self.min(), self.max()

    def upd_min(self, i):
        self.st.view_calls += 1
        return self._upd_min(i)

    def upd_max(self, i):
        self.st.view_calls += 1
        return self._upd_max(i)


class DVar(DynView):
    __slots__ = ("v",)

    def __init__(self, st, node, cache=True):
        super().__init__(st, node, cache)
        self.v = st.var(node.payload)

    def min(self):
        self.st.view_calls += 1
        return self.st.lo[self.v]

    def max(self):
        self.st.view_calls += 1
        return self.st.hi[self.v]

    def _upd_min(self, i):
        return self.st.set_lo(self.v, i)

    def _upd_max(self, i):
        return self.st.set_hi(self.v, i)


class DConst(DynView):
    __slots__ = ("k",)

    def __init__(self, st, node, cache=True):
        super().__init__(st, node, cache)
        self.k = node.payload

    def min(self):
        self.st.view_calls += 1
        return self.k

    def max(self):
        self.st.view_calls += 1
        return self.k

    def _upd_min(self, i):
        return i <= self.k

    def _upd_max(self, i):
        return i >= self.k


class _Dyn1(DynView):
    __slots__ = ("x",)

    def __init__(self, st, node, cache, kids):
        super().__init__(st, node, cache)
        (self.x,) = kids


class _Dyn2(DynView):
    __slots__ = ("x", "y")

    def __init__(self, st, node, cache, kids):
        super().__init__(st, node, cache)
        self.x, self.y = kids


class DAdd(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 2
        return self.x.min() + self.y.min(), self.x.max() + self.y.max()

    def _upd_min(self, i):
        self.st.arith_ops += 2
        return self.x.upd_min(i - self.y.max()) and self.y.upd_min(i - self.x.max())

    def _upd_max(self, i):
        self.st.arith_ops += 2
        return self.x.upd_max(i - self.y.min()) and self.y.upd_max(i - self.x.min())


class DSub(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 2
        return self.x.min() - self.y.max(), self.x.max() - self.y.min()

    def _upd_min(self, i):
        self.st.arith_ops += 2
        return self.x.upd_min(i + self.y.min()) and self.y.upd_max(self.x.max() - i)

    def _upd_max(self, i):
        self.st.arith_ops += 2
        return self.x.upd_max(i + self.y.max()) and self.y.upd_min(self.x.min() - i)


class DNeg(_Dyn1):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 2
        return -self.x.max(), -self.x.min()

    def _upd_min(self, i):
        self.st.arith_ops += 1
        return self.x.upd_max(-i)

    def _upd_max(self, i):
        self.st.arith_ops += 1
        return self.x.upd_min(-i)


class DLinear(_Dyn1):
    __slots__ = ("a",)

    def __init__(self, st, node, cache, kids):
        super().__init__(st, node, cache, kids)
        self.a = node.payload

    def compute(self):
        a = self.a
        self.st.arith_ops += 2
        if a > 0:
            return check_int64(a * self.x.min()), check_int64(a * self.x.max())
        return check_int64(a * self.x.max()), check_int64(a * self.x.min())

    def _upd_min(self, i):
        a = self.a
        self.st.arith_ops += 1
        if a > 0:
            return self.x.upd_min(-((-i) // a))
        return self.x.upd_max(i // a)

    def _upd_max(self, i):
        a = self.a
        self.st.arith_ops += 1
        if a > 0:
            return self.x.upd_max(i // a)
        return self.x.upd_min(-((-i) // a))


class DSum(DynView):
    __slots__ = ("xs",)

    def __init__(self, st, node, cache, kids):
        super().__init__(st, node, cache)
        self.xs = list(kids)

    def compute(self):
        lo = hi = 0
        for x in self.xs:
            lo += x.min()
            hi += x.max()
        self.st.arith_ops += 2 * len(self.xs)
        return lo, hi

    # A term is only visited when its derived bound is tighter than the
    # bound it already has; otherwise the update could not change anything.
    def _upd_min(self, i):
        bs = [x.bounds() for x in self.xs]
        s = sum(b[1] for b in bs)
        self.st.arith_ops += 3 * len(bs)
        for x, (lo, hi) in zip(self.xs, bs):
            t = i - (s - hi)
            if t > lo and not x.upd_min(t):
                return False
        return True

    def _upd_max(self, i):
        bs = [x.bounds() for x in self.xs]
        s = sum(b[0] for b in bs)
        self.st.arith_ops += 3 * len(bs)
        for x, (lo, hi) in zip(self.xs, bs):
            t = i - (s - lo)
            if t < hi and not x.upd_max(t):
                return False
        return True


def _apply_support(x, lo, hi):
    if lo is not None and hi is not None and lo > hi:
        return False
    if lo is not None and not x.upd_min(lo):
        return False
    if hi is not None and not x.upd_max(hi):
        return False
    return True


class DMul(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 4
        return mul_bounds(self.x.min(), self.x.max(), self.y.min(), self.y.max())

    def _upd_min(self, i):
        x, y = self.x, self.y
        self.st.arith_ops += 4
        lo, hi = mul_support_ge(i, y.min(), y.max())
        if not _apply_support(x, lo, hi):
            return False
        lo, hi = mul_support_ge(i, x.min(), x.max())
        return _apply_support(y, lo, hi)

    def _upd_max(self, i):
        x, y = self.x, self.y
        self.st.arith_ops += 4
        lo, hi = mul_support_le(i, y.min(), y.max())
        if not _apply_support(x, lo, hi):
            return False
        lo, hi = mul_support_le(i, x.min(), x.max())
        return _apply_support(y, lo, hi)


class DSqr(_Dyn1):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 2
        return sqr_bounds(self.x.min(), self.x.max())

    def _upd_min(self, i):
        if i <= 0:
            return True
        self.st.arith_ops += 2
        r = ceil_sqrt(i)
        x = self.x
        if x.min() > -r and not x.upd_min(r):
            return False
        if x.max() < r and not x.upd_max(-r):
            return False
        return True

    def _upd_max(self, i):
        if i < 0:
            return False
        self.st.arith_ops += 2
        r = isqrt(i)
        return self.x.upd_min(-r) and self.x.upd_max(r)


class DAbs(_Dyn1):
    __slots__ = ()

    def compute(self):
        lo, hi = self.x.min(), self.x.max()
        self.st.arith_ops += 2
        if lo > 0:
            return lo, hi
        if hi < 0:
            return -hi, -lo
        return 0, max(-lo, hi)

    def _upd_min(self, i):
        x = self.x
        self.st.arith_ops += 1
        if i < 0:
            i = 0
        if x.min() > 0:
            return x.upd_min(i)
        if x.max() < 0:
            return x.upd_max(-i)
        return True

    def _upd_max(self, i):
        if i < 0:
            return False
        self.st.arith_ops += 1
        return self.x.upd_min(-i) and self.x.upd_max(i)


class DMin2(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 2
        return min(self.x.min(), self.y.min()), min(self.x.max(), self.y.max())

    def _upd_min(self, i):
        return self.x.upd_min(i) and self.y.upd_min(i)

    def _upd_max(self, i):
        x, y = self.x, self.y
        if y.min() > i and not x.upd_max(i):
            return False
        if x.min() > i and not y.upd_max(i):
            return False
        return True


class DMax2(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 2
        return max(self.x.min(), self.y.min()), max(self.x.max(), self.y.max())

    def _upd_max(self, i):
        return self.x.upd_max(i) and self.y.upd_max(i)

    def _upd_min(self, i):
        x, y = self.x, self.y
        if y.max() < i and not x.upd_min(i):
            return False
        if x.max() < i and not y.upd_min(i):
            return False
        return True


def _dyn_eq_enforce(x, y):
    return (x.upd_min(y.min()) and x.upd_max(y.max())
            and y.upd_min(x.min()) and y.upd_max(x.max()))


def _dyn_neq_enforce(x, y):
    v = y.min()
    if v == y.max():
        if x.min() == v and not x.upd_min(v + 1):
            return False
        if x.max() == v and not x.upd_max(v - 1):
            return False
    v = x.min()
    if v == x.max():
        if y.min() == v and not y.upd_min(v + 1):
            return False
        if y.max() == v and not y.upd_max(v - 1):
            return False
    return True


def _eq_bounds(xl, xh, yl, yh):
    lo = 1 if (xl == xh == yl == yh) else 0
    hi = 0 if (xh < yl or yh < xl) else 1
    return lo, hi


class DReifEq(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 1
        return _eq_bounds(self.x.min(), self.x.max(), self.y.min(), self.y.max())

    def _upd_min(self, i):
        if i <= 0:
            return True
        if i > 1:
            return False
        return _dyn_eq_enforce(self.x, self.y)

    def _upd_max(self, i):
        if i >= 1:
            return True
        if i < 0:
            return False
        return _dyn_neq_enforce(self.x, self.y)


class DReifNeq(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 1
        lo, hi = _eq_bounds(self.x.min(), self.x.max(), self.y.min(), self.y.max())
        return 1 - hi, 1 - lo

    def _upd_min(self, i):
        if i <= 0:
            return True
        if i > 1:
            return False
        return _dyn_neq_enforce(self.x, self.y)

    def _upd_max(self, i):
        if i >= 1:
            return True
        if i < 0:
            return False
        return _dyn_eq_enforce(self.x, self.y)


class DReifLeq(_Dyn2):
    __slots__ = ()

    def compute(self):
        self.st.arith_ops += 1
        lo = 1 if self.x.max() <= self.y.min() else 0
        hi = 0 if self.x.min() > self.y.max() else 1
        return lo, hi

    def _upd_min(self, i):
        if i <= 0:
            return True
        if i > 1:
            return False
        return self.x.upd_max(self.y.max()) and self.y.upd_min(self.x.min())

    def _upd_max(self, i):
        if i >= 1:
            return True
        if i < 0:
            return False
        return self.x.upd_min(self.y.min() + 1) and self.y.upd_max(self.x.max() - 1)


class DIte(DynView):
    __slots__ = ("c", "t", "f")

    def __init__(self, st, node, cache, kids):
        super().__init__(st, node, cache)
        self.c, self.t, self.f = kids

    def compute(self):
        c = self.c
        if c.min() >= 1:
            return self.t.min(), self.t.max()
        if c.max() <= 0:
            return self.f.min(), self.f.max()
        self.st.arith_ops += 2
        return min(self.t.min(), self.f.min()), max(self.t.max(), self.f.max())

    def _upd_min(self, i):
        c, t, f = self.c, self.t, self.f
        if c.min() >= 1:
            return t.upd_min(i)
        if c.max() <= 0:
            return f.upd_min(i)
        tinf = t.max() < i
        finf = f.max() < i
        if tinf and finf:
            return False
        if tinf:
            return c.upd_max(0) and f.upd_min(i)
        if finf:
            return c.upd_min(1) and t.upd_min(i)
        return True

    def _upd_max(self, i):
        c, t, f = self.c, self.t, self.f
        if c.min() >= 1:
            return t.upd_max(i)
        if c.max() <= 0:
            return f.upd_max(i)
        tinf = t.min() > i
        finf = f.min() > i
        if tinf and finf:
            return False
        if tinf:
            return c.upd_max(0) and f.upd_max(i)
        if finf:
            return c.upd_min(1) and t.upd_max(i)
        return True


_DYN = {
    Kind.ADD: DAdd, Kind.SUB: DSub, Kind.NEG: DNeg, Kind.LINEAR: DLinear,
    Kind.SUM: DSum, Kind.MUL: DMul, Kind.SQR: DSqr, Kind.ABS: DAbs,
    Kind.MIN2: DMin2, Kind.MAX2: DMax2, Kind.REIF_EQ: DReifEq,
    Kind.REIF_NEQ: DReifNeq, Kind.REIF_LEQ: DReifLeq, Kind.ITE: DIte,
}


def _build_dynamic(n: ViewNode, st: Store, cache: bool):
    if n.kind is Kind.VAR:
        return DVar(st, n, cache)
    if n.kind is Kind.CONST:
        return DConst(st, n, cache)
    kids = [_build_dynamic(c, st, cache) for c in n.children]
    return _DYN[n.kind](st, n, cache, kids)


# -- static realization ----------------------------------------------------------

from . import _codegen  # noqa: E402  (needs the helpers above)


class StaticView:
    """Generated, fully inlined view; methods are plain closures."""

    __slots__ = ("node", "min", "max", "upd_min", "upd_max", "bounds")

    def __init__(self, st: Store, node: ViewNode):
        self.node = node
        factory, vnames, consts = _codegen.factory_for(node)
        args = [st.var(name) for name in vnames] + consts
        self.min, self.max, self.upd_min, self.upd_max, self.bounds = factory(st, *args)

    def __repr__(self):
        return f"StaticView({to_text(self.node)})"


def build_view(n: ViewNode, mode: DispatchMode, store: Store, *, cache: bool = True):
    """Instantiate a box view for ``n`` over ``store``.

    A bare variable or constant always yields the plain ``VarView`` /
    ``ConstView``; composite expressions follow ``mode``.  ``cache``
    toggles bound caching in the dynamic realization.
    """
    if n.kind is Kind.VAR:
        return VarView(store, store.var(n.payload), n)
    if n.kind is Kind.CONST:
        return ConstView(n.payload)
    if mode is DispatchMode.STATIC:
        return StaticView(store, n)
    return _build_dynamic(n, store, cache)
