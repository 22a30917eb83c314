"""Source generation for statically specialized views.

Each expression shape (the tree with variable names and constants
abstracted into parameters) is turned into one Python factory whose
closures evaluate bounds and perform updates with every child operation
inlined.  Bound expressions are emitted on demand: only the sides a
parent actually reads are computed.
"""
from __future__ import annotations

from math import isqrt

from .approx import INT64_MAX, INT64_MIN
from .views import Kind, ViewNode, ceil_sqrt, mul_support_ge, mul_support_le

LO, HI = 1, 2
BOTH_SIDES = LO | HI


def _overflow(*vals):
    raise OverflowError(f"view arithmetic overflow: {vals}")


_NAMESPACE = {
    "MSG": mul_support_ge,
    "MSL": mul_support_le,
    "CS": ceil_sqrt,
    "ISQ": isqrt,
    "OVF": _overflow,
    "MN": INT64_MIN,
    "MX": INT64_MAX,
}


class _Shape:
    """Abstracts a node into a parameterised shape key."""

    def __init__(self):
        self.vars: dict[str, str] = {}
        self.consts: list[int] = []

    def key(self, n: ViewNode) -> str:
        if n.kind is Kind.VAR:
            p = self.vars.get(n.payload)
            if p is None:
                p = self.vars[n.payload] = f"v{len(self.vars)}"
            return p
        if n.kind is Kind.CONST:
            self.consts.append(n.payload)
            return f"k{len(self.consts) - 1}"
        inner = " ".join(self.key(c) for c in n.children)
        if n.kind is Kind.LINEAR:
            return f"(lin {n.payload} {inner})"
        return f"({n.kind.value} {inner})"


class _Gen:
    def __init__(self, shape: _Shape):
        self.shape = shape
        self.lines: list[str] = []
        self.count = 0
        self._const_pos = 0
        # id(node) -> (indent, lo, hi): bound temporaries that are still
        # valid, i.e. in scope and with no variable written since
        self.memo: dict[int, tuple] = {}

    def tmp(self, prefix="t") -> str:
        self.count += 1
        return f"{prefix}{self.count}"

    def emit(self, ind: int, text: str):
        if self.memo:
            stale = [k for k, e in self.memo.items() if e[0] > ind]
            for k in stale:
                del self.memo[k]
        self.lines.append("    " * ind + text)

    def ops(self, ind: int, n: int):
        if n:
            self.emit(ind, f"S.arith_ops += {n}")

    def val(self, ind: int, expr: str) -> str:
        """Bind ``expr`` to a fresh local unless it is already a plain name."""
        if expr.isidentifier() or _is_int(expr):
            return expr
        t = self.tmp("a")
        self.emit(ind, f"{t} = {expr}")
        return t

    # -- bounds ------------------------------------------------------------

    def bounds(self, n: ViewNode, ind: int, need: int = BOTH_SIDES):
        """Emit code for the bounds of ``n``; returns (lo_expr, hi_expr)."""
        k = n.kind
        if k is Kind.VAR:
            p = self.shape.vars[n.payload]
            return f"L[{p}]", f"H[{p}]"
        if k is Kind.CONST:
            p = self._const_name(n)
            return p, p
        hit = self.memo.get(id(n))
        if hit and hit[0] <= ind and (hit[1] or not need & LO) and (hit[2] or not need & HI):
            return hit[1], hit[2]
        lo, hi = getattr(self, "_b_" + k.name.lower())(n, ind, need)
        if all(e is None or e.isidentifier() for e in (lo, hi)):
            self.memo[id(n)] = (ind, lo, hi)
        return lo, hi

    def _const_name(self, n):
        # the generator revisits subtrees in arbitrary order, so constants
        # are looked up by node identity rather than by a running counter
        return self.const_names[id(n)]

    def _pair(self, ind, need, lo_expr, hi_expr):
        lo = hi = None
        if need & LO:
            lo = self.tmp("l")
            self.emit(ind, f"{lo} = {lo_expr}")
        if need & HI:
            hi = self.tmp("h")
            self.emit(ind, f"{hi} = {hi_expr}")
        return lo, hi

    def _b_add(self, n, ind, need):
        x, y = n.children
        xl, xh = self.bounds(x, ind, need)
        yl, yh = self.bounds(y, ind, need)
        self.ops(ind, 2)
        return self._pair(ind, need, f"{xl} + {yl}", f"{xh} + {yh}")

    def _b_sub(self, n, ind, need):
        x, y = n.children
        xl, xh = self.bounds(x, ind, need)
        yl, yh = self.bounds(y, ind, _swap(need))
        self.ops(ind, 2)
        return self._pair(ind, need, f"{xl} - {yh}", f"{xh} - {yl}")

    def _b_neg(self, n, ind, need):
        xl, xh = self.bounds(n.children[0], ind, _swap(need))
        self.ops(ind, 2)
        return self._pair(ind, need, f"-{xh}", f"-{xl}")

    def _b_linear(self, n, ind, need):
        a = n.payload
        if a > 0:
            xl, xh = self.bounds(n.children[0], ind, need)
            lo, hi = self._pair(ind, need, f"{a} * {xl}", f"{a} * {xh}")
        else:
            xl, xh = self.bounds(n.children[0], ind, _swap(need))
            lo, hi = self._pair(ind, need, f"{a} * {xh}", f"{a} * {xl}")
        self.ops(ind, 2)
        self._check(ind, lo, hi)
        return lo, hi

    def _check(self, ind, lo, hi):
        if lo is not None:
            self.emit(ind, f"if {lo} < MN: OVF({lo})")
        if hi is not None:
            self.emit(ind, f"if {hi} > MX: OVF({hi})")

    def _b_sum(self, n, ind, need):
        los, his = [], []
        for c in n.children:
            cl, ch = self.bounds(c, ind, need)
            los.append(cl)
            his.append(ch)
        self.ops(ind, 2 * len(n.children))
        return self._pair(ind, need, " + ".join(los) if need & LO else "",
                          " + ".join(his) if need & HI else "")

    def _b_mul(self, n, ind, need):
        x, y = n.children
        xl, xh = (self.val(ind, e) for e in self.bounds(x, ind))
        yl, yh = (self.val(ind, e) for e in self.bounds(y, ind))
        lo = self.tmp("l") if need & LO else None
        hi = self.tmp("h") if need & HI else None
        self.ops(ind, 4)

        def assign(ind2, lo_expr, hi_expr):
            parts = []
            if lo:
                parts.append(f"{lo} = {lo_expr}")
            if hi:
                parts.append(f"{hi} = {hi_expr}")
            self.emit(ind2, "; ".join(parts))

        # sign cases pick the extreme products without evaluating all four
        cases = (
            (f"{xl} >= 0", ((f"{yl} >= 0", f"{xl} * {yl}", f"{xh} * {yh}"),
                            (f"{yh} <= 0", f"{xh} * {yl}", f"{xl} * {yh}"),
                            (None, f"{xh} * {yl}", f"{xh} * {yh}"))),
            (f"{xh} <= 0", ((f"{yl} >= 0", f"{xl} * {yh}", f"{xh} * {yl}"),
                            (f"{yh} <= 0", f"{xh} * {yh}", f"{xl} * {yl}"),
                            (None, f"{xl} * {yh}", f"{xl} * {yl}"))),
            (None, ((f"{yl} >= 0", f"{xl} * {yh}", f"{xh} * {yh}"),
                    (f"{yh} <= 0", f"{xh} * {yl}", f"{xl} * {yl}"),
                    (None, None, None))),
        )
        for j, (xc, inner) in enumerate(cases):
            self.emit(ind, f"{'if' if j == 0 else 'elif'} {xc}:" if xc else "else:")
            for k, (yc, le, he) in enumerate(inner):
                self.emit(ind + 1, f"{'if' if k == 0 else 'elif'} {yc}:" if yc else "else:")
                if le is None:
                    # both factors straddle zero
                    if lo:
                        self.emit(ind + 2, f"a = {xl} * {yh}; b = {xh} * {yl}; {lo} = a if a < b else b")
                    if hi:
                        self.emit(ind + 2, f"a = {xl} * {yl}; b = {xh} * {yh}; {hi} = a if a > b else b")
                else:
                    assign(ind + 2, le, he)
        self._check(ind, lo, hi)
        return lo, hi

    def _b_sqr(self, n, ind, need):
        xl, xh = self.bounds(n.children[0], ind)
        xl = self.val(ind, xl)
        xh = self.val(ind, xh)
        lo, hi = self.tmp("l"), self.tmp("h")
        self.ops(ind, 2)
        self.emit(ind, f"if {xl} >= 0: {lo} = {xl} * {xl}; {hi} = {xh} * {xh}")
        self.emit(ind, f"elif {xh} <= 0: {lo} = {xh} * {xh}; {hi} = {xl} * {xl}")
        self.emit(ind, f"else: {lo} = 0; {hi} = max({xl} * {xl}, {xh} * {xh})")
        self._check(ind, None, hi)
        return lo, hi

    def _b_abs(self, n, ind, need):
        xl, xh = self.bounds(n.children[0], ind)
        xl = self.val(ind, xl)
        xh = self.val(ind, xh)
        lo, hi = self.tmp("l"), self.tmp("h")
        self.ops(ind, 2)
        self.emit(ind, f"if {xl} > 0: {lo} = {xl}; {hi} = {xh}")
        self.emit(ind, f"elif {xh} < 0: {lo} = -{xh}; {hi} = -{xl}")
        self.emit(ind, f"else: {lo} = 0; {hi} = -{xl} if -{xl} > {xh} else {xh}")
        return lo, hi

    def _minmax(self, n, ind, need, fn):
        x, y = n.children
        xl, xh = self.bounds(x, ind, need)
        yl, yh = self.bounds(y, ind, need)
        self.ops(ind, 2)
        return self._pair(ind, need, f"{fn}({xl}, {yl})", f"{fn}({xh}, {yh})")

    def _b_min2(self, n, ind, need):
        return self._minmax(n, ind, need, "min")

    def _b_max2(self, n, ind, need):
        return self._minmax(n, ind, need, "max")

    def _eq_pair(self, n, ind):
        x, y = n.children
        xl, xh = self.bounds(x, ind)
        yl, yh = self.bounds(y, ind)
        xl, xh, yl, yh = (self.val(ind, e) for e in (xl, xh, yl, yh))
        self.ops(ind, 1)
        return xl, xh, yl, yh

    def _b_reif_eq(self, n, ind, need):
        xl, xh, yl, yh = self._eq_pair(n, ind)
        return self._pair(ind, BOTH_SIDES,
                          f"1 if ({xl} == {xh} == {yl} == {yh}) else 0",
                          f"0 if ({xh} < {yl} or {yh} < {xl}) else 1")

    def _b_reif_neq(self, n, ind, need):
        xl, xh, yl, yh = self._eq_pair(n, ind)
        return self._pair(ind, BOTH_SIDES,
                          f"1 if ({xh} < {yl} or {yh} < {xl}) else 0",
                          f"0 if ({xl} == {xh} == {yl} == {yh}) else 1")

    def _b_reif_leq(self, n, ind, need):
        x, y = n.children
        xl, xh = self.bounds(x, ind)
        yl, yh = self.bounds(y, ind)
        self.ops(ind, 1)
        return self._pair(ind, BOTH_SIDES,
                          f"1 if {xh} <= {yl} else 0",
                          f"0 if {xl} > {yh} else 1")

    def _b_ite(self, n, ind, need):
        c, t, f = n.children
        cl, ch = self.bounds(c, ind)
        cl = self.val(ind, cl)
        ch = self.val(ind, ch)
        lo, hi = self.tmp("l"), self.tmp("h")
        self.emit(ind, f"if {cl} >= 1:")
        self._assign_bounds(t, ind + 1, lo, hi)
        self.emit(ind, f"elif {ch} <= 0:")
        self._assign_bounds(f, ind + 1, lo, hi)
        self.emit(ind, "else:")
        tl, th = self.bounds(t, ind + 1)
        fl, fh = self.bounds(f, ind + 1)
        self.emit(ind + 1, "S.arith_ops += 2")
        self.emit(ind + 1, f"{lo} = min({tl}, {fl}); {hi} = max({th}, {fh})")
        return lo, hi

    def _assign_bounds(self, n, ind, lo, hi):
        bl, bh = self.bounds(n, ind)
        self.emit(ind, f"{lo} = {bl}; {hi} = {bh}")

    # -- updates -------------------------------------------------------------

    def upd(self, n: ViewNode, is_min: bool, i: str, ind: int):
        """Emit an inlined update; any failure returns False from the closure."""
        k = n.kind
        if k is Kind.VAR:
            p = self.shape.vars[n.payload]
            i = self.val(ind, i)
            if is_min:
                self.emit(ind, f"if {i} > L[{p}] and not SL({p}, {i}): return False")
            else:
                self.emit(ind, f"if {i} < H[{p}] and not SH({p}, {i}): return False")
            self.memo.clear()
            return
        if k is Kind.CONST:
            c = self._const_name(n)
            self.emit(ind, f"if {i} {'>' if is_min else '<'} {c}: return False")
            return
        i = self.val(ind, i)
        getattr(self, "_u_" + k.name.lower())(n, is_min, i, ind)

    def _u_add(self, n, is_min, i, ind):
        x, y = n.children
        side = HI if is_min else LO
        pick = 1 if is_min else 0
        self.ops(ind, 2)
        yb = self.bounds(y, ind, side)[pick]
        self.upd(x, is_min, f"{i} - {yb}", ind)
        xb = self.bounds(x, ind, side)[pick]
        self.upd(y, is_min, f"{i} - {xb}", ind)

    def _u_sub(self, n, is_min, i, ind):
        x, y = n.children
        self.ops(ind, 2)
        if is_min:
            yl = self.bounds(y, ind, LO)[0]
            self.upd(x, True, f"{i} + {yl}", ind)
            xh = self.bounds(x, ind, HI)[1]
            self.upd(y, False, f"{xh} - {i}", ind)
        else:
            yh = self.bounds(y, ind, HI)[1]
            self.upd(x, False, f"{i} + {yh}", ind)
            xl = self.bounds(x, ind, LO)[0]
            self.upd(y, True, f"{xl} - {i}", ind)

    def _u_neg(self, n, is_min, i, ind):
        self.ops(ind, 1)
        self.upd(n.children[0], not is_min, f"-{i}", ind)

    def _u_linear(self, n, is_min, i, ind):
        a = n.payload
        self.ops(ind, 1)
        x = n.children[0]
        up = f"-((-{i}) // {a})"
        down = f"{i} // {a}"
        if a > 0:
            self.upd(x, is_min, up if is_min else down, ind)
        else:
            self.upd(x, not is_min, down if is_min else up, ind)

    def _u_sum(self, n, is_min, i, ind):
        pick = 1 if is_min else 0
        bs = [tuple(self.val(ind, e) for e in self.bounds(c, ind)) for c in n.children]
        s = self.tmp("s")
        self.emit(ind, f"{s} = {' + '.join(b[pick] for b in bs)}")
        self.ops(ind, 3 * len(bs))
        for c, (lo, hi) in zip(n.children, bs):
            t = self.tmp("d")
            m = hi if is_min else lo
            self.emit(ind, f"{t} = {i} - ({s} - {m})")
            self.emit(ind, f"if {t} {'>' if is_min else '<'} {lo if is_min else hi}:")
            self.upd(c, is_min, t, ind + 1)

    def _u_mul(self, n, is_min, i, ind):
        x, y = n.children
        fn = "MSG" if is_min else "MSL"
        self.ops(ind, 4)
        for target, other in ((x, y), (y, x)):
            ol, oh = self.bounds(other, ind)
            a, b = self.tmp("sa"), self.tmp("sb")
            self.emit(ind, f"{a}, {b} = {fn}({i}, {ol}, {oh})")
            self.emit(ind, f"if {a} is not None and {b} is not None and {a} > {b}: return False")
            self.emit(ind, f"if {a} is not None:")
            self.upd(target, True, a, ind + 1)
            self.emit(ind, f"if {b} is not None:")
            self.upd(target, False, b, ind + 1)

    def _u_sqr(self, n, is_min, i, ind):
        x = n.children[0]
        r = self.tmp("r")
        if is_min:
            self.emit(ind, f"if {i} > 0:")
            ind += 1
            self.ops(ind, 2)
            self.emit(ind, f"{r} = CS({i})")
            xl = self.bounds(x, ind, LO)[0]
            self.emit(ind, f"if {xl} > -{r}:")
            self.upd(x, True, r, ind + 1)
            xh = self.bounds(x, ind, HI)[1]
            self.emit(ind, f"if {xh} < {r}:")
            self.upd(x, False, f"-{r}", ind + 1)
        else:
            self.emit(ind, f"if {i} < 0: return False")
            self.ops(ind, 2)
            self.emit(ind, f"{r} = ISQ({i})")
            self.upd(x, True, f"-{r}", ind)
            self.upd(x, False, r, ind)

    def _u_abs(self, n, is_min, i, ind):
        x = n.children[0]
        self.ops(ind, 1)
        if is_min:
            t = self.tmp("c")
            self.emit(ind, f"{t} = {i} if {i} > 0 else 0")
            xl = self.val(ind, self.bounds(x, ind, LO)[0])
            self.emit(ind, f"if {xl} > 0:")
            self.upd(x, True, t, ind + 1)
            self.emit(ind, "else:")
            xh = self.bounds(x, ind + 1, HI)[1]
            self.emit(ind + 1, f"if {xh} < 0:")
            self.upd(x, False, f"-{t}", ind + 2)
        else:
            self.emit(ind, f"if {i} < 0: return False")
            self.upd(x, True, f"-{i}", ind)
            self.upd(x, False, i, ind)

    def _u_min2(self, n, is_min, i, ind):
        self._u_minmax(n, is_min, i, ind, dual=False)

    def _u_max2(self, n, is_min, i, ind):
        self._u_minmax(n, not is_min, i, ind, dual=True)

    def _u_minmax(self, n, towards_min, i, ind, dual):
        # For min2, towards_min means upd_min; max2 is handled as the mirror.
        x, y = n.children
        if towards_min:
            self.upd(x, not dual, i, ind)
            self.upd(y, not dual, i, ind)
            return
        side, pick, cmp = (HI, 1, "<") if dual else (LO, 0, ">")
        ob = self.bounds(y, ind, side)[pick]
        self.emit(ind, f"if {ob} {cmp} {i}:")
        self.upd(x, dual, i, ind + 1)
        ob = self.bounds(x, ind, side)[pick]
        self.emit(ind, f"if {ob} {cmp} {i}:")
        self.upd(y, dual, i, ind + 1)

    def _reified(self, n, is_min, i, ind, on_true, on_false):
        if is_min:
            self.emit(ind, f"if {i} > 1: return False")
            self.emit(ind, f"if {i} == 1:")
            on_true(n, ind + 1)
        else:
            self.emit(ind, f"if {i} < 0: return False")
            self.emit(ind, f"if {i} == 0:")
            on_false(n, ind + 1)
        # keep the block non-empty even when enforcing emits nothing
        self.emit(ind + 1, "pass")

    def _enforce_eq(self, n, ind):
        x, y = n.children
        self.upd(x, True, self.bounds(y, ind, LO)[0], ind)
        self.upd(x, False, self.bounds(y, ind, HI)[1], ind)
        self.upd(y, True, self.bounds(x, ind, LO)[0], ind)
        self.upd(y, False, self.bounds(x, ind, HI)[1], ind)

    def _enforce_neq(self, n, ind):
        x, y = n.children
        for a, b in ((x, y), (y, x)):
            bl, bh = self.bounds(b, ind)
            v = self.val(ind, bl)
            self.emit(ind, f"if {v} == {bh}:")
            al = self.bounds(a, ind + 1, LO)[0]
            self.emit(ind + 1, f"if {al} == {v}:")
            self.upd(a, True, f"{v} + 1", ind + 2)
            ah = self.bounds(a, ind + 1, HI)[1]
            self.emit(ind + 1, f"if {ah} == {v}:")
            self.upd(a, False, f"{v} - 1", ind + 2)

    def _enforce_leq(self, n, ind):
        x, y = n.children
        self.upd(x, False, self.bounds(y, ind, HI)[1], ind)
        self.upd(y, True, self.bounds(x, ind, LO)[0], ind)

    def _enforce_gt(self, n, ind):
        x, y = n.children
        yl = self.bounds(y, ind, LO)[0]
        self.upd(x, True, f"{yl} + 1", ind)
        xh = self.bounds(x, ind, HI)[1]
        self.upd(y, False, f"{xh} - 1", ind)

    def _u_reif_eq(self, n, is_min, i, ind):
        self._reified(n, is_min, i, ind, self._enforce_eq, self._enforce_neq)

    def _u_reif_neq(self, n, is_min, i, ind):
        self._reified(n, is_min, i, ind, self._enforce_neq, self._enforce_eq)

    def _u_reif_leq(self, n, is_min, i, ind):
        self._reified(n, is_min, i, ind, self._enforce_leq, self._enforce_gt)

    def _u_ite(self, n, is_min, i, ind):
        c, t, f = n.children
        cl, ch = self.bounds(c, ind)
        cl = self.val(ind, cl)
        ch = self.val(ind, ch)
        self.emit(ind, f"if {cl} >= 1:")
        self.upd(t, is_min, i, ind + 1)
        self.emit(ind + 1, "pass")
        self.emit(ind, f"elif {ch} <= 0:")
        self.upd(f, is_min, i, ind + 1)
        self.emit(ind + 1, "pass")
        self.emit(ind, "else:")
        ind += 1
        side, pick, cmp = (HI, 1, "<") if is_min else (LO, 0, ">")
        tb = self.val(ind, self.bounds(t, ind, side)[pick])
        fb = self.val(ind, self.bounds(f, ind, side)[pick])
        self.emit(ind, f"if {tb} {cmp} {i} and {fb} {cmp} {i}: return False")
        self.emit(ind, f"if {tb} {cmp} {i}:")
        self.upd(c, False, "0", ind + 1)
        self.upd(f, is_min, i, ind + 1)
        self.emit(ind + 1, "pass")
        self.emit(ind, f"elif {fb} {cmp} {i}:")
        self.upd(c, True, "1", ind + 1)
        self.upd(t, is_min, i, ind + 1)
        self.emit(ind + 1, "pass")


def _swap(need: int) -> int:
    return (LO if need & HI else 0) | (HI if need & LO else 0)


def _is_int(expr: str) -> bool:
    return expr.lstrip("-").isdigit()


def _number_consts(n: ViewNode, names: dict, counter: list):
    if n.kind is Kind.CONST:
        names[id(n)] = f"k{counter[0]}"
        counter[0] += 1
    for c in n.children:
        _number_consts(c, names, counter)


def generate_source(n: ViewNode) -> tuple[str, list[str], list[int]]:
    """Python source of the factory for ``n`` plus its variable/constant parameters."""
    shape = _Shape()
    shape.key(n)
    gen = _Gen(shape)
    gen.const_names = {}
    _number_consts(n, gen.const_names, [0])
    params = list(shape.vars.values()) + [f"k{j}" for j in range(len(shape.consts))]
    gen.emit(0, f"def make(S{''.join(', ' + p for p in params)}):")
    gen.emit(1, "L = S.lo; H = S.hi; SL = S.set_lo; SH = S.set_hi")
    gen.emit(1, "def bounds():")
    lo, hi = gen.bounds(n, 2)
    gen.emit(2, f"return {lo}, {hi}")
    gen.emit(1, "def vmin():")
    gen.emit(2, f"return {gen.bounds(n, 2, LO)[0]}")
    gen.emit(1, "def vmax():")
    gen.emit(2, f"return {gen.bounds(n, 2, HI)[1]}")
    for name, is_min in (("upd_min", True), ("upd_max", False)):
        gen.emit(1, f"def {name}(i):")
        gen.upd(n, is_min, "i", 2)
        gen.emit(2, "return True")
    gen.emit(1, "return vmin, vmax, upd_min, upd_max, bounds")
    return "\n".join(gen.lines) + "\n", list(shape.vars), shape.consts


_FACTORIES: dict[str, object] = {}


def factory_for(n: ViewNode):
    """Compiled factory for the shape of ``n``, with its actual parameters."""
    shape = _Shape()
    key = shape.key(n)
    factory = _FACTORIES.get(key)
    if factory is None:
        src, _, _ = generate_source(n)
        ns = dict(_NAMESPACE)
        exec(compile(src, f"<view {key[:60]}>", "exec"), ns)
        factory = _FACTORIES[key] = ns["make"]
    return factory, list(shape.vars), shape.consts
