"""Benchmark model builders and a small solve driver.

A builder turns an instance description into a ``Model``: plain data
(variables, constraints over expression trees, an optional objective).
``Model.post`` then decomposes it into a store under one ``ModelVariant``,
so every variant starts from the exact same constraint set.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, asdict
from typing import Optional

from .engine import (
    Brancher,
    SearchStats,
    Store,
    ValueSelect,
    VarSelect,
    branch_and_bound_min,
    dfs,
)
from .propagators import Constraint, Decomposition, ModelVariant
from .views import (
    ViewNode,
    abs_,
    add,
    const,
    min2,
    mul,
    reif_eq,
    reif_neq,
    sqr,
    sub,
    sum_,
    to_text,
    var,
)

__all__ = [
    "ModelVariant", "SeededRng", "Model", "PostedModel", "RunResult",
    "LinearSpec", "NonlinearSpec", "GolfersSpec", "GolombSpec", "LabsSpec", "EccSpec",
    "PROBLEMS", "REPORTED_VARIANTS", "spec_from_params", "solve_model",
]

MASK64 = (1 << 64) - 1


class SeededRng:
    """64-bit LCG; the output is the high 32 bits of the state."""

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u32(self) -> int:
        self.state = (self.state * self.MULTIPLIER + self.INCREMENT) & MASK64
        return self.state >> 32

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo..hi] by rejection of the biased tail."""
        if lo > hi:
            raise ValueError("empty range")
        span = hi - lo + 1
        if span > 1 << 32:
            raise ValueError("range wider than 32 bits")
        limit = ((1 << 32) // span) * span
        while True:
            r = self.next_u32()
            if r < limit:
                return lo + r % span

    def combination(self, n: int, k: int) -> tuple[int, ...]:
        """A uniformly random k-subset of range(n), sorted."""
        if not 0 < k <= n:
            raise ValueError(f"cannot choose {k} of {n}")
        while True:
            pick = [self.randint(0, n - 1) for _ in range(k)]
            if len(set(pick)) == k:
                return tuple(sorted(pick))


@dataclass
class Model:
    problem: str
    instance: str
    variables: list[tuple[str, int, int]]
    constraints: list[Constraint]
    decision: list[str]
    objective: Optional[ViewNode] = None
    share: bool = False
    project_terms: bool = False
    notes: list[str] = field(default_factory=list)

    def dump(self) -> str:
        lines = [f"# {self.problem} {self.instance}"]
        lines += [f"# {n}" for n in self.notes]
        lines += [f"var {name} {lo} {hi}" for name, lo, hi in self.variables]
        lines += [c.text() for c in self.constraints]
        if self.objective is not None:
            lines.append(f"minimize {to_text(self.objective)}")
        return "\n".join(lines) + "\n"

    def post(self, variant: ModelVariant, store: Optional[Store] = None, *,
             balanced: bool = False, cache: bool = True) -> PostedModel:
        st = store if store is not None else Store()
        for name, lo, hi in self.variables:
            st.new_var(lo, hi, name)
        dec = Decomposition(variant, balanced=balanced, share=self.share,
                            project_terms=self.project_terms and variant.uses_views,
                            cache=cache)
        ok = True
        for c in self.constraints:
            if not dec.post(st, c):
                ok = False
                break
        objective = None
        if ok and self.objective is not None:
            objective = dec.objective(st, self.objective)
            ok = st.fixpoint()
        brancher = Brancher(VarSelect.INPUT_ORDER, ValueSelect.MIN_VALUE,
                            [st.var(n) for n in self.decision])
        return PostedModel(self, variant, st, dec, objective, brancher, ok)


@dataclass
class PostedModel:
    model: Model
    variant: ModelVariant
    store: Store
    decomposition: Decomposition
    objective: object
    brancher: Brancher
    ok: bool

    def assignment(self) -> tuple[int, ...]:
        st = self.store
        return tuple(st.value(st.var(n)) for n in self.model.decision)


@dataclass
class RunResult:
    problem: str
    instance: str
    variant: str
    status: str
    stats: SearchStats
    objective: Optional[int] = None
    solutions: list = field(default_factory=list)

    def record(self) -> dict:
        s = self.stats
        return {
            "problem": self.problem,
            "instance": self.instance,
            "variant": self.variant,
            "status": self.status,
            "time_ms": round(s.time_ms, 3),
            "propagations": s.propagations,
            "fails": s.fails,
            "domain_updates": s.domain_updates,
            "view_calls": s.view_calls,
            "arith_ops": s.arith_ops,
            "solutions": s.solutions,
            "objective": self.objective,
        }


def solve_model(model: Model, variant: ModelVariant, *, all_solutions: bool = False,
                time_limit: Optional[float] = None, brancher: Optional[Brancher] = None,
                balanced: bool = False, keep: bool = False) -> RunResult:
    """Post ``model`` under ``variant`` on a fresh store and search.

    Satisfaction models stop at the first solution unless ``all_solutions``;
    models with an objective are minimised.  ``keep`` retains the decision
    assignments of the solutions found.
    """
    pm = model.post(variant, balanced=balanced)
    br = brancher or pm.brancher
    if brancher is not None and brancher.decision is None:
        br = Brancher(brancher.var_select, brancher.value_select, pm.brancher.decision)
    found: list = []
    res = RunResult(model.problem, model.instance, variant.value, "unsat", SearchStats())
    if not pm.ok:
        res.stats.fails = 1
        return res
    if model.objective is not None and not all_solutions:
        opt = branch_and_bound_min(pm.store, pm.objective, br, time_limit=time_limit)
        res.stats = opt.stats
        res.objective = opt.value
        if opt.solution is not None:
            names = pm.store.index
            res.solutions = [tuple(opt.solution[names[n]] for n in model.decision)] if keep else []
        if not opt.stats.complete:
            res.status = "timeout"
        else:
            res.status = "optimal" if opt.value is not None else "unsat"
        return res

    def on_solution(st):
        if keep:
            found.append(pm.assignment())

    stats = dfs(pm.store, br, on_solution, max_solutions=None if all_solutions else 1,
                time_limit=time_limit)
    res.stats = stats
    res.solutions = found
    if stats.solutions:
        res.status = "sat"
    elif not stats.complete:
        res.status = "timeout"
    return res


# -- instance descriptions ------------------------------------------------------------


def _positive(**kw):
    for k, v in kw.items():
        if v <= 0:
            raise ValueError(f"{k} must be positive, got {v}")


@dataclass(frozen=True)
class LinearSpec:
    n: int
    d: int
    c: int
    a: int
    seed: int = 1

    def __post_init__(self):
        _positive(n=self.n, d=self.d, c=self.c, a=self.a)
        if self.a > self.n:
            raise ValueError("more terms than variables")

    @property
    def instance_id(self) -> str:
        return f"{self.n}-{self.d}-{self.c}-{self.a}-s{self.seed}"

    def build(self) -> Model:
        rng = SeededRng(self.seed)
        xs = [f"x{i + 1}" for i in range(self.n)]
        cons = []
        for _ in range(self.c):
            pick = rng.combination(self.n, self.a)
            t = rng.randint(self.a, self.a * self.d)
            cons.append(Constraint("eq", (sum_(var(xs[i]) for i in pick), const(t))))
        return Model("linear", self.instance_id, [(x, 1, self.d) for x in xs], cons, xs)


@dataclass(frozen=True)
class NonlinearSpec:
    n: int
    d: int
    c: int
    a1: int
    a2: int
    seed: int = 1

    def __post_init__(self):
        _positive(n=self.n, d=self.d, c=self.c, a1=self.a1, a2=self.a2)
        if self.a2 > self.n:
            raise ValueError("more factors than variables")

    @property
    def instance_id(self) -> str:
        return f"{self.n}-{self.d}-{self.c}-{self.a1}-{self.a2}-s{self.seed}"

    def build(self) -> Model:
        rng = SeededRng(self.seed)
        xs = [f"x{i + 1}" for i in range(self.n)]
        cons = []
        for _ in range(self.c):
            terms = []
            for _ in range(self.a1):
                pick = rng.combination(self.n, self.a2)
                term = var(xs[pick[0]])
                for i in pick[1:]:
                    term = mul(term, var(xs[i]))
                terms.append(term)
            t = rng.randint(self.a1, self.a1 * self.d ** self.a2)
            cons.append(Constraint("eq", (sum_(terms), const(t))))
        return Model("nonlinear", self.instance_id, [(x, 1, self.d) for x in xs], cons, xs,
                     project_terms=True)


@dataclass(frozen=True)
class GolfersSpec:
    w: int
    g: int
    s: int

    def __post_init__(self):
        _positive(w=self.w, g=self.g, s=self.s)

    @property
    def instance_id(self) -> str:
        return f"{self.w}-{self.g}-{self.s}"

    def name(self, w, g, s) -> str:
        return f"x{w + 1}_{g + 1}_{s + 1}"

    def build(self) -> Model:
        w_, g_, s_ = self.w, self.g, self.s
        players = g_ * s_
        variables, decision, cons = [], [], []
        for w in range(w_):
            for g in range(g_):
                for s in range(s_):
                    n = self.name(w, g, s)
                    if w == 0:
                        # the first week is fixed: group g holds players g*s+1 .. g*s+s
                        v = g * s_ + s + 1
                        variables.append((n, v, v))
                    else:
                        variables.append((n, 1, players))
                    decision.append(n)
        for w in range(w_):
            week = [var(self.name(w, g, s)) for g in range(g_) for s in range(s_)]
            if len(week) > 1:
                cons.append(Constraint("distinct", tuple(week)))
            for g in range(g_):
                for s in range(s_ - 1):
                    cons.append(Constraint("le", (add(var(self.name(w, g, s)), const(1)),
                                                  var(self.name(w, g, s + 1)))))
            for g in range(g_ - 1):
                cons.append(Constraint("le", (add(var(self.name(w, g, 0)), const(1)),
                                              var(self.name(w, g + 1, 0)))))
        for w1, w2 in itertools.combinations(range(w_), 2):
            for g1 in range(g_):
                for g2 in range(g_):
                    pairs = [reif_eq(var(self.name(w1, g1, a)), var(self.name(w2, g2, b)))
                             for a in range(s_) for b in range(s_)]
                    cons.append(Constraint("le", (sum_(pairs), const(1))))
        return Model("golfers", self.instance_id, variables, cons, decision)


@dataclass(frozen=True)
class GolombSpec:
    m: int
    length: int

    def __post_init__(self):
        if self.m < 3:
            raise ValueError("need at least 3 marks")
        if self.length < self.m - 1:
            raise ValueError("length must be at least m - 1")

    @property
    def instance_id(self) -> str:
        return f"{self.m}-{self.length}"

    def build(self) -> Model:
        xs = [f"x{i + 1}" for i in range(self.m)]
        variables = [(xs[0], 0, 0)] + [(x, 1, self.length) for x in xs[1:]]
        cons = []
        for a, b in zip(xs, xs[1:]):
            cons.append(Constraint("le", (add(var(a), const(1)), var(b))))
        diffs = tuple(sub(var(xs[i]), var(xs[j])) for i in range(self.m) for j in range(i))
        cons.append(Constraint("distinct", diffs))
        # mirror symmetry: the first gap is shorter than the last one
        first = sub(var(xs[1]), var(xs[0]))
        last = sub(var(xs[-1]), var(xs[-2]))
        cons.append(Constraint("le", (add(first, const(1)), last)))
        return Model("golomb", self.instance_id, variables, cons, xs)


def labs_energy(seq) -> int:
    """Sum over lags 2..n-1 of the squared aperiodic autocorrelation."""
    n = len(seq)
    total = 0
    for i in range(1, n):
        c = sum(seq[j - 1] * seq[j + i] for j in range(1, n - i))
        total += c * c
    return total


@dataclass(frozen=True)
class LabsSpec:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 bits")

    @property
    def instance_id(self) -> str:
        return str(self.n)

    def objective(self) -> ViewNode:
        n = self.n
        xs = [var(f"x{i + 1}") for i in range(n)]
        squares = []
        for i in range(1, n):
            terms = [mul(xs[j - 1], xs[j + i]) for j in range(1, n - i)]
            if terms:
                squares.append(sqr(sum_(terms)))
        return sum_(squares) if squares else const(0)

    def build(self) -> Model:
        xs = [f"x{i + 1}" for i in range(self.n)]
        cons = [Constraint("ne", (var(x), const(0))) for x in xs]
        return Model("labs", self.instance_id, [(x, -1, 1) for x in xs], cons, xs,
                     objective=self.objective(),
                     notes=["bits are -1/1, encoded as [-1..1] with x != 0"])


@dataclass(frozen=True)
class EccSpec:
    a: int
    n: int
    l: int
    d: int
    metric: str = "hamming"

    def __post_init__(self):
        _positive(a=self.a, n=self.n, l=self.l, d=self.d)
        if self.a < 2:
            raise ValueError("alphabet needs at least 2 symbols")
        if self.metric not in ("hamming", "lee"):
            raise ValueError(f"unknown metric {self.metric!r}")

    @property
    def instance_id(self) -> str:
        return f"{self.a}-{self.n}-{self.l}-{self.d}-{self.metric}"

    def distance(self, xs, ys) -> ViewNode:
        if self.metric == "hamming":
            return sum_(reif_neq(x, y) for x, y in zip(xs, ys))
        terms = []
        for x, y in zip(xs, ys):
            gap = abs_(sub(x, y))
            terms.append(min2(gap, sub(const(self.a), gap)))
        return sum_(terms)

    def build(self) -> Model:
        names = [[f"x{i + 1}_{j + 1}" for j in range(self.l)] for i in range(self.n)]
        variables = [(nm, 0, self.a - 1) for row in names for nm in row]
        cons = []
        for i1, i2 in itertools.combinations(range(self.n), 2):
            dist = self.distance([var(x) for x in names[i1]], [var(y) for y in names[i2]])
            cons.append(Constraint("ge", (dist, const(self.d))))
        return Model("ecc", self.instance_id, variables, cons,
                     [nm for row in names for nm in row],
                     share=self.metric == "lee",
                     notes=[f"symbols are 0..{self.a - 1}"])


PROBLEMS = {
    "linear": LinearSpec,
    "nonlinear": NonlinearSpec,
    "golfers": GolfersSpec,
    "golomb": GolombSpec,
    "labs": LabsSpec,
    "ecc": EccSpec,
}

V = ModelVariant
# The variants each family is benchmarked under.
REPORTED_VARIANTS = {
    "linear": (V.VARS, V.VARS_GLOBAL, V.VIEWS_STATIC, V.VIEWS_DYNAMIC),
    "nonlinear": (V.VARS, V.VARS_GLOBAL, V.VIEWS_STATIC, V.VIEWS_DYNAMIC, V.VIEWS_STATIC_GLOBAL),
    "golfers": (V.VARS_GLOBAL, V.VIEWS_STATIC_GLOBAL, V.VIEWS_DYNAMIC_GLOBAL),
    "golomb": (V.VARS_GLOBAL, V.VIEWS_STATIC, V.VIEWS_DYNAMIC),
    "labs": (V.VARS_GLOBAL, V.VIEWS_STATIC, V.VIEWS_DYNAMIC),
    "ecc": (V.VARS_GLOBAL, V.VIEWS_STATIC, V.VIEWS_DYNAMIC),
}


def spec_from_params(problem: str, params: dict):
    try:
        cls = PROBLEMS[problem]
    except KeyError:
        raise ValueError(f"unknown problem {problem!r}") from None
    names = set(cls.__dataclass_fields__)
    extra = set(params) - names
    if extra:
        raise ValueError(f"unknown parameters for {problem}: {sorted(extra)}")
    return cls(**params)


def spec_params(spec) -> dict:
    return asdict(spec)
