"""Interval variable store, propagation queue and depth-first search."""
from __future__ import annotations

import enum
import time
from collections import deque
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional


class Event(enum.IntEnum):
    MIN_CHANGE = 0
    MAX_CHANGE = 1
    GROUND = 2


BOTH = (Event.MIN_CHANGE, Event.MAX_CHANGE)


class Status(enum.Enum):
    FAILED = "failed"
    IDEMPOTENT = "idempotent"
    SUSPEND = "suspend"


@dataclass
class SearchStats:
    propagations: int = 0
    time_ms: float = 0.0
    fails: int = 0
    domain_updates: int = 0
    view_calls: int = 0
    arith_ops: int = 0
    solutions: int = 0
    nodes: int = 0
    complete: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


class Store:
    """Interval domains with a time-stamped trail.

    Counters (``propagations``, ``domain_updates``, ``view_calls``,
    ``arith_ops``, ``fails``) are plain attributes so that generated view
    code can bump them without a method call.
    """

    def __init__(self):
        self.lo: list[int] = []
        self.hi: list[int] = []
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self._subs: list[list[list]] = []
        self._stamp: list[int] = []
        self.trail: list[tuple] = []
        self._level = 0
        self._next_level = 1
        self._marks: list[tuple[int, int]] = []
        self.version = 0
        self.failed = False
        self.queue: deque = deque()
        self.current = None
        self._self_event = False
        self.propagators: list = []
        self.propagations = 0
        self.domain_updates = 0
        self.view_calls = 0
        self.arith_ops = 0
        self.fails = 0

    # -- variables ---------------------------------------------------------

    def new_var(self, lo: int, hi: int, name: Optional[str] = None) -> int:
        if lo > hi:
            raise ValueError(f"empty initial domain [{lo}..{hi}]")
        v = len(self.lo)
        if name is None:
            name = f"_v{v}"
        if name in self.index:
            raise ValueError(f"duplicate variable name {name!r}")
        self.lo.append(lo)
        self.hi.append(hi)
        self.names.append(name)
        self.index[name] = v
        self._subs.append([[], [], []])
        self._stamp.append(-1)
        return v

    def var(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    @property
    def nvars(self) -> int:
        return len(self.lo)

    def is_fixed(self, v: int) -> bool:
        return self.lo[v] == self.hi[v]

    def value(self, v: int) -> int:
        if self.lo[v] != self.hi[v]:
            raise ValueError(f"{self.names[v]} is not ground")
        return self.lo[v]

    def domains(self) -> list[tuple[int, int]]:
        return list(zip(self.lo, self.hi))

    def _save(self, v: int):
        if self._stamp[v] != self._level:
            self.trail.append((v, self.lo[v], self.hi[v]))
            self._stamp[v] = self._level

    def set_lo(self, v: int, i: int) -> bool:
        lo = self.lo
        if i <= lo[v]:
            return True
        h = self.hi[v]
        if i > h:
            self.failed = True
            return False
        if self._stamp[v] != self._level:
            self.trail.append((v, lo[v], h))
            self._stamp[v] = self._level
        lo[v] = i
        self.version += 1
        self.domain_updates += 1
        subs = self._subs[v]
        if subs[0]:
            self._notify(subs[0])
        if i == h and subs[2]:
            self._notify(subs[2])
        return True

    def set_hi(self, v: int, i: int) -> bool:
        hi = self.hi
        if i >= hi[v]:
            return True
        lo = self.lo[v]
        if i < lo:
            self.failed = True
            return False
        if self._stamp[v] != self._level:
            self.trail.append((v, lo, hi[v]))
            self._stamp[v] = self._level
        hi[v] = i
        self.version += 1
        self.domain_updates += 1
        subs = self._subs[v]
        if subs[1]:
            self._notify(subs[1])
        if i == lo and subs[2]:
            self._notify(subs[2])
        return True

    def _notify(self, props):
        cur = self.current
        q = self.queue
        for p in props:
            if p is cur:
                self._self_event = True
            elif not p.queued:
                p.queued = True
                q.append(p)

    # -- subscriptions -----------------------------------------------------

    def subscribe(self, p, v: int, event: Event):
        self._subs[v][event].append(p)

    def unsubscribe(self, p, v: int, event: Event):
        self._subs[v][event].remove(p)

    def on_undo(self, fn: Callable[[], None]):
        """Register an action replayed when the current choice point is popped."""
        self.trail.append((None, fn))

    # -- choice points -----------------------------------------------------

    def push(self):
        self._marks.append((len(self.trail), self._level))
        self._level = self._next_level
        self._next_level += 1

    def pop(self):
        mark, level = self._marks.pop()
        trail, lo, hi = self.trail, self.lo, self.hi
        while len(trail) > mark:
            entry = trail.pop()
            if entry[0] is None:
                entry[1]()
            else:
                v, l, h = entry
                lo[v] = l
                hi[v] = h
        self._level = level
        self.version += 1
        self.failed = False
        self._clear_queue()

    @property
    def depth(self) -> int:
        return len(self._marks)

    # -- propagation -------------------------------------------------------

    def _clear_queue(self):
        for p in self.queue:
            p.queued = False
        self.queue.clear()

    def schedule(self, p):
        if not p.queued:
            p.queued = True
            self.queue.append(p)

    def post(self, p) -> bool:
        p.id = len(self.propagators)
        self.propagators.append(p)
        p.attach(self)
        self.schedule(p)
        return self.fixpoint()

    def fixpoint(self) -> bool:
        if self.failed:
            self._clear_queue()
            return False
        q = self.queue
        failed = Status.FAILED
        suspend = Status.SUSPEND
        while q:
            p = q.popleft()
            p.queued = False
            self.current = p
            self._self_event = False
            self.propagations += 1
            status = p.propagate(self)
            self.current = None
            if status is failed or self.failed:
                self.failed = True
                self._clear_queue()
                return False
            if status is suspend and self._self_event:
                p.queued = True
                q.append(p)
            if p.dynamic_triggers:
                p.refresh(self)
        return True


def new_var(store: Store, lo: int, hi: int, name: Optional[str] = None) -> int:
    return store.new_var(lo, hi, name)


def post(store: Store, p) -> bool:
    return store.post(p)


def fixpoint(store: Store) -> bool:
    return store.fixpoint()


def counters(store: Store) -> SearchStats:
    return SearchStats(
        propagations=store.propagations,
        fails=store.fails,
        domain_updates=store.domain_updates,
        view_calls=store.view_calls,
        arith_ops=store.arith_ops,
    )


# -- search ----------------------------------------------------------------


class VarSelect(enum.Enum):
    INPUT_ORDER = "input-order"
    FIRST_FAIL = "first-fail"


class ValueSelect(enum.Enum):
    MIN_VALUE = "min-value"
    BISECT = "bisect"


@dataclass
class Brancher:
    var_select: VarSelect = VarSelect.INPUT_ORDER
    value_select: ValueSelect = ValueSelect.MIN_VALUE
    # Decision variables first; any remaining unfixed variables are
    # branched on afterwards so every reported solution is fully ground.
    decision: Optional[list[int]] = None

    def select(self, st: Store):
        lo, hi = st.lo, st.hi
        order = self.decision if self.decision is not None else range(st.nvars)
        v = self._pick(order, lo, hi)
        if v is None and self.decision is not None:
            v = self._pick(range(st.nvars), lo, hi)
        if v is None:
            return None
        if self.value_select is ValueSelect.MIN_VALUE:
            return v, lo[v], lo[v] + 1
        mid = (lo[v] + hi[v]) // 2
        return v, None, mid

    def _pick(self, order, lo, hi):
        if self.var_select is VarSelect.INPUT_ORDER:
            for v in order:
                if lo[v] != hi[v]:
                    return v
            return None
        best, size = None, None
        for v in order:
            w = hi[v] - lo[v]
            if w and (size is None or w < size):
                best, size = v, w
        return best


class SearchTimeout(Exception):
    pass


def _apply_left(st: Store, choice) -> bool:
    v, val, mid = choice
    if val is not None:
        return st.set_hi(v, val)
    return st.set_hi(v, mid)


def _apply_right(st: Store, choice) -> bool:
    v, val, nxt = choice
    if val is not None:
        return st.set_lo(v, nxt)
    return st.set_lo(v, nxt + 1)


def dfs(
    store: Store,
    brancher: Optional[Brancher] = None,
    on_solution: Optional[Callable[[Store], Optional[bool]]] = None,
    *,
    max_solutions: Optional[int] = None,
    time_limit: Optional[float] = None,
    restore: tuple = (),
) -> SearchStats:
    """Complete depth-first search.

    ``on_solution`` may return False to stop the search.  Propagators in
    ``restore`` are rescheduled after every backtrack (used by
    branch-and-bound for its non-trailed objective cut).
    """
    brancher = brancher or Brancher()
    before = counters(store)
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    stats = SearchStats()
    stack = []
    stop = False
    consistent = store.fixpoint()
    nodes = 1
    while True:
        if consistent:
            choice = brancher.select(store)
            if choice is None:
                stats.solutions += 1
                if on_solution is not None and on_solution(store) is False:
                    stop = True
                if max_solutions is not None and stats.solutions >= max_solutions:
                    stop = True
                if stop:
                    break
            else:
                store.push()
                stack.append(choice)
                nodes += 1
                consistent = _apply_left(store, choice) and store.fixpoint()
                continue
        else:
            store.fails += 1
        if not stack:
            break
        if deadline is not None and (nodes & 255) == 0 and time.perf_counter() > deadline:
            stats.complete = False
            break
        choice = stack.pop()
        store.pop()
        for p in restore:
            store.schedule(p)
        nodes += 1
        consistent = _apply_right(store, choice) and store.fixpoint()
    if stop:
        stats.complete = False
    while store.depth > 0 and stack:
        stack.pop()
        store.pop()
    after = counters(store)
    stats.time_ms = (time.perf_counter() - t0) * 1000.0
    stats.nodes = nodes
    stats.propagations = after.propagations - before.propagations
    stats.fails = after.fails - before.fails
    stats.domain_updates = after.domain_updates - before.domain_updates
    stats.view_calls = after.view_calls - before.view_calls
    stats.arith_ops = after.arith_ops - before.arith_ops
    return stats


@dataclass
class Optimum:
    value: Optional[int]
    solution: Optional[list[int]]
    stats: SearchStats
    history: list[int] = field(default_factory=list)


def branch_and_bound_min(
    store: Store,
    objective,
    brancher: Optional[Brancher] = None,
    *,
    time_limit: Optional[float] = None,
) -> Optimum:
    """Minimise ``objective`` (a box view) by DFS with a tightening cut."""
    from .propagators import ObjectiveCut

    cut = ObjectiveCut(objective)
    result = Optimum(None, None, SearchStats())
    if not store.post(cut):
        store.fails += 1
        result.stats.fails = 1
        return result

    def record(st: Store):
        v = objective.min()
        result.value = v
        result.solution = list(st.lo)
        result.history.append(v)
        cut.bound = v - 1

    result.stats = dfs(store, brancher, record, time_limit=time_limit, restore=(cut,))
    return result
