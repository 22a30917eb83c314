"""Tuple sets, intervals, boxes and the approximation operators over them."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

# Oracle-only materialization guard.
MAX_MATERIALIZE = 10**6

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class ApproxKind(enum.Enum):
    IDENTITY = "identity"
    DELTA = "delta"
    BETA = "beta"
    RHO_LINEAR = "rho"


class UnsupportedApprox(ValueError):
    pass


class MaterializationError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    """Integer interval [lo..hi]; every empty interval is stored as [1..0]."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            object.__setattr__(self, "lo", 1)
            object.__setattr__(self, "hi", 0)

    @classmethod
    def empty(cls) -> Interval:
        return cls(1, 0)

    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def width(self) -> int:
        return 0 if self.is_empty() else self.hi - self.lo + 1

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def __and__(self, other: Interval) -> Interval:
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: Interval) -> Interval:
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __repr__(self):
        return "[]" if self.is_empty() else f"[{self.lo}..{self.hi}]"


def conv(values: Iterable[int]) -> Interval:
    """Convex hull of a set of integers; the empty set maps to the empty interval."""
    vals = list(values)
    if not vals:
        return Interval.empty()
    return Interval(min(vals), max(vals))


@dataclass(frozen=True)
class Box:
    dims: tuple

    def __post_init__(self):
        dims = tuple(d if isinstance(d, Interval) else Interval(*d) for d in self.dims)
        if any(d.is_empty() for d in dims):
            dims = tuple(Interval.empty() for _ in dims)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def of(cls, *bounds) -> Box:
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds))

    @property
    def arity(self) -> int:
        return len(self.dims)

    def is_empty(self) -> bool:
        return any(d.is_empty() for d in self.dims)

    def size(self) -> int:
        n = 1
        for d in self.dims:
            n *= d.width
        return n

    def __contains__(self, t) -> bool:
        return all(v in d for v, d in zip(t, self.dims))

    def __getitem__(self, i) -> Interval:
        return self.dims[i]

    def tuples(self) -> TupleSet:
        if self.size() > MAX_MATERIALIZE:
            raise MaterializationError(f"box of {self.size()} tuples exceeds cap")
        return TupleSet(self.arity, frozenset(itertools.product(*(list(d) for d in self.dims))))

    def __repr__(self):
        return "x".join(repr(d) for d in self.dims) if self.dims else "<>"


def intersect_box(a: Box, b: Box) -> Box:
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch: {a.arity} vs {b.arity}")
    return Box(tuple(x & y for x, y in zip(a.dims, b.dims)))


@dataclass(frozen=True)
class TupleSet:
    arity: int
    tuples: frozenset

    def __post_init__(self):
        ts = frozenset(tuple(t) for t in self.tuples)
        for t in ts:
            if len(t) != self.arity:
                raise ValueError(f"tuple {t} does not have arity {self.arity}")
        object.__setattr__(self, "tuples", ts)

    @classmethod
    def of(cls, *tuples) -> TupleSet:
        if not tuples:
            raise ValueError("use TupleSet(arity, frozenset()) for empty sets")
        return cls(len(tuples[0]), frozenset(tuples))

    @classmethod
    def unary(cls, values: Iterable[int]) -> TupleSet:
        return cls(1, frozenset((v,) for v in values))

    @classmethod
    def product(cls, *sets: Iterable[int]) -> TupleSet:
        lists = [sorted(set(s)) for s in sets]
        size = 1
        for s in lists:
            size *= len(s)
        if size > MAX_MATERIALIZE:
            raise MaterializationError(f"product of {size} tuples exceeds cap")
        return cls(len(lists), frozenset(itertools.product(*lists)))

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def __bool__(self):
        return bool(self.tuples)

    def _check(self, other: TupleSet):
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __and__(self, other: TupleSet) -> TupleSet:
        self._check(other)
        return TupleSet(self.arity, self.tuples & other.tuples)

    def __or__(self, other: TupleSet) -> TupleSet:
        self._check(other)
        return TupleSet(self.arity, self.tuples | other.tuples)

    def __le__(self, other: TupleSet) -> bool:
        self._check(other)
        return self.tuples <= other.tuples

    def __lt__(self, other: TupleSet) -> bool:
        self._check(other)
        return self.tuples < other.tuples

    def proj(self, i: int) -> set:
        return {t[i] for t in self.tuples}

    def filter(self, pred) -> TupleSet:
        return TupleSet(self.arity, frozenset(t for t in self.tuples if pred(t)))

    def __repr__(self):
        return "{" + ", ".join(str(t) for t in sorted(self.tuples)) + "}"


def delta_approx(s: TupleSet) -> TupleSet:
    """Smallest Cartesian product containing ``s``."""
    if not s:
        return s
    return TupleSet.product(*(s.proj(i) for i in range(s.arity)))


def beta_approx(s: TupleSet) -> Box:
    """Smallest box containing ``s``."""
    if not s:
        return Box(tuple(Interval.empty() for _ in range(s.arity)))
    return Box(tuple(conv(s.proj(i)) for i in range(s.arity)))


def approx(s: TupleSet, kind: ApproxKind) -> TupleSet:
    if kind is ApproxKind.IDENTITY:
        return s
    if kind is ApproxKind.DELTA:
        return delta_approx(s)
    if kind is ApproxKind.BETA:
        b = beta_approx(s)
        return TupleSet(s.arity, frozenset()) if b.is_empty() else b.tuples()
    raise UnsupportedApprox(f"{kind} has no tuple-set form; use oracle.rho_box_linear")


def is_phi_domain(s: TupleSet, kind: ApproxKind) -> bool:
    return approx(s, kind) == s


def check_int64(v: int) -> int:
    if v < INT64_MIN or v > INT64_MAX:
        raise OverflowError(f"{v} does not fit in 64 bits")
    return v
