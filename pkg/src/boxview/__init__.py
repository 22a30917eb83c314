"""Box view propagation: views over interval domains, a small solver, and
an oracle that checks both against brute-force tuple-set semantics."""

from .approx import ApproxKind, Box, Interval, TupleSet
from .engine import Brancher, SearchStats, Status, Store, ValueSelect, VarSelect
from .propagators import Constraint, ModelVariant, post_decomposed
from .views import DispatchMode, Kind, ViewNode, build_view, parse, to_text

__version__ = "0.1.0"

__all__ = [
    "ApproxKind", "Box", "Interval", "TupleSet",
    "Brancher", "SearchStats", "Status", "Store", "ValueSelect", "VarSelect",
    "Constraint", "ModelVariant", "post_decomposed",
    "DispatchMode", "Kind", "ViewNode", "build_view", "parse", "to_text",
]
