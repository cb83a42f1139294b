"""Action cost model: normalized lp feature cost, graph response-time
cost, and the composite trade-off total = c_s + lambda * c_t."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Optional

from .graph import CausalDag, expected_response_time, has_path, longest_path_time
from .scm import Action, VariancePair

Normalization = Literal["none", "marginal_sigma", "proper_sigma"]
TimeVariant = Literal["longest_path", "weighted_average_raw", "weighted_average_abs"]

NORMALIZATIONS: tuple[str, ...] = ("none", "marginal_sigma", "proper_sigma")
TIME_VARIANTS: tuple[str, ...] = (
    "longest_path", "weighted_average_raw", "weighted_average_abs",
)


class CostError(ValueError):
    """Ill-posed cost query (bad spec values, missing normalizer)."""


@dataclass(frozen=True)
class CostSpec:
    """How to price an action.

    p and normalization shape the feature cost; lam weighs the time cost
    into the total; time_budget, when set, is a hard constraint handled
    by the recourse solver rather than a term in the objective.
    """

    p: float = 2.0
    normalization: Normalization = "proper_sigma"
    lam: float = 0.0
    time_variant: TimeVariant = "weighted_average_abs"
    time_budget: Optional[float] = None

    def __post_init__(self):
        if not self.p >= 1.0:
            raise CostError("p must be >= 1 (smaller exponents are not norms)")
        if self.normalization not in NORMALIZATIONS:
            raise CostError(f"normalization must be one of {NORMALIZATIONS}")
        if not self.lam >= 0.0:
            raise CostError("lambda must be non-negative")
        if self.time_variant not in TIME_VARIANTS:
            raise CostError(f"time_variant must be one of {TIME_VARIANTS}")
        if self.time_budget is not None and not self.time_budget >= 0.0:
            raise CostError("time_budget must be non-negative when set")


@dataclass(frozen=True)
class CostBreakdown:
    c_s: float
    c_t: float
    total: float


def normalizer(spec: CostSpec, variances: Mapping[str, VariancePair],
               name: str) -> float:
    if spec.normalization == "none":
        return 1.0
    pair = variances.get(name)
    if pair is None:
        raise CostError(f"no variance available for {name!r}")
    s = pair.marginal_std if spec.normalization == "marginal_sigma" else pair.proper_std
    if not s > 0.0:
        raise CostError(f"zero normalizer for {name!r}")
    return s


def feature_cost(action: Action, spec: CostSpec,
                 variances: Mapping[str, VariancePair]) -> float:
    """Normalized lp norm of the shift vector; 0 for the empty action."""
    if not action.shifts:
        return 0.0
    total = 0.0
    for name, delta in action.sorted_items():
        total += (abs(delta) / normalizer(spec, variances, name)) ** spec.p
    return total ** (1.0 / spec.p)


def member_time(dag: CausalDag, name: str, spec: CostSpec) -> Optional[float]:
    """Response time this one variable contributes; None when it has no
    path to the target and therefore cannot move it."""
    if not has_path(dag, name, dag.target):
        return None
    if spec.time_variant == "longest_path":
        return longest_path_time(dag, name, dag.target)
    weighting = "raw" if spec.time_variant == "weighted_average_raw" else "absolute"
    return expected_response_time(dag, name, dag.target, weighting)


def time_cost(dag: CausalDag, support: Iterable[str], spec: CostSpec) -> float:
    """Time until the slowest support member's effect reaches the target."""
    members = sorted(set(support))
    if not members:
        raise CostError("time cost needs a non-empty support")
    times = [t for t in (member_time(dag, m, spec) for m in members) if t is not None]
    if not times:
        warnings.warn(
            "no support member has a path to the target; time cost is 0",
            stacklevel=2,
        )
        return 0.0
    return max(times)


def total_cost(action: Action, dag: CausalDag, spec: CostSpec,
               variances: Mapping[str, VariancePair]) -> CostBreakdown:
    if not action.shifts:
        return CostBreakdown(0.0, 0.0, 0.0)
    c_s = feature_cost(action, spec, variances)
    c_t = time_cost(dag, action.support, spec)
    return CostBreakdown(c_s=c_s, c_t=c_t, total=c_s + spec.lam * c_t)
