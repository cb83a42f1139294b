"""Minimal-cost recourse: search admissible intervention supports for the
cheapest action that flips the decision, optionally weighing or capping
the graph response time.

For linear SCMs the counterfactual score shift equals e . delta, where e
collects each support variable's total causal effect on the score, so the
favorable region in delta-space is the half-space {e . delta >= gap}.
The production solver minimizes the feature cost on that half-space in
closed form and re-verifies every candidate by full counterfactual
evaluation; a brute-force grid oracle provides the independent check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .cost import CostBreakdown, CostSpec, normalizer, time_cost, total_cost
from .graph import CausalDag, total_causal_effect
from .scm import (
    Action,
    Instance,
    Scm,
    counterfactual,
    predict,
    variances,
)

ORACLE_POINT_CAP = 10_000_000

#: Relative slacks retried when the exact-boundary candidate fails its
#: verification by a rounding hair.
_VERIFY_SLACKS = (0.0, 1e-12, 1e-9, 1e-6)


@dataclass(frozen=True)
class RecourseProblem:
    scm: Scm
    dag: CausalDag
    instance: Mapping[str, float]
    cost_spec: CostSpec = CostSpec()
    k: int = 2
    bounds: Optional[Mapping[str, tuple[float, float]]] = None
    grid_resolution: int = 21

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.grid_resolution < 2:
            raise ValueError("grid resolution must be at least 2")

    @cached_property
    def variance_table(self) -> dict:
        return variances(self.scm)

    @cached_property
    def resolved_bounds(self) -> dict:
        """Per-variable shift box; defaults to +-5 noise stddevs."""
        out = {}
        table = self.variance_table
        for name in self.scm.names:
            if self.bounds is not None and name in self.bounds:
                lo, hi = self.bounds[name]
                lo, hi = float(lo), float(hi)
                if not (lo <= 0.0 <= hi) or lo >= hi:
                    raise ValueError(
                        f"bounds for {name} must satisfy lo <= 0 <= hi, lo < hi"
                    )
            else:
                width = 5.0 * table[name].proper_std
                lo, hi = -width, width
            out[name] = (lo, hi)
        return out

    @cached_property
    def score_effects(self) -> dict:
        """Total causal effect of each variable on the decision score."""
        return {
            name: total_causal_effect(self.dag, name, self.dag.target)
            for name in self.scm.names
        }


@dataclass(frozen=True)
class RecourseSolution:
    action: Action
    cost: Optional[CostBreakdown]
    counterfactual: Instance
    probability: float
    feasible: bool
    diagnostics: dict


def admissible_supports(problem: RecourseProblem) -> list:
    """Non-empty subsets of actionable variables up to size k, ordered by
    size then lexicographically."""
    actionable = sorted(
        v.name for v in problem.scm.variables if v.actionability == "actionable"
    )
    if not actionable:
        raise ValueError("no actionable variables to intervene on")
    out = []
    for size in range(1, min(problem.k, len(actionable)) + 1):
        out.extend(itertools.combinations(actionable, size))
    return out


def evaluate_action(problem: RecourseProblem, action: Action) -> RecourseSolution:
    """Counterfactual + prediction + cost for one concrete action."""
    cf = counterfactual(problem.scm, problem.instance, action)
    pred = predict(problem.scm, cf)
    breakdown = total_cost(action, problem.dag, problem.cost_spec,
                           problem.variance_table)
    feasible = pred.probability >= problem.scm.target.threshold
    budget = problem.cost_spec.time_budget
    if feasible and budget is not None and action.shifts:
        feasible = breakdown.c_t <= budget
    return RecourseSolution(
        action=action,
        cost=breakdown,
        counterfactual=cf,
        probability=pred.probability,
        feasible=feasible,
        diagnostics={},
    )


def _score_gap(problem: RecourseProblem) -> float:
    t = problem.scm.target.threshold
    base = predict(problem.scm, problem.instance)
    return math.log(t / (1.0 - t)) - base.score


def _min_norm_shift(problem: RecourseProblem, support: Sequence[str],
                    gap: float) -> Optional[dict]:
    """Cheapest shift on `support` reaching a score gain of `gap`.

    Exact minimizer of the normalized lp feature cost over the half-space
    intersected with the bounds box: a greedy best-rate fill for p = 1,
    the dual-exponent projection with active-set bound clipping otherwise.
    Returns None when even the box corners cannot close the gap.
    """
    spec = problem.cost_spec
    effects = problem.score_effects
    bounds = problem.resolved_bounds
    scales = {n: normalizer(spec, problem.variance_table, n) for n in support}
    live = [n for n in support if effects[n] != 0.0]
    if gap <= 0.0:
        return {}
    if not live:
        return None

    if spec.p == 1.0:
        # score gain per unit of cost is |e_i| * s_i; fill best rates first
        ranked = sorted(live, key=lambda n: (-abs(effects[n]) * scales[n], n))
        remaining = gap
        shifts: dict = {}
        for name in ranked:
            e = effects[name]
            lo, hi = bounds[name]
            cap = hi if e > 0 else -lo
            if cap <= 0.0:
                continue
            take = min(cap, remaining / abs(e))
            shifts[name] = math.copysign(take, e)
            remaining -= abs(e) * take
            if remaining <= 0.0:
                break
        if remaining > 1e-9 * max(1.0, abs(gap)):
            return None
        return shifts

    q = spec.p / (spec.p - 1.0)
    free = list(live)
    fixed: dict = {}
    for _ in range(len(live) + 1):
        residual = gap - sum(effects[n] * d for n, d in fixed.items())
        if residual <= 0.0:
            deltas = dict(fixed)
            break
        coeffs = {n: effects[n] * scales[n] for n in free}
        denom_q = sum(abs(c) ** q for c in coeffs.values())
        if denom_q == 0.0:
            return None
        norm_q = denom_q ** (1.0 / q)
        radius = residual / norm_q
        deltas = dict(fixed)
        clipped = []
        for n in free:
            c = coeffs[n]
            z = radius * math.copysign((abs(c) / norm_q) ** (q / spec.p), c)
            d = z * scales[n]
            lo, hi = bounds[n]
            if d < lo or d > hi:
                clipped.append((n, min(max(d, lo), hi)))
            else:
                deltas[n] = d
        if not clipped:
            break
        for n, d in clipped:
            fixed[n] = d
            free.remove(n)
        if not free:
            deltas = dict(fixed)
            break

    achieved = sum(effects[n] * d for n, d in deltas.items())
    if achieved < gap - 1e-9 * max(1.0, abs(gap)):
        return None
    return deltas


def _already_favorable(problem: RecourseProblem, base) -> RecourseSolution:
    return RecourseSolution(
        action=Action.empty(),
        cost=CostBreakdown(0.0, 0.0, 0.0),
        counterfactual=dict(problem.instance),
        probability=base.probability,
        feasible=True,
        diagnostics={"supports_examined": 0, "note": "instance already favorable"},
    )


def _no_solution(problem: RecourseProblem, base, diagnostics: dict) -> RecourseSolution:
    return RecourseSolution(
        action=Action.empty(),
        cost=None,
        counterfactual=dict(problem.instance),
        probability=base.probability,
        feasible=False,
        diagnostics=diagnostics,
    )


def _solution_rank(sol: RecourseSolution):
    support = tuple(sorted(sol.action.support))
    return (sol.cost.total, len(support), support, tuple(sol.action.sorted_items()))


def solve(problem: RecourseProblem) -> RecourseSolution:
    """Cheapest feasible action over all admissible supports."""
    base = predict(problem.scm, problem.instance)
    if base.label == 1:
        return _already_favorable(problem, base)
    gap = _score_gap(problem)
    budget = problem.cost_spec.time_budget

    examined = 0
    budget_excluded: list = []
    unreachable: list = []
    candidates: list = []
    for support in admissible_supports(problem):
        examined += 1
        # the budget depends only on the support, never on the shift sizes,
        # so whole supports can be ruled out before any algebra
        if budget is not None:
            if time_cost(problem.dag, support, problem.cost_spec) > budget:
                budget_excluded.append("+".join(support))
                continue
        found = None
        for slack in _VERIFY_SLACKS:
            shifts = _min_norm_shift(
                problem, support, gap + slack * max(1.0, abs(gap))
            )
            if shifts is None:
                break
            cand = evaluate_action(problem, Action(shifts))
            if cand.feasible:
                found = cand
                break
        if found is None:
            unreachable.append("+".join(support))
        else:
            candidates.append(found)

    diagnostics = {
        "supports_examined": examined,
        "budget_excluded": budget_excluded,
        "unreachable": unreachable,
    }
    if not candidates:
        diagnostics["note"] = "no admissible support can flip the decision"
        return _no_solution(problem, base, diagnostics)
    best = min(candidates, key=_solution_rank)
    return replace(best, diagnostics=diagnostics)


def brute_force_solve(problem: RecourseProblem) -> RecourseSolution:
    """Exhaustive grid oracle; same feasibility machinery, no algebra."""
    base = predict(problem.scm, problem.instance)
    if base.label == 1:
        return _already_favorable(problem, base)
    supports = admissible_supports(problem)
    res = problem.grid_resolution
    points = sum(res ** len(s) for s in supports)
    if points > ORACLE_POINT_CAP:
        raise ValueError(
            f"oracle grid of {points} points exceeds the cap of {ORACLE_POINT_CAP}"
        )

    budget = problem.cost_spec.time_budget
    best = None
    best_key = None
    examined = 0
    for support in supports:
        examined += 1
        if budget is not None:
            if time_cost(problem.dag, support, problem.cost_spec) > budget:
                continue
        axes = [np.linspace(*problem.resolved_bounds[n], res) for n in support]
        for combo in itertools.product(*axes):
            action = Action({n: float(d) for n, d in zip(support, combo)})
            sol = evaluate_action(problem, action)
            if not sol.feasible:
                continue
            key = _solution_rank(sol)
            if best_key is None or key < best_key:
                best, best_key = sol, key
    diagnostics = {"supports_examined": examined, "grid_points": points}
    if best is None:
        diagnostics["note"] = "no feasible grid point"
        return _no_solution(problem, base, diagnostics)
    return replace(best, diagnostics=diagnostics)


@dataclass(frozen=True)
class FrontierPoint:
    lam: float
    solution: RecourseSolution


def lambda_frontier(problem: RecourseProblem,
                    lambdas: Iterable[float]) -> list:
    lams = sorted(float(l) for l in lambdas)
    if not lams:
        raise ValueError("lambdas must be non-empty")
    if lams[0] < 0.0:
        raise ValueError("lambdas must be non-negative")
    points = []
    for lam in lams:
        tuned = replace(problem, cost_spec=replace(problem.cost_spec, lam=lam))
        points.append(FrontierPoint(lam=lam, solution=solve(tuned)))
    return points


def support_switches(points: Sequence[FrontierPoint]) -> list:
    """Adjacent frontier entries whose chosen support differs."""
    out = []
    for a, b in zip(points, points[1:]):
        sa = sorted(a.solution.action.support)
        sb = sorted(b.solution.action.support)
        if sa != sb:
            out.append({
                "from_lambda": a.lam,
                "to_lambda": b.lam,
                "from_support": sa,
                "to_support": sb,
            })
    return out


def solution_payload(sol: RecourseSolution) -> dict:
    """JSON-ready dict shared by the CLI and the HTTP service."""
    return {
        "action": {n: d for n, d in sol.action.sorted_items()},
        "cost": None if sol.cost is None else {
            "c_s": sol.cost.c_s,
            "c_t": sol.cost.c_t,
            "total": sol.cost.total,
        },
        "counterfactual": {n: sol.counterfactual[n] for n in sorted(sol.counterfactual)},
        "probability": sol.probability,
        "feasible": sol.feasible,
        "diagnostics": sol.diagnostics,
    }
