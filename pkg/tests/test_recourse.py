"""Recourse solver: closed-form minimizers, support search, budget and
bound handling, the grid oracle, and the lambda frontier."""
import json
import math

import pytest

from timecourse import (
    Action,
    CostBreakdown,
    CostSpec,
    NoiseSpec,
    RecourseProblem,
    Scm,
    StructuralEquation,
    TargetSpec,
    Variable,
    brute_force_solve,
    evaluate_action,
    from_scm,
    german_scm,
    german_times,
    lambda_frontier,
    sample_unfavorable,
    solve,
    support_switches,
)
from timecourse.recourse import admissible_supports, solution_payload

from conftest import CHAIN_TIMES, make_chain_scm, make_two_node_scm

CHAIN_LOW = {"X": 0.0, "M": 0.0, "Z": -3.0}


def chain_problem(**kwargs):
    scm = make_chain_scm()
    dag = from_scm(scm, CHAIN_TIMES)
    return RecourseProblem(scm=scm, dag=dag, instance=dict(CHAIN_LOW), **kwargs)


def two_node_problem(instance, **kwargs):
    scm = make_two_node_scm()
    return RecourseProblem(scm=scm, dag=from_scm(scm, {}), instance=instance,
                           **kwargs)


# ---------------------------------------------------------------- validation

def test_problem_rejects_bad_settings():
    scm = make_two_node_scm()
    dag = from_scm(scm, {})
    with pytest.raises(ValueError, match="k must be"):
        RecourseProblem(scm=scm, dag=dag, instance={"W": 0.0, "X": 0.0}, k=0)
    with pytest.raises(ValueError, match="grid resolution"):
        RecourseProblem(scm=scm, dag=dag, instance={"W": 0.0, "X": 0.0},
                        grid_resolution=1)


def test_bounds_must_bracket_zero():
    problem = two_node_problem({"W": 0.0, "X": -1.0},
                               bounds={"X": (0.5, 1.0)})
    with pytest.raises(ValueError, match="bounds for X"):
        solve(problem)


def test_supports_ordered_by_size_then_name():
    assert admissible_supports(chain_problem(k=2)) == [
        ("M",), ("X",), ("Z",),
        ("M", "X"), ("M", "Z"), ("X", "Z"),
    ]


def test_no_actionable_variables_rejected():
    scm = Scm(
        variables=(
            Variable("W", StructuralEquation((), {}, 0.0),
                     NoiseSpec.normal(0.0, 1.0), "non_actionable"),
            Variable("X", StructuralEquation((), {}, 0.0),
                     NoiseSpec.normal(0.0, 1.0), "mutable"),
        ),
        target=TargetSpec({"X": 1.0}, 0.5),
    )
    problem = RecourseProblem(scm=scm, dag=from_scm(scm, {}),
                              instance={"W": 0.0, "X": -1.0})
    with pytest.raises(ValueError, match="no actionable variables"):
        solve(problem)


# ------------------------------------------------------------- closed forms

def test_single_lever_needs_exactly_the_gap():
    sol = solve(two_node_problem({"W": 0.3, "X": -0.7}))
    assert sol.feasible
    assert sorted(sol.action.support) == ["X"]
    assert sol.action.shifts["X"] == pytest.approx(0.7, rel=1e-9)
    assert sol.cost.c_s == pytest.approx(0.7, rel=1e-9)
    assert sol.cost.c_t == 0.0
    assert sol.probability == pytest.approx(0.5, abs=1e-6)
    assert sol.counterfactual["W"] == 0.3


def test_already_favorable_costs_nothing():
    sol = solve(two_node_problem({"W": 0.0, "X": 2.0}))
    assert sol.feasible
    assert sol.action.shifts == {}
    assert sol.cost == CostBreakdown(0.0, 0.0, 0.0)
    assert sol.counterfactual == {"W": 0.0, "X": 2.0}
    assert sol.diagnostics["note"] == "instance already favorable"


def test_p1_fills_the_best_rate_first():
    # score gains per unit shift are 6 (X), 3 (M), 1 (Z)
    sol = solve(chain_problem(cost_spec=CostSpec(p=1.0)))
    assert sol.feasible
    assert sorted(sol.action.support) == ["X"]
    assert sol.action.shifts["X"] == pytest.approx(0.5, rel=1e-9)
    assert sol.cost.c_s == pytest.approx(0.5, rel=1e-9)


def test_p1_spills_over_when_bounds_clip():
    sol = solve(chain_problem(cost_spec=CostSpec(p=1.0),
                              bounds={"X": (-0.2, 0.2)}))
    assert sol.feasible
    assert sorted(sol.action.support) == ["M", "X"]
    assert sol.action.shifts["X"] == pytest.approx(0.2, rel=1e-9)
    assert sol.action.shifts["M"] == pytest.approx(0.6, rel=1e-9)
    assert sol.cost.c_s == pytest.approx(0.8, rel=1e-9)


def test_p2_projects_onto_the_halfspace():
    # cheapest planar pair at lambda = 0.25 is {M, Z}: delta = gap*(3,1)/10
    sol = solve(chain_problem(cost_spec=CostSpec(lam=0.25)))
    assert sol.feasible
    assert sorted(sol.action.support) == ["M", "Z"]
    assert sol.action.shifts["M"] == pytest.approx(0.9, rel=1e-6)
    assert sol.action.shifts["Z"] == pytest.approx(0.3, rel=1e-6)
    assert sol.cost.c_s == pytest.approx(3 / math.sqrt(10), rel=1e-6)
    assert sol.cost.c_t == 1.0


def test_lexicographic_tie_break_between_equal_singletons():
    scm = Scm(
        variables=(
            Variable("A", StructuralEquation((), {}, 0.0), NoiseSpec.normal(0.0, 1.0)),
            Variable("B", StructuralEquation((), {}, 0.0), NoiseSpec.normal(0.0, 1.0)),
        ),
        target=TargetSpec({"A": 1.0, "B": 1.0}, 0.5),
    )
    problem = RecourseProblem(scm=scm, dag=from_scm(scm, {}),
                              instance={"A": -1.0, "B": -1.0}, k=1)
    sol = solve(problem)
    assert sorted(sol.action.support) == ["A"]
    assert sol.action.shifts["A"] == pytest.approx(2.0, rel=1e-9)


# --------------------------------------------------------- budget and limits

def test_budget_excludes_slow_supports():
    sol = solve(chain_problem(cost_spec=CostSpec(time_budget=2.0)))
    assert sol.feasible
    assert sorted(sol.action.support) == ["M", "Z"]
    assert sol.diagnostics["budget_excluded"] == ["X", "M+X", "X+Z"]
    assert sol.cost.c_t <= 2.0


def test_infeasible_reports_diagnostics_and_no_cost():
    problem = two_node_problem({"W": 0.0, "X": -5.0},
                               bounds={"W": (-1.0, 1.0), "X": (-0.1, 0.1)})
    sol = solve(problem)
    assert not sol.feasible
    assert sol.cost is None
    assert sol.action.shifts == {}
    assert sol.probability < 0.5
    assert sol.diagnostics["supports_examined"] == 3
    assert sol.diagnostics["unreachable"] == ["W", "X", "W+X"]
    assert "note" in sol.diagnostics


def test_budget_binds_only_nonempty_actions():
    tight = CostSpec(time_budget=1.0)
    favorable = {"X": 0.0, "M": 0.0, "Z": 1.0}
    scm = make_chain_scm()
    problem = RecourseProblem(scm=scm, dag=from_scm(scm, CHAIN_TIMES),
                              instance=favorable, cost_spec=tight)
    assert evaluate_action(problem, Action.empty()).feasible
    moved = evaluate_action(problem, Action({"X": 1.0}))
    assert moved.probability > 0.5
    assert not moved.feasible  # c_t = 5 blows the budget


# ------------------------------------------------------------------ frontier

def test_frontier_is_monotone_and_switches_supports():
    points = lambda_frontier(chain_problem(), [10.0, 0.0, 0.25, 1.0, 5.0])
    assert [p.lam for p in points] == [0.0, 0.25, 1.0, 5.0, 10.0]
    assert all(p.solution.feasible for p in points)
    costs = [p.solution.cost.c_s for p in points]
    assert costs == sorted(costs)
    supports = [sorted(p.solution.action.support) for p in points]
    assert supports[0] == ["M", "X"]
    assert supports[-1] == ["Z"]
    switches = support_switches(points)
    assert [(s["from_support"], s["to_support"]) for s in switches] == [
        (["M", "X"], ["M", "Z"]),
        (["M", "Z"], ["Z"]),
    ]
    assert all(s["from_lambda"] < s["to_lambda"] for s in switches)


def test_frontier_zero_lambda_matches_plain_solve():
    base = solve(chain_problem())
    point = lambda_frontier(chain_problem(), [0.0])[0]
    assert point.lam == 0.0
    assert point.solution.action == base.action
    assert point.solution.cost == base.cost


def test_frontier_rejects_bad_grids():
    with pytest.raises(ValueError, match="non-empty"):
        lambda_frontier(chain_problem(), [])
    with pytest.raises(ValueError, match="non-negative"):
        lambda_frontier(chain_problem(), [0.0, -1.0])


# -------------------------------------------------------------- grid oracle

@pytest.mark.filterwarnings("ignore:no support member has a path")
def test_solver_matches_grid_oracle_on_small_graphs():
    cases = [
        chain_problem(cost_spec=CostSpec(lam=0.0), grid_resolution=81),
        chain_problem(cost_spec=CostSpec(lam=1.0), grid_resolution=81),
        two_node_problem({"W": 0.3, "X": -0.7}, grid_resolution=81),
    ]
    for problem in cases:
        fast = solve(problem)
        grid = brute_force_solve(problem)
        assert fast.feasible and grid.feasible
        assert sorted(fast.action.support) == sorted(grid.action.support)
        # the continuous optimum can only undercut the grid by rounding
        assert fast.cost.total <= grid.cost.total + 1e-9
        step = max(
            (hi - lo) / (problem.grid_resolution - 1)
            for hi, lo in ((b[1], b[0])
                           for b in problem.resolved_bounds.values())
        )
        assert grid.cost.total - fast.cost.total <= step


def test_oracle_grid_cap_enforced():
    problem = chain_problem(k=3, grid_resolution=500)
    with pytest.raises(ValueError, match="exceeds the cap"):
        brute_force_solve(problem)


# ----------------------------------------------------------------- re-verify

def test_credit_solutions_reverify_under_counterfactual():
    scm = german_scm()
    dag = from_scm(scm, german_times())
    for seed in range(8):
        instance = sample_unfavorable(scm, seed=seed)
        lam = (0.0, 0.5, 2.0)[seed % 3]
        problem = RecourseProblem(scm=scm, dag=dag, instance=instance,
                                  cost_spec=CostSpec(lam=lam))
        sol = solve(problem)
        assert sol.feasible
        assert 1 <= len(sol.action.support) <= 2
        actionable = {v.name for v in scm.variables
                      if v.actionability == "actionable"}
        assert set(sol.action.support) <= actionable
        again = evaluate_action(problem, sol.action)
        assert again.feasible
        assert again.probability == sol.probability
        assert again.cost == sol.cost


# ------------------------------------------------------------------- payload

def test_solution_payload_is_json_ready():
    sol = solve(chain_problem(cost_spec=CostSpec(lam=0.25)))
    payload = solution_payload(sol)
    assert set(payload) == {"action", "cost", "counterfactual", "probability",
                            "feasible", "diagnostics"}
    assert list(payload["counterfactual"]) == ["M", "X", "Z"]
    assert payload["cost"]["total"] == sol.cost.total
    json.dumps(payload)

    stuck = solve(two_node_problem({"W": 0.0, "X": -5.0},
                                   bounds={"X": (-0.1, 0.1)}))
    payload = solution_payload(stuck)
    assert payload["cost"] is None
    assert payload["feasible"] is False
    json.dumps(payload)
