"""Feature cost, response-time cost, and their composite."""
import math

import pytest

from timecourse import (
    Action,
    CostBreakdown,
    CostError,
    CostSpec,
    VariancePair,
    feature_cost,
    from_scm,
    german_scm,
    german_times,
    time_cost,
    total_cost,
    variances,
)
from timecourse.cost import member_time

from conftest import CHAIN_TIMES, make_chain_scm, make_two_node_scm

VARS = {
    "X": VariancePair(proper=4.0, marginal=4.0),
    "M": VariancePair(proper=1.0, marginal=25.0),
}


# ------------------------------------------------------------------ CostSpec

def test_cost_spec_defaults():
    spec = CostSpec()
    assert spec.p == 2.0
    assert spec.normalization == "proper_sigma"
    assert spec.lam == 0.0
    assert spec.time_variant == "weighted_average_abs"
    assert spec.time_budget is None


@pytest.mark.parametrize("kwargs", [
    {"p": 0.5},
    {"p": float("nan")},
    {"normalization": "sigma"},
    {"lam": -1.0},
    {"time_variant": "shortest_path"},
    {"time_budget": -2.0},
])
def test_cost_spec_rejects_bad_values(kwargs):
    with pytest.raises(CostError):
        CostSpec(**kwargs)


# -------------------------------------------------------------- feature cost

def test_feature_cost_empty_action_is_free():
    assert feature_cost(Action({}), CostSpec(), VARS) == 0.0


def test_feature_cost_hand_values_by_exponent():
    # proper stds are 2 and 1, so the normalized shifts are 3 and 4
    action = Action({"X": 6.0, "M": -4.0})
    assert feature_cost(action, CostSpec(p=1.0), VARS) == pytest.approx(7.0)
    assert feature_cost(action, CostSpec(p=2.0), VARS) == pytest.approx(5.0)
    assert feature_cost(action, CostSpec(p=3.0), VARS) == pytest.approx(
        (27.0 + 64.0) ** (1 / 3))


def test_feature_cost_normalization_variants():
    action = Action({"X": 6.0, "M": -4.0})
    got = feature_cost(action, CostSpec(p=1.0, normalization="marginal_sigma"),
                       VARS)
    assert got == pytest.approx(6.0 / 2.0 + 4.0 / 5.0)
    got = feature_cost(action, CostSpec(p=1.0, normalization="none"), VARS)
    assert got == pytest.approx(10.0)


def test_feature_cost_requires_normalizers():
    with pytest.raises(CostError, match="no variance available for 'Q'"):
        feature_cost(Action({"Q": 1.0}), CostSpec(), VARS)
    degenerate = {"X": VariancePair(proper=0.0, marginal=0.0)}
    with pytest.raises(CostError, match="zero normalizer"):
        feature_cost(Action({"X": 1.0}), CostSpec(), degenerate)
    # but unnormalized cost never needs a variance table entry
    got = feature_cost(Action({"Q": 2.0}), CostSpec(normalization="none"), {})
    assert got == 2.0


def test_feature_cost_uses_package_variance_table():
    scm = make_chain_scm()
    table = variances(scm)
    # M's noise is N(0, 1) while its marginal picks up 4 * var(X)
    action = Action({"M": 2.0})
    assert feature_cost(action, CostSpec(), table) == pytest.approx(2.0)
    got = feature_cost(action, CostSpec(normalization="marginal_sigma"), table)
    assert got == pytest.approx(2.0 / math.sqrt(5.0))


# ----------------------------------------------------------------- time cost

def test_time_cost_takes_slowest_member():
    dag = from_scm(make_chain_scm(), CHAIN_TIMES)
    spec = CostSpec()
    assert time_cost(dag, ["X"], spec) == 5.0
    assert time_cost(dag, ["M"], spec) == 1.0
    assert time_cost(dag, ["M", "X"], spec) == 5.0
    assert time_cost(dag, ["Z"], spec) == 0.0


def test_time_cost_rejects_empty_support():
    dag = from_scm(make_chain_scm(), CHAIN_TIMES)
    with pytest.raises(CostError, match="non-empty support"):
        time_cost(dag, [], CostSpec())


def test_time_cost_warns_when_no_member_reaches_target():
    # W is a disconnected root; moving it cannot reach the outcome
    dag = from_scm(make_two_node_scm(), {})
    spec = CostSpec()
    with pytest.warns(UserWarning, match="no support member has a path"):
        got = time_cost(dag, ["W"], spec)
    assert got == 0.0
    # a mixed support still counts its connected member
    assert time_cost(dag, ["W", "X"], spec) == 0.0
    credit = from_scm(german_scm(), german_times())
    assert time_cost(credit, ["I"], spec) == pytest.approx(32 / 17)


def test_time_variants_on_credit_graph():
    dag = from_scm(german_scm(), german_times())
    lp = CostSpec(time_variant="longest_path")
    raw = CostSpec(time_variant="weighted_average_raw")
    wabs = CostSpec(time_variant="weighted_average_abs")
    assert time_cost(dag, ["E"], lp) == 8.0
    assert time_cost(dag, ["E"], raw) == pytest.approx(3148 / 408)
    # all credit-graph path weights from E are positive, so abs == raw
    assert time_cost(dag, ["E"], wabs) == pytest.approx(3148 / 408)


def test_time_variants_disagree_under_negative_weights():
    from timecourse import CausalDag, Edge

    edges = (Edge("X", "A", 1.0, 1.0), Edge("A", "Y", 1.0, 1.0),
             Edge("X", "B", 1.0, 4.0), Edge("B", "Y", -0.5, 0.0))
    dag = CausalDag(nodes=("X", "A", "B", "Y"), edges=edges, target="Y")
    raw = CostSpec(time_variant="weighted_average_raw")
    wabs = CostSpec(time_variant="weighted_average_abs")
    # raw: (1*2 + (-0.5)*4) / (1 - 0.5) = 0; abs: (2 + 2) / 1.5
    assert time_cost(dag, ["X"], raw) == pytest.approx(0.0)
    assert time_cost(dag, ["X"], wabs) == pytest.approx(8 / 3)


def test_member_time_is_none_off_the_cone():
    dag = from_scm(make_two_node_scm(), {})
    assert member_time(dag, "W", CostSpec()) is None
    credit = from_scm(german_scm(), german_times())
    assert member_time(credit, "S", CostSpec()) == 0.0


# --------------------------------------------------------------------- total

def test_total_cost_composes_terms():
    dag = from_scm(make_chain_scm(), CHAIN_TIMES)
    table = variances(make_chain_scm())
    spec = CostSpec(p=1.0, lam=2.0)
    got = total_cost(Action({"X": 3.0}), dag, spec, table)
    assert got == CostBreakdown(c_s=3.0, c_t=5.0, total=13.0)


def test_total_cost_empty_action_is_zero():
    dag = from_scm(make_chain_scm(), CHAIN_TIMES)
    got = total_cost(Action({}), dag, CostSpec(lam=3.0), {})
    assert got == CostBreakdown(0.0, 0.0, 0.0)


def test_total_cost_ignores_budget():
    # the budget is a solver-side constraint, not a price term
    dag = from_scm(make_chain_scm(), CHAIN_TIMES)
    table = variances(make_chain_scm())
    spec = CostSpec(p=1.0, lam=1.0, time_budget=0.5)
    got = total_cost(Action({"X": 3.0}), dag, spec, table)
    assert got.c_t == 5.0
    assert got.total == 8.0
