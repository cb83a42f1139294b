"""Semi-synthetic loan-approval benchmark: the eight-variable credit SCM,
its edge response times, the causal-effect-derivative (CED) experiment,
and the observational-vs-interventional pair-plot export.

CED of a variable is the mean change in the favorable-outcome probability
when that variable is shifted by alpha noise-standard-deviations, divided
by alpha. Shifted and observational datasets share random draws by
default, which cancels sampling noise row by row; a disconnected variable
then scores exactly zero rather than statistically zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import expit

from .graph import CausalDag, from_scm
from .scm import (
    LABEL_COL,
    PROB_COL,
    Action,
    Dataset,
    NoiseSpec,
    Scm,
    StructuralEquation,
    TargetSpec,
    Variable,
    affected_set,
    intervene,
    propagate,
    sample,
    target_score,
)

#: Edge response times in months; edges not listed respond immediately.
GERMAN_TIMES = {
    "E->I": 5.0,
    "E->J": 5.0,
    "J->I": 1.0,
    "I->S": 2.0,
    "D->Y": 0.0,
    "I->Y": 1.0,
    "S->Y": 0.0,
    "L->Y": 0.0,
    "L->D": 0.0,
}

CED_MODES = ("probability", "label")

_PAIRPLOT_DEFAULT_COLS = ("A", "E", "I", "L")


def _eq(parents: dict, intercept: float = 0.0) -> StructuralEquation:
    return StructuralEquation(tuple(parents), dict(parents), intercept)


def german_scm() -> Scm:
    """Loan-approval SCM: gender G, age A, education E, job level J,
    loan amount L, loan duration D, income I, savings S."""
    variables = (
        Variable("G", _eq({}), NoiseSpec.bernoulli(0.5), "non_actionable"),
        Variable("A", _eq({}, intercept=-35.0), NoiseSpec.gamma(10.0, 3.5),
                 "non_actionable"),
        Variable("E", _eq({"G": 1.0, "A": 1.0}), NoiseSpec.normal(0.0, 1.0)),
        Variable("J", _eq({"G": 1.0, "A": 2.0, "E": 4.0}), NoiseSpec.normal(0.0, 2.0)),
        Variable("L", _eq({"A": 1.0, "G": 0.5}), NoiseSpec.normal(0.0, 3.0)),
        Variable("D", _eq({"G": 1.0, "A": -0.5, "L": 2.0}), NoiseSpec.normal(0.0, 2.0),
                 "mutable"),
        Variable("I", _eq({"G": 0.5, "A": 1.0, "E": 4.0, "J": 5.0}),
                 NoiseSpec.normal(0.0, 4.0)),
        Variable("S", _eq({"I": 5.0}), NoiseSpec.normal(0.0, 2.0)),
    )
    target = TargetSpec({"I": 2.0, "S": 3.0, "L": -1.0, "D": -1.0}, threshold=0.5)
    return Scm(variables=variables, target=target)


def german_times() -> dict:
    return dict(GERMAN_TIMES)


def german_dag() -> CausalDag:
    return from_scm(german_scm(), german_times())


@dataclass(frozen=True)
class CedEstimate:
    variable: str
    alpha: float
    estimate: float
    stderr: float
    n: int
    seed: int


@dataclass(frozen=True)
class CedRow:
    variable: str
    actionable: bool
    alpha: float
    ced: float
    stderr: float


@dataclass(frozen=True)
class CedReport:
    rows: tuple
    alpha: float
    n: int
    seed: int
    mode: str
    paired: bool


def _check_ced_args(scm: Scm, variable: str, alpha: float, n: int, mode: str):
    if variable not in scm.by_name:
        raise ValueError(f"unknown variable {variable!r}")
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    if mode not in CED_MODES:
        raise ValueError(f"mode must be one of {CED_MODES}")


def _shift_action(scm: Scm, variable: str, alpha: float) -> Action:
    sigma_hat = math.sqrt(scm.by_name[variable].noise.variance())
    return Action({variable: alpha * sigma_hat})


def _outcome_columns(scm: Scm, dataset: Dataset, action: Action, mode: str):
    """Observational and post-shift outcome columns on shared draws."""
    shifted = intervene(scm, action)
    dirty = affected_set(scm, action.support) if action.shifts else set()
    vals = propagate(shifted, dataset.noises, base=dataset.values, dirty=dirty)
    prob = expit(target_score(scm, vals))
    if mode == "probability":
        return dataset.values[PROB_COL], prob
    return dataset.values[LABEL_COL], (dataset.label_uniforms < prob).astype(float)


def _paired_ced(scm: Scm, variable: str, alpha: float, dataset: Dataset,
                mode: str) -> tuple:
    action = _shift_action(scm, variable, alpha)
    y_obs, y_int = _outcome_columns(scm, dataset, action, mode)
    diffs = y_int - y_obs
    estimate = float(diffs.mean() / alpha)
    stderr = float(diffs.std(ddof=1) / math.sqrt(diffs.size) / alpha)
    return estimate, stderr


def _independent_seed(seed: int, scm: Scm, variable: str) -> int:
    # distinct stream per variable, disjoint from the observational seed
    return seed * 1_000_003 + scm.names.index(variable) + 1


def _independent_ced(scm: Scm, variable: str, alpha: float, n: int, seed: int,
                     mode: str) -> tuple:
    col = PROB_COL if mode == "probability" else LABEL_COL
    base = sample(scm, n, seed).values[col]
    shifted_scm = intervene(scm, _shift_action(scm, variable, alpha))
    shifted = sample(shifted_scm, n, _independent_seed(seed, scm, variable)).values[col]
    estimate = float((shifted.mean() - base.mean()) / alpha)
    stderr = float(
        math.sqrt(base.var(ddof=1) / n + shifted.var(ddof=1) / n) / alpha
    )
    return estimate, stderr


def ced(scm: Scm, variable: str, alpha: float = 1.0, n: int = 10000,
        seed: int = 0, mode: str = "probability", paired: bool = True,
        _dataset: Optional[Dataset] = None) -> CedEstimate:
    """Finite-difference causal effect of `variable` on the favorable
    probability, per unit of alpha."""
    _check_ced_args(scm, variable, alpha, n, mode)
    if paired:
        dataset = _dataset if _dataset is not None else sample(scm, n, seed)
        estimate, stderr = _paired_ced(scm, variable, alpha, dataset, mode)
    else:
        estimate, stderr = _independent_ced(scm, variable, alpha, n, seed, mode)
    return CedEstimate(variable=variable, alpha=alpha, estimate=estimate,
                       stderr=stderr, n=n, seed=seed)


def ced_table(scm: Scm, alpha: float = 1.0, n: int = 10000, seed: int = 0,
              mode: str = "probability", paired: bool = True) -> CedReport:
    """CED for every variable, sharing one observational dataset."""
    dataset = sample(scm, n, seed) if paired else None
    rows = []
    for variable in scm.names:
        est = ced(scm, variable, alpha=alpha, n=n, seed=seed, mode=mode,
                  paired=paired, _dataset=dataset)
        actionable = scm.by_name[variable].actionability == "actionable"
        rows.append(CedRow(variable=variable, actionable=actionable,
                           alpha=alpha, ced=est.estimate, stderr=est.stderr))
    return CedReport(rows=tuple(rows), alpha=alpha, n=n, seed=seed, mode=mode,
                     paired=paired)


def _report_stamp(report: CedReport) -> str:
    return (f"# seed={report.seed} n={report.n} alpha={report.alpha:g}"
            f" mode={report.mode} paired={str(report.paired).lower()}")


def ced_report_text(report: CedReport) -> str:
    lines = [_report_stamp(report)]
    header = f"{'variable':<10}{'actionable':<12}{'alpha':>8}{'ced':>14}{'stderr':>14}"
    lines.append(header)
    for row in report.rows:
        lines.append(
            f"{row.variable:<10}{('yes' if row.actionable else 'no'):<12}"
            f"{row.alpha:>8g}{row.ced:>14.6f}{row.stderr:>14.6f}"
        )
    return "\n".join(lines) + "\n"


def ced_report_csv(report: CedReport) -> str:
    lines = [_report_stamp(report), "variable,actionable,alpha,ced,stderr"]
    for row in report.rows:
        lines.append(
            f"{row.variable},{str(row.actionable).lower()},{row.alpha:.17g},"
            f"{row.ced:.17g},{row.stderr:.17g}"
        )
    return "\n".join(lines) + "\n"


def pairplot_export(scm: Scm, n: int = 2000, seed: int = 0,
                    interventions: Optional[Sequence] = None,
                    all_columns: bool = False) -> pd.DataFrame:
    """Long-format frame of observational and shift-intervened samples on
    shared draws, one block per distribution."""
    if interventions is None:
        interventions = (("E", 1.0), ("I", 1.0))
    dataset = sample(scm, n, seed)
    if all_columns:
        value_cols = list(scm.names) + [PROB_COL, LABEL_COL]
    else:
        value_cols = [c for c in _PAIRPLOT_DEFAULT_COLS if c in scm.by_name]
        value_cols.append(PROB_COL)

    def block(label: str, columns: dict) -> pd.DataFrame:
        data = {"distribution": np.repeat(label, n)}
        for col in value_cols:
            data[col] = columns[col]
        return pd.DataFrame(data)

    frames = [block("observational", dataset.values)]
    for variable, alpha in interventions:
        _check_ced_args(scm, variable, float(alpha), n, "probability")
        action = _shift_action(scm, variable, float(alpha))
        shifted = intervene(scm, action)
        dirty = affected_set(scm, action.support) if action.shifts else set()
        vals = dict(propagate(shifted, dataset.noises, base=dataset.values,
                              dirty=dirty))
        prob = expit(target_score(scm, vals))
        vals[PROB_COL] = prob
        vals[LABEL_COL] = (dataset.label_uniforms < prob).astype(np.int64)
        frames.append(block(f"do_{variable}", vals))
    return pd.concat(frames, ignore_index=True)


def pairplot_csv(frame: pd.DataFrame, seed: int, n: int) -> str:
    stamp = f"# seed={seed} n={n}"
    body = frame.to_csv(index=False, float_format="%.17g")
    return stamp + "\n" + body
