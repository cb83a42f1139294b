"""Linear additive-noise structural causal models.

Data model plus the mechanism-level operations: validation, seeded
sampling, additive and hard interventions, abduction, counterfactual
evaluation, prediction through a sigmoid target, and exact variance
propagation.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal, Mapping, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import expit

NoiseFamily = Literal["normal", "bernoulli", "gamma", "degenerate"]
Actionability = Literal["actionable", "mutable", "non_actionable"]

ACTIONABILITIES: tuple[str, ...] = ("actionable", "mutable", "non_actionable")

#: Dataset column holding the sigmoid score probability.
PROB_COL = "Y_prob"
#: Dataset column holding the sampled binary outcome.
LABEL_COL = "Y_label"

# Rows per RNG stream.  Generation derives one child stream per fixed-size
# chunk, so splitting the chunks across workers cannot change the output.
SAMPLE_CHUNK = 1 << 16

Instance = dict  # name -> value mapping for one individual


class ValidationError(ValueError):
    """Raised when an operation is asked to run on a malformed SCM."""


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class NoiseSpec:
    """Exogenous noise distribution for one variable."""

    family: NoiseFamily
    params: Mapping[str, float]

    _REQUIRED = {
        "normal": ("mean", "stddev"),
        "bernoulli": ("p",),
        "gamma": ("shape", "scale"),
        "degenerate": ("value",),
    }

    @staticmethod
    def normal(mean: float, stddev: float) -> "NoiseSpec":
        return NoiseSpec("normal", {"mean": mean, "stddev": stddev})

    @staticmethod
    def bernoulli(p: float) -> "NoiseSpec":
        return NoiseSpec("bernoulli", {"p": p})

    @staticmethod
    def gamma(shape: float, scale: float) -> "NoiseSpec":
        return NoiseSpec("gamma", {"shape": shape, "scale": scale})

    @staticmethod
    def degenerate(value: float) -> "NoiseSpec":
        return NoiseSpec("degenerate", {"value": value})

    def problems(self) -> list[str]:
        if self.family not in self._REQUIRED:
            return [f"unknown noise family {self.family!r}"]
        required = self._REQUIRED[self.family]
        if set(self.params) != set(required):
            return [
                f"{self.family} noise needs params {sorted(required)}, "
                f"got {sorted(self.params)}"
            ]
        out = []
        for key, value in self.params.items():
            if not math.isfinite(value):
                out.append(f"{self.family} noise param {key} is not finite")
        if out:
            return out
        if self.family == "normal" and self.params["stddev"] <= 0:
            out.append("normal noise needs stddev > 0")
        if self.family == "bernoulli" and not 0.0 <= self.params["p"] <= 1.0:
            out.append("bernoulli noise needs p in [0, 1]")
        if self.family == "gamma":
            if self.params["shape"] <= 0 or self.params["scale"] <= 0:
                out.append("gamma noise needs shape > 0 and scale > 0")
        return out

    def mean(self) -> float:
        if self.family == "normal":
            return self.params["mean"]
        if self.family == "bernoulli":
            return self.params["p"]
        if self.family == "gamma":
            return self.params["shape"] * self.params["scale"]
        return self.params["value"]

    def variance(self) -> float:
        if self.family == "normal":
            return self.params["stddev"] ** 2
        if self.family == "bernoulli":
            p = self.params["p"]
            return p * (1.0 - p)
        if self.family == "gamma":
            return self.params["shape"] * self.params["scale"] ** 2
        return 0.0

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.family == "normal":
            return rng.normal(self.params["mean"], self.params["stddev"], n)
        if self.family == "bernoulli":
            return (rng.random(n) < self.params["p"]).astype(float)
        if self.family == "gamma":
            return rng.gamma(self.params["shape"], self.params["scale"], n)
        return np.full(n, float(self.params["value"]))


@dataclass(frozen=True)
class StructuralEquation:
    """x := intercept + sum(coefficients[p] * x_p) + noise."""

    parents: tuple[str, ...]
    coefficients: Mapping[str, float]
    intercept: float = 0.0

    def parent_sum(self, values: Mapping[str, float]) -> float:
        total = self.intercept
        for p in self.parents:
            total += self.coefficients[p] * values[p]
        return total


@dataclass(frozen=True)
class Variable:
    name: str
    equation: StructuralEquation
    noise: NoiseSpec
    actionability: Actionability = "actionable"


@dataclass(frozen=True)
class TargetSpec:
    """Sigmoid decision target over a linear score of the variables."""

    coefficients: Mapping[str, float]
    threshold: float = 0.5


@dataclass(frozen=True)
class Scm:
    variables: tuple[Variable, ...]
    target: TargetSpec

    @cached_property
    def by_name(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v.name: [] for v in self.variables}
        for v in self.variables:
            for p in v.equation.parents:
                if p in out:
                    out[p].append(v.name)
        return {k: tuple(vs) for k, vs in out.items()}

    @cached_property
    def order(self) -> tuple[str, ...]:
        """Topological order, ties broken by declaration order."""
        _require_valid(self)
        order, _ = _kahn(self)
        return tuple(order)

    @cached_property
    def validation(self) -> "ValidationReport":
        return validate(self)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    errors: tuple[str, ...] = ()


@dataclass(frozen=True)
class Action:
    """Additive intervention: shift each supported variable's equation.

    Zero-valued shifts are dropped so the support is exactly the set of
    variables the action moves.
    """

    shifts: Mapping[str, float]

    def __post_init__(self):
        cleaned = {k: float(v) for k, v in self.shifts.items() if v != 0.0}
        object.__setattr__(self, "shifts", cleaned)

    @staticmethod
    def empty() -> "Action":
        return Action({})

    @property
    def support(self) -> frozenset:
        return frozenset(self.shifts)

    def sorted_items(self) -> tuple:
        return tuple(sorted(self.shifts.items()))


class Prediction(NamedTuple):
    score: float
    probability: float
    label: int


@dataclass(frozen=True)
class VariancePair:
    """Noise-level (proper) and observational (marginal) variance."""

    proper: float
    marginal: float

    @property
    def proper_std(self) -> float:
        return math.sqrt(self.proper)

    @property
    def marginal_std(self) -> float:
        return math.sqrt(self.marginal)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Seeded sample with the exact residual noises that generated it."""

    columns: tuple[str, ...]
    values: dict
    noises: dict
    label_uniforms: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return len(self.label_uniforms)

    def row(self, i: int) -> Instance:
        return {name: float(self.values[name][i]) for name in self.columns[:-2]}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({c: self.values[c] for c in self.columns})

    def write_csv(self, buf) -> None:
        # 17 significant digits round-trip float64 exactly
        self.to_frame().to_csv(buf, index=False, float_format="%.17g")


# ---------------------------------------------------------------------------
# validation


def _kahn(scm: Scm) -> tuple[list[str], list[str]]:
    names = [v.name for v in scm.variables]
    decl = {n: i for i, n in enumerate(names)}
    indeg = {n: 0 for n in names}
    children: dict[str, list[str]] = {n: [] for n in names}
    for v in scm.variables:
        for p in set(v.equation.parents):
            if p in indeg:
                indeg[v.name] += 1
                children[p].append(v.name)
    ready = [decl[n] for n in names if indeg[n] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        name = names[heapq.heappop(ready)]
        order.append(name)
        for c in children[name]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, decl[c])
    placed = set(order)
    leftover = [n for n in names if n not in placed]
    return order, leftover


def validate(scm: Scm) -> ValidationReport:
    """Check structural integrity without raising; returns every problem."""
    errors: list[str] = []
    names = [v.name for v in scm.variables]
    if not names:
        errors.append("SCM declares no variables")
    seen = set()
    for n in names:
        if n in seen:
            errors.append(f"duplicate variable name {n!r}")
        seen.add(n)

    for v in scm.variables:
        eq = v.equation
        if v.name in eq.parents:
            errors.append(f"{v.name} lists itself as a parent")
        if len(set(eq.parents)) != len(eq.parents):
            errors.append(f"{v.name} lists a parent twice")
        if set(eq.coefficients) != set(eq.parents):
            errors.append(
                f"{v.name} coefficient names do not match its parents"
            )
        for p in eq.parents:
            if p not in seen and p not in names:
                errors.append(f"{v.name} references unknown parent {p!r}")
        if not math.isfinite(eq.intercept):
            errors.append(f"{v.name} intercept is not finite")
        for p, c in eq.coefficients.items():
            if not math.isfinite(c):
                errors.append(f"{v.name} coefficient on {p} is not finite")
        errors.extend(f"{v.name}: {msg}" for msg in v.noise.problems())
        if v.actionability not in ACTIONABILITIES:
            errors.append(
                f"{v.name} actionability must be one of {ACTIONABILITIES}"
            )

    target = scm.target
    if not any(c != 0.0 for c in target.coefficients.values()):
        errors.append("target needs at least one nonzero coefficient")
    for n, c in target.coefficients.items():
        if n not in names:
            errors.append(f"target references unknown variable {n!r}")
        if not math.isfinite(c):
            errors.append(f"target coefficient on {n} is not finite")
    if not 0.0 < target.threshold < 1.0:
        errors.append("decision threshold must lie strictly inside (0, 1)")

    if not errors:
        _, leftover = _kahn(scm)
        if leftover:
            errors.append(
                "parent relation contains a cycle through "
                + ", ".join(sorted(leftover))
            )
    return ValidationReport(ok=not errors, errors=tuple(errors))


def _require_valid(scm: Scm) -> None:
    report = scm.validation
    if not report.ok:
        raise ValidationError("; ".join(report.errors))


def topological_order(scm: Scm) -> list[str]:
    return list(scm.order)


def _check_instance(scm: Scm, instance: Mapping[str, float]) -> None:
    expected = set(scm.names)
    got = set(instance)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if extra:
            parts.append(f"unexpected {extra}")
        raise ValidationError("instance keys do not match SCM: " + "; ".join(parts))


def _check_action_names(scm: Scm, names: Iterable[str]) -> None:
    unknown = sorted(set(names) - set(scm.names))
    if unknown:
        raise ValidationError(f"action references unknown variables {unknown}")


# ---------------------------------------------------------------------------
# sampling and evaluation


def target_score(scm: Scm, values: Mapping) -> "np.ndarray | float":
    """Linear score the sigmoid target is applied to."""
    total = 0.0
    for name, coeff in scm.target.coefficients.items():
        total = total + coeff * values[name]
    return total


def sample(scm: Scm, n: int, seed: int) -> Dataset:
    """Draw n rows; identical (scm, n, seed) gives bit-identical output.

    Noise is drawn chunk by chunk from independently derived streams keyed
    on (seed, chunk index), so the result does not depend on how many
    workers the chunks are spread across.  The stored noises are the
    residuals x - parent_sum, which abduction reproduces bit-exactly.
    """
    _require_valid(scm)
    if n < 0:
        raise ValueError("n must be non-negative")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    order = scm.order
    values = {name: np.empty(n) for name in order}
    noises = {name: np.empty(n) for name in order}
    label_u = np.empty(n)
    for start in range(0, max(n, 1), SAMPLE_CHUNK):
        stop = min(start + SAMPLE_CHUNK, n)
        if stop <= start:
            break
        m = stop - start
        rng = np.random.default_rng([seed, start // SAMPLE_CHUNK])
        for name in order:
            var = scm.by_name[name]
            eq = var.equation
            drawn = var.noise.draw(rng, m)
            parent_sum = np.full(m, float(eq.intercept))
            for p in eq.parents:
                parent_sum += eq.coefficients[p] * values[p][start:stop]
            x = parent_sum + drawn
            values[name][start:stop] = x
            noises[name][start:stop] = x - parent_sum
        label_u[start:stop] = rng.random(m)

    score = target_score(scm, values)
    prob = expit(score) if n else np.empty(0)
    label = (label_u < prob).astype(np.int64)
    values[PROB_COL] = np.asarray(prob, dtype=float)
    values[LABEL_COL] = label
    columns = tuple(order) + (PROB_COL, LABEL_COL)
    return Dataset(columns=columns, values=values, noises=noises,
                   label_uniforms=label_u, seed=seed)


def sample_unfavorable(scm: Scm, seed: int, batch: int = 512,
                       max_batches: int = 64) -> Instance:
    """Sampled individual just below the decision threshold.

    Among a seeded batch of draws this returns the unfavorable row closest
    to the threshold: the marginal applicant, for whom recourse is the
    interesting question. Deep rejects would mostly be unreachable within
    sane intervention bounds.
    """
    for b in range(max_batches):
        ds = sample(scm, batch, seed + b)
        probs = ds.values[PROB_COL]
        below = np.nonzero(probs < scm.target.threshold)[0]
        if below.size:
            return ds.row(int(below[np.argmax(probs[below])]))
    raise RuntimeError("no unfavorable individual found; threshold too low?")


def predict(scm: Scm, instance: Mapping[str, float]) -> Prediction:
    _require_valid(scm)
    _check_instance(scm, instance)
    score = float(target_score(scm, instance))
    prob = float(expit(score))
    return Prediction(score=score, probability=prob,
                      label=int(prob >= scm.target.threshold))


# ---------------------------------------------------------------------------
# interventions


def intervene(scm: Scm, action: Action) -> Scm:
    """Additive intervention: shift each supported equation's intercept."""
    _require_valid(scm)
    _check_action_names(scm, action.shifts)
    replaced = []
    for v in scm.variables:
        if v.name in action.shifts:
            eq = v.equation
            shifted = StructuralEquation(
                parents=eq.parents,
                coefficients=eq.coefficients,
                intercept=eq.intercept + action.shifts[v.name],
            )
            v = Variable(v.name, shifted, v.noise, v.actionability)
        replaced.append(v)
    return Scm(variables=tuple(replaced), target=scm.target)


def hard_intervene(scm: Scm, assignments: Mapping[str, float]) -> Scm:
    """do(): replace each assigned equation by a degenerate constant."""
    _require_valid(scm)
    _check_action_names(scm, assignments)
    replaced = []
    for v in scm.variables:
        if v.name in assignments:
            v = Variable(
                v.name,
                StructuralEquation(parents=(), coefficients={}, intercept=0.0),
                NoiseSpec.degenerate(float(assignments[v.name])),
                v.actionability,
            )
        replaced.append(v)
    return Scm(variables=tuple(replaced), target=scm.target)


def affected_set(scm: Scm, support: Iterable[str]) -> set:
    """Support plus every descendant: the cone an intervention can move."""
    _check_action_names(scm, support)
    dirty = set(support)
    stack = list(dirty)
    while stack:
        for c in scm.children[stack.pop()]:
            if c not in dirty:
                dirty.add(c)
                stack.append(c)
    return dirty


# ---------------------------------------------------------------------------
# abduction and counterfactuals


def abduct(scm: Scm, instance: Mapping[str, float]) -> dict:
    """Recover the noise each equation must have drawn to produce instance."""
    _require_valid(scm)
    _check_instance(scm, instance)
    return {
        name: instance[name] - scm.by_name[name].equation.parent_sum(instance)
        for name in scm.order
    }


def counterfactual(scm: Scm, instance: Mapping[str, float],
                   action: Action) -> Instance:
    """Abduct the noises, apply the action, re-evaluate.

    Variables outside the action's descendant cone keep their observed
    values untouched, so an empty action returns the instance exactly.
    """
    noises = abduct(scm, instance)
    if not action.shifts:
        return dict(instance)
    shifted = intervene(scm, action)
    dirty = affected_set(scm, action.support)
    out: Instance = {}
    for name in scm.order:
        if name in dirty:
            eq = shifted.by_name[name].equation
            out[name] = eq.parent_sum(out) + noises[name]
        else:
            out[name] = instance[name]
    return out


def propagate(scm: Scm, noises: Mapping, base: Optional[Mapping] = None,
              dirty: Optional[set] = None) -> dict:
    """Vectorised structural evaluation on given noise arrays.

    With base values and a dirty set, columns outside the dirty cone are
    carried over bit-identically instead of being recomputed; this keeps
    null interventions exactly null.
    """
    _require_valid(scm)
    out: dict = {}
    for name in scm.order:
        if base is not None and dirty is not None and name not in dirty:
            out[name] = base[name]
            continue
        eq = scm.by_name[name].equation
        # accumulate parents before noise, in equation order, so the result
        # is bit-identical to sample() and to parent_sum() + noise
        acc = eq.intercept
        for p in eq.parents:
            acc = acc + eq.coefficients[p] * out[p]
        out[name] = acc + noises[name]
    return out


# ---------------------------------------------------------------------------
# variances


def variances(scm: Scm) -> dict:
    """Exact per-variable noise (proper) and observational (marginal) variance.

    Marginals come from full covariance propagation through the linear
    equations, so correlated parents are handled exactly.
    """
    _require_valid(scm)
    order = scm.order
    idx = {n: i for i, n in enumerate(order)}
    k = len(order)
    cov = np.zeros((k, k))
    out: dict = {}
    for name in order:
        i = idx[name]
        var = scm.by_name[name]
        eq = var.equation
        noise_var = var.noise.variance()
        row = np.zeros(k)
        for p in eq.parents:
            row += eq.coefficients[p] * cov[idx[p]]
        own = noise_var
        for p in eq.parents:
            own += eq.coefficients[p] * row[idx[p]]
        cov[i, :] = row
        cov[:, i] = row
        cov[i, i] = own
        out[name] = VariancePair(proper=noise_var, marginal=float(own))
    return out


def approx_variances(scm: Scm) -> dict:
    """First-order variance recursion with unsquared coefficients.

    Reported verbatim as a diagnostic of how badly the shortcut drifts
    from the exact marginals; it can even go negative when coefficients
    are negative.
    """
    _require_valid(scm)
    out: dict = {}
    for name in scm.order:
        var = scm.by_name[name]
        eq = var.equation
        total = var.noise.variance()
        for p in eq.parents:
            total += eq.coefficients[p] * out[p]
        out[name] = total
    return out


# ---------------------------------------------------------------------------
# file format


def to_document(scm: Scm, response_times: Optional[Mapping[str, float]] = None) -> dict:
    """JSON-ready description: variables, target, edge response times."""
    doc = {
        "variables": [
            {
                "name": v.name,
                "parents": {p: v.equation.coefficients[p] for p in v.equation.parents},
                "intercept": v.equation.intercept,
                "noise": {"family": v.noise.family, "params": dict(v.noise.params)},
                "actionability": v.actionability,
            }
            for v in scm.variables
        ],
        "target": {
            "coefficients": dict(scm.target.coefficients),
            "threshold": scm.target.threshold,
        },
        "response_times": dict(response_times or {}),
    }
    return doc


def from_document(doc: Mapping) -> tuple[Scm, dict]:
    """Parse the JSON description; returns the SCM and its response times."""
    try:
        raw_vars = doc["variables"]
        target_doc = doc["target"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"SCM document missing section: {exc}") from exc
    variables = []
    for item in raw_vars:
        try:
            parents = item["parents"]
            eq = StructuralEquation(
                parents=tuple(parents),
                coefficients={k: float(v) for k, v in parents.items()},
                intercept=float(item.get("intercept", 0.0)),
            )
            noise_doc = item["noise"]
            noise = NoiseSpec(
                family=noise_doc["family"],
                params={k: float(v) for k, v in noise_doc["params"].items()},
            )
            variables.append(
                Variable(
                    name=item["name"],
                    equation=eq,
                    noise=noise,
                    actionability=item.get("actionability", "actionable"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed variable entry: {exc}") from exc
    try:
        target = TargetSpec(
            coefficients={k: float(v) for k, v in target_doc["coefficients"].items()},
            threshold=float(target_doc.get("threshold", 0.5)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed target entry: {exc}") from exc
    times = {str(k): float(v) for k, v in (doc.get("response_times") or {}).items()}
    return Scm(variables=tuple(variables), target=target), times


def load_scm_file(path) -> tuple[Scm, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return from_document(json.load(fh))


def dump_scm_file(path, scm: Scm,
                  response_times: Optional[Mapping[str, float]] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_document(scm, response_times), fh, indent=2, sort_keys=False)
        fh.write("\n")
