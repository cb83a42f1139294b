"""Causal DAG with edge coefficients and response-time annotations.

Path algebra over the induced graph: exhaustive path enumeration for
small graphs and oracles, plus O(V+E) dynamic programs for longest-path
time and for the path-weight sums behind the expected response time.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal, Mapping, Optional

from .scm import Scm, _require_valid

#: Default node name for the decision target.
TARGET_NODE = "Y"

#: Below this magnitude the raw path-weight sum counts as fully cancelled.
CANCELLATION_EPS = 1e-9

#: Default ceiling on enumerated paths.
DEFAULT_PATH_CAP = 100_000

Weighting = Literal["raw", "absolute"]


class GraphError(ValueError):
    """Malformed graph, unknown node, or ill-posed query."""


class PathCountError(GraphError):
    """Enumeration would exceed the configured path cap."""


class CancellingWeightsError(GraphError):
    """Raw path weights sum to ~0; the weighted average is undefined."""


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    beta: float
    tau: float = 0.0


@dataclass(frozen=True)
class PathRecord:
    """One directed path: its node sequence, weight product, time sum."""

    nodes: tuple[str, ...]
    weight: float
    time: float

    def label(self) -> str:
        return "->".join(self.nodes)


@dataclass(frozen=True)
class CausalDag:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    target: str = TARGET_NODE

    def __post_init__(self):
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise GraphError("duplicate node names")
        if self.target not in known:
            raise GraphError(f"target node {self.target!r} not among nodes")
        seen: set = set()
        for e in self.edges:
            if e.src not in known or e.dst not in known:
                raise GraphError(f"edge {e.src}->{e.dst} references unknown node")
            if e.src == e.dst:
                raise GraphError(f"self-edge on {e.src}")
            if (e.src, e.dst) in seen:
                raise GraphError(f"duplicate edge {e.src}->{e.dst}")
            seen.add((e.src, e.dst))
            if not math.isfinite(e.beta) or not math.isfinite(e.tau):
                raise GraphError(f"edge {e.src}->{e.dst} has non-finite annotation")
            if e.tau < 0:
                raise GraphError(f"edge {e.src}->{e.dst} has negative response time")
        self.order  # fails on cycles

    @cached_property
    def adjacency(self) -> dict:
        out: dict = {n: [] for n in self.nodes}
        for e in self.edges:
            out[e.src].append(e)
        # lexicographic child order keeps enumeration deterministic
        return {n: tuple(sorted(es, key=lambda e: e.dst)) for n, es in out.items()}

    @cached_property
    def order(self) -> tuple[str, ...]:
        decl = {n: i for i, n in enumerate(self.nodes)}
        indeg = {n: 0 for n in self.nodes}
        for e in self.edges:
            indeg[e.dst] += 1
        ready = [decl[n] for n in self.nodes if indeg[n] == 0]
        heapq.heapify(ready)
        out = []
        children: dict = {n: [] for n in self.nodes}
        for e in self.edges:
            children[e.src].append(e.dst)
        while ready:
            n = self.nodes[heapq.heappop(ready)]
            out.append(n)
            for c in children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, decl[c])
        if len(out) != len(self.nodes):
            raise GraphError("graph contains a cycle")
        return tuple(out)


def _edge_key(key) -> tuple[str, str]:
    if isinstance(key, str):
        src, sep, dst = key.partition("->")
        if not sep or not src or not dst:
            raise GraphError(f"response-time key {key!r} is not 'from->to'")
        return src.strip(), dst.strip()
    src, dst = key
    return str(src), str(dst)


def from_scm(scm: Scm, response_times: Optional[Mapping] = None,
             target_node: str = TARGET_NODE) -> CausalDag:
    """Induced DAG: structural edges plus target edges for nonzero coefficients."""
    _require_valid(scm)
    if target_node in scm.names:
        raise GraphError(
            f"target node name {target_node!r} collides with a variable"
        )
    times: dict[tuple[str, str], float] = {}
    for key, tau in (response_times or {}).items():
        times[_edge_key(key)] = float(tau)

    edges = []
    present: set = set()
    for v in scm.variables:
        for p in v.equation.parents:
            present.add((p, v.name))
            edges.append(Edge(p, v.name, float(v.equation.coefficients[p]),
                              times.get((p, v.name), 0.0)))
    for name, coeff in scm.target.coefficients.items():
        if coeff != 0.0:
            present.add((name, target_node))
            edges.append(Edge(name, target_node, float(coeff),
                              times.get((name, target_node), 0.0)))
    unknown = sorted(set(times) - present)
    if unknown:
        labels = ", ".join(f"{s}->{d}" for s, d in unknown)
        raise GraphError(f"response time annotates nonexistent edge(s): {labels}")
    nodes = tuple(scm.names) + (target_node,)
    return CausalDag(nodes=nodes, edges=tuple(edges), target=target_node)


def _check_query(dag: CausalDag, src: str, dst: str) -> None:
    for n in (src, dst):
        if n not in dag.adjacency:
            raise GraphError(f"unknown node {n!r}")


def has_path(dag: CausalDag, src: str, dst: str) -> bool:
    _check_query(dag, src, dst)
    if src == dst:
        return True
    stack = [src]
    seen = {src}
    while stack:
        for e in dag.adjacency[stack.pop()]:
            if e.dst == dst:
                return True
            if e.dst not in seen:
                seen.add(e.dst)
                stack.append(e.dst)
    return False


def count_paths(dag: CausalDag, src: str, dst: str) -> int:
    _check_query(dag, src, dst)
    counts = {n: 0 for n in dag.order}
    counts[src] = 1
    for n in dag.order:
        if n == dst or counts[n] == 0:
            continue
        for e in dag.adjacency[n]:
            counts[e.dst] += counts[n]
    return counts[dst]


def enumerate_paths(dag: CausalDag, src: str, dst: str,
                    cap: int = DEFAULT_PATH_CAP) -> list[PathRecord]:
    """All directed src→dst paths in lexicographic node-sequence order."""
    _check_query(dag, src, dst)
    total = count_paths(dag, src, dst)
    if total > cap:
        raise PathCountError(
            f"{total} paths from {src} to {dst} exceed the cap of {cap}"
        )
    # prune into the ancestor cone of dst so the walk never dead-ends
    useful = {dst}
    for n in reversed(dag.order):
        if any(e.dst in useful for e in dag.adjacency[n]):
            useful.add(n)
    out: list[PathRecord] = []

    def walk(node: str, trail: list, weight: float, time: float) -> None:
        if node == dst:
            out.append(PathRecord(tuple(trail), weight, time))
            return
        for e in dag.adjacency[node]:
            if e.dst in useful:
                trail.append(e.dst)
                walk(e.dst, trail, weight * e.beta, time + e.tau)
                trail.pop()

    if src in useful:
        walk(src, [src], 1.0, 0.0)
    return out


def longest_path_time(dag: CausalDag, src: str, dst: str) -> Optional[float]:
    """Max path time src→dst by topological DP; None when unreachable."""
    _check_query(dag, src, dst)
    if src == dst:
        return 0.0
    best = {n: -math.inf for n in dag.order}
    best[src] = 0.0
    for n in dag.order:
        if best[n] == -math.inf or n == dst:
            continue
        for e in dag.adjacency[n]:
            cand = best[n] + e.tau
            if cand > best[e.dst]:
                best[e.dst] = cand
    return None if best[dst] == -math.inf else best[dst]


def path_weight_sums(dag: CausalDag, src: str, dst: str,
                     absolute: bool = False) -> tuple[float, float]:
    """(Σ w_π, Σ w_π·t_π) over all src→dst paths, by one topological pass."""
    _check_query(dag, src, dst)
    zw = {n: 0.0 for n in dag.order}
    zt = {n: 0.0 for n in dag.order}
    zw[src] = 1.0
    for n in dag.order:
        w, t = zw[n], zt[n]
        if n == dst or (w == 0.0 and t == 0.0):
            continue
        for e in dag.adjacency[n]:
            b = abs(e.beta) if absolute else e.beta
            zw[e.dst] += w * b
            zt[e.dst] += t * b + w * b * e.tau
    return zw[dst], zt[dst]


def total_causal_effect(dag: CausalDag, src: str, dst: str) -> float:
    return path_weight_sums(dag, src, dst)[0]


def expected_response_time(dag: CausalDag, src: str, dst: str,
                           weighting: Weighting = "raw") -> float:
    """Path-weight average of path times: (Σ w_π·t_π) / (Σ w_π)."""
    if weighting not in ("raw", "absolute"):
        raise GraphError(f"unknown weighting {weighting!r}")
    if not has_path(dag, src, dst):
        raise GraphError(f"no directed path from {src} to {dst}")
    z, wt = path_weight_sums(dag, src, dst, absolute=weighting == "absolute")
    if abs(z) < CANCELLATION_EPS:
        raise CancellingWeightsError(
            f"path weights from {src} to {dst} cancel (|sum| < "
            f"{CANCELLATION_EPS}); use absolute weighting"
        )
    return wt / z
