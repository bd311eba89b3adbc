"""Ground truth for small graphs.

Nothing here reuses the engine's incremental machinery: densities are
recomputed from the metric definition, cliques are listed by plain
recursion over vertex indices.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .engine import PeelResult, RoundRecord, batch_cut, trim_cut
from .graph import Graph
from .metrics import MetricSpec

ORACLE_TOL = 1e-9
DEFAULT_LIMIT = 20


class OracleLimitError(ValueError):
    pass


@dataclass
class OracleResult:
    optimum_subset: list[int]
    optimum_density: float
    subsets_examined: int


@dataclass
class GuaranteeReport:
    passed: bool
    engine_density: float
    optimum_density: float
    bound: float
    margin: float

    @property
    def ratio(self) -> float:
        if self.optimum_density == 0:
            return 1.0
        return self.engine_density / self.optimum_density

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict}: engine {self.engine_density:.12g} x bound factor >= "
                f"optimum {self.optimum_density:.12g} (margin {self.margin:.3g})")


def list_cliques(g: Graph, k: int) -> list[tuple[int, ...]]:
    """Every k-clique as an ascending index tuple, by index-ordered extension."""
    higher = [set(v for v in g.neighbors(u).tolist() if v > u) for u in range(g.vertex_count)]
    found = []

    def grow(clique, cand):
        if len(clique) == k:
            found.append(tuple(clique))
            return
        for v in sorted(cand):
            grow(clique + [v], cand & higher[v])

    for u in range(g.vertex_count):
        grow([u], higher[u])
    return found


class _SubsetWeights:
    """f and peeling weights straight from the definitions."""

    def __init__(self, g: Graph, metric: MetricSpec):
        self.n = g.vertex_count
        self.clique_based = metric.clique_based
        if self.clique_based:
            self.cliques = list_cliques(g, metric.clique_size)
        else:
            self.a = metric.vertex_array(g).tolist()
            self.edges = list(zip(g.edge_src.tolist(), g.edge_dst.tolist(),
                                  metric.edge_array(g).tolist()))
            self.adj = [dict() for _ in range(self.n)]
            for s, d, c in self.edges:
                self.adj[s][d] = c
                self.adj[d][s] = c

    def f(self, S: set) -> float:
        if self.clique_based:
            return sum(1 for q in self.cliques if all(x in S for x in q))
        total = 0.0
        for u in sorted(S):
            total += self.a[u]
        for s, d, c in self.edges:
            if s in S and d in S:
                total += c
        return total

    def weights(self, S: set) -> dict[int, float]:
        if self.clique_based:
            w = {u: 0 for u in S}
            for q in self.cliques:
                if all(x in S for x in q):
                    for x in q:
                        w[x] += 1
            return w
        return {u: self.a[u] + sum(c for v, c in sorted(self.adj[u].items()) if v in S)
                for u in S}


def _pick(best_density, ties):
    return OracleResult(list(min(ties)), best_density, 0)


def exact_densest(g: Graph, metric: MetricSpec, limit: int = DEFAULT_LIMIT) -> OracleResult:
    """Maximum density over all non-empty subsets by exhaustive enumeration.

    Ties go to the lexicographically smallest vertex tuple. Subsets are
    internal indices.
    """
    n = g.vertex_count
    if n > limit:
        raise OracleLimitError(f"exhaustive search is limited to {limit} vertices, graph has {n}")
    if n == 0:
        return OracleResult([], 0.0, 0)
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    size = bits.sum(axis=1)
    if metric.clique_based:
        f = np.zeros(len(masks), dtype=np.int64)
        for q in list_cliques(g, metric.clique_size):
            qm = sum(1 << x for x in q)
            f += (masks & qm) == qm
    else:
        f = bits.astype(np.float64) @ metric.vertex_array(g)
        c = metric.edge_array(g)
        for s, d, w in zip(g.edge_src.tolist(), g.edge_dst.tolist(), c.tolist()):
            f = f + w * (bits[:, s] & bits[:, d])
    dens = f / size
    best = dens.max()
    ties = [tuple(np.flatnonzero(bits[i]).tolist()) for i in np.flatnonzero(dens == best)]
    out = _pick(float(best), ties)
    out.subsets_examined = len(masks)
    return out


def exact_densest_naive(g: Graph, metric: MetricSpec, limit: int = 16) -> OracleResult:
    """Pure-Python exhaustive search walking subsets in reverse mask order."""
    n = g.vertex_count
    if n > limit:
        raise OracleLimitError(f"naive search is limited to {limit} vertices, graph has {n}")
    if n == 0:
        return OracleResult([], 0.0, 0)
    sw = _SubsetWeights(g, metric)
    best, ties, seen = -math.inf, [], 0
    for mask in range((1 << n) - 1, 0, -1):
        S = {i for i in range(n) if mask >> i & 1}
        d = sw.f(S) / len(S)
        seen += 1
        if d > best:
            best, ties = d, [tuple(sorted(S))]
        elif d == best:
            ties.append(tuple(sorted(S)))
    out = _pick(float(best), ties)
    out.subsets_examined = seen
    return out


def reference_peel(g: Graph, metric: MetricSpec, epsilon: float = 0.0,
                   mode: str = "parallel", trim_global: bool = False) -> PeelResult:
    """Peel with full recomputation of every weight on every round and pass.

    ``mode`` is one of sequential, parallel (alias none), gpo, lpo.
    """
    mode = {"none": "parallel"}.get(mode, mode)
    if mode not in ("sequential", "parallel", "gpo", "lpo"):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    sw = _SubsetWeights(g, metric)
    k = metric.k_multiplier
    S = set(range(g.vertex_count))
    trace: list[RoundRecord] = []
    best, best_set, best_round = -math.inf, set(), 0
    rnd = 0

    def offer(T):
        nonlocal best, best_set, best_round
        if T:
            d = sw.f(T) / len(T)
            if d > best:
                best, best_set, best_round = d, set(T), rnd

    tau_max = 0.0
    scale = abs(sw.f(S)) / len(S) if S else 0.0
    while S:
        rnd += 1
        density = sw.f(S) / len(S)
        w = sw.weights(S)
        offer(S)
        if mode == "sequential":
            u = min(S, key=lambda x: (w[x], x))
            trace.append(RoundRecord(rnd, len(S), density, float(w[u]), 1))
            S = S - {u}
            continue
        if mode != "parallel":
            tau_max = max(tau_max, density / (k * (1.0 + epsilon)))
        tau = max(tau_max, k * (1.0 + epsilon) * density)
        U = {u for u in S if w[u] <= batch_cut(tau, scale)}
        if not U:
            low = min(w.values())
            U = {u for u in S if w[u] == low}
        count = len(S)
        S = S - U
        passes, dens, after = 0, [], None
        if mode == "lpo" and S:
            after = sw.f(S) / len(S)
            offer(S)
            while S:
                cur = sw.f(S) / len(S)
                w = sw.weights(S)
                if not any(w[u] < trim_cut(cur, scale) for u in S):
                    break
                cut = trim_cut(max(tau_max, cur) if trim_global else cur, scale)
                S = {u for u in S if not w[u] < cut}
                passes += 1
                if S:
                    dens.append(sw.f(S) / len(S))
                    offer(S)
        trace.append(RoundRecord(rnd, count, density, tau, len(U), passes, after, tuple(dens)))
    if best == -math.inf:
        return PeelResult([], 0.0, 0, [], time.perf_counter() - t0)
    members = sorted(best_set)
    return PeelResult(sorted(g.external(members)), float(best), rnd, trace,
                      time.perf_counter() - t0, None, np.array(members, dtype=np.int64),
                      best_round)


def check_guarantee(engine_result: PeelResult, oracle: OracleResult, k: int,
                    epsilon: float) -> GuaranteeReport:
    """Does ``engine density * k * (1 + eps)`` reach the optimum (abs tol 1e-9)?"""
    bound = engine_result.best_density * k * (1.0 + epsilon)
    margin = bound - oracle.optimum_density
    return GuaranteeReport(margin >= -ORACLE_TOL, engine_result.best_density,
                           oracle.optimum_density, bound, margin)
