"""Peeling engine: sequential, threshold-parallel, and the two long-tail prunings.

All parallel variants evaluate a whole round against a frozen snapshot of
the alive set and remove the selected batch together, so the outcome does
not depend on the number of worker threads.
"""
from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ._parallel import BLOCK, Workers, blocked_sum, blocks
from .cliques import CliqueIndex, remove_vertices
from .graph import AliveSet, Graph, induced_total_weight, validate_metric_preconditions
from .metrics import MetricSpec, initial_peeling_weights

log = logging.getLogger(__name__)

MODES = ("none", "gpo", "lpo")
DRIFT_TOL = 1e-9
# trim cut sits TRIM_RTOL below the density (floored at the starting density's
# scale): a vertex whose weight ties the density cannot raise it, and float
# drift in the running f must not turn such ties into removals
TRIM_RTOL = 1e-12


class MetricPreconditionError(ValueError):
    """A vertex or edge term is negative or not finite."""


class DriftError(RuntimeError):
    """Incrementally maintained f disagrees with an exact recompute."""


@dataclass
class PeelConfig:
    epsilon: float = 0.1
    optimization: str | None = None
    threads: int = 1
    f_recheck_interval: int = 64
    record_trace: bool = True
    # trim against max(tau_max, density) instead of density alone; a pass may
    # then lower the working density whenever tau_max exceeds it
    trim_global: bool = False
    # called with the PeelState at every audit point
    audit_hook: Callable[["PeelState"], None] | None = None

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.f_recheck_interval < 1:
            raise ValueError("f_recheck_interval must be >= 1")
        if self.optimization is not None and self.optimization.lower() not in MODES:
            raise ValueError(f"optimization must be one of {MODES}")

    @property
    def mode(self) -> str:
        return (self.optimization or "none").lower()


@dataclass(frozen=True)
class RoundRecord:
    round: int
    alive_count: int
    density: float
    threshold: float
    peeled: int
    trim_passes: int = 0
    # LPO only: density right after the batch peel, then after each trim pass
    peeled_density: float | None = None
    trim_densities: tuple[float, ...] = ()


@dataclass
class PeelResult:
    best_subset: list[int]
    best_density: float
    rounds: int
    trace: list[RoundRecord] = field(default_factory=list)
    wall_time: float = 0.0
    config: PeelConfig | None = None
    best_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    best_round: int = 0

    @property
    def peel_groups(self) -> list[int]:
        return [r.peeled for r in self.trace]


def refine_global_threshold(tau_max: float, density: float, k: int, epsilon: float) -> float:
    """Max-accumulate the long-tail threshold with ``density / (k(1+eps))``."""
    return max(tau_max, density / (k * (1.0 + epsilon)))


def round_threshold(density: float, k: int, epsilon: float, tau_max: float = 0.0) -> float:
    return max(tau_max, k * (1.0 + epsilon) * density)


def trim_cut(density: float, scale: float = 0.0) -> float:
    return density - TRIM_RTOL * max(abs(density), scale)


def batch_cut(tau: float, scale: float = 0.0) -> float:
    # ties with tau belong to the batch even when rounding puts w a hair above
    return tau + TRIM_RTOL * max(abs(tau), scale)


class PeelState:
    """Alive set, peeling weights and running f for one detection run."""

    def __init__(self, g: Graph, metric: MetricSpec, config: PeelConfig, workers: Workers):
        self.graph = g
        self.metric = metric
        self.config = config
        self.workers = workers
        n = g.vertex_count
        self.alive = AliveSet.full(n)
        self.alive_idx = np.arange(n, dtype=np.int64)
        self.clique_index = CliqueIndex(g) if metric.clique_based else None
        self.live = self.alive.mask.tolist() if metric.clique_based else None
        if not metric.clique_based:
            self.arc_c = metric.edge_array(g)[g.arc_edge]
        self.weights, self.f_current = initial_peeling_weights(g, metric, self.alive)
        self.scale = abs(self.f_current) / n if n else 0.0
        self.tau_max = 0.0
        self.round_index = 0
        self.best_density = -math.inf
        self.best_round = 0
        self.best_members = np.zeros(0, dtype=np.int64)

    @property
    def alive_count(self) -> int:
        return self.alive.count

    @property
    def g_current(self) -> float:
        return self.f_current / self.alive.count if self.alive.count else 0.0

    def consider(self) -> None:
        """Offer the current alive set as a best-density candidate."""
        if self.alive.count == 0:
            return
        g = self.g_current
        if g > self.best_density:
            self.best_density = g
            self.best_round = self.round_index
            self.best_members = self.alive_idx.copy()

    def select(self, threshold: float, strict: bool = False) -> np.ndarray:
        """Alive vertices whose weight is <= (or <) ``threshold``, ascending."""
        w, idx = self.weights, self.alive_idx

        def pick(lo, hi):
            part = idx[lo:hi]
            vals = w[part]
            return part[vals < threshold] if strict else part[vals <= threshold]

        parts = self.workers.map(pick, blocks(len(idx)))
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def apply_removal(self, removed: np.ndarray) -> None:
        removed = np.asarray(removed, dtype=np.int64)
        if len(removed) == 0:
            return
        if not self.alive.mask[removed].all():
            raise RuntimeError("contract violation: removing a vertex that is not alive")
        if self.metric.clique_based:
            destroyed = remove_vertices(self.clique_index, self.live, removed.tolist(),
                                        self.metric.clique_size, self.weights)
            self.f_current -= destroyed
        else:
            self._remove_edge_based(removed)
        self.alive.remove(removed)
        self.weights[removed] = 0
        self.alive_idx = self.alive_idx[self.alive.mask[self.alive_idx]]

    def _remove_edge_based(self, removed: np.ndarray) -> None:
        g, mask = self.graph, self.alive.mask
        in_removed = np.zeros(g.vertex_count, dtype=bool)
        in_removed[removed] = True

        def gather(lo, hi):
            r = removed[lo:hi]
            starts = g.indptr[r]
            lens = g.indptr[r + 1] - starts
            pos = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(lens.sum())
            nbr = g.indices[pos]
            c = self.arc_c[pos]
            live = mask[nbr]
            nbr, c = nbr[live], c[live]
            inner = in_removed[nbr]
            return nbr[~inner], c[~inner], c[inner]

        parts = self.workers.map(gather, blocks(len(removed), BLOCK))
        out_nbr = np.concatenate([p[0] for p in parts])
        out_c = np.concatenate([p[1] for p in parts])
        inner_c = np.concatenate([p[2] for p in parts])
        removed_w = blocked_sum(self.weights[removed])
        # inner edges appear once from each endpoint and were charged twice
        internal = blocked_sum(inner_c) / 2.0
        self.f_current = self.f_current - removed_w + internal
        if len(out_nbr):
            delta = np.bincount(out_nbr, weights=out_c, minlength=g.vertex_count)
            self.weights -= delta

    def trim_pass(self) -> bool:
        """One local trim against a fresh snapshot; False when nothing is below density.

        Removes every alive vertex with weight strictly below the current
        density, which strictly raises the density. With ``trim_global`` the
        cut is ``max(tau_max, density)`` instead.
        """
        if not self.alive.count:
            return False
        cur = self.g_current
        below = self.select(trim_cut(cur, self.scale), strict=True)
        if not len(below):
            return False
        if self.config.trim_global and self.tau_max > cur:
            below = self.select(trim_cut(self.tau_max, self.scale), strict=True)
        self.apply_removal(below)
        return True

    def audit(self) -> float:
        exact = induced_total_weight(self.graph, self.alive, self.metric)
        if abs(self.f_current - exact) > DRIFT_TOL * max(1.0, abs(self.f_current)):
            raise DriftError(f"round {self.round_index}: incremental f={self.f_current!r} "
                             f"but exact recompute gives {exact!r}")
        if self.config.audit_hook is not None:
            self.config.audit_hook(self)
        return exact

    def maybe_audit(self) -> None:
        if self.round_index % self.config.f_recheck_interval == 0:
            self.audit()


def _prepare(g: Graph, metric: MetricSpec) -> None:
    bad = validate_metric_preconditions(g, metric)
    if bad is not None:
        raise MetricPreconditionError(str(bad))


def _finish(state: PeelState | None, g: Graph, trace, rounds, t0, config) -> PeelResult:
    if state is None or state.best_density == -math.inf:
        return PeelResult([], 0.0, rounds, trace, time.perf_counter() - t0, config)
    members = state.best_members
    return PeelResult(best_subset=sorted(g.external(members.tolist())),
                      best_density=float(state.best_density), rounds=rounds, trace=trace,
                      wall_time=time.perf_counter() - t0, config=config,
                      best_indices=members, best_round=state.best_round)


def peel_sequential(g: Graph, metric: MetricSpec, config: PeelConfig | None = None) -> PeelResult:
    """Remove one minimum-weight vertex per round (ties: lowest index)."""
    config = config or PeelConfig(epsilon=0.0)
    t0 = time.perf_counter()
    _prepare(g, metric)
    if g.vertex_count == 0:
        return _finish(None, g, [], 0, t0, config)
    trace = []
    with Workers(1) as workers:
        state = PeelState(g, metric, config, workers)
        w = state.weights
        heap = [(w[u], u) for u in range(g.vertex_count)]
        heapq.heapify(heap)
        state.consider()
        while state.alive_count:
            wu, u = heapq.heappop(heap)
            if not state.alive.mask[u] or w[u] != wu:
                continue
            state.round_index += 1
            g_before, count = state.g_current, state.alive_count
            state.apply_removal(np.array([u]))
            for v in g.neighbors(u).tolist():
                if state.alive.mask[v]:
                    heapq.heappush(heap, (w[v], v))
            if config.record_trace:
                trace.append(RoundRecord(state.round_index, count, g_before, float(wu), 1))
            state.consider()
            state.maybe_audit()
    return _finish(state, g, trace, state.round_index, t0, config)


def _peel_rounds(g: Graph, metric: MetricSpec, config: PeelConfig) -> PeelResult:
    t0 = time.perf_counter()
    _prepare(g, metric)
    mode = config.mode
    if g.vertex_count == 0:
        return _finish(None, g, [], 0, t0, config)
    k, eps = metric.k_multiplier, config.epsilon
    trace = []
    with Workers(config.threads) as workers:
        state = PeelState(g, metric, config, workers)
        while state.alive_count:
            state.round_index += 1
            count = state.alive_count
            density = state.g_current
            state.consider()
            if mode != "none":
                state.tau_max = refine_global_threshold(state.tau_max, density, k, eps)
            tau = round_threshold(density, k, eps, state.tau_max)
            batch = state.select(batch_cut(tau, state.scale))
            if len(batch) == 0:
                # only reachable through rounding; peel the minimum-weight vertices
                w = state.weights[state.alive_idx]
                batch = state.alive_idx[w == w.min()]
                log.debug("round %d: empty batch at tau=%r, peeling minima", state.round_index, tau)
            state.apply_removal(batch)
            passes, densities, after = 0, [], None
            if mode == "lpo" and state.alive_count:
                after = state.g_current
                state.consider()
                while state.trim_pass():
                    passes += 1
                    if state.alive_count:
                        densities.append(state.g_current)
                        state.consider()
            if config.record_trace:
                trace.append(RoundRecord(state.round_index, count, density, tau, len(batch),
                                         passes, after, tuple(densities)))
            state.maybe_audit()
    return _finish(state, g, trace, state.round_index, t0, config)


def peel_parallel(g: Graph, metric: MetricSpec, config: PeelConfig | None = None) -> PeelResult:
    """Batch-peel every vertex with weight <= k(1+eps)*density each round."""
    return _peel_rounds(g, metric, replace(config or PeelConfig(), optimization="none"))


def peel_gpo(g: Graph, metric: MetricSpec, config: PeelConfig | None = None) -> PeelResult:
    """Parallel peeling with a monotone global long-tail threshold."""
    return _peel_rounds(g, metric, replace(config or PeelConfig(), optimization="gpo"))


def peel_lpo(g: Graph, metric: MetricSpec, config: PeelConfig | None = None) -> PeelResult:
    """Global threshold plus intra-round trimming of below-density vertices."""
    return _peel_rounds(g, metric, replace(config or PeelConfig(), optimization="lpo"))


def peel(g: Graph, metric: MetricSpec, config: PeelConfig | None = None,
         sequential: bool = False) -> PeelResult:
    config = config or PeelConfig()
    if sequential:
        return peel_sequential(g, metric, config)
    return _peel_rounds(g, metric, config)
