"""Density metrics: suspiciousness functions, approximation multiplier, initial weights.

Every metric has density ``g(S) = f(S) / |S|``. Edge-based metrics use
``f(S) = sum of vertex terms + sum of induced edge terms``; clique-based
metrics use the number of ``clique_size``-cliques inside ``S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._parallel import blocked_sum
from .graph import AliveSet, Edge, Graph

VertexFn = Callable[[int, Graph], float]
EdgeFn = Callable[[Edge, Graph], float]

KINDS = ("DG", "DW", "FD", "TDS", "KCLIQUE", "CUSTOM")
NAMES = ("dg", "dw", "fd", "tds", "kclique")


@dataclass(frozen=True)
class MetricSpec:
    kind: str
    k_multiplier: int
    clique_based: bool = False
    clique_size: int = 0
    fd_constant: float = 5.0
    vsusp: VertexFn | None = None
    esusp: EdgeFn | None = None
    # optional whole-graph evaluators, must agree with vsusp/esusp
    vertex_vec: Callable[[Graph], np.ndarray] | None = None
    edge_vec: Callable[[Graph], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.k_multiplier < 2:
            raise ValueError("k_multiplier must be >= 2")
        if self.clique_based and (self.clique_size < 3 or self.clique_size != self.k_multiplier):
            raise ValueError("clique metrics need clique_size == k_multiplier >= 3")

    @property
    def name(self) -> str:
        return self.kind.lower()

    def vertex_array(self, g: Graph) -> np.ndarray:
        """Vertex terms a_i for every vertex (zeros for clique metrics)."""
        if self.clique_based:
            return np.zeros(g.vertex_count)
        if self.vertex_vec is not None:
            return np.asarray(self.vertex_vec(g), dtype=np.float64)
        return np.array([float(self.vsusp(u, g)) for u in range(g.vertex_count)])

    def edge_array(self, g: Graph) -> np.ndarray:
        """Edge terms c_ij, one per undirected edge in ``g.edges()`` order."""
        if self.clique_based:
            return np.zeros(g.edge_count)
        if self.edge_vec is not None:
            return np.asarray(self.edge_vec(g), dtype=np.float64)
        return np.array([float(self.esusp(e, g)) for e in g.edges()], dtype=np.float64)


def fd_edge_suspiciousness(edge: Edge, g: Graph, c: float = 5.0) -> float:
    """``1 / ln(x + c)`` with ``x`` the full-graph degree of the object endpoint."""
    obj = edge.src if g.object_column == 1 else edge.dst
    return 1.0 / math.log(float(g.static_degrees[obj]) + c)


def _fd_vec(c: float):
    def vec(g: Graph) -> np.ndarray:
        x = g.static_degrees[g.object_endpoints()].astype(np.float64)
        return 1.0 / np.log(x + c)
    return vec


def _zeros_v(g: Graph) -> np.ndarray:
    return np.zeros(g.vertex_count)


def _ones_e(g: Graph) -> np.ndarray:
    return np.ones(g.edge_count)


def _prior_v(g: Graph) -> np.ndarray:
    return g.vertex_weights


def _stored_e(g: Graph) -> np.ndarray:
    return g.edge_weight


def resolve_metric(name: str, k: int | None = None, fd_c: float | None = None) -> MetricSpec:
    """Turn a metric name (dg, dw, fd, tds, kclique) into a :class:`MetricSpec`."""
    key = name.lower()
    if key not in NAMES:
        raise ValueError(f"unknown metric {name!r}; choose from {', '.join(NAMES)}")
    if key != "kclique" and k is not None and not (key == "tds" and k == 3):
        raise ValueError(f"metric {key} does not take a clique size")
    if fd_c is not None and key != "fd":
        raise ValueError("fd_c only applies to the fd metric")

    if key == "dg":
        return MetricSpec("DG", 2, vsusp=lambda u, g: 0.0, esusp=lambda e, g: 1.0,
                          vertex_vec=_zeros_v, edge_vec=_ones_e)
    if key == "dw":
        return MetricSpec("DW", 2, vsusp=lambda u, g: float(g.vertex_weights[u]),
                          esusp=lambda e, g: e.weight, vertex_vec=_prior_v, edge_vec=_stored_e)
    if key == "fd":
        c = 5.0 if fd_c is None else float(fd_c)
        if not c > 0:
            raise ValueError("fd constant must be positive")
        return MetricSpec("FD", 2, fd_constant=c,
                          vsusp=lambda u, g: float(g.vertex_weights[u]),
                          esusp=lambda e, g: fd_edge_suspiciousness(e, g, c),
                          vertex_vec=_prior_v, edge_vec=_fd_vec(c))
    if key == "tds":
        return MetricSpec("TDS", 3, clique_based=True, clique_size=3)
    if k is None:
        raise ValueError("kclique requires a clique size k")
    if int(k) != k or k < 3:
        raise ValueError(f"clique size must be an integer >= 3, got {k}")
    return MetricSpec("KCLIQUE", int(k), clique_based=True, clique_size=int(k))


def custom_metric(vsusp: VertexFn, esusp: EdgeFn, k_multiplier: int = 2) -> MetricSpec:
    """Metric from user functions; they must be pure and nonnegative."""
    return MetricSpec("CUSTOM", k_multiplier, vsusp=vsusp, esusp=esusp)


def initial_peeling_weights(g: Graph, metric: MetricSpec,
                            alive: AliveSet | None = None) -> tuple[np.ndarray, float]:
    """Peeling weight of every alive vertex and f of the alive set.

    Dead vertices get weight 0. Clique metrics return integer arrays.
    """
    if alive is None:
        alive = AliveSet.full(g.vertex_count)
    if metric.clique_based:
        from .cliques import count_cliques
        counts = count_cliques(g, alive, metric.clique_size)
        return counts.per_vertex, counts.total

    mask = alive.mask
    a = np.where(mask, metric.vertex_array(g), 0.0)
    c = metric.edge_array(g)
    inside = mask[g.edge_src] & mask[g.edge_dst]
    arc_c = np.where(mask[g.indices], c[g.arc_edge], 0.0)
    # per-vertex sums run over each sorted neighbor list in order
    w = a + _segment_sums(arc_c, g.indptr)
    w[~mask] = 0.0
    f = blocked_sum(a) + blocked_sum(np.where(inside, c, 0.0))
    return w, f


def _segment_sums(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    n = len(indptr) - 1
    out = np.zeros(n)
    if len(values) == 0:
        return out
    owner = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(owner, weights=values, minlength=n)
