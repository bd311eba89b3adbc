"""Small graph families and seeded random graphs for tests, demos and benchmarks."""
from __future__ import annotations

import itertools

import numpy as np

from .graph import Graph


def complete_graph(n: int) -> Graph:
    pairs = list(itertools.combinations(range(n), 2))
    src = [p[0] for p in pairs]
    dst = [p[1] for p in pairs]
    return Graph.from_edges(src, dst, n=n)


def clique_with_pendant(m: int) -> Graph:
    """K_m plus one extra vertex attached to clique vertex 0."""
    pairs = list(itertools.combinations(range(m), 2)) + [(0, m)]
    return Graph.from_edges([p[0] for p in pairs], [p[1] for p in pairs], n=m + 1)


def path_graph(n: int, weights=None) -> Graph:
    return Graph.from_edges(np.arange(n - 1), np.arange(1, n), weights, n=n)


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(np.zeros(leaves, dtype=np.int64), np.arange(1, leaves + 1),
                            n=leaves + 1)


def random_graph(n: int, p: float, rng: np.random.Generator, weighted: bool = True,
                 vertex_priors: bool = True) -> Graph:
    """G(n, p); weights and priors uniform on (0, 2] when requested."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    src, dst = iu[keep], ju[keep]
    w = 2.0 - rng.random(len(src)) if weighted else None
    a = 2.0 - rng.random(n) if vertex_priors else None
    return Graph.from_edges(src, dst, w, n=n, vertex_weights=a)


def gnm_random(n: int, m: int, seed: int = 0, weighted: bool = False) -> Graph:
    """About ``m`` distinct random edges on ``n`` vertices (collisions dropped)."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=int(m * 1.05) + 16)
    dst = rng.integers(0, n, size=len(src))
    keep = src != dst
    lo, hi = np.minimum(src, dst)[keep], np.maximum(src, dst)[keep]
    _, first = np.unique(lo * n + hi, return_index=True)
    first = np.sort(first)[:m]
    w = 2.0 - rng.random(len(first)) if weighted else None
    return Graph.from_edges(lo[first], hi[first], w, n=n)
