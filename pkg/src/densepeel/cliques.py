"""k-clique counting and enumeration over alive-induced subgraphs.

Edges are oriented from lower to higher degeneracy rank, so each clique is
discovered exactly once from its lowest-ranked member and every forward
neighbor set has size at most the degeneracy of the graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graph import AliveSet, Graph

INT64_MAX = (1 << 63) - 1


@dataclass
class CliqueCounts:
    per_vertex: np.ndarray
    total: int


def degeneracy_order(g: Graph) -> list[int]:
    """Vertices in min-degree-first removal order (ties: lowest index)."""
    n = g.vertex_count
    deg = g.static_degrees.tolist()
    maxd = max(deg, default=0)
    buckets: list[list[int]] = [[] for _ in range(maxd + 1)]
    for u in range(n - 1, -1, -1):
        buckets[deg[u]].append(u)
    removed = [False] * n
    order = []
    indptr, indices = g.indptr.tolist(), g.indices.tolist()
    d = 0
    while len(order) < n:
        d = max(d - 1, 0)
        while not buckets[d]:
            d += 1
        u = buckets[d].pop()
        if removed[u] or deg[u] != d:
            continue
        removed[u] = True
        order.append(u)
        for v in indices[indptr[u]:indptr[u + 1]]:
            if not removed[v]:
                deg[v] -= 1
                buckets[deg[v]].append(v)
    return order


class CliqueIndex:
    """Forward (rank-increasing) adjacency sets for a fixed graph."""

    def __init__(self, g: Graph):
        self.graph = g
        order = degeneracy_order(g)
        rank = [0] * g.vertex_count
        for r, u in enumerate(order):
            rank[u] = r
        self.order = order
        self.rank = rank
        indptr, indices = g.indptr.tolist(), g.indices.tolist()
        self.nbrs = [frozenset(indices[indptr[u]:indptr[u + 1]]) for u in range(g.vertex_count)]
        self.out = [frozenset(v for v in self.nbrs[u] if rank[v] > rank[u])
                    for u in range(g.vertex_count)]


def _extend(out: Sequence[frozenset], prefix: list[int], cand: set, remaining: int,
            visit: Callable[[list[int], set], None]) -> None:
    # visit(prefix, last_layer) is called with every completing vertex set
    if remaining == 1:
        if cand:
            visit(prefix, cand)
        return
    for v in cand:
        nxt = cand & out[v]
        if len(nxt) >= remaining - 1:
            prefix.append(v)
            _extend(out, prefix, nxt, remaining - 1, visit)
            prefix.pop()


def count_cliques(g: Graph, alive: AliveSet, k: int,
                  index: CliqueIndex | None = None) -> CliqueCounts:
    """Exact per-vertex and total counts of k-cliques inside ``alive``."""
    if k < 3:
        raise ValueError("clique size must be >= 3")
    index = index or CliqueIndex(g)
    n = g.vertex_count
    per = [0] * n
    total = 0
    live = alive.mask.tolist()

    def visit(prefix, last):
        nonlocal total
        c = len(last)
        total += c
        for x in prefix:
            per[x] += c
        for x in last:
            per[x] += 1

    for u in index.order:
        if not live[u]:
            continue
        cand = {v for v in index.out[u] if live[v]}
        if len(cand) >= k - 1:
            _extend(index.out, [u], cand, k - 1, visit)
    if total > INT64_MAX:
        raise OverflowError(f"{k}-clique count {total} exceeds 64-bit range")
    return CliqueCounts(np.array(per, dtype=np.int64), total)


def _containing(index: CliqueIndex, live, k: int, v: int,
                visit: Callable[[list[int], set], None]) -> None:
    pool = {x for x in index.nbrs[v] if live[x]}
    out = index.out
    for x in pool:
        cand = out[x] & pool
        if len(cand) >= k - 2:
            _extend(out, [v, x], cand, k - 2, visit)


def cliques_containing(g: Graph, alive: AliveSet, k: int, v: int,
                       index: CliqueIndex | None = None) -> list[tuple[int, ...]]:
    """All alive k-cliques through ``v``, as sorted tuples in lexicographic order."""
    if not alive.mask[v]:
        raise ValueError(f"vertex {v} is not alive")
    if k < 3:
        raise ValueError("clique size must be >= 3")
    index = index or CliqueIndex(g)
    found = []

    def visit(prefix, last):
        for x in last:
            found.append(tuple(sorted(prefix + [x])))

    _containing(index, alive.mask.tolist(), k, v, visit)
    return sorted(found)


def remove_vertices(index: CliqueIndex, live: list[bool], removed: Sequence[int], k: int,
                    per_vertex: np.ndarray) -> int:
    """Delete ``removed`` (ascending) from ``live`` and decrement clique counts.

    Each destroyed clique is charged once, to its lowest-index removed member.
    Returns the number of destroyed cliques; ``per_vertex`` is updated in place
    for survivors (entries of removed vertices are left stale).
    """
    destroyed = 0
    dec: dict[int, int] = {}

    def visit(prefix, last):
        nonlocal destroyed
        c = len(last)
        destroyed += c
        for x in prefix:
            dec[x] = dec.get(x, 0) + c
        for x in last:
            dec[x] = dec.get(x, 0) + 1

    for u in removed:
        _containing(index, live, k, u, visit)
        live[u] = False
    if dec:
        idx = np.fromiter(dec.keys(), dtype=np.int64, count=len(dec))
        val = np.fromiter(dec.values(), dtype=np.int64, count=len(dec))
        per_vertex[idx] -= val
    return destroyed
