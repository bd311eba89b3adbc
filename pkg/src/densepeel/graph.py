"""Immutable weighted undirected graph, edge-list loading and subset helpers."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from ._parallel import blocked_sum


class GraphFormatError(ValueError):
    """Raised for malformed or forbidden input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EdgeRecord(NamedTuple):
    src: int
    dst: int
    weight: float | None = None


class Edge(NamedTuple):
    """An undirected edge in internal indices, oriented as first seen in the input."""

    id: int
    src: int
    dst: int
    weight: float


@dataclass(frozen=True, eq=False)
class Graph:
    """CSR adjacency; each undirected edge is stored once per endpoint.

    ``edge_src``/``edge_dst`` keep the input orientation so that a bipartite
    "object" side can be recovered (see ``object_column``).
    """

    indptr: np.ndarray
    indices: np.ndarray
    arc_weight: np.ndarray
    arc_edge: np.ndarray
    edge_src: np.ndarray
    edge_dst: np.ndarray
    edge_weight: np.ndarray
    vertex_weights: np.ndarray
    external_ids: np.ndarray
    static_degrees: np.ndarray
    object_column: int = 2
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def vertex_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.edge_src)

    n = vertex_count
    m = edge_count

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def neighbor_weights(self, u: int) -> np.ndarray:
        return self.arc_weight[self.indptr[u]:self.indptr[u + 1]]

    def edges(self) -> Iterator[Edge]:
        for e, (s, d, w) in enumerate(zip(self.edge_src.tolist(), self.edge_dst.tolist(),
                                          self.edge_weight.tolist())):
            yield Edge(e, s, d, w)

    def object_endpoints(self) -> np.ndarray:
        """Per-edge endpoint on the configured object side (column 1 or 2)."""
        return self.edge_src if self.object_column == 1 else self.edge_dst

    def index_of(self, external_id: int) -> int:
        try:
            return self._index[int(external_id)]
        except KeyError:
            raise KeyError(f"unknown vertex id {external_id}") from None

    def external(self, indices: Iterable[int]) -> list[int]:
        return [int(self.external_ids[i]) for i in indices]

    @classmethod
    def from_edges(cls, src, dst, weight=None, *, n: int | None = None,
                   external_ids=None, vertex_weights=None, object_column: int = 2,
                   merge_duplicates: bool = False, lines=None) -> "Graph":
        """Build from internal-index edge arrays.

        ``lines`` optionally maps each input edge to a source line number for
        error messages.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        weight = (np.ones(len(src)) if weight is None
                  else np.asarray(weight, dtype=np.float64).copy())
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
        if object_column not in (1, 2):
            raise ValueError("object_column must be 1 or 2")

        def where(i: int) -> int | None:
            return None if lines is None else int(lines[i])

        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        bad = np.flatnonzero(src == dst)
        if len(bad):
            raise GraphFormatError(f"self-loop on vertex {_label(external_ids, src[bad[0]])}",
                                   where(bad[0]))
        bad = np.flatnonzero(~(weight >= 0) | ~np.isfinite(weight))
        if len(bad):
            raise GraphFormatError(f"negative or non-finite edge weight {weight[bad[0]]}",
                                   where(bad[0]))

        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        key = lo * n + hi
        uniq, first, inverse = np.unique(key, return_index=True, return_inverse=True)
        if len(uniq) != len(key):
            if not merge_duplicates:
                seen = np.zeros(len(uniq), dtype=bool)
                for i, g in enumerate(inverse.tolist()):
                    if seen[g]:
                        raise GraphFormatError(
                            f"duplicate edge {_label(external_ids, src[i])}-"
                            f"{_label(external_ids, dst[i])}", where(i))
                    seen[g] = True
            merged = np.bincount(inverse.ravel(), weights=weight, minlength=len(uniq))
            # keep input order of first occurrences
            order = np.argsort(first, kind="stable")
            src, dst, weight = src[first[order]], dst[first[order]], merged[order]

        m = len(src)
        arc_u = np.concatenate([src, dst])
        arc_v = np.concatenate([dst, src])
        arc_e = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((arc_v, arc_u))
        arc_u, arc_v, arc_e = arc_u[order], arc_v[order], arc_e[order]
        deg = np.bincount(arc_u, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])

        if external_ids is None:
            external_ids = np.arange(n, dtype=np.int64)
        external_ids = np.asarray(external_ids, dtype=np.int64)
        if len(external_ids) != n:
            raise ValueError("external_ids must have one entry per vertex")
        vw = np.zeros(n) if vertex_weights is None else np.asarray(vertex_weights, dtype=np.float64)
        if len(vw) != n:
            raise ValueError("vertex_weights must have one entry per vertex")
        if np.any(~(vw >= 0)):
            raise GraphFormatError("negative vertex weight")
        index = {int(x): i for i, x in enumerate(external_ids.tolist())}
        if len(index) != n:
            raise ValueError("external ids must be unique")

        return cls(indptr=indptr, indices=arc_v, arc_weight=weight[arc_e], arc_edge=arc_e,
                   edge_src=src, edge_dst=dst, edge_weight=weight, vertex_weights=vw,
                   external_ids=external_ids, static_degrees=deg, object_column=object_column,
                   _index=index)


def _label(external_ids, i) -> int:
    return int(i) if external_ids is None else int(external_ids[i])


class AliveSet:
    """Membership mask over internal indices with a cached popcount."""

    __slots__ = ("mask", "count")

    def __init__(self, mask: np.ndarray):
        self.mask = np.asarray(mask, dtype=bool)
        self.count = int(self.mask.sum())

    @classmethod
    def full(cls, n: int) -> "AliveSet":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> "AliveSet":
        mask = np.zeros(n, dtype=bool)
        mask[list(members)] = True
        return cls(mask)

    def __contains__(self, u: int) -> bool:
        return bool(self.mask[u])

    def __len__(self) -> int:
        return self.count

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def remove(self, removed: np.ndarray) -> None:
        removed = np.asarray(removed, dtype=np.int64)
        if len(removed) == 0:
            return
        if not self.mask[removed].all():
            raise RuntimeError("attempt to remove a vertex that is not alive")
        self.mask[removed] = False
        self.count -= len(np.unique(removed))

    def copy(self) -> "AliveSet":
        return AliveSet(self.mask.copy())


# ---------------------------------------------------------------- loading

def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8"), True
    if isinstance(source, bytes):
        return io.StringIO(source.decode()), True
    return source, False


def _records(stream) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        yield lineno, s.split()


def _parse_id(tok: str, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise GraphFormatError(f"malformed vertex id {tok!r}", lineno) from None
    if not -(1 << 63) <= v < (1 << 64):
        raise GraphFormatError(f"vertex id {tok} does not fit in 64 bits", lineno)
    return v


def _parse_weight(tok: str, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise GraphFormatError(f"malformed weight {tok!r}", lineno) from None
    if not np.isfinite(w):
        raise GraphFormatError(f"non-finite weight {tok}", lineno)
    if w < 0:
        raise GraphFormatError(f"negative weight {tok}", lineno)
    return w


def load_edge_list(source, *, weighted: bool = False, merge_duplicates: bool = False,
                   default_weight: float = 1.0, object_column: int = 2) -> Graph:
    """Parse ``src dst [weight]`` lines into a :class:`Graph`.

    Vertices are re-indexed densely in order of first appearance. Directed
    input is symmetrized. Without ``weighted`` every edge gets weight 1 and a
    third column is only checked for well-formedness.
    """
    if default_weight < 0:
        raise ValueError("default_weight must be nonnegative")
    stream, owned = _open_text(source)
    index: dict[int, int] = {}
    ext: list[int] = []
    src: list[int] = []
    dst: list[int] = []
    wts: list[float] = []
    lines: list[int] = []
    try:
        for lineno, toks in _records(stream):
            if len(toks) not in (2, 3):
                raise GraphFormatError(f"expected 'src dst [weight]', got {len(toks)} fields",
                                       lineno)
            a, b = _parse_id(toks[0], lineno), _parse_id(toks[1], lineno)
            if a == b:
                raise GraphFormatError(f"self-loop on vertex {a}", lineno)
            w = 1.0
            if len(toks) == 3:
                parsed = _parse_weight(toks[2], lineno)
                if weighted:
                    w = parsed
            elif weighted:
                w = default_weight
            for x in (a, b):
                if x not in index:
                    index[x] = len(ext)
                    ext.append(x)
            src.append(index[a])
            dst.append(index[b])
            wts.append(w)
            lines.append(lineno)
    finally:
        if owned:
            stream.close()
    return Graph.from_edges(src, dst, wts, n=len(ext),
                            external_ids=np.array(ext, dtype=np.int64) if ext else None,
                            object_column=object_column, merge_duplicates=merge_duplicates,
                            lines=lines)


def load_vertex_weights(source) -> dict[int, float]:
    """Parse an ``id weight`` sidecar file."""
    stream, owned = _open_text(source)
    table: dict[int, float] = {}
    try:
        for lineno, toks in _records(stream):
            if len(toks) != 2:
                raise GraphFormatError("expected 'id weight'", lineno)
            table[_parse_id(toks[0], lineno)] = _parse_weight(toks[1], lineno)
    finally:
        if owned:
            stream.close()
    return table


def set_vertex_weights(g: Graph, table: dict[int, float]) -> Graph:
    """Return a copy of ``g`` whose vertex priors come from ``table``.

    Vertices absent from the table get weight 0.
    """
    vw = np.zeros(g.vertex_count)
    for ext_id, w in table.items():
        if ext_id not in g._index:
            raise KeyError(f"unknown vertex id {ext_id}")
        w = float(w)
        if not (w >= 0 and np.isfinite(w)):
            raise ValueError(f"vertex {ext_id}: weight must be nonnegative and finite, got {w}")
        vw[g._index[ext_id]] = w
    return replace(g, vertex_weights=vw)


# ---------------------------------------------------------------- subset totals

def induced_total_weight(g: Graph, alive: AliveSet, metric) -> float:
    """Recompute f over the alive-induced subgraph from scratch.

    Edge-based metrics give sum of vertex terms plus each induced edge once;
    clique-based metrics give the number of cliques inside ``alive``.
    """
    if metric.clique_based:
        from .cliques import count_cliques
        return count_cliques(g, alive, metric.clique_size).total
    mask = alive.mask
    a = metric.vertex_array(g)
    c = metric.edge_array(g)
    inside = mask[g.edge_src] & mask[g.edge_dst]
    return blocked_sum(np.where(mask, a, 0.0)) + blocked_sum(np.where(inside, c, 0.0))


@dataclass(frozen=True)
class Violation:
    element: str
    value: float

    def __str__(self) -> str:
        return f"{self.element} has suspiciousness {self.value}, must be a nonnegative real"


def validate_metric_preconditions(g: Graph, metric) -> Violation | None:
    """Check that every vertex and edge term is a finite nonnegative number.

    Returns the first offending element, or None when the metric is usable.
    """
    if metric.clique_based:
        return None
    a = metric.vertex_array(g)
    bad = np.flatnonzero(~(a >= 0) | ~np.isfinite(a))
    if len(bad):
        u = int(bad[0])
        return Violation(f"vertex {int(g.external_ids[u])}", float(a[u]))
    c = metric.edge_array(g)
    bad = np.flatnonzero(~(c >= 0) | ~np.isfinite(c))
    if len(bad):
        e = int(bad[0])
        s, d = int(g.external_ids[g.edge_src[e]]), int(g.external_ids[g.edge_dst[e]])
        return Violation(f"edge {s}-{d}", float(c[e]))
    return None
