"""Directed-graph core: compressed adjacency, file loaders, edge weights,
and reproducible Erdős–Rényi generation.

Graphs are immutable once built. Node ids are dense integers
``0..node_count-1``; loaders remap source ids in first-appearance order and
keep the reverse table so reports can show the original ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphParseError, ValidationError

INCOMING_SUM_TOL = 1e-12


class GraphFormat(str, Enum):
    EDGE_LIST_DIRECTED = "edge-list-directed"
    EDGE_LIST_UNDIRECTED = "edge-list-undirected"
    CSV_FIRST_TWO_COLUMNS = "csv-first-two-columns"


@dataclass(frozen=True)
class GraphSource:
    """Where to read a graph from: a file path or inline text payload."""

    format: GraphFormat
    path: str | Path | None = None
    text: str | None = None

    def read_text(self) -> str:
        if (self.path is None) == (self.text is None):
            raise ValidationError("GraphSource needs exactly one of path or text")
        if self.path is not None:
            return Path(self.path).read_text()
        return self.text  # type: ignore[return-value]


class DirectedGraph:
    """Directed graph stored as sorted CSR adjacency, both directions.

    ``out_ptr``/``out_idx`` give the out-neighbors of each node, sorted by
    target id; ``in_ptr``/``in_idx`` mirror the same edge set sorted by
    source id. Parallel edges are collapsed and self-loops dropped at
    construction, so the adjacency always satisfies the structural
    invariants checked by :meth:`validate`.
    """

    __slots__ = (
        "node_count",
        "out_ptr",
        "out_idx",
        "in_ptr",
        "in_idx",
        "in_degree",
        "original_ids",
        "_orig_to_dense",
    )

    def __init__(
        self,
        node_count: int,
        out_ptr: np.ndarray,
        out_idx: np.ndarray,
        in_ptr: np.ndarray,
        in_idx: np.ndarray,
        original_ids: Sequence[int] | None = None,
    ):
        self.node_count = int(node_count)
        self.out_ptr = out_ptr
        self.out_idx = out_idx
        self.in_ptr = in_ptr
        self.in_idx = in_idx
        self.in_degree = np.diff(in_ptr).astype(np.int64)
        if original_ids is None:
            original_ids = range(node_count)
        self.original_ids = np.asarray(list(original_ids), dtype=np.int64)
        self._orig_to_dense = {int(o): i for i, o in enumerate(self.original_ids)}

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Iterable[tuple[int, int]],
        original_ids: Sequence[int] | None = None,
    ) -> "DirectedGraph":
        """Build from (u, v) pairs; collapses duplicates, drops self-loops."""
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls._build(node_count, pairs[:, 0], pairs[:, 1], original_ids)

    @classmethod
    def _build(
        cls,
        node_count: int,
        u: np.ndarray,
        v: np.ndarray,
        original_ids: Sequence[int] | None = None,
    ) -> "DirectedGraph":
        if node_count < 1:
            raise ValidationError("graph needs at least one node")
        if u.size:
            lo = min(u.min(), v.min())
            hi = max(u.max(), v.max())
            if lo < 0 or hi >= node_count:
                raise ValidationError(f"edge endpoint out of range [0, {node_count})")
        keep = u != v
        u, v = u[keep], v[keep]
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        if u.size:
            uniq = np.empty(u.size, dtype=bool)
            uniq[0] = True
            np.logical_or(u[1:] != u[:-1], v[1:] != v[:-1], out=uniq[1:])
            u, v = u[uniq], v[uniq]
        out_ptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(u, minlength=node_count), out=out_ptr[1:])
        out_idx = v.copy()
        in_order = np.lexsort((u, v))
        in_ptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(v, minlength=node_count), out=in_ptr[1:])
        in_idx = u[in_order]
        return cls(node_count, out_ptr, out_idx, in_ptr, in_idx, original_ids)

    # -- accessors ----------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return int(self.out_idx.size)

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[u] : self.out_ptr[u + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[v] : self.in_ptr[v + 1]]

    def edge_id(self, u: int, v: int) -> int:
        """Position of edge (u, v) in out-CSR order; raises if absent."""
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        pos = lo + np.searchsorted(self.out_idx[lo:hi], v)
        if pos >= hi or self.out_idx[pos] != v:
            raise ValidationError(f"graph has no edge ({u}, {v})")
        return int(pos)

    def has_edge(self, u: int, v: int) -> bool:
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        pos = np.searchsorted(self.out_idx[lo:hi], v)
        return bool(pos < hi - lo and self.out_idx[lo + pos] == v)

    def edge_source(self, edge: int) -> int:
        """Source node of the edge at out-CSR position ``edge``."""
        return int(np.searchsorted(self.out_ptr, edge, side="right") - 1)

    def to_dense(self, original_id: int) -> int:
        try:
            return self._orig_to_dense[int(original_id)]
        except KeyError:
            raise ValidationError(f"unknown original node id {original_id}") from None

    def to_original(self, dense_id: int) -> int:
        return int(self.original_ids[dense_id])

    def edges(self) -> Iterable[tuple[int, int]]:
        """All directed edges in sorted (u, v) order."""
        for u in range(self.node_count):
            for v in self.out_neighbors(u):
                yield u, int(v)

    def validate(self) -> None:
        """Check the structural invariants; raises ValidationError on breach."""
        n = self.node_count
        if self.out_ptr.shape != (n + 1,) or self.in_ptr.shape != (n + 1,):
            raise ValidationError("adjacency pointer arrays have wrong length")
        if self.out_idx.size != self.in_idx.size:
            raise ValidationError("out- and in-adjacency disagree on edge count")
        if not np.array_equal(self.in_degree, np.diff(self.in_ptr)):
            raise ValidationError("in_degree inconsistent with in-adjacency")
        out_edges = set()
        for u in range(n):
            row = self.out_neighbors(u)
            if row.size and np.any(row[1:] <= row[:-1]):
                raise ValidationError(f"out-adjacency of node {u} not strictly sorted")
            for v in row:
                if u == int(v):
                    raise ValidationError(f"self-loop at node {u}")
                out_edges.add((u, int(v)))
        in_edges = set()
        for v in range(n):
            row = self.in_neighbors(v)
            if row.size and np.any(row[1:] <= row[:-1]):
                raise ValidationError(f"in-adjacency of node {v} not strictly sorted")
            for u in row:
                in_edges.add((int(u), v))
        if out_edges != in_edges:
            raise ValidationError("out- and in-adjacency describe different edge sets")


@dataclass
class EdgeWeightMap:
    """Influence weights per directed edge, aligned with out-CSR edge order.

    ``base`` is immutable and shared; ``overlay`` is a per-run sparse map
    from edge position to the amplified weight and must stay confined to a
    single diffusion run.
    """

    graph: DirectedGraph
    base: np.ndarray
    overlay: dict[int, float] = field(default_factory=dict)

    def weight(self, u: int, v: int) -> float:
        return self.effective(self.graph.edge_id(u, v))

    def effective(self, edge: int) -> float:
        got = self.overlay.get(edge)
        return float(self.base[edge]) if got is None else got

    def incoming_sums(self) -> np.ndarray:
        """Sum of effective weights over the in-edges of every node."""
        eff = self.base.copy()
        for e, w in self.overlay.items():
            eff[e] = w
        return np.bincount(self.graph.out_idx, weights=eff, minlength=self.graph.node_count)


def weighted_cascade(graph: DirectedGraph) -> EdgeWeightMap:
    """Standard weighted-cascade initialization: w(u, v) = 1 / in_degree(v)."""
    base = 1.0 / graph.in_degree[graph.out_idx]
    return EdgeWeightMap(graph, base)


def explicit_weights(
    graph: DirectedGraph, assignments: Iterable[tuple[int, int, float]]
) -> EdgeWeightMap:
    """Set base weights exactly as given; unlisted edges default to 0.

    Every (u, v) must be an edge of the graph, each weight must lie in
    [0, 1], and the incoming sum at every node must not exceed 1.
    """
    base = np.zeros(graph.edge_count)
    seen: set[int] = set()
    for u, v, w in assignments:
        e = graph.edge_id(u, v)
        if e in seen:
            raise ValidationError(f"edge ({u}, {v}) assigned twice")
        seen.add(e)
        if not 0.0 <= w <= 1.0:
            raise ValidationError(f"weight {w} on edge ({u}, {v}) outside [0, 1]")
        base[e] = w
    sums = np.bincount(graph.out_idx, weights=base, minlength=graph.node_count)
    bad = np.nonzero(sums > 1.0 + INCOMING_SUM_TOL)[0]
    if bad.size:
        raise ValidationError(
            f"incoming weights at node {int(bad[0])} sum to {sums[bad[0]]:.6g} > 1"
        )
    return EdgeWeightMap(graph, base)


# -- loading and export ------------------------------------------------------


def load_edge_list(source: GraphSource) -> DirectedGraph:
    """Parse an edge list into a graph with densely remapped node ids.

    Lines starting with ``#`` are comments. Edge-list formats expect exactly
    two integer tokens per line (whitespace- or comma-separated); the CSV
    format takes the first two comma-separated columns and ignores the rest.
    Undirected input emits both (u, v) and (v, u). Self-loops are dropped
    and duplicate edges collapsed.
    """
    text = source.read_text()
    remap: dict[int, int] = {}
    us: list[int] = []
    vs: list[int] = []

    def dense(original: int) -> int:
        got = remap.get(original)
        if got is None:
            got = len(remap)
            remap[original] = got
        return got

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if source.format is GraphFormat.CSV_FIRST_TWO_COLUMNS:
            cols = line.split(",")
            if len(cols) < 2:
                raise GraphParseError(f"line {lineno}: expected at least two columns")
            tokens = cols[:2]
        else:
            tokens = line.replace(",", " ").split()
            if len(tokens) != 2:
                raise GraphParseError(
                    f"line {lineno}: expected two integer tokens, got {len(tokens)}"
                )
        try:
            a, b = (int(t) for t in tokens)
        except ValueError:
            raise GraphParseError(f"line {lineno}: malformed integer token") from None
        u, v = dense(a), dense(b)
        us.append(u)
        vs.append(v)
        if source.format is GraphFormat.EDGE_LIST_UNDIRECTED:
            us.append(v)
            vs.append(u)

    if not remap:
        raise GraphParseError("empty edge set: no nodes inferable from input")
    return DirectedGraph._build(
        len(remap),
        np.asarray(us, dtype=np.int64),
        np.asarray(vs, dtype=np.int64),
        original_ids=list(remap.keys()),
    )


def export_edge_list(graph: DirectedGraph) -> str:
    """Directed edge-list text: dense ids, one edge per line, sorted by (u, v)."""
    lines = [f"{u} {v}" for u, v in graph.edges()]
    return "\n".join(lines) + ("\n" if lines else "")


# -- random generation --------------------------------------------------------


def generate_erdos_renyi(n: int, p: float, rng_seed: int) -> DirectedGraph:
    """G(n, p) on unordered pairs, then each pair emitted in both directions.

    Matches the convention used for undirected datasets: the undirected
    sample is converted to a directed graph by duplicating every edge.
    Deterministic for a fixed ``rng_seed``; the undirected edge count is
    ``graph.edge_count // 2``.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValidationError("p must lie in [0, 1]")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        picks = np.empty(0, dtype=np.int64)
    elif p == 1.0:
        picks = np.arange(total, dtype=np.int64)
    else:
        # Geometric gap-skipping: visits only the sampled pair indices.
        rng = np.random.default_rng(rng_seed)
        chunks: list[np.ndarray] = []
        pos = -1
        batch = max(1024, int(total * p * 1.2))
        while pos < total:
            gaps = rng.geometric(p, size=batch)
            idx = np.cumsum(gaps) + pos
            pos = int(idx[-1])
            chunks.append(idx[idx < total])
        picks = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    u, v = _pair_from_index(picks, n)
    uu = np.concatenate([u, v])
    vv = np.concatenate([v, u])
    return DirectedGraph._build(n, uu, vv)


def _pair_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major enumeration of unordered pairs (u < v)."""
    if idx.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2.0).astype(np.int64)
    # first(u) = pairs whose first coordinate is < u; fix float off-by-one.
    for _ in range(2):
        first = u * (2 * n - u - 1) // 2
        u = np.where(first > idx, u - 1, u)
        nxt = (u + 1) * (2 * n - u - 2) // 2
        u = np.where(nxt <= idx, u + 1, u)
    first = u * (2 * n - u - 1) // 2
    v = idx - first + u + 1
    return u, v
