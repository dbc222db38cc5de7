"""Directed acyclic graphs over vector-valued nodes ("blocks").

Nodes are 1-based integers with an optional label table.  Each node carries a
block dimension d_j >= 1; data matrices lay blocks out contiguously in node
index order.  A Dag is immutable after construction and safe to share.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .errors import CycleError, DimensionError, MissingEdgeError, SelfLoopError

__all__ = ["Dag", "validate_dag", "delete_edges", "ancestors"]


@dataclass(frozen=True)
class Dag:
    block_dims: tuple
    edges: frozenset
    parent_sets: tuple        # parent_sets[j-1] = sorted tuple of parents of j
    topo_order: tuple
    node_labels: tuple | None = None
    _col_starts: tuple = field(default=(), repr=False)

    @property
    def p(self) -> int:
        return len(self.block_dims)

    @property
    def d(self) -> int:
        """Total data width, sum of block dimensions."""
        return self._col_starts[-1]

    def parents(self, j: int) -> tuple:
        return self.parent_sets[j - 1]

    def dim(self, j: int) -> int:
        return self.block_dims[j - 1]

    def parent_dim(self, j: int) -> int:
        """Stacked width r_j of node j's parents."""
        return sum(self.block_dims[k - 1] for k in self.parent_sets[j - 1])

    @property
    def max_local_dim(self) -> int:
        """max_j (d_j + r_j), the largest own-plus-parents width."""
        return max(self.dim(j) + self.parent_dim(j) for j in range(1, self.p + 1))

    def block_cols(self, j: int):
        """Column slice of node j in a data matrix."""
        return slice(self._col_starts[j - 1], self._col_starts[j])

    def parent_cols(self, j: int):
        """Column indices of node j's parents, ascending node order."""
        cols = []
        for k in self.parent_sets[j - 1]:
            cols.extend(range(self._col_starts[k - 1], self._col_starts[k]))
        return cols

    def label(self, j: int) -> str:
        if self.node_labels is not None:
            return self.node_labels[j - 1]
        return str(j)

    def index_of(self, label: str) -> int:
        if self.node_labels is None:
            return int(label)
        try:
            return self.node_labels.index(label) + 1
        except ValueError:
            raise KeyError(f"unknown node label {label!r}") from None

    def column_names(self):
        """Block-qualified column names, e.g. Y1.1 ... Y1.5, Y2.1, ..."""
        names = []
        for j in range(1, self.p + 1):
            base = self.label(j)
            if self.dim(j) == 1:
                names.append(base)
            else:
                names.extend(f"{base}.{i + 1}" for i in range(self.dim(j)))
        return names


def _toposort(p, parent_sets):
    """Kahn's algorithm with a min-index heap; returns order or raises CycleError."""
    children = {j: [] for j in range(1, p + 1)}
    indeg = {j: len(parent_sets[j - 1]) for j in range(1, p + 1)}
    for j in range(1, p + 1):
        for k in parent_sets[j - 1]:
            children[k].append(j)
    ready = [j for j in range(1, p + 1) if indeg[j] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        j = heapq.heappop(ready)
        order.append(j)
        for c in children[j]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) < p:
        remaining = {j for j in range(1, p + 1) if j not in set(order)}
        raise CycleError(_find_cycle(remaining, parent_sets))
    return tuple(order)


def _find_cycle(remaining, parent_sets):
    start = min(remaining)
    seen = {}
    node, step = start, 0
    while node not in seen:
        seen[node] = step
        step += 1
        node = min(k for k in parent_sets[node - 1] if k in remaining)
    cycle = [v for v, s in sorted(seen.items(), key=lambda kv: kv[1]) if s >= seen[node]]
    return cycle + [node]


def validate_dag(node_dims, edge_list, node_labels=None) -> Dag:
    """Build a Dag from per-node dimensions and (parent, child) pairs.

    Nodes are 1..p.  Raises IndexError for out-of-range endpoints,
    SelfLoopError for k -> k, CycleError (reporting one cycle) if the edges
    are not acyclic.  The topological order is deterministic: Kahn's
    algorithm breaking ties by ascending node index.
    """
    dims = tuple(int(d) for d in node_dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"block dimensions must be >= 1, got {dims}")
    p = len(dims)
    if node_labels is not None:
        node_labels = tuple(str(s) for s in node_labels)
        if len(node_labels) != p:
            raise DimensionError("node_labels length does not match node count")
        if len(set(node_labels)) != p:
            raise DimensionError("node labels must be distinct")

    edges = set()
    for k, j in edge_list:
        k, j = int(k), int(j)
        if not (1 <= k <= p) or not (1 <= j <= p):
            raise IndexError(f"edge ({k}, {j}) out of range 1..{p}")
        if k == j:
            raise SelfLoopError(f"self-loop at node {k}")
        edges.add((k, j))

    parent_sets = tuple(tuple(sorted(k for k, jj in edges if jj == j))
                        for j in range(1, p + 1))
    order = _toposort(p, parent_sets)
    starts = [0]
    for d in dims:
        starts.append(starts[-1] + d)
    return Dag(block_dims=dims, edges=frozenset(edges), parent_sets=parent_sets,
               topo_order=order, node_labels=node_labels, _col_starts=tuple(starts))


def delete_edges(dag: Dag, removed) -> Dag:
    """A new Dag with the given edges removed; the input is left unchanged."""
    removed = {(int(k), int(j)) for k, j in removed}
    missing = removed - set(dag.edges)
    if missing:
        raise MissingEdgeError(f"edges not in graph: {sorted(missing)}")
    return validate_dag(dag.block_dims, dag.edges - removed, dag.node_labels)


def ancestors(dag: Dag, j: int) -> set:
    """All nodes with a directed path into j (j itself excluded)."""
    if not (1 <= j <= dag.p):
        raise IndexError(f"node {j} out of range 1..{dag.p}")
    out, stack = set(), list(dag.parents(j))
    while stack:
        k = stack.pop()
        if k not in out:
            out.add(k)
            stack.extend(dag.parents(k))
    return out
