"""Finite multigraphs with a total vertex order, and the graph families
used by the exact engine, the tree certificates, and the lattice samplers.

Vertices are the integers ``0..vertex_count-1``.  The index order doubles
as the total order used whenever a cluster is represented by its minimum
vertex.  Parallel edges are allowed, self-loops are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class MultiGraph:
    """Undirected multigraph on ``vertex_count`` vertices.

    ``edges`` is an ordered tuple of (u, v) pairs; the position of an edge
    in this tuple is its stable identifier.  ``degree`` counts parallel
    edges with multiplicity.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    labels: dict[int, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be nonnegative")
        object.__setattr__(
            self, "edges", tuple((int(u), int(v)) for u, v in self.edges)
        )
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u} is not allowed")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) has an endpoint out of range")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def _degrees(self) -> tuple[int, ...]:
        deg = [0] * self.vertex_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def degree(self, v: int) -> int:
        return self._degrees[v]

    def max_degree(self) -> int:
        return max(self._degrees) if self.vertex_count else 0

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int64 array (empty-safe)."""
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, the incident (edge_index, neighbor) pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for e, (u, v) in enumerate(self.edges):
            adj[u].append((e, v))
            adj[v].append((e, u))
        return tuple(tuple(a) for a in adj)

    def is_connected(self) -> bool:
        if self.vertex_count <= 1:
            return True
        seen = [False] * self.vertex_count
        seen[0] = True
        stack = [0]
        while stack:
            x = stack.pop()
            for _, w in self.adjacency[x]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return all(seen)


def make_multigraph(vertex_count: int, edge_list, labels=None) -> MultiGraph:
    """Build a MultiGraph, rejecting self-loops and out-of-range endpoints."""
    return MultiGraph(vertex_count, tuple(edge_list), dict(labels or {}))


@dataclass(frozen=True)
class Gadget:
    """A connected multigraph with two distinguished terminals a != b."""

    graph: MultiGraph
    a: int
    b: int

    def __post_init__(self):
        n = self.graph.vertex_count
        if not (0 <= self.a < n and 0 <= self.b < n):
            raise ValueError("terminal index out of range")
        if self.a == self.b:
            raise ValueError("terminals must be distinct")
        if not self.graph.is_connected():
            raise ValueError("gadget graph must be connected")


def complete_bipartite_dk(k: int) -> Gadget:
    """Complete bipartite gadget on parts {z1, z2} and {a, b, v_1..v_k}.

    Vertex layout: a=0, b=1, z1=2, z2=3, v_i=4..k+3.  Edge order is part
    of the contract: indices 0..3 are the terminal edges (a-z1, a-z2,
    b-z1, b-z2) and indices 4+2i, 5+2i are the pair (v_i-z1, v_i-z2).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    edges = [(0, 2), (0, 3), (1, 2), (1, 3)]
    labels = {0: "a", 1: "b", 2: "z1", 3: "z2"}
    for i in range(k):
        vi = 4 + i
        edges.append((vi, 2))
        edges.append((vi, 3))
        labels[vi] = f"v{i + 1}"
    return Gadget(make_multigraph(k + 4, edges, labels), 0, 1)


def parallel_gadget_dn(n: int) -> Gadget:
    """Three-vertex gadget: n parallel edges a-c plus one edge c-b."""
    if n < 1:
        raise ValueError("n must be >= 1")
    edges = [(0, 1)] * n + [(1, 2)]
    return Gadget(make_multigraph(3, edges, {0: "a", 1: "c", 2: "b"}), 0, 2)


def attach_handle(base: Gadget) -> Gadget:
    """Add a pendant vertex joined to the first terminal of ``base``.

    The new vertex (appended at the end of the index range) becomes the
    first terminal of the result; the second terminal is unchanged.  All
    base degrees are preserved except degree(base.a), which grows by 1.
    """
    g = base.graph
    new = g.vertex_count
    labels = dict(g.labels)
    labels[new] = "handle"
    graph = make_multigraph(new + 1, list(g.edges) + [(new, base.a)], labels)
    return Gadget(graph, new, base.b)


def tree_like(gadget_seq: Callable[[int], Gadget], depth: int) -> tuple[MultiGraph, int]:
    """Finite tree-like graph: a depth-``depth`` rooted degree-3 tree with
    each level-n edge replaced by a copy of ``gadget_seq(n)``.

    Levels are 1-based; a level-n tree edge joins tree vertices at
    distances n-1 and n from the root.  The gadget terminal ``a`` is
    identified with the endpoint closer to the root and ``b`` with the
    farther one.  Copies are laid out breadth first (child terminal
    first, then gadget-interior vertices in gadget-local order), so the
    vertex indexing is reproducible.

    Returns (graph, root_index) with root_index == 0.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    edges: list[tuple[int, int]] = []
    next_free = 1  # 0 is the root
    frontier = [0]
    for level in range(1, depth + 1):
        gad = gadget_seq(level)
        g = gad.graph
        interior = [w for w in range(g.vertex_count) if w not in (gad.a, gad.b)]
        new_frontier = []
        for t in frontier:
            n_children = 3 if t == 0 else 2
            for _ in range(n_children):
                child = next_free
                next_free += 1
                mapping = {gad.a: t, gad.b: child}
                for w in interior:
                    mapping[w] = next_free
                    next_free += 1
                for u, v in g.edges:
                    edges.append((mapping[u], mapping[v]))
                new_frontier.append(child)
        frontier = new_frontier
    return make_multigraph(next_free, edges, {0: "root"}), 0


@dataclass(frozen=True)
class LatticeBox:
    """Integer points of [0, width] x [0, height] on the square lattice.

    Vertex (x, y) has index ``y * (width + 1) + x``.  Bond percolation
    always runs on the nearest-neighbor edges; ``mode`` selects the
    adjacency used for color components and crossings ("nn", or "star"
    which adds both diagonals of every unit cell).
    """

    width: int
    height: int
    mode: str = "nn"

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("box dimensions must be >= 1")
        if self.mode not in ("nn", "star"):
            raise ValueError("mode must be 'nn' or 'star'")

    @property
    def vertex_count(self) -> int:
        return (self.width + 1) * (self.height + 1)

    def index(self, x: int, y: int) -> int:
        return y * (self.width + 1) + x

    def coords(self, idx: int) -> tuple[int, int]:
        return idx % (self.width + 1), idx // (self.width + 1)

    @cached_property
    def nn_edges(self) -> np.ndarray:
        """Nearest-neighbor lattice edges as an (m, 2) array."""
        w, h = self.width, self.height
        out = []
        for y in range(h + 1):
            for x in range(w):
                out.append((self.index(x, y), self.index(x + 1, y)))
        for y in range(h):
            for x in range(w + 1):
                out.append((self.index(x, y), self.index(x, y + 1)))
        return np.asarray(out, dtype=np.int64)

    @cached_property
    def adjacency_pairs(self) -> np.ndarray:
        """Adjacent vertex pairs under the selected mode."""
        pairs = list(map(tuple, self.nn_edges))
        if self.mode == "star":
            for y in range(self.height):
                for x in range(self.width):
                    pairs.append((self.index(x, y), self.index(x + 1, y + 1)))
                    pairs.append((self.index(x + 1, y), self.index(x, y + 1)))
        return np.asarray(pairs, dtype=np.int64)

    def to_multigraph(self) -> MultiGraph:
        """The nearest-neighbor bond graph of the box."""
        return make_multigraph(self.vertex_count, [tuple(e) for e in self.nn_edges])

    @cached_property
    def bottom_row(self) -> np.ndarray:
        return np.arange(self.width + 1, dtype=np.int64)

    @cached_property
    def top_row(self) -> np.ndarray:
        return self.height * (self.width + 1) + np.arange(self.width + 1, dtype=np.int64)

    @cached_property
    def left_column(self) -> np.ndarray:
        return (self.width + 1) * np.arange(self.height + 1, dtype=np.int64)

    @cached_property
    def right_column(self) -> np.ndarray:
        return self.left_column + self.width


def z2_box(n: int, m: int, mode: str = "nn") -> LatticeBox:
    """Lattice box [0, n] x [0, m] with nn or star adjacency."""
    return LatticeBox(n, m, mode)


# ---------------------------------------------------------------------------
# Plain-text graph files: `vertices N`, `edge u v` (repeatable), optional
# `terminal a <idx>` / `terminal b <idx>`.  format_graph and parse_graph are
# exact inverses on the canonical form emitted by format_graph.

def format_graph(g: MultiGraph | Gadget) -> str:
    gadget = isinstance(g, Gadget)
    graph = g.graph if gadget else g
    lines = [f"vertices {graph.vertex_count}"]
    lines.extend(f"edge {u} {v}" for u, v in graph.edges)
    if gadget:
        lines.append(f"terminal a {g.a}")
        lines.append(f"terminal b {g.b}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> MultiGraph | Gadget:
    n = None
    edges: list[tuple[int, int]] = []
    terminals: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "vertices" and len(parts) == 2:
            if n is not None:
                raise ValueError(f"line {lineno}: duplicate vertices line")
            n = int(parts[1])
        elif parts[0] == "edge" and len(parts) == 3:
            edges.append((int(parts[1]), int(parts[2])))
        elif parts[0] == "terminal" and len(parts) == 3 and parts[1] in ("a", "b"):
            terminals[parts[1]] = int(parts[2])
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    if n is None:
        raise ValueError("missing 'vertices N' line")
    graph = make_multigraph(n, edges)
    if terminals:
        if set(terminals) != {"a", "b"}:
            raise ValueError("both terminals are required when any is given")
        return Gadget(graph, terminals["a"], terminals["b"])
    return graph


def write_graph_file(path, g: MultiGraph | Gadget) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))


def read_graph_file(path) -> MultiGraph | Gadget:
    with open(path) as fh:
        return parse_graph(fh.read())
