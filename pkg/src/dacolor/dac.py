"""Sampling of bond configurations, cluster colorings, and the directed
exploration that couples the colored field with a product field.

RNG contract: every sampling entry point takes a ``numpy.random.Generator``.
Use :func:`stream` to build one from an integer seed plus a tuple of stream
ids; distinct id tuples give independent, reproducible streams (PCG64 seeded
through ``SeedSequence(seed, spawn_key=ids)``).  Samplers draw edge variables
first (in edge-index order), then vertex variables (in vertex order), so a
given (seed, graph, parameters) triple always replays identically.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .multigraph import LatticeBox, MultiGraph

# Bond and site configurations are plain uint8 arrays: one bit per edge
# index (1 = open), one bit per vertex index (1 = black).
BondConfig = np.ndarray
SiteConfig = np.ndarray


def stream(seed: int, *ids: int) -> np.random.Generator:
    """Named substream: independent generators for distinct id tuples."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=ids)))


def _check_prob(x, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {x}")
    return x


def sample_bond(graph: MultiGraph, p, rng: np.random.Generator) -> BondConfig:
    """I.i.d. open/closed bits, one per edge."""
    p = _check_prob(p, "p")
    return (rng.random(graph.edge_count) < p).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class ClusterPartition:
    """Open-cluster partition with least-vertex representatives.

    ``parent[v]`` is the smallest vertex index in v's cluster, so find is
    idempotent by construction.  ``sizes`` is indexed by vertex and nonzero
    exactly at representatives, where it holds the cluster size.
    """

    parent: np.ndarray
    sizes: np.ndarray

    def find(self, v: int) -> int:
        return int(self.parent[v])

    def size(self, v: int) -> int:
        return int(self.sizes[self.find(v)])

    @property
    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.sizes)

    @property
    def n_clusters(self) -> int:
        return int(np.count_nonzero(self.sizes))


def clusters(graph: MultiGraph, eta: BondConfig) -> ClusterPartition:
    """Partition vertices into open clusters of ``eta``."""
    eta = np.asarray(eta, dtype=np.uint8)
    if eta.shape != (graph.edge_count,):
        raise ValueError(
            f"eta has shape {eta.shape}, expected ({graph.edge_count},)"
        )
    n = graph.vertex_count
    open_idx = np.flatnonzero(eta)
    if open_idx.size:
        ea = graph.edge_array[open_idx]
        mat = sparse.coo_matrix(
            (np.ones(len(ea), dtype=np.int8), (ea[:, 0], ea[:, 1])), shape=(n, n)
        )
        _, labels = csgraph.connected_components(mat, directed=False)
        mins = np.full(int(labels.max()) + 1, n, dtype=np.int64)
        np.minimum.at(mins, labels, np.arange(n))
        parent = mins[labels]
    else:
        parent = np.arange(n)
    sizes = np.zeros(n, dtype=np.int64)
    np.add.at(sizes, parent, 1)
    return ClusterPartition(parent, sizes)


def color(partition: ClusterPartition, r, rng: np.random.Generator) -> SiteConfig:
    """Color clusters black/white: one Bernoulli(r) bit per vertex is drawn
    in vertex order, and each vertex inherits its representative's bit."""
    r = _check_prob(r, "r")
    kappa = (rng.random(len(partition.parent)) < r).astype(np.uint8)
    return kappa[partition.parent]


def sample_dac(
    graph: MultiGraph, p, r, rng: np.random.Generator
) -> tuple[BondConfig, SiteConfig]:
    """One joint sample (eta, xi): open each edge with probability p, then
    color the resulting clusters with probability r each."""
    eta = sample_bond(graph, p, rng)
    xi = color(clusters(graph, eta), r, rng)
    return eta, xi


# ---------------------------------------------------------------------------
# Directed exploration coupling


@dataclass(frozen=True, eq=False)
class CouplingSample:
    """Joint draw of (eta, xi) together with the product-field witness z.

    The construction guarantees z(v) <= xi(v) everywhere; this is enforced
    on every instance, never checked statistically.
    """

    eta: BondConfig
    xi: SiteConfig
    z: SiteConfig

    def __post_init__(self):
        if np.any(self.z > self.xi):
            raise RuntimeError(
                "coupling invariant violated: z exceeds xi at "
                f"vertices {np.flatnonzero(self.z > self.xi).tolist()}"
            )


def _explore(graph: MultiGraph, directed) -> tuple[np.ndarray, np.ndarray]:
    """Resolve directed edge bits into an undirected configuration.

    ``directed[e][0]`` is the bit oriented out of edges[e][0] and
    ``directed[e][1]`` the bit out of edges[e][1].  Rounds start at the
    least unexplored vertex; each newly explored vertex assigns its still
    unassigned incident edges from its own outgoing bits, and the next
    vertex of the round is the least unexplored one reachable through
    assigned open edges.  Returns (eta, root) where root[v] is the vertex
    that seeded v's round (the one whose color bit v inherits).
    """
    n, m = graph.vertex_count, graph.edge_count
    edges = graph.edges
    adjacency = graph.adjacency
    eta = np.zeros(m, dtype=np.uint8)
    assigned = [False] * m
    root = np.empty(n, dtype=np.int64)
    explored = [False] * n
    for v in range(n):
        if explored[v]:
            continue
        explored[v] = True
        members = [v]
        frontier: list[int] = []
        current = v
        while True:
            for e, w in adjacency[current]:
                if assigned[e]:
                    continue
                assigned[e] = True
                bit = directed[e][0] if edges[e][0] == current else directed[e][1]
                eta[e] = bit
                if bit and not explored[w]:
                    heapq.heappush(frontier, w)
            nxt = -1
            while frontier:
                w = heapq.heappop(frontier)
                if not explored[w]:
                    nxt = w
                    break
            if nxt < 0:
                break
            explored[nxt] = True
            members.append(nxt)
            current = nxt
        for w in members:
            root[w] = v
    if not all(assigned):
        raise RuntimeError("internal error: exploration left an edge unassigned")
    return eta, root


def _incoming_open(graph: MultiGraph, directed: np.ndarray) -> np.ndarray:
    """Per vertex: does some directed bit point into it while open?"""
    inc = np.zeros(graph.vertex_count, dtype=bool)
    ea = graph.edge_array
    if len(ea):
        np.logical_or.at(inc, ea[:, 1], directed[:, 0].astype(bool))
        np.logical_or.at(inc, ea[:, 0], directed[:, 1].astype(bool))
    return inc


def exploration_coupling(
    graph: MultiGraph, p, r, rng: np.random.Generator
) -> CouplingSample:
    """Sample (eta, xi) through the directed exploration, together with
    z(v) = [kappa_v = 1 and every directed bit into v is closed].

    xi has the same law as the second coordinate of sample_dac; z is an
    i.i.d. field where vertex v is black with probability r(1-p)^deg(v);
    and z <= xi pointwise on every draw.
    """
    p = _check_prob(p, "p")
    r = _check_prob(r, "r")
    m, n = graph.edge_count, graph.vertex_count
    directed = (rng.random((m, 2)) < p).astype(np.uint8)
    kappa = (rng.random(n) < r).astype(np.uint8)
    eta, root = _explore(graph, directed)
    xi = kappa[root]
    z = kappa & ~_incoming_open(graph, directed)
    return CouplingSample(eta=eta, xi=xi, z=z.astype(np.uint8))


_TABLE_BIT_LIMIT = 16  # tabulate all directed configurations up to 2^16


@lru_cache(maxsize=8)
def _exploration_table(graph: MultiGraph) -> tuple[np.ndarray, np.ndarray]:
    """(eta_mask, root) outcome of _explore for every directed-bit integer.

    Bit (2e + s) of the index holds directed[e][s].  Sizes are capped by
    _TABLE_BIT_LIMIT before calling.
    """
    m = graph.edge_count
    eta_masks = np.empty(1 << (2 * m), dtype=np.int64)
    roots = np.empty((1 << (2 * m), graph.vertex_count), dtype=np.int64)
    for idx in range(1 << (2 * m)):
        directed = [((idx >> (2 * e)) & 1, (idx >> (2 * e + 1)) & 1) for e in range(m)]
        eta, root = _explore(graph, directed)
        mask = 0
        for e in range(m):
            if eta[e]:
                mask |= 1 << e
        eta_masks[idx] = mask
        roots[idx] = root
    return eta_masks, roots


def exploration_coupling_batch(
    graph: MultiGraph, p, r, rng: np.random.Generator, size: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized exploration_coupling: (eta, xi, z) arrays with shapes
    (size, m), (size, n), (size, n).

    For graphs with at most 8 edges the round structure is precomputed
    once per directed configuration and samples become table lookups; the
    z <= xi check still runs on every row.
    """
    p = _check_prob(p, "p")
    r = _check_prob(r, "r")
    m, n = graph.edge_count, graph.vertex_count
    if 2 * m > _TABLE_BIT_LIMIT:
        etas = np.empty((size, m), dtype=np.uint8)
        xis = np.empty((size, n), dtype=np.uint8)
        zs = np.empty((size, n), dtype=np.uint8)
        for i in range(size):
            s = exploration_coupling(graph, p, r, rng)
            etas[i], xis[i], zs[i] = s.eta, s.xi, s.z
        return etas, xis, zs
    bits = (rng.random((size, m, 2)) < p).astype(np.uint8)
    kappa = (rng.random((size, n)) < r).astype(np.uint8)
    weights = (1 << np.arange(2 * m, dtype=np.int64)).reshape(m, 2)
    idx = np.einsum("smd,md->s", bits.astype(np.int64), weights)
    eta_masks, roots = _exploration_table(graph)
    etas = ((eta_masks[idx][:, None] >> np.arange(m)) & 1).astype(np.uint8)
    xis = np.take_along_axis(kappa, roots[idx], axis=1)
    inc = np.zeros((size, n), dtype=bool)
    for e, (u, v) in enumerate(graph.edges):
        inc[:, v] |= bits[:, e, 0].astype(bool)
        inc[:, u] |= bits[:, e, 1].astype(bool)
    zs = (kappa.astype(bool) & ~inc).astype(np.uint8)
    if np.any(zs > xis):
        raise RuntimeError("coupling invariant violated in batch sampler")
    return etas, xis, zs


# ---------------------------------------------------------------------------
# Component and crossing queries


def black_component(obj, xi: SiteConfig, v: int) -> np.ndarray:
    """Vertices of the maximal same-color component containing v.

    ``obj`` is a MultiGraph (its own edges define adjacency) or a
    LatticeBox (adjacency follows the box mode, nn or star).  The
    component is monochromatic in v's color, whichever that is.
    """
    if isinstance(obj, LatticeBox):
        n = obj.vertex_count
        pairs = obj.adjacency_pairs
    else:
        n = obj.vertex_count
        pairs = obj.edge_array
    xi = np.asarray(xi, dtype=np.uint8)
    if xi.shape != (n,):
        raise ValueError(f"xi has shape {xi.shape}, expected ({n},)")
    if not 0 <= v < n:
        raise ValueError(f"vertex {v} out of range")
    labels = _same_color_labels(n, pairs, xi)
    return np.flatnonzero(labels == labels[v])


def _same_color_labels(n: int, pairs: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Component labels of the graph restricted to monochromatic pairs."""
    if len(pairs):
        keep = xi[pairs[:, 0]] == xi[pairs[:, 1]]
        pairs = pairs[keep]
    if len(pairs) == 0:
        return np.arange(n)
    mat = sparse.coo_matrix(
        (np.ones(len(pairs), dtype=np.int8), (pairs[:, 0], pairs[:, 1])),
        shape=(n, n),
    )
    _, labels = csgraph.connected_components(mat, directed=False)
    return labels


def crossing(box: LatticeBox, xi: SiteConfig, color_value: int = 1,
             axis: str = "vertical") -> bool:
    """Is there a path of ``color_value`` vertices joining the two opposite
    sides, using the box's adjacency mode?"""
    xi = np.asarray(xi, dtype=np.uint8)
    if xi.shape != (box.vertex_count,):
        raise ValueError(
            f"xi has shape {xi.shape}, expected ({box.vertex_count},)"
        )
    if axis == "vertical":
        side0, side1 = box.bottom_row, box.top_row
    elif axis == "horizontal":
        side0, side1 = box.left_column, box.right_column
    else:
        raise ValueError("axis must be 'vertical' or 'horizontal'")
    eligible = xi == color_value
    src = side0[eligible[side0]]
    dst = side1[eligible[side1]]
    if src.size == 0 or dst.size == 0:
        return False
    labels = _same_color_labels(box.vertex_count, box.adjacency_pairs, xi)
    # restrict to the wanted color: monochromatic components of the other
    # color never contain src vertices, so filtering src/dst suffices
    return bool(np.intersect1d(labels[src], labels[dst]).size)


def vertical_crossing(box: LatticeBox, xi: SiteConfig) -> bool:
    """Black top-to-bottom crossing."""
    return crossing(box, xi, color_value=1, axis="vertical")


def one_arm(box: LatticeBox, eta: BondConfig, n: int) -> bool:
    """Does the open cluster of the box center reach L1 distance n?

    The box must be the square [0, 2R] x [0, 2R] with center (R, R) and
    n <= R, so the radius-n ball lies inside and truncation is exact: any
    open path from the center stops being inside the ball only after first
    reaching distance n.
    """
    if box.width != box.height or box.width % 2:
        raise ValueError("one_arm needs a square box of even side")
    radius = box.width // 2
    if not 1 <= n <= radius:
        raise ValueError(f"n must be in [1, {radius}] for this box")
    eta = np.asarray(eta, dtype=np.uint8)
    nn = box.nn_edges
    if eta.shape != (len(nn),):
        raise ValueError(f"eta has shape {eta.shape}, expected ({len(nn)},)")
    center = box.index(radius, radius)
    open_pairs = nn[eta.astype(bool)]
    if len(open_pairs) == 0:
        return False
    mat = sparse.coo_matrix(
        (np.ones(len(open_pairs), dtype=np.int8), (open_pairs[:, 0], open_pairs[:, 1])),
        shape=(box.vertex_count, box.vertex_count),
    )
    _, labels = csgraph.connected_components(mat, directed=False)
    members = np.flatnonzero(labels == labels[center])
    ys, xs = np.divmod(members, box.width + 1)
    l1 = np.abs(xs - radius) + np.abs(ys - radius)
    return bool(l1.max() >= n)


# ---------------------------------------------------------------------------
# Sample dumps


def bits_to_hex(bits) -> str:
    b = np.asarray(bits, dtype=np.uint8)
    if b.size == 0:
        return ""
    return np.packbits(b, bitorder="little").tobytes().hex()


def hex_to_bits(s: str, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = np.frombuffer(bytes.fromhex(s), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


def write_samples_csv(fh, samples, comments=()) -> None:
    """Rows `sample_id, edge_bits_hex, vertex_bits_hex` for (eta, xi) pairs."""
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write("sample_id,edge_bits_hex,vertex_bits_hex\n")
    for i, (eta, xi) in enumerate(samples):
        fh.write(f"{i},{bits_to_hex(eta)},{bits_to_hex(xi)}\n")
