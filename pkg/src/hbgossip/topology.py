"""Benchmark network families: cycle, 2-D grid, random geometric graph.

Graphs are undirected, connected, with nodes labeled 0..n-1 and edges kept
in canonical (min, max) lexicographic order so that edge indices are
reproducible across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

RGG_MAX_ATTEMPTS = 100


class GraphGenerationError(RuntimeError):
    """Raised when a random graph family fails to produce a connected graph."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple  # tuple of (i, j) pairs with i < j
    coords: np.ndarray | None = None  # (n, 2) positions, RGG only

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range for n={self.n}")
            if i >= j:
                raise ValueError(f"edge ({i},{j}) not in canonical i<j order")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
        part = connected_components(self, range(len(self.edges)))
        if len(part.components) != 1:
            raise ValueError("graph is not connected")

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoint index arrays (ei, ej), each of length m."""
        if self.m == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        arr = np.asarray(self.edges, dtype=np.int64)
        return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])


@dataclass(frozen=True)
class Partition:
    """Partition of all n nodes into disjoint components."""

    assignment: np.ndarray  # node -> component id
    components: tuple  # tuple of tuples of node ids, sorted by smallest node

    @property
    def n_components(self) -> int:
        return len(self.components)


class _UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while a != root:  # path compression
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def make_cycle(n: int) -> Graph:
    """Ring graph on n >= 3 nodes."""
    if n < 3:
        raise ValueError(f"cycle needs n >= 3, got {n}")
    edges = sorted((min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n))
    return Graph(n=n, edges=tuple(edges))


def make_grid2d(rows: int, cols: int) -> Graph:
    """rows x cols lattice, nodes in row-major order."""
    if rows < 2 or cols < 2:
        raise ValueError(f"grid needs rows, cols >= 2, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(n=rows * cols, edges=tuple(sorted(edges)))


def rgg_radius(n: int) -> float:
    """Connectivity radius sqrt(log(n)/n), natural log."""
    return math.sqrt(math.log(n) / n)


def make_rgg(n: int, seed: int) -> Graph:
    """Random geometric graph: n uniform points in the unit square, edge iff
    Euclidean distance <= sqrt(log(n)/n).

    Disconnected draws are discarded and all points redrawn from the same
    stream, up to RGG_MAX_ATTEMPTS; deterministic for equal (n, seed).
    """
    if n < 2:
        raise ValueError(f"rgg needs n >= 2, got {n}")
    r = rgg_radius(n)
    rng = np.random.default_rng(seed)
    for _ in range(RGG_MAX_ATTEMPTS):
        pts = rng.random((n, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        iu, ju = np.nonzero(np.triu(dist <= r, k=1))
        edges = tuple(zip(iu.tolist(), ju.tolist()))
        uf = _UnionFind(n)
        for i, j in edges:
            uf.union(i, j)
        if len({uf.find(v) for v in range(n)}) == 1:
            return Graph(n=n, edges=edges, coords=pts)
    raise GraphGenerationError(
        f"no connected RGG with n={n}, seed={seed} "
        f"within {RGG_MAX_ATTEMPTS} attempts"
    )


def incidence_matrix(g: Graph) -> np.ndarray:
    """|E| x n matrix: row for edge (i, j) has +1 at i, -1 at j."""
    A = np.zeros((g.m, g.n))
    for k, (i, j) in enumerate(g.edges):
        A[k, i] = 1.0
        A[k, j] = -1.0
    return A


def connected_components(g: Graph, edge_subset) -> Partition:
    """Partition of all n nodes under the selected edges only.

    Nodes touching no selected edge become singleton components. Component
    ids are assigned in order of each component's smallest node.
    """
    uf = _UnionFind(g.n)
    for idx in edge_subset:
        idx = int(idx)
        if not (0 <= idx < g.m):
            raise ValueError(f"edge index {idx} out of range for m={g.m}")
        i, j = g.edges[idx]
        uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(uf.find(v), []).append(v)
    comps = sorted(groups.values(), key=lambda c: c[0])
    assignment = np.empty(g.n, dtype=np.int64)
    for cid, comp in enumerate(comps):
        for v in comp:
            assignment[v] = cid
    return Partition(assignment=assignment, components=tuple(tuple(c) for c in comps))


def write_edge_list(g: Graph, path) -> None:
    """Plain-text edge list: `n m`, then m lines `i j`, then an optional
    `coords` block with n lines `x y`."""
    with open(path, "w") as f:
        f.write(f"{g.n} {g.m}\n")
        for i, j in g.edges:
            f.write(f"{i} {j}\n")
        if g.coords is not None:
            f.write("coords\n")
            for x, y in g.coords:
                f.write(f"{x:.17g} {y:.17g}\n")


def read_edge_list(path) -> Graph:
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    n, m = (int(t) for t in lines[0].split())
    edges = tuple(tuple(int(t) for t in ln.split()) for ln in lines[1 : 1 + m])
    coords = None
    if len(lines) > 1 + m and lines[1 + m] == "coords":
        coords = np.array(
            [[float(t) for t in ln.split()] for ln in lines[2 + m : 2 + m + n]]
        )
    return Graph(n=n, edges=edges, coords=coords)
