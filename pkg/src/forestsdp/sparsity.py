"""Aggregate sparsity graph of a matrix family and its forest structure.

The graph has one vertex per matrix dimension and an edge {i, j} (i < j)
whenever any matrix in the family has a nonzero (i, j) entry. Nonzero
diagonals are tracked separately as loops; they never affect forestness,
components, or the off-diagonal index set that the certification pipeline
walks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError, NotAForest, WrongShape

CLASS_TRIDIAGONAL = "tridiagonal"
CLASS_ARROW = "arrow"
CLASS_GENERAL_FOREST = "general_forest"
CLASS_NOT_FOREST = "not_forest"


@dataclass(frozen=True)
class SparsityGraph:
    """Undirected aggregate pattern: n vertices, sorted edge tuples, loop vertices."""

    n: int
    edges: tuple[tuple[int, int], ...]
    loops: tuple[int, ...]

    def degree(self, v: int) -> int:
        return sum(1 for (i, j) in self.edges if v in (i, j))

    def neighbors(self, v: int) -> list[int]:
        out = []
        for i, j in self.edges:
            if i == v:
                out.append(j)
            elif j == v:
                out.append(i)
        return sorted(out)


@dataclass(frozen=True)
class ForestAnalysis:
    """Forest verdict plus the structure the certifiers consume.

    components are vertex tuples sorted internally and ordered by smallest
    member. parent_map orients each tree toward its largest vertex (roots
    absent from the map). offdiag_edges is the aggregate off-diagonal
    index set, one (i, j) with i < j per unordered pair.
    """

    graph: SparsityGraph
    is_forest: bool
    components: tuple[tuple[int, ...], ...]
    parent_map: dict[int, int] | None
    classification: str

    @property
    def offdiag_edges(self) -> tuple[tuple[int, int], ...]:
        return self.graph.edges

    @property
    def connected(self) -> bool:
        return len(self.components) == 1


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def build_graph(matrices, tol: float = 0.0) -> SparsityGraph:
    """Aggregate the nonzero patterns of a family of square matrices.

    tol = 0.0 (default) treats file-loaded data as authoritative: any exact
    nonzero creates an edge. A small positive tol (1e-12 is the convention
    for transformed matrices) ignores floating-point fill-in.
    """
    mats = [np.asarray(m, dtype=np.float64) for m in matrices]
    if not mats:
        raise InputError("need at least one matrix to build a sparsity graph")
    n = mats[0].shape[0] if mats[0].ndim == 2 else -1
    for m in mats:
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise WrongShape(f"sparsity graph members must be square, got shape {m.shape}")
        if m.shape[0] != n:
            raise DimensionMismatch("sparsity graph members differ in dimension")
    mask = np.zeros((n, n), dtype=bool)
    for m in mats:
        hit = np.abs(m) > tol
        mask |= hit | hit.T
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if mask[i, j]:
                edges.append((i, j))
    loops = tuple(i for i in range(n) if mask[i, i])
    return SparsityGraph(n=n, edges=tuple(edges), loops=loops)


def analyze_forest(graph: SparsityGraph) -> ForestAnalysis:
    """Cycle test, components, root-oriented parents, and shape classification."""
    n = graph.n
    dsu = _DSU(n)
    acyclic = True
    for i, j in graph.edges:
        if not dsu.union(i, j):
            acyclic = False
    comp_members: dict[int, list[int]] = {}
    for v in range(n):
        comp_members.setdefault(dsu.find(v), []).append(v)
    components = tuple(
        tuple(sorted(members))
        for members in sorted(comp_members.values(), key=lambda ms: min(ms))
    )

    if not acyclic:
        return ForestAnalysis(
            graph=graph,
            is_forest=False,
            components=components,
            parent_map=None,
            classification=CLASS_NOT_FOREST,
        )

    adjacency: dict[int, list[int]] = {v: [] for v in range(n)}
    for i, j in graph.edges:
        adjacency[i].append(j)
        adjacency[j].append(i)

    parent_map: dict[int, int] = {}
    for comp in components:
        root = max(comp)
        stack = [root]
        seen = {root}
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    parent_map[w] = v
                    stack.append(w)

    classification = _classify(graph, adjacency, len(components))
    return ForestAnalysis(
        graph=graph,
        is_forest=True,
        components=components,
        parent_map=parent_map,
        classification=classification,
    )


def _classify(graph: SparsityGraph, adjacency: dict[int, list[int]], n_components: int) -> str:
    n = graph.n
    edges = graph.edges
    if all(j == i + 1 for i, j in edges):
        return CLASS_TRIDIAGONAL
    if n >= 2 and all(j == n - 1 for i, j in edges):
        return CLASS_ARROW
    degrees = [len(adjacency[v]) for v in range(n)]
    if n_components == 1:
        if max(degrees) <= 2:
            # a connected acyclic graph with all degrees <= 2 is a relabeled path
            return CLASS_TRIDIAGONAL
        if n >= 3 and sorted(degrees) == [1] * (n - 1) + [n - 1]:
            return CLASS_ARROW
    return CLASS_GENERAL_FOREST


def connecting_edges(analysis: ForestAnalysis) -> list[tuple[int, int]]:
    """Edges joining consecutive component roots into one tree.

    Components are taken in smallest-member order; consecutive roots are
    paired, giving exactly (number of components - 1) edges. Connected input
    yields an empty list.
    """
    if not analysis.is_forest:
        raise NotAForest("connector construction requires an acyclic aggregate pattern")
    roots = [max(comp) for comp in analysis.components]
    out = []
    for a, b in zip(roots, roots[1:]):
        out.append((min(a, b), max(a, b)))
    return out


def perturbation_matrix(edges, n: int) -> np.ndarray:
    """Symmetric 0/1 matrix with ones exactly at the given off-diagonal pairs."""
    p = np.zeros((n, n))
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"edge ({i}, {j}) out of range for dimension {n}")
        if i == j:
            raise InputError(f"perturbation support must be off-diagonal, got ({i}, {j})")
        p[i, j] = 1.0
        p[j, i] = 1.0
    return p
