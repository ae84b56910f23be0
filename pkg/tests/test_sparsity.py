"""Aggregate sparsity graph, forest analysis, connectors, perturbation support."""

import numpy as np
import pytest

from forestsdp import devtools, sparsity, symlin
from forestsdp.errors import NotAForest

from conftest import random_tree_edges


def _analyze(mats):
    return sparsity.analyze_forest(sparsity.build_graph(mats))


class TestBuildGraph:
    def test_single_offdiagonal_edge(self):
        g = sparsity.build_graph([np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])])
        assert g.edges == ((0, 1),)
        assert g.loops == (0, 1)

    def test_diagonal_matrices_have_no_edges(self):
        g = sparsity.build_graph([np.diag([1.0, 2.0]), np.diag([0.0, 3.0])])
        assert g.edges == ()

    def test_tridiagonal_path(self):
        m = np.diag(np.ones(4)) + np.diag([1.0, 1.0, 1.0], 1) + np.diag([1.0, 1.0, 1.0], -1)
        g = sparsity.build_graph([m])
        assert g.edges == ((0, 1), (1, 2), (2, 3))

    def test_union_over_family(self):
        a = np.zeros((3, 3))
        a[0, 1] = a[1, 0] = 1.0
        b = np.zeros((3, 3))
        b[1, 2] = b[2, 1] = -2.0
        g = sparsity.build_graph([a, b])
        assert g.edges == ((0, 1), (1, 2))

    def test_numeric_tolerance_mode(self):
        a = np.zeros((2, 2))
        a[0, 1] = a[1, 0] = 1e-14
        assert sparsity.build_graph([a]).edges == ((0, 1),)
        assert sparsity.build_graph([a], tol=1e-12).edges == ()


class TestAnalyzeForest:
    def test_path_is_tridiagonal(self):
        g = sparsity.SparsityGraph(3, ((0, 1), (1, 2)), ())
        fa = sparsity.analyze_forest(g)
        assert fa.is_forest
        assert fa.classification == sparsity.CLASS_TRIDIAGONAL

    def test_triangle_is_not_forest(self):
        g = sparsity.SparsityGraph(3, ((0, 1), (1, 2), (0, 2)), ())
        fa = sparsity.analyze_forest(g)
        assert not fa.is_forest
        assert fa.classification == sparsity.CLASS_NOT_FOREST

    def test_star_is_arrow(self):
        g = sparsity.SparsityGraph(4, ((0, 3), (1, 3), (2, 3)), ())
        fa = sparsity.analyze_forest(g)
        assert fa.is_forest
        assert fa.classification == sparsity.CLASS_ARROW

    def test_relabelled_path_still_tridiagonal(self):
        # path 2-0-3-1 is tridiagonal only after a permutation
        g = sparsity.SparsityGraph(4, ((0, 2), (0, 3), (1, 3)), ())
        assert sparsity.analyze_forest(g).classification == sparsity.CLASS_TRIDIAGONAL

    def test_relabelled_star_still_arrow(self):
        g = sparsity.SparsityGraph(4, ((0, 1), (0, 2), (0, 3)), ())
        assert sparsity.analyze_forest(g).classification == sparsity.CLASS_ARROW

    def test_forest_edge_count_identity(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 12))
            edges = random_tree_edges(n, rng)
            drop = int(rng.integers(0, len(edges) + 1))
            kept = tuple(e for i, e in enumerate(edges) if i >= drop)
            fa = sparsity.analyze_forest(sparsity.SparsityGraph(n, kept, ()))
            assert fa.is_forest
            assert len(kept) + len(fa.components) == n

    def test_parent_map_roots_at_component_max(self):
        g = sparsity.SparsityGraph(5, ((0, 1), (1, 2), (3, 4)), ())
        fa = sparsity.analyze_forest(g)
        assert 2 not in fa.parent_map and 4 not in fa.parent_map
        assert fa.parent_map[0] == 1 and fa.parent_map[1] == 2 and fa.parent_map[3] == 4


class TestConnectingEdges:
    def test_connected_needs_nothing(self):
        fa = _analyze([np.array([[1.0, 1.0], [1.0, 1.0]])])
        assert sparsity.connecting_edges(fa) == []

    def test_two_components_joined_at_roots(self):
        a = np.zeros((3, 3))
        a[0, 1] = a[1, 0] = 1.0
        np.fill_diagonal(a, 1.0)
        fa = _analyze([a])
        assert sparsity.connecting_edges(fa) == [(1, 2)]

    def test_three_isolated_vertices(self):
        fa = _analyze([np.diag([1.0, 1.0, 1.0])])
        assert sparsity.connecting_edges(fa) == [(0, 1), (1, 2)]

    def test_rejects_cycles(self):
        g = sparsity.SparsityGraph(3, ((0, 1), (1, 2), (0, 2)), ())
        with pytest.raises(NotAForest):
            sparsity.connecting_edges(sparsity.analyze_forest(g))

    def test_reconnection_yields_single_tree(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 12))
            edges = random_tree_edges(n, rng)
            kept = tuple(e for e in edges if rng.uniform() > 0.4)
            fa = sparsity.analyze_forest(sparsity.SparsityGraph(n, kept, ()))
            extra = sparsity.connecting_edges(fa)
            assert len(extra) == len(fa.components) - 1
            merged = sparsity.analyze_forest(
                sparsity.SparsityGraph(n, tuple(sorted(set(kept) | set(extra))), ())
            )
            assert merged.is_forest and merged.connected


class TestPerturbationMatrix:
    def test_single_edge(self):
        p = sparsity.perturbation_matrix([(0, 2)], 3)
        expect = np.zeros((3, 3))
        expect[0, 2] = expect[2, 0] = 1.0
        assert np.array_equal(p, expect)

    def test_empty(self):
        assert np.array_equal(sparsity.perturbation_matrix([], 3), np.zeros((3, 3)))

    def test_path_support(self):
        p = sparsity.perturbation_matrix([(0, 1), (1, 2)], 3)
        assert np.array_equal(p, np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))
        assert symlin.norm_max(p) == 1.0


def test_member_patterns_subsets_of_aggregate(rng):
    for seed in range(10):
        inst = devtools.random_forest_qcqp(7, 3, devtools.SHAPE_RANDOM_TREE, True, seed=seed)
        agg = set(sparsity.build_graph(inst.Q).edges)
        for q in inst.Q:
            assert set(sparsity.build_graph([q]).edges) <= agg


def test_zeroing_tree_entries_preserves_psd(rng):
    """Dropping any subset of off-diagonal tree entries keeps the matrix PSD."""
    for _ in range(60):
        n = int(rng.integers(2, 12))
        edges = random_tree_edges(n, rng)
        m = devtools.random_psd_forest_matrix(n, edges, seed=int(rng.integers(1 << 30)))
        keep_prob = rng.uniform()
        zeroed = m.copy()
        for i, j in edges:
            if rng.uniform() > keep_prob:
                zeroed[i, j] = zeroed[j, i] = 0.0
        assert symlin.psd_check(zeroed, 1e-9)
