"""Dense symmetric linear algebra helpers."""

import numpy as np
import pytest

from forestsdp import _kernels, symlin
from forestsdp.errors import DimensionMismatch, InputError, NonConvergence, ZeroVector

from conftest import rand_sym


class TestEigSym:
    def test_diagonal_input(self):
        dec = symlin.eig_sym(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(dec.values, [1.0, 2.0, 3.0])
        # eigenvectors of a diagonal matrix are signed unit coordinates
        assert np.allclose(np.abs(dec.vectors), np.eye(3)[:, [1, 2, 0]])

    def test_two_by_two_exchange(self):
        dec = symlin.eig_sym(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(dec.values, [-1.0, 1.0])
        s = 1.0 / np.sqrt(2.0)
        assert np.allclose(np.abs(dec.vectors), [[s, s], [s, s]])

    def test_reconstruction_residual(self, rng):
        a = rand_sym(8, rng)
        dec = symlin.eig_sym(a)
        recon = dec.vectors @ np.diag(dec.values) @ dec.vectors.T
        assert symlin.norm_max(recon - a) <= 1e-9
        assert symlin.norm_max(dec.vectors.T @ dec.vectors - np.eye(8)) <= 1e-10

    def test_values_sorted_ascending(self, rng):
        dec = symlin.eig_sym(rand_sym(6, rng))
        assert np.all(np.diff(dec.values) >= 0.0)

    def test_rotation_budget_exhaustion(self, rng):
        if _kernels.BACKEND != "numba":
            pytest.skip("only the rotation-counting lane enforces the budget")
        with pytest.raises(NonConvergence):
            symlin.eig_sym(rand_sym(12, rng), max_rotations=1)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(InputError):
            symlin.eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestPsdCheck:
    def test_identity_tol_zero(self):
        assert symlin.psd_check(np.eye(3), 0.0)

    def test_indefinite(self):
        assert not symlin.psd_check(np.array([[1.0, 2.0], [2.0, 1.0]]), 1e-9)

    def test_rank_one_boundary(self):
        assert symlin.psd_check(np.ones((2, 2)), 1e-9)

    def test_monotone_in_tol(self, rng):
        for _ in range(20):
            a = rand_sym(5, rng)
            t1, t2 = sorted(rng.uniform(0.0, 1e-3, size=2))
            if symlin.psd_check(a, t1):
                assert symlin.psd_check(a, t2)


class TestNumericalRank:
    def test_near_zero_eigenvalues_dropped(self):
        assert symlin.numerical_rank(np.diag([1.0, 1e-14, 0.0]), 1e-9) == 1

    def test_positive_tridiagonal(self):
        m = np.diag([2.0, 2.0, 2.0]) + np.diag([1.0, 1.0], 1) + np.diag([1.0, 1.0], -1)
        # eigenvalues 2 and 2 +- sqrt(2), all away from zero
        assert symlin.numerical_rank(m, 1e-9) == 3

    def test_rank_one(self):
        assert symlin.numerical_rank(np.ones((2, 2)), 1e-9) == 1

    def test_rank_plus_nullity_partition(self, rng):
        for _ in range(20):
            a = rand_sym(6, rng)
            tol = 10.0 ** rng.uniform(-12, -2)
            rank = symlin.numerical_rank(a, tol)
            thresh = tol * max(1.0, symlin.norm_max(a))
            nullity = int(np.sum(np.abs(np.linalg.eigvalsh(a)) <= thresh))
            assert rank + nullity == 6

    def test_tridiagonal_rank_bound_samples(self, rng):
        # random tridiagonal with superdiagonal bounded away from zero
        for _ in range(50):
            n = int(rng.integers(2, 20))
            diag = rng.uniform(-1, 1, size=n)
            sup = rng.uniform(0.1, 1.0, size=n - 1) * rng.choice([-1.0, 1.0], size=n - 1)
            m = np.diag(diag) + np.diag(sup, 1) + np.diag(sup, -1)
            assert symlin.numerical_rank(m, 1e-9) >= n - 1


class TestHouseholder:
    def test_axis_vector_sign_rule(self):
        h = symlin.householder_reflector(np.array([1.0, 0.0, 0.0]))
        assert np.allclose(h, np.diag([-1.0, 1.0, 1.0]))

    def test_swap(self):
        h = symlin.householder_reflector(np.array([0.0, 1.0]))
        assert np.allclose(h, [[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(h @ [0.0, 1.0], [1.0, 0.0])

    def test_three_four_five(self):
        v = np.array([3.0, 4.0])
        h = symlin.householder_reflector(v)
        assert np.allclose(h @ v, [-5.0, 0.0])
        assert np.allclose(h, h.T)
        assert np.allclose(h @ h, np.eye(2), atol=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            symlin.householder_reflector(np.zeros(3))

    def test_reflector_properties(self, rng):
        for _ in range(25):
            k = int(rng.integers(1, 8))
            v = rng.normal(size=k)
            h = symlin.householder_reflector(v)
            assert symlin.norm_max(h - h.T) <= 1e-10
            assert symlin.norm_max(h @ h - np.eye(k)) <= 1e-10
            img = h @ v
            assert np.max(np.abs(img[1:]), initial=0.0) <= 1e-10 * np.linalg.norm(v)


class TestPencilNonsingular:
    def test_shifted_identity(self):
        assert symlin.pencil_nonsingular(np.eye(2), np.eye(2), 2.0)

    def test_exact_cancellation(self):
        assert not symlin.pencil_nonsingular(np.eye(2), np.eye(2), 1.0)

    def test_explicit_zero_pivot(self):
        assert not symlin.pencil_nonsingular(np.diag([1.0, 2.0]), np.eye(2), 2.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            symlin.pencil_nonsingular(np.eye(2), np.eye(3), 1.0)


class TestSolveSquare:
    def test_round_trip(self, rng):
        a = rand_sym(5, rng) + 5.0 * np.eye(5)
        b = rng.normal(size=5)
        x, minpiv = symlin.solve_square(a, b)
        assert np.allclose(a @ x, b)
        assert minpiv > 0.0

    def test_singular_rejected(self):
        with pytest.raises(InputError):
            symlin.solve_square(np.zeros((2, 2)), np.ones(2), pivot_tol_abs=1e-10)
