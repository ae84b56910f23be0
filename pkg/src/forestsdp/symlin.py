"""Symmetric dense linear algebra used throughout the package.

Everything here is tolerance-disciplined: PSD membership, numerical rank,
and pencil nonsingularity are decided relative to max(1, largest |entry|)
of the matrix under test, so the verdicts are invariant under benign
rescaling of well-scaled data and sensible for tiny matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, InputError, NonConvergence, WrongShape, ZeroVector

SYM_TOL = 1e-8
PSD_TOL = 1e-9
RANK_TOL = 1e-9
SING_TOL = 1e-10
ROTATION_FACTOR = 100  # Jacobi budget is ROTATION_FACTOR * n^2 rotations


def as_symmetric(m, name: str = "matrix") -> np.ndarray:
    """Validate a square, numerically symmetric array; return a symmetrized float64 copy."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise WrongShape(f"{name} must be a square 2-d array, got shape {a.shape}")
    if a.shape[0] == 0:
        raise WrongShape(f"{name} must have at least one row")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > SYM_TOL * scale:
        raise WrongShape(f"{name} is not symmetric")
    return np.ascontiguousarray(0.5 * (a + a.T))


def norm_max(m) -> float:
    """Largest absolute entry (0.0 for an empty array)."""
    a = np.asarray(m)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True)
class EigDecomposition:
    """Spectral factorization M = V diag(values) V^T, values ascending."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def min(self) -> float:
        return float(self.values[0])

    @property
    def max(self) -> float:
        return float(self.values[-1])


def eig_sym(m, max_rotations: int | None = None) -> EigDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    m : array_like
        Square symmetric matrix.
    max_rotations : int, optional
        Rotation budget for the Jacobi lane; defaults to 100 * n^2. The
        numpy lane ignores it except for the convergence flag protocol.

    Raises
    ------
    NonConvergence
        If the kernel exhausts its budget before converging.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    if max_rotations is None:
        max_rotations = ROTATION_FACTOR * n * n
    w, v, ok = _kernels.eigh_sym(a, max_rotations)
    if not ok:
        raise NonConvergence(
            f"symmetric eigensolver did not converge within {max_rotations} rotations (n={n})"
        )
    return EigDecomposition(values=np.asarray(w), vectors=np.asarray(v))


def min_eigenvalue(m) -> float:
    return eig_sym(m).min


def psd_check(m, tol: float = PSD_TOL) -> bool:
    """True when the smallest eigenvalue is >= -tol * max(1, |M|_max)."""
    a = as_symmetric(m)
    scale = max(1.0, norm_max(a))
    return eig_sym(a).min >= -tol * scale


def numerical_rank(m, tol: float = RANK_TOL) -> int:
    """Count of eigenvalues with |lambda| > tol * max(1, |M|_max)."""
    a = as_symmetric(m)
    scale = max(1.0, norm_max(a))
    values = eig_sym(a).values
    return int(np.sum(np.abs(values) > tol * scale))


def householder_reflector(v) -> np.ndarray:
    """Reflector H (symmetric, orthogonal, involutive) mapping v onto the first axis.

    Sign convention: H v = -sign(v_1) * |v| * e_1 with sign(0) = +1, which
    keeps the construction cancellation-free.
    """
    u = np.asarray(v, dtype=np.float64).ravel()
    if u.size == 0:
        raise ZeroVector("cannot build a reflector in dimension zero")
    if not np.all(np.isfinite(u)):
        raise InputError("reflector direction contains non-finite entries")
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ZeroVector("cannot build a reflector from the zero vector")
    target_sign = -1.0 if u[0] >= 0.0 else 1.0
    w = u.copy()
    w[0] -= target_sign * norm
    h = np.eye(u.size) - (2.0 / float(w @ w)) * np.outer(w, w)
    return 0.5 * (h + h.T)


def pencil_nonsingular(k_mat, m_mat, gamma: float, tol: float = SING_TOL) -> bool:
    """Decide invertibility of K - gamma * M by the smallest LU pivot magnitude.

    The pivot threshold is tol * max(1, |K - gamma M|_max).
    """
    k = as_symmetric(k_mat, "K")
    m = as_symmetric(m_mat, "M")
    if k.shape != m.shape:
        raise DimensionMismatch(f"pencil members differ in shape: {k.shape} vs {m.shape}")
    if gamma == 0.0:
        raise InputError("pencil evaluation point gamma must be nonzero")
    p = k - gamma * m
    scale = max(1.0, norm_max(p))
    _, _, minpiv = _kernels.lu_factor(p)
    return bool(minpiv > tol * scale)


def solve_square(a, b, pivot_tol_abs: float = 0.0):
    """Solve a dense square system via the kernel LU.

    Returns (x, min_pivot). Raises InputError when the smallest pivot does
    not exceed pivot_tol_abs (an absolute threshold chosen by the caller).
    """
    a_arr = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    b_arr = np.asarray(b, dtype=np.float64)
    squeeze = b_arr.ndim == 1
    if squeeze:
        b_arr = b_arr[:, None]
    b_arr = np.ascontiguousarray(b_arr)
    lu, perm, minpiv = _kernels.lu_factor(a_arr)
    if not minpiv > pivot_tol_abs:
        raise InputError(f"linear system is singular (smallest pivot {minpiv:.3e})")
    x = np.asarray(_kernels.lu_solve(lu, perm, b_arr))
    return (x[:, 0] if squeeze else x), float(minpiv)
