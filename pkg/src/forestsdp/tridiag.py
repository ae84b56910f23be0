"""Simultaneous tridiagonalization of a symmetric matrix pair.

One congruence transform U (not orthogonal in general) takes both members of
a pair (K, M) to tridiagonal form. Each elimination step k picks the vector
u_k that makes the two transformed row tails collinear with ratio gamma, then
a single Householder reflector compresses both onto the first axis at once.
The collinearity survives into the superdiagonals: every produced pair of
superdiagonal entries satisfies tau_k = gamma * sigma_k, so for gamma > 0 the
pair shares signs wherever it is nonzero.

The step transform [[1, 0], [u_k, H]] keeps the first row of the accumulated
U equal to the first unit vector bitwise, which downstream consumers rely on
(the homogenized unit-row constraint passes through the transform unchanged).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import symlin
from ._kernels import lu_factor
from .errors import (
    DimensionMismatch,
    IdenticallySingularPencil,
    InputError,
    SubpencilSingular,
)

GAMMA_LOW = 0.5
GAMMA_HIGH = 1.5
GAMMA_DRAWS = 32
GAMMA_RETRIES = 8
EPS_BASE = 1e-4
EPS_LEVELS = 10
EPS_DRAWS = 3

TRIDIAG_TOL = 1e-10
TAIL_TOL = 1e-12
PIVOT_TOL = 1e-10
RESID_TOL = 1e-9


@dataclass
class TridiagStep:
    """Scalars produced while fixing one row: the transformed diagonal
    entries (xi, nu) and superdiagonal entries (tau, sigma) of the pair."""

    k: int
    xi: float
    tau: float
    nu: float
    sigma: float


@dataclass
class TridiagonalizationResult:
    U: np.ndarray
    rk: np.ndarray
    rm: np.ndarray
    gamma: float
    epsilon: float
    steps: list[TridiagStep] = field(default_factory=list)
    gamma_draws: int = 0

    @property
    def first_row_unit(self) -> bool:
        n = self.U.shape[0]
        return bool(self.U[0, 0] == 1.0 and not np.any(self.U[0, 1:])) if n else True

    def congruence_residuals(self, K, M) -> tuple[float, float]:
        """Max-norm defects of U^T K U = rk and U^T M U = rm, relative to
        the input scales (epsilon is the caller's to account for)."""
        K = symlin.as_symmetric(K, "K")
        M = symlin.as_symmetric(M, "M")
        rk_def = symlin.norm_max(self.U.T @ K @ self.U - self.rk)
        rm_def = symlin.norm_max(self.U.T @ M @ self.U - self.rm)
        return (rk_def / max(1.0, symlin.norm_max(K)),
                rm_def / max(1.0, symlin.norm_max(M)))


def _validated_pair(K, M) -> tuple[np.ndarray, np.ndarray]:
    K = symlin.as_symmetric(K, "K")
    M = symlin.as_symmetric(M, "M")
    if K.shape != M.shape:
        raise DimensionMismatch(f"pair members differ in shape: {K.shape} vs {M.shape}")
    return K, M


def _sample_gamma(K, M, rng, max_draws: int) -> tuple[float | None, int]:
    for draw in range(1, max_draws + 1):
        gamma = float(rng.uniform(GAMMA_LOW, GAMMA_HIGH))
        if symlin.pencil_nonsingular(K, M, gamma):
            return gamma, draw
    return None, max_draws


def choose_gamma(K, M, seed: int = 0, max_draws: int = GAMMA_DRAWS) -> float:
    """Positive evaluation point at which K - gamma*M is nonsingular.

    Nonsingularity can fail only on finitely many gamma unless the pencil is
    identically singular, so a handful of uniform draws from (0.5, 1.5)
    settles which case holds.
    """
    K, M = _validated_pair(K, M)
    rng = np.random.default_rng(seed)
    gamma, _ = _sample_gamma(K, M, rng, max_draws)
    if gamma is None:
        raise IdenticallySingularPencil(
            f"K - gamma*M tested singular at {max_draws} sampled gamma values"
        )
    return gamma


def tridiagonalize_pair(K, M, gamma: float) -> TridiagonalizationResult:
    """Run the elimination recursion at a fixed gamma.

    Step k operates on the trailing k x k blocks: u_k solves
    (K_sub - gamma*M_sub) u = gamma*m_tail - k_tail, which forces the two
    transformed tails onto a common direction; the reflector of that
    direction zeroes both beyond the superdiagonal. Raises SubpencilSingular
    when the step system has no trustworthy pivot (the caller may retry with
    a different gamma).
    """
    K, M = _validated_pair(K, M)
    if gamma <= 0.0:
        raise InputError("gamma must be positive")
    n = K.shape[0]
    scale = max(1.0, symlin.norm_max(K), symlin.norm_max(M))
    U = np.eye(n)
    RK = K.copy()
    RM = M.copy()
    steps: list[TridiagStep] = []

    for k in range(n, 1, -1):
        o = n - k
        A = RK[o:, o:]
        B = RM[o:, o:]
        a_tail = A[0, 1:].copy()
        b_tail = B[0, 1:].copy()
        if max(symlin.norm_max(a_tail), symlin.norm_max(b_tail)) <= TAIL_TOL * scale:
            steps.append(TridiagStep(k=k, xi=float(A[0, 0]), tau=0.0,
                                     nu=float(B[0, 0]), sigma=0.0))
            continue

        sys_mat = A[1:, 1:] - gamma * B[1:, 1:]
        rhs = gamma * b_tail - a_tail
        pivot_floor = PIVOT_TOL * max(1.0, symlin.norm_max(sys_mat))
        try:
            u, _ = symlin.solve_square(sys_mat, rhs, pivot_tol_abs=pivot_floor)
        except InputError:
            # A singular subpencil can still admit a collinearizing direction
            # when the right-hand side lies in its range. The least-squares
            # defect equals the residual v - gamma*w of the tail pair, so it
            # is acceptable exactly when it falls below the snap threshold.
            u = np.linalg.lstsq(sys_mat, rhs, rcond=None)[0]
            defect = symlin.norm_max(sys_mat @ u - rhs)
            if defect > TRIDIAG_TOL * max(1.0, scale):
                minpiv = lu_factor(sys_mat)[2]
                raise SubpencilSingular(k, float(minpiv)) from None

        v = a_tail + A[1:, 1:] @ u
        if float(np.linalg.norm(v)) == 0.0:
            H = np.eye(k - 1)
        else:
            H = symlin.householder_reflector(v)
        V = np.zeros((k, k))
        V[0, 0] = 1.0
        V[1:, 0] = u
        V[1:, 1:] = H

        U[:, o:] = U[:, o:] @ V
        # rows fixed earlier have tails tau*e1 in block coordinates; V's unit
        # first row maps those through exactly, so the explicit update is safe
        if o:
            RK[:o, o:] = RK[:o, o:] @ V
            RK[o:, :o] = RK[:o, o:].T
            RM[:o, o:] = RM[:o, o:] @ V
            RM[o:, :o] = RM[:o, o:].T
        newA = V.T @ A @ V
        newB = V.T @ B @ V
        RK[o:, o:] = 0.5 * (newA + newA.T)
        RM[o:, o:] = 0.5 * (newB + newB.T)
        steps.append(TridiagStep(k=k, xi=float(RK[o, o]), tau=float(RK[o, o + 1]),
                                 nu=float(RM[o, o]), sigma=float(RM[o, o + 1])))

    tol = TRIDIAG_TOL * scale
    RK[np.abs(RK) <= tol] = 0.0
    RM[np.abs(RM) <= tol] = 0.0
    return TridiagonalizationResult(U=U, rk=RK, rm=RM, gamma=float(gamma),
                                    epsilon=0.0, steps=steps)


def tridiagonalize_with_fallback(K, M, seed: int = 0) -> TridiagonalizationResult:
    """Tridiagonalize, shifting K by epsilon*I when every gamma is singular.

    The generic path draws gamma until the pencil is nonsingular and retries
    a few fresh draws on subpencil breakdown. An identically singular pencil
    (or exhausted retries) switches to the shifted pair (K + eps*I, M) at
    gamma = 1 with eps halving from 1e-4; the shift separates the coincident
    eigenvalues that made every gamma singular. The epsilon actually used is
    recorded on the result so callers can drive it toward zero themselves.
    """
    K, M = _validated_pair(K, M)
    rng = np.random.default_rng(seed)

    best: TridiagonalizationResult | None = None
    best_resid = np.inf
    gamma, total_draws = _sample_gamma(K, M, rng, GAMMA_DRAWS)
    if gamma is not None:
        for _ in range(GAMMA_RETRIES):
            try:
                result = tridiagonalize_pair(K, M, gamma)
            except SubpencilSingular:
                result = None
            if result is not None:
                result.gamma_draws = total_draws
                resid = max(result.congruence_residuals(K, M))
                if resid <= RESID_TOL:
                    return result
                # An ill-conditioned elimination inflates roundoff; keep the
                # cleanest congruence seen and try a fresh shift.
                if resid < best_resid:
                    best, best_resid = result, resid
            gamma, draws = _sample_gamma(K, M, rng, GAMMA_DRAWS)
            total_draws += draws
            if gamma is None:
                break
    if best is not None:
        return best

    last_error: Exception | None = None
    n = K.shape[0]
    for level in range(EPS_LEVELS):
        eps = EPS_BASE * 0.5**level
        shifted = K + eps * np.eye(n)
        candidates = [1.0]
        while len(candidates) < EPS_DRAWS:
            candidates.append(float(rng.uniform(GAMMA_LOW, GAMMA_HIGH)))
        for gamma in candidates:
            if not symlin.pencil_nonsingular(shifted, M, gamma):
                continue
            try:
                result = tridiagonalize_pair(shifted, M, gamma)
            except SubpencilSingular as exc:
                last_error = exc
                continue
            result.epsilon = eps
            result.gamma_draws = GAMMA_DRAWS
            resid = max(result.congruence_residuals(shifted, M))
            if resid <= RESID_TOL:
                return result
            if resid < best_resid:
                best, best_resid = result, resid
    if best is not None:
        return best
    if last_error is not None:
        raise last_error
    raise IdenticallySingularPencil(
        "no epsilon level produced a nonsingular shifted pencil"
    )
