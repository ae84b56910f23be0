"""Generalized trust-region subproblems solved through tridiagonalization.

A single quadratic inequality constraint admits a global solve: homogenize,
congruence-transform the pair of homogenized matrices to simultaneous
tridiagonal form, and the transformed problem certifies exact by the
sign-definite criterion, because every superdiagonal pair produced by the
transform satisfies tau_k = gamma * sigma_k with gamma > 0. The unit-row
matrix never interferes: it carries no off-diagonal entries, and the
transform leaves it fixed since the congruence keeps its first row at e1.

The solution of the transformed relaxation maps back through the transform
and is then re-polished against the original data, so tolerance losses in
the congruence and in the rank-one extraction do not reach the reported
point. When the matrix pencil was identically singular and the transform
ran on a shifted objective, a refinement loop re-solves at geometrically
smaller shifts until the recovered value stops moving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactness, model, sdp, tridiag
from .errors import DegenerateFirstCoordinate, RecoveryFailed, WrongArity

FEAS_TOL = 1e-6
VALUE_TOL = 1e-5
TRANSFORM_VERIFY_TOL = 1e-4
REFINE_LEVELS = 8
REFINE_REL_TOL = 1e-9


@dataclass
class GtrsResult:
    """Solution report for a single-constraint instance."""

    x: np.ndarray
    value: float
    certificate: exactness.ExactnessCertificate
    transform: tridiag.TridiagonalizationResult
    assumption: model.AssumptionB
    relaxation: float
    feasibility: float
    gamma: float
    epsilon: float
    polished: bool
    notes: list[str] = field(default_factory=list)

    @property
    def conditional(self) -> bool:
        return self.certificate.conditional


def _transformed_problem(
    res: tridiag.TridiagonalizationResult,
) -> model.HomogeneousQcqp:
    return model.HomogeneousQcqp(
        dim=res.rk.shape[0],
        qbar=[res.rk, res.rm],
        rhs=np.zeros(1),
        sense=[model.SENSE_LE],
        unit_mode=model.UNIT_EQUALITY,
        source=None,
        embedded=True,
    )


def _solve_transformed(
    inst: model.QcqpInstance,
    res: tridiag.TridiagonalizationResult,
    seed: int,
    x0: np.ndarray | None,
    max_iter: int,
) -> tuple[np.ndarray, exactness.ExactnessCertificate, exactness.RecoveredSolution]:
    """Certify and solve one transformed pencil; returns (x, cert, rel)."""
    h2 = _transformed_problem(res)
    y0 = None
    if x0 is not None:
        # A known feasible x maps to transformed coordinates through U; the
        # pinned first coordinate survives exactly because U's first row is
        # the first unit vector.
        y0 = np.linalg.solve(res.U, np.concatenate([[1.0], x0]))
    cert = exactness.certify(h2, check_feasibility=False, feasible_point=y0)
    rel = exactness.solve_certified(
        h2, cert, polish=False, verify_tol=TRANSFORM_VERIFY_TOL, seed=seed,
        max_iter=max_iter,
    )
    try:
        x = model.dehomogenize(res.U @ rel.z)
    except DegenerateFirstCoordinate as exc:
        raise RecoveryFailed(
            "transformed solve did not pin the homogenizing coordinate"
        ) from exc
    return x, cert, rel


def _polish(inst: model.QcqpInstance, x: np.ndarray) -> tuple[np.ndarray, bool]:
    from . import devtools

    scale = inst.data_scale()
    polished = devtools.polish_kkt(inst, x)
    if polished is None:
        return x, False
    if inst.max_violation(polished) > FEAS_TOL * scale:
        return x, False
    # The refinement must not drift uphill past its own tolerance.
    if inst.objective_value(polished) > inst.objective_value(x) + VALUE_TOL * scale:
        return x, False
    return polished, True


def _candidate_key(inst: model.QcqpInstance, x: np.ndarray) -> tuple[bool, float]:
    feasible = inst.max_violation(x) <= FEAS_TOL * inst.data_scale()
    return (not feasible, inst.objective_value(x))


def solve_gtrs(
    inst: model.QcqpInstance, seed: int = 0, max_iter: int = sdp.MAX_ITER
) -> GtrsResult:
    """Globally solve min x'Q0x + 2q0'x subject to one quadratic inequality.

    The pipeline certifies its own exactness on the transformed problem, so
    the returned value is the global optimum whenever the certificate is
    unconditional; with an unverified boundedness assumption the certificate
    is marked conditional and the value is best-effort.
    """
    if inst.m != 1:
        raise WrongArity(f"expected exactly one constraint, got {inst.m}")

    assumption = model.verify_assumption_b(inst)
    notes: list[str] = []
    if assumption.not_verified:
        notes.append(
            "no definite multiple of the constraint matrix; certificate is conditional"
        )

    from . import devtools

    try:
        x0 = devtools.find_feasible_point(inst)
    except Exception:  # noqa: BLE001 - search failure only downgrades the report
        x0 = None
        notes.append("no feasible point found; feasibility left unverified")

    h = model.homogenize_gtrs(inst)
    kbar, mbar = h.qbar[0], h.qbar[1]
    transform = tridiag.tridiagonalize_with_fallback(kbar, mbar, seed=seed)
    x, cert, rel = _solve_transformed(inst, transform, seed, x0, max_iter)
    x, polished = _polish(inst, x)

    epsilon = transform.epsilon
    if epsilon > 0.0:
        notes.append(f"pencil identically singular; solved with shift {epsilon:.3e}")
        x, transform, cert, rel, extra = _refine_shift(
            inst, kbar, mbar, transform, x, cert, rel, seed, x0, max_iter
        )
        epsilon = transform.epsilon
        notes.extend(extra)
        x, polished = _polish(inst, x)

    value = inst.objective_value(x)
    return GtrsResult(
        x=x,
        value=value,
        certificate=cert,
        transform=transform,
        assumption=assumption,
        relaxation=rel.relaxation,
        feasibility=inst.max_violation(x),
        gamma=transform.gamma,
        epsilon=epsilon,
        polished=polished,
        notes=notes,
    )


def _refine_shift(inst, kbar, mbar, transform, x, cert, rel, seed, x0, max_iter):
    """Re-solve at geometrically smaller objective shifts, keeping the best.

    Each level perturbs the homogenized objective less, so the recovered
    point tracks the true optimum; iteration stops once the value settles
    or a level fails to produce a usable pencil.
    """
    notes: list[str] = []
    best = (x, transform, cert, rel)
    best_key = _candidate_key(inst, x)
    dim = kbar.shape[0]
    eps = transform.epsilon
    for _ in range(REFINE_LEVELS):
        eps *= 0.5
        shifted = kbar + eps * np.eye(dim)
        try:
            gamma = tridiag.choose_gamma(shifted, mbar, seed=seed)
            res = tridiag.tridiagonalize_pair(shifted, mbar, gamma)
        except Exception:  # noqa: BLE001 - a failed level just ends refinement
            notes.append(f"shift refinement stopped at {eps:.3e}")
            break
        res.epsilon = eps
        try:
            cand, cand_cert, cand_rel = _solve_transformed(inst, res, seed, x0, max_iter)
        except Exception:  # noqa: BLE001 - a failed level just ends refinement
            notes.append(f"shift refinement stopped at {eps:.3e}")
            break
        cand, _ = _polish(inst, cand)
        key = _candidate_key(inst, cand)
        moved = abs(key[1] - best_key[1]) > REFINE_REL_TOL * (1.0 + abs(best_key[1]))
        if key < best_key:
            best = (cand, res, cand_cert, cand_rel)
            best_key = key
        if not moved:
            break
    return (*best, notes)
