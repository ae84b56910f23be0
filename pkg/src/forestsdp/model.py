"""QCQP instances, homogenization, and the positive-combination assumption check.

An instance is

    minimize    x^T Q[0] x + 2 q[0]^T x
    subject to  x^T Q[p] x + 2 q[p]^T x  (<= | ==)  b[p-1],   p = 1..m.

Homogenization embeds this into a pure-quadratic problem in dimension n+1
whose extra coordinate is pinned to +-1; two variants exist (general, and
the single-constraint trust-region form with the right-hand side folded
into the matrix corner). Equalities are stored with a sense flag and only
expanded into inequality pairs at the solver/analysis boundary, so
single-equality structure stays recognizable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import sdp, symlin
from .errors import (
    DegenerateFirstCoordinate,
    DimensionMismatch,
    InputError,
    WrongArity,
)

SENSE_LE = "le"
SENSE_EQ = "eq"

DEHOM_TOL = 1e-8
PD_TOL = 1e-7

UNIT_PAIR = "pair"
UNIT_EQUALITY = "equality"
UNIT_NONE = "none"


def _as_vector(v, n: int, name: str) -> np.ndarray:
    a = np.asarray(v, dtype=np.float64).ravel()
    if a.size != n:
        raise DimensionMismatch(f"{name} must have length {n}, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite entries")
    return a


@dataclass
class QcqpInstance:
    """Validated QCQP data. Q[0]/q[0] is the objective; Q[p]/q[p]/b[p-1] row p."""

    Q: list[np.ndarray]
    q: list[np.ndarray]
    b: np.ndarray
    sense: list[str]

    def __post_init__(self):
        if len(self.Q) == 0:
            raise InputError("instance needs at least an objective matrix")
        self.Q = [symlin.as_symmetric(m, f"Q[{p}]") for p, m in enumerate(self.Q)]
        n = self.Q[0].shape[0]
        for p, m in enumerate(self.Q):
            if m.shape[0] != n:
                raise DimensionMismatch(f"Q[{p}] has dimension {m.shape[0]}, expected {n}")
        if len(self.q) != len(self.Q):
            raise DimensionMismatch(
                f"expected {len(self.Q)} linear terms, got {len(self.q)}"
            )
        self.q = [_as_vector(v, n, f"q[{p}]") for p, v in enumerate(self.q)]
        m_count = len(self.Q) - 1
        self.b = _as_vector(self.b, m_count, "b")
        if len(self.sense) != m_count:
            raise DimensionMismatch(f"expected {m_count} sense flags, got {len(self.sense)}")
        for s in self.sense:
            if s not in (SENSE_LE, SENSE_EQ):
                raise InputError(f"unknown constraint sense {s!r} (use 'le' or 'eq')")

    @property
    def n(self) -> int:
        return self.Q[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.Q) - 1

    def objective_value(self, x) -> float:
        x = _as_vector(x, self.n, "x")
        return float(x @ self.Q[0] @ x + 2.0 * self.q[0] @ x)

    def constraint_values(self, x) -> np.ndarray:
        x = _as_vector(x, self.n, "x")
        return np.array(
            [float(x @ self.Q[p] @ x + 2.0 * self.q[p] @ x) for p in range(1, self.m + 1)]
        )

    def violations(self, x) -> np.ndarray:
        """Per-constraint violation: max(0, g - b) for <=, |g - b| for ==."""
        vals = self.constraint_values(x)
        out = np.empty(self.m)
        for p in range(self.m):
            r = vals[p] - self.b[p]
            out[p] = abs(r) if self.sense[p] == SENSE_EQ else max(0.0, r)
        return out

    def max_violation(self, x) -> float:
        return float(np.max(self.violations(x))) if self.m else 0.0

    def is_homogeneous(self) -> bool:
        return all(not np.any(v) for v in self.q)

    def expanded_inequalities(self) -> list[tuple[np.ndarray, np.ndarray, float]]:
        """Constraint triples (Q, q, b) with equalities expanded into +- pairs."""
        out = []
        for p in range(1, self.m + 1):
            out.append((self.Q[p], self.q[p], float(self.b[p - 1])))
            if self.sense[p - 1] == SENSE_EQ:
                out.append((-self.Q[p], -self.q[p], -float(self.b[p - 1])))
        return out

    def data_scale(self) -> float:
        s = max(symlin.norm_max(m) for m in self.Q)
        s = max(s, max((symlin.norm_max(v) for v in self.q), default=0.0))
        s = max(s, symlin.norm_max(self.b))
        return max(1.0, s)


@dataclass
class HomogeneousQcqp:
    """Pure-quadratic problem in dimension dim with optional first-coordinate pinning.

    qbar[0] is the objective; qbar[1:] pair with rhs/sense as data rows.
    unit_mode describes how z_1^2 = 1 is represented: "pair" (two opposed
    inequality rows on the corner unit matrix), "equality" (one equality
    row, trust-region variant), or "none" (no pinning; the problem was
    already pure-quadratic and is used as-is).
    """

    dim: int
    qbar: list[np.ndarray]
    rhs: np.ndarray
    sense: list[str]
    unit_mode: str
    source: QcqpInstance | None = None
    embedded: bool = False

    def __post_init__(self):
        self.qbar = [symlin.as_symmetric(m, f"qbar[{p}]") for p, m in enumerate(self.qbar)]
        for p, m in enumerate(self.qbar):
            if m.shape[0] != self.dim:
                raise DimensionMismatch(f"qbar[{p}] has dimension {m.shape[0]}, expected {self.dim}")
        self.rhs = np.asarray(self.rhs, dtype=np.float64).ravel()
        if self.rhs.size != len(self.qbar) - 1 or len(self.sense) != self.rhs.size:
            raise DimensionMismatch("homogeneous row data lengths are inconsistent")
        if self.unit_mode not in (UNIT_PAIR, UNIT_EQUALITY, UNIT_NONE):
            raise InputError(f"unknown unit mode {self.unit_mode!r}")

    @property
    def objective(self) -> np.ndarray:
        return self.qbar[0]

    def unit_matrix(self) -> np.ndarray:
        e = np.zeros((self.dim, self.dim))
        e[0, 0] = 1.0
        return e

    def constraint_rows(self) -> list[tuple[np.ndarray, float, str]]:
        """All rows including the first-coordinate pinning, senses preserved."""
        rows = [
            (self.qbar[p + 1], float(self.rhs[p]), self.sense[p])
            for p in range(len(self.sense))
        ]
        if self.unit_mode == UNIT_PAIR:
            e = self.unit_matrix()
            rows.append((e, 1.0, SENSE_LE))
            rows.append((-e, -1.0, SENSE_LE))
        elif self.unit_mode == UNIT_EQUALITY:
            rows.append((self.unit_matrix(), 1.0, SENSE_EQ))
        return rows

    def expanded_row_matrices(self) -> list[np.ndarray]:
        """Row matrices with every equality expanded into a (M, -M) pair.

        This is the inequality-only view the dual-side machinery works on:
        S(y) = objective + sum_p y_p * (p-th matrix here), y >= 0.
        """
        out = []
        for mat, _rhs, sense in self.constraint_rows():
            out.append(mat)
            if sense == SENSE_EQ:
                out.append(-mat)
        return out

    def family_matrices(self) -> list[np.ndarray]:
        """Objective followed by the expanded row matrices."""
        return [self.qbar[0]] + self.expanded_row_matrices()

    def objective_of(self, z) -> float:
        z = _as_vector(z, self.dim, "z")
        return float(z @ self.qbar[0] @ z)

    def max_violation(self, z) -> float:
        z = _as_vector(z, self.dim, "z")
        worst = 0.0
        for mat, rhs, sense in self.constraint_rows():
            r = float(z @ mat @ z) - rhs
            v = abs(r) if sense == SENSE_EQ else max(0.0, r)
            worst = max(worst, v)
        return worst


def _embed(mat: np.ndarray, vec: np.ndarray, corner: float) -> np.ndarray:
    n = mat.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[0, 0] = corner
    out[0, 1:] = vec
    out[1:, 0] = vec
    out[1:, 1:] = mat
    return out


def homogenize(inst: QcqpInstance) -> HomogeneousQcqp:
    """General embedding: zero corners, linear terms moved to the border row.

    The first coordinate is pinned by an opposed pair of unit-matrix rows.
    """
    qbar = [_embed(inst.Q[p], inst.q[p], 0.0) for p in range(inst.m + 1)]
    return HomogeneousQcqp(
        dim=inst.n + 1,
        qbar=qbar,
        rhs=inst.b.copy(),
        sense=list(inst.sense),
        unit_mode=UNIT_PAIR,
        source=inst,
        embedded=True,
    )


def homogenize_gtrs(inst: QcqpInstance) -> HomogeneousQcqp:
    """Trust-region embedding: the right-hand side moves into the corner.

    Produces the single row z^T qbar[1] z <= 0 plus the unit equality row.
    Requires exactly one inequality constraint.
    """
    if inst.m != 1:
        raise WrongArity(f"trust-region embedding needs exactly one constraint, got {inst.m}")
    if inst.sense[0] != SENSE_LE:
        raise InputError("trust-region embedding expects an inequality constraint")
    q0 = _embed(inst.Q[0], inst.q[0], 0.0)
    q1 = _embed(inst.Q[1], inst.q[1], -float(inst.b[0]))
    return HomogeneousQcqp(
        dim=inst.n + 1,
        qbar=[q0, q1],
        rhs=np.zeros(1),
        sense=[SENSE_LE],
        unit_mode=UNIT_EQUALITY,
        source=inst,
        embedded=True,
    )


def as_homogeneous(inst: QcqpInstance) -> HomogeneousQcqp:
    """Pure-quadratic instances pass through unchanged; others are embedded.

    The pass-through avoids a spurious isolated vertex: embedding a problem
    with zero linear terms would add a coordinate disconnected from every
    other, needlessly sending the certification down the disconnected path.
    """
    if inst.is_homogeneous():
        return HomogeneousQcqp(
            dim=inst.n,
            qbar=[m.copy() for m in inst.Q],
            rhs=inst.b.copy(),
            sense=list(inst.sense),
            unit_mode=UNIT_NONE,
            source=inst,
            embedded=False,
        )
    return homogenize(inst)


def dehomogenize(z, tol: float = DEHOM_TOL) -> np.ndarray:
    """Scale out the pinned coordinate: (z_2/z_1, ..., z_{n+1}/z_1)."""
    z = np.asarray(z, dtype=np.float64).ravel()
    if z.size < 2:
        raise InputError("dehomogenization needs at least two coordinates")
    if abs(z[0]) < tol:
        raise DegenerateFirstCoordinate(
            f"first coordinate {z[0]:.3e} below {tol:.1e}; the unit rows were not enforced"
        )
    return z[1:] / z[0]


@dataclass(frozen=True)
class AssumptionB:
    """Outcome of the positive-combination search over constraint matrices.

    found is True when some convex weights make the weighted sum strictly
    definite; flipped marks the negative-definite orientation (weights then
    certify a *concave* combination, still enough to bound the feasible set).
    """

    found: bool
    witness: np.ndarray | None
    t_star: float
    flipped: bool
    status: str

    @property
    def not_verified(self) -> bool:
        return not self.found


def psd_combination_witness(mats, pd_tol: float = PD_TOL) -> AssumptionB:
    """Search for convex weights y with sum_p y_p M_p strictly positive definite.

    Tries the given orientation first, then the sign-flipped family. The
    reported t_star is the smallest eigenvalue achieved by the returned
    weights (recomputed from the weights, not trusted from the solver).
    """
    mats = [symlin.as_symmetric(m, f"member[{p}]") for p, m in enumerate(mats)]
    if len(mats) == 0:
        return AssumptionB(False, None, -np.inf, False, "no constraint matrices")

    best: tuple[float, np.ndarray, bool] | None = None
    status = "ok"
    for flipped in (False, True):
        family = [-m for m in mats] if flipped else mats
        try:
            y, t = _max_min_eig_combination(family, pd_tol)
        except Exception as exc:  # noqa: BLE001 - advisory check, never fatal
            status = f"solver failed: {exc}"
            continue
        if best is None or t > best[0]:
            best = (t, y, flipped)
        if t > pd_tol:
            return AssumptionB(True, y, t, flipped, "ok")
    if best is None:
        return AssumptionB(False, None, -np.inf, False, status)
    t, y, flipped = best
    return AssumptionB(False, y, t, flipped, status)


def _max_min_eig_combination(mats, pd_tol: float) -> tuple[np.ndarray, float]:
    m = len(mats)
    nu = mats[0].shape[0]
    if m == 1:
        y = np.ones(1)
        return y, symlin.min_eigenvalue(mats[0])
    # max t s.t. sum y M >= t I, sum y = 1, y >= 0, posed through its conjugate:
    # min w s.t. <M_p, X> <= w, tr X = 1, X PSD.
    b = np.zeros(m + 1)
    b[m] = 1.0
    prob = sdp.SdpProblem(
        C=np.zeros((nu, nu)),
        A=list(mats) + [np.eye(nu)],
        b=b,
        sense=[sdp.SENSE_LE] * m + [sdp.SENSE_EQ],
        free_cost=np.array([1.0]),
        free_cols=np.vstack([-np.ones((m, 1)), np.zeros((1, 1))]),
    )
    sol = sdp.solve(prob)
    if sol.status != sdp.STATUS_OPTIMAL:
        raise InputError(f"combination search ended with status {sol.status}")
    y = np.clip(sol.y[:m], 0.0, None)
    total = float(np.sum(y))
    y = y / total if total > 0 else np.full(m, 1.0 / m)
    combo = sum(w * mat for w, mat in zip(y, mats))
    return y, symlin.min_eigenvalue(combo)


def verify_assumption_b(inst: QcqpInstance, pd_tol: float = PD_TOL) -> AssumptionB:
    """Decide whether some nonnegative constraint combination is strictly definite.

    Success bounds the feasible set by an ellipsoid; failure downgrades any
    exactness certificate to conditional rather than blocking it.
    """
    if inst.m < 1:
        raise WrongArity("the combination check needs at least one constraint")
    return psd_combination_witness([t[0] for t in inst.expanded_inequalities()], pd_tol)
