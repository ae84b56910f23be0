"""Dense primal-dual interior-point solver for small structured SDPs.

Problem form (one dense PSD block plus a bank of scalar variables):

    minimize    <C, X> + lp_cost.u + free_cost.w
    subject to  <A_p, X> + (lp_cols u)_p + (free_cols w)_p  (<= | ==)  b_p
                X PSD,  u >= 0,  w free.

Internally every inequality row receives a nonnegative slack, giving an
equality form over (PSD block) x (nonnegative orthant) x (free vector).
Free variables are kept native rather than split into nonnegative parts: a
split bank has no strict dual interior (its two slack rows sum to zero on
the central path), which lets the primal run away along the direction the
barrier rewards. Directions are the scaled Newton steps of the central-path
equations with a predictor-corrector strategy; the Schur complement over
the multipliers is formed densely and factored by Cholesky, the free block
is appended as a bordered system solved through that factor, and escalating
regularization retries fall back to pure centering steps when positive
definiteness is lost.

The dual reported outward follows the convention

    maximize -b.y   s.t.   S = C + sum_p y_p A_p  PSD,  y_p >= 0 on <= rows,

so y is nonnegative on inequality rows and free on equality rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, symlin
from .errors import DimensionMismatch, InputError, SolverFailure, WrongShape

SENSE_LE = "le"
SENSE_EQ = "eq"

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_MAXITER = "max_iterations"
STATUS_NUMERICAL = "numerical_trouble"

GAP_TOL = 1e-8
RES_TOL = 1e-8
MU_TOL = 1e-9
MAX_ITER = 200
STEP_FRACTION = 0.98
RANK_TOL = 1e-6

FEAS_TOL = 1e-7
INFEAS_MARGIN = 1e-5
Y_CAP = 1e6

VERDICT_FEASIBLE = "feasible"
VERDICT_INFEASIBLE = "infeasible"
VERDICT_INCONCLUSIVE = "inconclusive"

MODE_ENTRY = "entry_interval"
MODE_SDP = "sdp"
MODE_CLOSED_FORM = "closed_form"


@dataclass
class SdpProblem:
    C: np.ndarray
    A: list[np.ndarray]
    b: np.ndarray
    sense: list[str]
    lp_cost: np.ndarray | None = None
    lp_cols: np.ndarray | None = None
    free_cost: np.ndarray | None = None
    free_cols: np.ndarray | None = None

    def __post_init__(self):
        self.C = symlin.as_symmetric(self.C, "C")
        nu = self.C.shape[0]
        self.A = [symlin.as_symmetric(a, f"A[{p}]") for p, a in enumerate(self.A)]
        for p, a in enumerate(self.A):
            if a.shape[0] != nu:
                raise DimensionMismatch(f"A[{p}] dimension {a.shape[0]} != {nu}")
        m = len(self.A)
        self.b = np.asarray(self.b, dtype=np.float64).ravel()
        if self.b.size != m or len(self.sense) != m:
            raise DimensionMismatch("row data lengths are inconsistent")
        for s in self.sense:
            if s not in (SENSE_LE, SENSE_EQ):
                raise InputError(f"unknown row sense {s!r}")
        for cost_name, cols_name in (("lp_cost", "lp_cols"), ("free_cost", "free_cols")):
            cost = getattr(self, cost_name)
            cols = getattr(self, cols_name)
            if (cost is None) != (cols is None):
                raise InputError(f"{cost_name} and {cols_name} must be given together")
            if cost is not None:
                cost = np.asarray(cost, dtype=np.float64).ravel()
                cols = np.asarray(cols, dtype=np.float64)
                if cols.ndim != 2 or cols.shape != (m, cost.size):
                    raise WrongShape(
                        f"{cols_name} must have shape ({m}, {cost.size}), got {cols.shape}"
                    )
                setattr(self, cost_name, cost)
                setattr(self, cols_name, cols)

    @property
    def nu(self) -> int:
        return self.C.shape[0]

    @property
    def n_rows(self) -> int:
        return len(self.A)


@dataclass
class IterateRecord:
    pobj: float
    dobj: float
    rp: float
    rd: float
    mu: float


@dataclass
class SdpSolution:
    status: str
    X: np.ndarray
    y: np.ndarray
    S: np.ndarray
    primal_obj: float
    dual_obj: float
    gap: float
    rank_X: int
    rank_S: int
    iterations: int
    mu: float
    lp_values: np.ndarray
    free_values: np.ndarray
    iterate_log: list[IterateRecord] = field(default_factory=list)
    centering_events: int = 0


def _closed_form(prob: SdpProblem, rank_tol: float) -> SdpSolution:
    # No rows: the optimum over the bare cone is 0 iff the objective is
    # PSD-side (C PSD, nonnegative scalar costs), else the problem recedes.
    nu = prob.nu
    bad = not symlin.psd_check(prob.C, 1e-9)
    if prob.lp_cost is not None and np.any(prob.lp_cost < 0):
        bad = True
    if prob.free_cost is not None and np.any(prob.free_cost != 0.0):
        bad = True
    k1 = prob.lp_cost.size if prob.lp_cost is not None else 0
    f = prob.free_cost.size if prob.free_cost is not None else 0
    if bad:
        status, obj = STATUS_UNBOUNDED, -np.inf
    else:
        status, obj = STATUS_OPTIMAL, 0.0
    X = np.zeros((nu, nu))
    S = prob.C.copy()
    return SdpSolution(
        status=status,
        X=X,
        y=np.zeros(0),
        S=S,
        primal_obj=obj,
        dual_obj=obj,
        gap=0.0,
        rank_X=0,
        rank_S=symlin.numerical_rank(S, rank_tol) if status == STATUS_OPTIMAL else 0,
        iterations=0,
        mu=0.0,
        lp_values=np.zeros(k1),
        free_values=np.zeros(f),
    )


def _max_step_psd(mat: np.ndarray, direction: np.ndarray) -> float | None:
    """Largest alpha with mat + alpha*direction PSD; None when mat left the cone."""
    try:
        L = np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        jitter = 1e-13 * (1.0 + float(np.trace(mat)) / mat.shape[0])
        try:
            L = np.linalg.cholesky(mat + jitter * np.eye(mat.shape[0]))
        except np.linalg.LinAlgError:
            return None
    T = np.linalg.solve(L, direction)
    W = np.linalg.solve(L, T.T)
    W = 0.5 * (W + W.T)
    w, _, ok = _kernels.eigh_sym(np.ascontiguousarray(W), 100 * W.shape[0] ** 2)
    if not ok:
        return None
    lam = float(w[0])
    if lam >= 0.0:
        return np.inf
    return min(-1.0 / lam, 1e16)


def _max_step_pos(u: np.ndarray, du: np.ndarray) -> float:
    neg = du < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-u[neg] / du[neg]))


def solve(
    prob: SdpProblem,
    gap_tol: float = GAP_TOL,
    res_tol: float = RES_TOL,
    mu_tol: float = MU_TOL,
    max_iter: int = MAX_ITER,
    step_fraction: float = STEP_FRACTION,
    rank_tol: float = RANK_TOL,
) -> SdpSolution:
    """Run the interior-point method; always returns a solution with a status."""
    nu = prob.nu
    m = prob.n_rows
    if m == 0:
        return _closed_form(prob, rank_tol)

    Astack = np.stack(prob.A)
    b = prob.b
    C = prob.C

    # Scalar bank layout: [user lp | slacks of <= rows]. Free variables are
    # not banked; they ride along as an unconstrained vector wf.
    k1 = prob.lp_cost.size if prob.lp_cost is not None else 0
    f = prob.free_cost.size if prob.free_cost is not None else 0
    le_rows = [p for p in range(m) if prob.sense[p] == SENSE_LE]
    k = k1 + len(le_rows)

    G = np.zeros((m, k))
    c = np.zeros(k)
    if k1:
        G[:, :k1] = prob.lp_cols
        c[:k1] = prob.lp_cost
    for idx, p in enumerate(le_rows):
        G[p, k1 + idx] = 1.0
    F = prob.free_cols if f else np.zeros((m, 0))
    c_free = prob.free_cost if f else np.zeros(0)

    rho = max(1.0, symlin.norm_max(C) + float(sum(symlin.norm_max(a) for a in prob.A)))
    X = rho * np.eye(nu)
    S = rho * np.eye(nu)
    u = np.full(k, rho)
    # Bank duals start at their cost level: with big-M costs (the y-cap
    # penalty) a flat start leaves a huge dual residual whose one-step
    # correction blows past every ratio test.
    su = np.maximum(rho, np.abs(c)) if k else np.full(k, rho)
    y = np.zeros(m)
    wf = np.zeros(f)
    mu0 = (float(np.tensordot(X, S)) + float(u @ su)) / (nu + k) if (nu + k) else 1.0

    scale_b = 1.0 + symlin.norm_max(b)
    scale_c = 1.0 + max(symlin.norm_max(C), symlin.norm_max(c), symlin.norm_max(c_free))

    status = STATUS_MAXITER
    log: list[IterateRecord] = []
    centering_events = 0
    it = 0

    def finish(st: str) -> SdpSolution:
        Xs = 0.5 * (X + X.T)
        Ss = 0.5 * (S + S.T)
        pobj = float(np.tensordot(C, Xs)) + float(c @ u) + float(c_free @ wf)
        dobj = float(b @ y)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj))
        mu_fin = (float(np.tensordot(Xs, Ss)) + float(u @ su)) / (nu + k)
        try:
            rank_x = symlin.numerical_rank(Xs, rank_tol)
            rank_s = symlin.numerical_rank(Ss, rank_tol)
        except Exception:  # noqa: BLE001 - diagnostics only
            rank_x = rank_s = -1
        return SdpSolution(
            status=st,
            X=Xs,
            y=-y,
            S=Ss,
            primal_obj=pobj,
            dual_obj=dobj,
            gap=gap,
            rank_X=rank_x,
            rank_S=rank_s,
            iterations=it,
            mu=mu_fin,
            lp_values=u[:k1].copy(),
            free_values=wf.copy(),
            iterate_log=log,
            centering_events=centering_events,
        )

    for it in range(1, max_iter + 1):
        finite = (
            np.all(np.isfinite(X))
            and np.all(np.isfinite(S))
            and np.all(np.isfinite(u))
            and np.all(np.isfinite(wf))
        )
        if not finite:
            return finish(STATUS_NUMERICAL)
        aX = np.einsum("pij,ij->p", Astack, X)
        rp = b - aX - (G @ u if k else 0.0) - (F @ wf if f else 0.0)
        Rd = C - S - np.einsum("p,pij->ij", y, Astack)
        rdu = c - su - G.T @ y if k else np.zeros(0)
        rf = c_free - F.T @ y if f else np.zeros(0)

        pobj = float(np.tensordot(C, X)) + float(c @ u) + float(c_free @ wf)
        dobj = float(b @ y)
        mu = (float(np.tensordot(X, S)) + float(u @ su)) / (nu + k)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj))
        rp_rel = symlin.norm_max(rp) / scale_b
        rd_rel = max(symlin.norm_max(Rd), symlin.norm_max(rdu), symlin.norm_max(rf)) / scale_c
        mu_rel = mu / max(1.0, mu0)
        log.append(IterateRecord(pobj=pobj, dobj=dobj, rp=rp_rel, rd=rd_rel, mu=mu))

        if relgap <= gap_tol and rp_rel <= res_tol and rd_rel <= res_tol and mu_rel <= mu_tol:
            return finish(STATUS_OPTIMAL)
        if dobj > 1e11 * scale_b and rd_rel < 1e-4:
            return finish(STATUS_INFEASIBLE)
        if pobj < -1e11 * scale_c and rp_rel < 1e-4:
            return finish(STATUS_UNBOUNDED)
        # exhausted complementarity alone is not a verdict: on badly scaled
        # but solvable problems the residual keeps contracting after mu
        # bottoms out, so only a stalled primal residual ends the run; a
        # residual already below res_tol is noise-floor jitter, not a stall
        rp_stalled = (
            rp_rel > res_tol and len(log) > 6 and rp_rel > 0.25 * log[-7].rp
        )
        if mu_rel <= mu_tol and rp_rel > 1e-6 and rp_stalled:
            return finish(STATUS_INFEASIBLE)
        if mu_rel <= mu_tol * 1e-2 and rp_stalled:
            return finish(STATUS_NUMERICAL)

        try:
            Sinv = np.linalg.inv(S)
        except np.linalg.LinAlgError:
            return finish(STATUS_NUMERICAL)
        Sinv = 0.5 * (Sinv + Sinv.T)

        AX = Astack @ X
        SiA = Sinv @ Astack  # broadcasts to (m, nu, nu): Sinv @ A_p
        B = np.einsum("pij,qij->pq", AX, SiA)
        B = 0.5 * (B + B.T)
        if k:
            ratio = u / su
            B = B + (G * ratio) @ G.T
        if f:
            # Exact augmentation: adding theta*F*(F^T dy = rf) to the first
            # block row leaves the solution unchanged but keeps B well
            # conditioned along range(F), where it is otherwise uncovered.
            theta = (1.0 + float(np.trace(B)) / m) / max(1.0, symlin.norm_max(F) ** 2)
            B = B + theta * (F @ F.T)
        else:
            theta = 0.0

        centering = False
        L_B = None
        reg = 1e-12 * (1.0 + float(np.trace(B)) / m)
        for attempt in range(4):
            shift = 0.0 if attempt == 0 else reg * (1e4 ** (attempt - 1))
            try:
                L_B = np.linalg.cholesky(B + shift * np.eye(m) if shift else B)
                if attempt > 0:
                    centering = True
                    centering_events += 1
                    B = B + shift * np.eye(m)
                break
            except np.linalg.LinAlgError:
                L_B = None
        if L_B is None:
            return finish(STATUS_NUMERICAL)

        if f:
            # Bordered system for the free block: eliminating dX and du from
            # the Newton equations leaves  B dy + F dwf = rhs,  F^T dy = rf,
            # solved through B's factor and the small Schur piece F^T B^-1 F.
            Wf = np.linalg.solve(L_B.T, np.linalg.solve(L_B, F))
            Mf = F.T @ Wf
        else:
            Wf = Mf = None

        aSinv = np.einsum("pij,ij->p", Astack, Sinv)
        XRd = X @ Rd
        N0 = XRd @ Sinv
        aXRdSi = np.einsum("pij,ji->p", Astack, N0)

        def directions(sigma_mu: float, corrX: np.ndarray | None, corru: np.ndarray | None):
            if k:
                corr_u = corru if corru is not None else 0.0
                base_u = (sigma_mu - u * su - corr_u) / su - u * rdu / su
                g_base = G @ base_u
            else:
                base_u = np.zeros(0)
                g_base = 0.0
            if corrX is not None:
                Nc = corrX @ Sinv
                aCorr = np.einsum("pij,ji->p", Astack, Nc)
            else:
                aCorr = 0.0
            rhs = rp - sigma_mu * aSinv + aX + aXRdSi + aCorr - g_base
            if f:
                rhs = rhs + theta * (F @ rf)
            z = np.linalg.solve(L_B, rhs)
            h = np.linalg.solve(L_B.T, z)
            if f:
                rhs_f = F.T @ h - rf
                try:
                    dwf = np.linalg.solve(Mf, rhs_f)
                except np.linalg.LinAlgError:
                    dwf = np.linalg.lstsq(Mf, rhs_f, rcond=None)[0]
                dy = h - Wf @ dwf
            else:
                dwf = np.zeros(0)
                dy = h
            Ady = np.einsum("q,qij->ij", dy, Astack)
            dS = Rd - Ady
            base_mat = corrX + XRd if corrX is not None else XRd
            dX = sigma_mu * Sinv - X - base_mat @ Sinv + X @ Ady @ Sinv
            dX = 0.5 * (dX + dX.T)
            if k:
                dsu = rdu - G.T @ dy
                du = base_u + (u / su) * (G.T @ dy)
            else:
                dsu = np.zeros(0)
                du = np.zeros(0)
            return dy, dX, dS, du, dsu, dwf

        if centering:
            dy, dX, dS, du, dsu, dwf = directions(mu, None, None)
        else:
            dy_a, dX_a, dS_a, du_a, dsu_a, _ = directions(0.0, None, None)
            ap_x = _max_step_psd(X, dX_a)
            ad_s = _max_step_psd(S, dS_a)
            if ap_x is None or ad_s is None:
                return finish(STATUS_NUMERICAL)
            ap = min(1.0, ap_x, _max_step_pos(u, du_a) if k else np.inf)
            ad = min(1.0, ad_s, _max_step_pos(su, dsu_a) if k else np.inf)
            Xa = X + ap * dX_a
            Sa = S + ad * dS_a
            mu_aff = (
                float(np.tensordot(Xa, Sa))
                + (float((u + ap * du_a) @ (su + ad * dsu_a)) if k else 0.0)
            ) / (nu + k)
            sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, 0.0, 1.0))
            dy, dX, dS, du, dsu, dwf = directions(
                sigma * mu, dX_a @ dS_a, du_a * dsu_a if k else None
            )

        ap_x = _max_step_psd(X, dX)
        ad_s = _max_step_psd(S, dS)
        if ap_x is None or ad_s is None:
            return finish(STATUS_NUMERICAL)
        ap = min(1.0, step_fraction * ap_x, step_fraction * (_max_step_pos(u, du) if k else np.inf))
        ad = min(1.0, step_fraction * ad_s, step_fraction * (_max_step_pos(su, dsu) if k else np.inf))

        X = 0.5 * ((X + ap * dX) + (X + ap * dX).T)
        S = 0.5 * ((S + ad * dS) + (S + ad * dS).T)
        y = y + ad * dy
        if k:
            u = u + ap * du
            su = su + ad * dsu
        if f:
            wf = wf + ap * dwf

    return finish(STATUS_MAXITER)


@dataclass
class Phase1Result:
    """Outcome of the pinned-entry feasibility test.

    verdict "infeasible" claims: no y in [0, y_cap]^m makes the family sum
    PSD with the pinned off-diagonal entry zero. mode records how it was
    decided: exact entry-interval arithmetic, closed form, or the SDP.
    """

    verdict: str
    t_star: float
    margin: float | None
    witness: np.ndarray | None
    mode: str
    y_cap: float
    entry: tuple[int, int]


def phase1_pinned_entry(
    mats,
    k: int,
    l: int,
    y_cap: float = Y_CAP,
    feas_tol: float = FEAS_TOL,
    infeas_margin: float = INFEAS_MARGIN,
) -> Phase1Result:
    """Decide feasibility of: y >= 0, M0 + sum_p y_p M_p PSD, pinned entry zero.

    mats is the family [M0, M1, ..., Mm]. The search is over the box
    0 <= y <= y_cap, which makes the infimum attained; an "infeasible"
    verdict is therefore relative to the cap (recorded in the result).

    The pinned-entry equation alone is decided first by exact interval
    arithmetic: the entry ranges over [sum of negative slopes, sum of
    positive slopes] * y_cap, and a target outside that interval refutes
    the whole system without any SDP solve.
    """
    family = [symlin.as_symmetric(mat, f"family[{p}]") for p, mat in enumerate(mats)]
    n = family[0].shape[0]
    for p, mat in enumerate(family):
        if mat.shape[0] != n:
            raise DimensionMismatch(f"family[{p}] dimension {mat.shape[0]} != {n}")
    if not (0 <= k < l < n):
        raise InputError(f"pinned entry ({k}, {l}) must satisfy 0 <= k < l < {n}")
    if y_cap <= 0:
        raise InputError("y_cap must be positive")
    m = len(family) - 1
    c0 = float(family[0][k, l])
    slopes = np.array([float(family[p][k, l]) for p in range(1, m + 1)])

    lo = y_cap * float(np.sum(np.minimum(slopes, 0.0)))
    hi = y_cap * float(np.sum(np.maximum(slopes, 0.0)))
    target = -c0
    dist = max(lo - target, target - hi, 0.0)
    if dist > 0.0:
        return Phase1Result(
            verdict=VERDICT_INFEASIBLE,
            t_star=np.inf,
            margin=dist,
            witness=None,
            mode=MODE_ENTRY,
            y_cap=y_cap,
            entry=(k, l),
        )

    if m == 0:
        t_star = -symlin.min_eigenvalue(family[0])
        return _classify_phase1(t_star, np.zeros(0), MODE_CLOSED_FORM, y_cap, (k, l),
                                feas_tol, infeas_margin)

    # Conjugate of: min t s.t. sum family + t I PSD, entry pinned, y boxed.
    # Engine variables: X (PSD, trace 1), box multipliers v >= 0, and a free
    # scalar dual to the pinned-entry equation. When every slope is zero that
    # equation is vacuous (the interval test already handled c0 != 0), so the
    # free scalar is dropped rather than left with an all-zero column.
    b = np.zeros(m + 1)
    b[m] = 1.0
    lp_cols = np.vstack([-np.eye(m), np.zeros((1, m))])
    if np.any(slopes != 0.0):
        free_cost = np.array([-c0])
        free_cols = np.concatenate([-slopes, [0.0]])[:, None]
    else:
        free_cost = None
        free_cols = None
    prob = SdpProblem(
        C=family[0],
        A=family[1:] + [np.eye(n)],
        b=b,
        sense=[SENSE_LE] * m + [SENSE_EQ],
        lp_cost=np.full(m, y_cap),
        lp_cols=lp_cols,
        free_cost=free_cost,
        free_cols=free_cols,
    )
    sol = solve(prob)
    if sol.status != STATUS_OPTIMAL:
        raise SolverFailure(f"pinned-entry phase 1 ended with solver status {sol.status}")
    t_star = -sol.primal_obj
    witness = np.clip(sol.y[:m], 0.0, y_cap)
    return _classify_phase1(t_star, witness, MODE_SDP, y_cap, (k, l), feas_tol, infeas_margin)


def _classify_phase1(t_star, witness, mode, y_cap, entry, feas_tol, infeas_margin):
    if t_star <= feas_tol:
        verdict = VERDICT_FEASIBLE
    elif t_star > infeas_margin:
        verdict = VERDICT_INFEASIBLE
    else:
        verdict = VERDICT_INCONCLUSIVE
    return Phase1Result(
        verdict=verdict,
        t_star=float(t_star),
        margin=float(t_star) if verdict == VERDICT_INFEASIBLE else None,
        witness=witness if verdict != VERDICT_INFEASIBLE else None,
        mode=mode,
        y_cap=y_cap,
        entry=entry,
    )
