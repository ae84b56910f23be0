"""Verification oracles and random instance generators.

Everything in this module is test support: brute-force global optimization
for small instances, structured random QCQP generators, feasibility search,
KKT polishing, and a randomized audit of pinned-entry infeasibility claims.
It deliberately avoids the certification modules so its answers stay
independent of the code they are used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model, symlin
from .errors import CycleDetected, InputError, NoFeasiblePointFound

SHAPE_TRIDIAGONAL = "tridiagonal"
SHAPE_ARROW = "arrow"
SHAPE_RANDOM_TREE = "random_tree"
SHAPE_RANDOM_FOREST = "random_forest"
SHAPES = (SHAPE_TRIDIAGONAL, SHAPE_ARROW, SHAPE_RANDOM_TREE, SHAPE_RANDOM_FOREST)

DEFAULT_BUDGET = 2000
RHO_SCHEDULE = (1e1, 1e3, 1e5, 1e7)
DESCENT_ITERS = 150
FEAS_TOL = 1e-8


@dataclass(frozen=True)
class OracleResult:
    """Best point found by a brute-force search."""

    value: float
    x: np.ndarray
    max_violation: float
    n_feasible: int


@dataclass(frozen=True)
class AuditResult:
    """Outcome of the randomized pinned-entry feasibility audit.

    passed means no sampled y on the entry hyperplane produced a PSD slack
    matrix. A vacuous pass (no sample survived the hyperplane filter) still
    counts: it happens exactly when the box has no room on the hyperplane.
    """

    passed: bool
    n_samples: int
    n_tested: int
    n_witnesses: int
    worst_rel_lambda_min: float | None
    vacuous: bool


# ---------------------------------------------------------------------------
# random generators


def _normalized_edges(n: int, edges) -> list[tuple[int, int]]:
    out = []
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise InputError(f"edge {(i, j)} is not an off-diagonal position for dimension {n}")
        out.append((min(i, j), max(i, j)))
    return out


def _assert_acyclic(n: int, edges) -> None:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            raise CycleDetected(f"edge {(i, j)} closes a cycle")
        parent[ri] = rj


def random_psd_forest_matrix(n: int, tree_edges, seed: int = 0) -> np.ndarray:
    """A random PSD matrix whose off-diagonal support is exactly the given forest.

    Built as a sum of rank-one terms w*(e_i + s*e_j)(e_i + s*e_j)^T over the
    edges (weights in (0.1, 1), signs +-1) plus a nonnegative diagonal in
    [0, 0.5], so positive semidefiniteness holds by construction.
    """
    if n < 1:
        raise InputError("dimension must be at least 1")
    edges = _normalized_edges(n, tree_edges)
    _assert_acyclic(n, edges)
    rng = np.random.default_rng(seed)
    mat = np.zeros((n, n))
    for i, j in edges:
        w = rng.uniform(0.1, 1.0)
        s = 1.0 if rng.random() < 0.5 else -1.0
        v = np.zeros(n)
        v[i] = 1.0
        v[j] = s
        mat += w * np.outer(v, v)
    mat[np.diag_indices(n)] += rng.uniform(0.0, 0.5, size=n)
    return mat


def _random_tree_edges(vertices, rng) -> list[tuple[int, int]]:
    vs = list(vertices)
    out = []
    for k in range(1, len(vs)):
        p = vs[int(rng.integers(0, k))]
        out.append((min(p, vs[k]), max(p, vs[k])))
    return out


def _shape_edges(n, shape, rng, n_components) -> list[tuple[int, int]]:
    if shape == SHAPE_TRIDIAGONAL:
        return [(i, i + 1) for i in range(n - 1)]
    if shape == SHAPE_ARROW:
        return [(i, n - 1) for i in range(n - 1)]
    if shape == SHAPE_RANDOM_TREE:
        return _random_tree_edges(range(n), rng)
    if shape == SHAPE_RANDOM_FOREST:
        k = 2 if n_components is None else int(n_components)
        if k < 1:
            raise InputError("n_components must be positive")
        if n < 2 * k:
            raise InputError(f"need n >= {2 * k} for {k} components with at least one edge each")
        sizes = np.full(k, 2)
        for _ in range(n - 2 * k):
            sizes[int(rng.integers(0, k))] += 1
        edges, start = [], 0
        for size in sizes:
            edges.extend(_random_tree_edges(range(start, start + size), rng))
            start += size
        return edges
    raise InputError(f"unknown shape {shape!r}; expected one of {SHAPES}")


def random_forest_qcqp(
    n: int,
    m: int,
    shape: str,
    sign_definite: bool,
    seed: int = 0,
    n_components: int | None = None,
) -> model.QcqpInstance:
    """A random forest-patterned QCQP: m pattern constraints plus a unit ball.

    All linear terms are zero and every right-hand side is positive, so the
    origin is strictly feasible; the appended ball row (identity matrix,
    bound 1) keeps the feasible set bounded. When sign_definite, each edge
    carries one random sign shared by the objective and every constraint,
    with roughly 20% of constraint edge entries zeroed; the objective edge
    entries are kept away from zero so the aggregate pattern is exactly the
    requested shape.
    """
    if n < 2:
        raise InputError("need n >= 2")
    if m < 1:
        raise InputError("need m >= 1")
    rng = np.random.default_rng(seed)
    edges = _shape_edges(n, shape, rng, n_components)
    edge_sign = {e: (1.0 if rng.random() < 0.5 else -1.0) for e in edges}

    mats = []
    for p in range(m + 1):
        mat = np.zeros((n, n))
        for e in edges:
            if p == 0:
                mag = 0.2 + abs(rng.standard_normal())
            else:
                mag = abs(rng.standard_normal())
                if rng.random() < 0.2:
                    mag = 0.0
            sign = edge_sign[e] if sign_definite else (1.0 if rng.random() < 0.5 else -1.0)
            i, j = e
            mat[i, j] = mat[j, i] = sign * mag
        if p == 0:
            mat[np.diag_indices(n)] = rng.uniform(-1.0, 0.5, size=n)
        else:
            mat[np.diag_indices(n)] = rng.uniform(-0.5, 1.0, size=n)
        mats.append(mat)
    mats.append(np.eye(n))

    b = np.concatenate([rng.uniform(0.5, 1.5, size=m), [1.0]])
    q = [np.zeros(n) for _ in range(m + 2)]
    return model.QcqpInstance(Q=mats, q=q, b=b, sense=[model.SENSE_LE] * (m + 1))


# ---------------------------------------------------------------------------
# bounded-region derivation and batched penalty descent


def _bounding_ellipsoid(inst: model.QcqpInstance):
    """Center, axis frame, and semi-axis lengths of a feasible-set cover.

    Uses a nonnegative constraint combination with positive definite
    quadratic part: every feasible x satisfies x'Px + 2v'x <= c, an
    ellipsoid. Only the unflipped orientation bounds anything (the flipped
    one covers the exterior of an ellipsoid), so it is rejected here.
    """
    ab = model.verify_assumption_b(inst)
    if not ab.found or ab.flipped:
        raise InputError(
            "the feasible region could not be bounded from the constraints; "
            "pass an explicit box"
        )
    triples = inst.expanded_inequalities()
    y = ab.witness
    P = sum(w * t[0] for w, t in zip(y, triples))
    v = sum(w * t[1] for w, t in zip(y, triples))
    c = float(sum(w * t[2] for w, t in zip(y, triples)))
    lam, vecs = np.linalg.eigh(P)
    if lam[0] <= 0.0:
        raise InputError("the constraint combination is not positive definite")
    center = -vecs @ ((vecs.T @ v) / lam)
    r2 = c - float(v @ center)
    if r2 < 0.0:
        raise NoFeasiblePointFound("the bounding ellipsoid is empty")
    radii = np.sqrt(max(r2, 0.0) / lam)
    return center, vecs, radii


def _ellipsoid_box(center, vecs, radii):
    half = np.sqrt(np.sum((vecs * radii) ** 2, axis=1))
    return center - half, center + half


def _sample_region(inst, box, n_points, rng):
    """Starting points inside the explicit box or the derived ellipsoid."""
    n = inst.n
    if box is not None:
        if np.isscalar(box):
            lo, hi = np.full(n, -float(box)), np.full(n, float(box))
        else:
            lo = np.asarray(box[0], dtype=float)
            hi = np.asarray(box[1], dtype=float)
            if lo.shape != (n,) or hi.shape != (n,):
                raise InputError("box must be a scalar half-width or a (lo, hi) vector pair")
        return lo + (hi - lo) * rng.random((n_points, n))
    center, vecs, radii = _bounding_ellipsoid(inst)
    u = rng.standard_normal((n_points, n))
    u /= np.maximum(np.linalg.norm(u, axis=1, keepdims=True), 1e-300)
    u *= rng.random((n_points, 1)) ** (1.0 / n)
    return center + (u * radii) @ vecs.T


def _stacked_data(inst: model.QcqpInstance):
    qs = np.stack(inst.Q)
    ls = np.stack(inst.q)
    rhs = np.concatenate([[0.0], inst.b])
    eq_mask = np.array([False] + [s == model.SENSE_EQ for s in inst.sense])
    return qs, ls, rhs, eq_mask


def _batched_values(qs, ls, pts):
    return np.einsum("ki,pij,kj->kp", pts, qs, pts, optimize=True) + 2.0 * pts @ ls.T


def _penalty_descent(inst, pts, rho_schedule, iters, minimize_objective=True):
    """Adaptive-step gradient descent on objective + rho * squared violations.

    Fully batched over starting points; each start keeps its own step size,
    growing it on accepted moves and shrinking on rejected ones.
    """
    qs, ls, rhs, eq_mask = _stacked_data(inst)
    obj_weight = 1.0 if minimize_objective else 0.0
    span = max(1.0, float(np.max(np.abs(pts))) if pts.size else 1.0)

    def resid(vals):
        r = vals[:, 1:] - rhs[1:]
        le = ~eq_mask[1:]
        r[:, le] = np.maximum(r[:, le], 0.0)
        return r

    def phi(vals, rho):
        return obj_weight * vals[:, 0] + rho * np.sum(resid(vals) ** 2, axis=1)

    for rho in rho_schedule:
        step = np.full(pts.shape[0], 0.05 * span)
        vals = _batched_values(qs, ls, pts)
        cur = phi(vals, rho)
        for _ in range(iters):
            r = resid(vals)
            grad = 4.0 * rho * (
                np.einsum("kp,pij,kj->ki", r, qs[1:], pts, optimize=True) + r @ ls[1:]
            )
            if obj_weight:
                grad += 2.0 * (pts @ qs[0] + ls[0])
            trial = pts - step[:, None] * grad
            tvals = _batched_values(qs, ls, trial)
            tcur = phi(tvals, rho)
            better = tcur < cur
            pts = np.where(better[:, None], trial, pts)
            vals = np.where(better[:, None], tvals, vals)
            cur = np.where(better, tcur, cur)
            step = np.clip(np.where(better, step * 1.3, step * 0.5), 1e-14, 1e3 * span)
    return pts


def _restore_feasibility(inst, x, iters=30, tol=FEAS_TOL):
    """Gauss-Newton steps on the violated constraint residuals."""
    x = np.asarray(x, dtype=float).copy()
    for _ in range(iters):
        vals = inst.constraint_values(x)
        rows, res = [], []
        for p in range(inst.m):
            r = vals[p] - inst.b[p]
            if inst.sense[p] == model.SENSE_EQ or r > tol:
                rows.append(p)
                res.append(r)
        if not rows:
            return x
        jac = np.stack([2.0 * (inst.Q[p + 1] @ x + inst.q[p + 1]) for p in rows])
        res = np.array(res)
        dx = np.linalg.lstsq(jac, -res, rcond=None)[0]
        base = float(np.sum(res**2))
        t = 1.0
        while t > 1e-10:
            trial = x + t * dx
            viol = inst.violations(trial)
            if float(np.sum(viol**2)) < base:
                x = trial
                break
            t *= 0.5
        else:
            return x
    return x


# ---------------------------------------------------------------------------
# oracles


def polish_kkt(inst: model.QcqpInstance, x, y0=None, iters: int = 25,
               active_tol: float = 1e-6):
    """Newton refinement of a near-optimal point on its active-set KKT system.

    The active set is fixed up front: equality rows, inequality rows within
    active_tol of their bound, and rows flagged by a positive dual estimate
    y0. The Newton iteration tracks the best-residual iterate and returns
    it, or None when the linear algebra breaks down.
    """
    x = np.asarray(x, dtype=float).copy()
    if x.shape != (inst.n,):
        raise InputError(f"x has shape {x.shape}, expected ({inst.n},)")
    vals = inst.constraint_values(x)
    active = []
    for p in range(inst.m):
        near = vals[p] - inst.b[p] >= -active_tol * (1.0 + abs(inst.b[p]))
        flagged = y0 is not None and p < len(y0) and y0[p] > 1e-7
        if inst.sense[p] == model.SENSE_EQ or near or flagged:
            active.append(p)
    k = len(active)

    def gradients(x):
        return np.stack([2.0 * (inst.Q[p + 1] @ x + inst.q[p + 1]) for p in active]) if k else np.zeros((0, inst.n))

    def residual(x, y):
        grad = 2.0 * (inst.Q[0] @ x + inst.q[0])
        cols = gradients(x)
        if k:
            grad = grad + cols.T @ y
        cons = np.array([
            float(x @ inst.Q[p + 1] @ x + 2.0 * inst.q[p + 1] @ x - inst.b[p]) for p in active
        ])
        return np.concatenate([grad, cons])

    cols = gradients(x)
    if k:
        y = np.linalg.lstsq(cols.T, -2.0 * (inst.Q[0] @ x + inst.q[0]), rcond=None)[0]
        for idx, p in enumerate(active):
            if inst.sense[p] == model.SENSE_LE:
                y[idx] = max(y[idx], 0.0)
    else:
        y = np.zeros(0)

    fvec = residual(x, y)
    best_x, best_r = x.copy(), float(np.max(np.abs(fvec)))
    for _ in range(iters):
        hess = 2.0 * inst.Q[0].copy()
        for idx, p in enumerate(active):
            hess += 2.0 * y[idx] * inst.Q[p + 1]
        cols = gradients(x)
        jac = np.zeros((inst.n + k, inst.n + k))
        jac[: inst.n, : inst.n] = hess
        if k:
            jac[: inst.n, inst.n :] = cols.T
            jac[inst.n :, : inst.n] = cols
        try:
            d = np.linalg.solve(jac, -fvec)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(jac, -fvec, rcond=None)[0]
        norm0 = float(np.max(np.abs(fvec)))
        t, moved = 1.0, False
        while t > 1e-7:
            xt = x + t * d[: inst.n]
            yt = y + t * d[inst.n :]
            ft = residual(xt, yt)
            if float(np.max(np.abs(ft))) < (1.0 - 0.25 * t) * norm0:
                x, y, fvec, moved = xt, yt, ft, True
                break
            t *= 0.5
        if not moved:
            break
        r = float(np.max(np.abs(fvec)))
        if r < best_r:
            best_x, best_r = x.copy(), r
        if r <= 1e-13 * inst.data_scale():
            break
    if not np.all(np.isfinite(best_x)):
        return None
    return best_x


def brute_force_qcqp(
    inst: model.QcqpInstance,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    box=None,
) -> OracleResult:
    """Multistart penalized descent over the bounded feasible region.

    A lower-confidence global oracle: `budget` starts sampled inside the
    bounding ellipsoid (or the given box), pushed through an escalating
    penalty schedule, with the best few candidates polished on their KKT
    systems. Correct up to multistart coverage; intended for n <= 6.
    """
    if inst.n > 6:
        raise InputError("brute force oracle is limited to n <= 6")
    if budget < 1:
        raise InputError("budget must be positive")
    rng = np.random.default_rng(seed)
    pts = _sample_region(inst, box, budget, rng)
    pts = _penalty_descent(inst, pts, RHO_SCHEDULE, DESCENT_ITERS)

    qs, ls, rhs, eq_mask = _stacked_data(inst)
    vals = _batched_values(qs, ls, pts)
    res = vals[:, 1:] - rhs[1:]
    le = ~eq_mask[1:]
    res[:, le] = np.maximum(res[:, le], 0.0)
    viol = np.max(np.abs(res), axis=1) if inst.m else np.zeros(len(pts))
    score = vals[:, 0] + 1e9 * np.sum(res**2, axis=1)

    candidates = []
    for idx in np.argsort(score)[:8]:
        x = _restore_feasibility(inst, pts[idx])
        candidates.append(x)
        polished = polish_kkt(inst, x)
        if polished is not None:
            candidates.append(_restore_feasibility(inst, polished))

    best = None
    n_feasible = int(np.sum(viol <= 1e-6))
    for x in candidates:
        mv = inst.max_violation(x)
        if mv > FEAS_TOL:
            continue
        f = inst.objective_value(x)
        if best is None or f < best[0]:
            best = (f, x, mv)
    if best is None:
        raise NoFeasiblePointFound("no start reached the feasible set")
    return OracleResult(value=best[0], x=best[1], max_violation=best[2], n_feasible=n_feasible)


def grid_search_qcqp(
    inst: model.QcqpInstance, points: int = 101, box=None
) -> OracleResult:
    """Dense grid evaluation over the bounding box, with KKT polish on the best cells.

    The strictest (and slowest) oracle mode; limited to n <= 3. Equality
    constraints are matched within a grid-spacing band before polishing.
    """
    if inst.n > 3:
        raise InputError("grid search is limited to n <= 3")
    if points < 2:
        raise InputError("need at least 2 grid points per axis")
    n = inst.n
    if box is not None:
        if np.isscalar(box):
            lo, hi = np.full(n, -float(box)), np.full(n, float(box))
        else:
            lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    else:
        lo, hi = _ellipsoid_box(*_bounding_ellipsoid(inst))
    axes = [np.linspace(lo[i], hi[i], points) for i in range(n)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)

    qs, ls, rhs, eq_mask = _stacked_data(inst)
    vals = _batched_values(qs, ls, mesh)
    spacing = float(np.max((hi - lo) / (points - 1)))
    band = 2.0 * spacing * inst.data_scale() * max(1.0, float(np.max(np.abs(hi - lo))))
    ok = np.ones(len(mesh), dtype=bool)
    for p in range(inst.m):
        r = vals[:, p + 1] - inst.b[p]
        ok &= (np.abs(r) <= band) if eq_mask[p + 1] else (r <= 1e-9 * (1.0 + abs(inst.b[p])))
    if not np.any(ok):
        raise NoFeasiblePointFound("no grid point satisfies the constraints")

    obj = np.where(ok, vals[:, 0], np.inf)
    order = np.argsort(obj)[:5]
    best = None
    for idx in order:
        if not np.isfinite(obj[idx]):
            break
        polished = polish_kkt(inst, mesh[idx], active_tol=band)
        for x in (mesh[idx], polished):
            if x is None:
                continue
            x = _restore_feasibility(inst, x)
            mv = inst.max_violation(x)
            if mv > FEAS_TOL:
                continue
            f = inst.objective_value(x)
            if best is None or f < best[0]:
                best = (f, x, mv)
    if best is None:
        raise NoFeasiblePointFound("no feasible grid point survived polishing")
    return OracleResult(value=best[0], x=best[1], max_violation=best[2], n_feasible=int(np.sum(ok)))


def find_feasible_point(
    inst: model.QcqpInstance,
    tol: float = 1e-7,
    n_starts: int = 64,
    seed: int = 0,
) -> np.ndarray:
    """A point satisfying all constraints within tol, by pure violation descent.

    Tries the origin first, then multistart descent from the bounding
    ellipsoid when one is derivable and from Gaussian fans of widening
    spread otherwise. Raises NoFeasiblePointFound when every start fails.
    """
    n = inst.n
    if inst.m == 0:
        return np.zeros(n)
    origin = np.zeros(n)
    if inst.max_violation(origin) <= tol:
        return origin

    rng = np.random.default_rng(seed)
    try:
        # an empty bounding ellipsoid is a proof of infeasibility, so
        # NoFeasiblePointFound from the derivation propagates untouched
        center = _bounding_ellipsoid(inst)[0]
        if inst.max_violation(center) <= tol:
            return center
        starts = _sample_region(inst, None, n_starts, rng)
    except InputError:
        spreads = (0.5, 1.0, 2.0, 5.0)
        per = max(1, n_starts // len(spreads))
        starts = np.concatenate(
            [sigma * rng.standard_normal((per, n)) for sigma in spreads]
        )

    pts = _penalty_descent(inst, starts, (1.0, 1.0, 1.0), 120, minimize_objective=False)
    viol = np.array([inst.max_violation(x) for x in pts])
    order = np.argsort(viol)
    for idx in order[:8]:
        x = _restore_feasibility(inst, pts[idx], tol=tol * 0.5)
        if inst.max_violation(x) <= tol:
            return x
    raise NoFeasiblePointFound(f"violation {viol[order[0]]:.3e} after descent (tol {tol:.1e})")


# ---------------------------------------------------------------------------
# randomized infeasibility audit


def audit_pinned_entry_infeasibility(
    mats,
    k: int,
    l: int,
    n_samples: int = 1000,
    y_cap: float = 1e6,
    seed: int = 0,
    margin: float | None = None,
) -> AuditResult:
    """Sample the multiplier box for counterexamples to an infeasibility verdict.

    Draws y uniformly from [0, y_cap]^m, projects each draw onto the
    hyperplane where the pinned entry of S(y) vanishes, clips back into the
    box, and keeps only draws whose entry survived within tolerance. The
    verdict under audit fails if any kept sample makes S(y) pass the PSD
    check at 1e-9. The entry tolerance is min(1e-9, margin/2) when a margin
    is supplied, floored by the float noise of the projection itself;
    samples inside that band that turn out PSD would contradict any claimed
    margin above 1e-5, so counting them keeps the audit sound.
    """
    mats = [symlin.as_symmetric(m_, f"family[{p}]") for p, m_ in enumerate(mats)]
    n = mats[0].shape[0]
    if not (0 <= k < n and 0 <= l < n) or k == l:
        raise InputError(f"entry ({k}, {l}) is not off-diagonal for dimension {n}")
    m = len(mats) - 1
    c0 = float(mats[0][k, l])
    slopes = np.array([float(mats[p][k, l]) for p in range(1, m + 1)])

    entry_tol = 1e-9 if margin is None else min(1e-9, margin / 2.0)
    noise = 64.0 * np.finfo(float).eps * (abs(c0) + y_cap * float(np.sum(np.abs(slopes))))
    entry_tol = max(entry_tol, noise)

    rng = np.random.default_rng(seed)
    if m == 0:
        tested = 1 if abs(c0) <= entry_tol else 0
        if tested:
            lam = symlin.min_eigenvalue(mats[0])
            scale = max(1.0, symlin.norm_max(mats[0]))
            witness = lam >= -1e-9 * scale
            return AuditResult(
                passed=not witness,
                n_samples=n_samples,
                n_tested=1,
                n_witnesses=int(witness),
                worst_rel_lambda_min=lam / scale,
                vacuous=False,
            )
        return AuditResult(True, n_samples, 0, 0, None, True)

    ys = rng.uniform(0.0, y_cap, size=(n_samples, m))
    if np.any(slopes != 0.0):
        denom = float(slopes @ slopes)
        ys = ys - np.outer((c0 + ys @ slopes) / denom, slopes)
        np.clip(ys, 0.0, y_cap, out=ys)

    stack = np.stack(mats[1:])
    s_batch = mats[0][None, :, :] + np.einsum("sp,pij->sij", ys, stack, optimize=True)
    mask = np.abs(s_batch[:, k, l]) <= entry_tol
    tested = s_batch[mask]
    if tested.shape[0] == 0:
        return AuditResult(True, n_samples, 0, 0, None, True)

    lams = np.linalg.eigvalsh(tested)[:, 0]
    scales = np.maximum(1.0, np.max(np.abs(tested), axis=(1, 2)))
    rel = lams / scales
    witnesses = int(np.sum(rel >= -1e-9))
    return AuditResult(
        passed=witnesses == 0,
        n_samples=n_samples,
        n_tested=int(tested.shape[0]),
        n_witnesses=witnesses,
        worst_rel_lambda_min=float(np.max(rel)),
        vacuous=False,
    )
