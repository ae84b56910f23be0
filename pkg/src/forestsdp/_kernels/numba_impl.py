"""Jitted scalar-loop kernels: cyclic Jacobi eigensolver and pivoted LU.

These are the hot inner loops of the package (every PSD test, rank count,
interior-point step length, and elimination step lands here). The pure-numpy
twin lives in numpy_impl.py; _kernels/__init__.py picks the lane.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def eigh_sym(a_in, max_rot):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (values ascending, vectors as columns, converged flag). The
    rotation budget max_rot bounds total work; the flag goes False when it
    is exhausted before the off-diagonal mass is annihilated.
    """
    n = a_in.shape[0]
    a = a_in.copy()
    v = np.eye(n)
    w = np.empty(n)
    if n == 1:
        w[0] = a[0, 0]
        return w, v, True

    anorm = 0.0
    for i in range(n):
        for j in range(n):
            x = abs(a[i, j])
            if x > anorm:
                anorm = x
    if anorm == 0.0:
        for i in range(n):
            w[i] = 0.0
        return w, v, True

    stop = 1e-14 * anorm
    skip = 0.01 * stop / n
    rot = 0
    ok = False
    while True:
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                x = abs(a[i, j])
                if x > off:
                    off = x
        if off <= stop:
            ok = True
            break
        if rot > max_rot:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- G^T A G, columns then rows; G is the (p, q) rotation.
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                for j in range(n):
                    apj = a[p, j]
                    aqj = a[q, j]
                    a[p, j] = c * apj - s * aqj
                    a[q, j] = s * apj + c * aqj
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq
                rot += 1

    for i in range(n):
        w[i] = a[i, i]
    order = np.argsort(w)
    w_sorted = np.empty(n)
    v_sorted = np.empty((n, n))
    for k in range(n):
        w_sorted[k] = w[order[k]]
        for i in range(n):
            v_sorted[i, k] = v[i, order[k]]
    return w_sorted, v_sorted, ok


@njit(cache=True)
def lu_factor(a_in):
    """Row-pivoted LU. Returns (packed LU, row permutation, smallest |pivot|)."""
    n = a_in.shape[0]
    lu = a_in.copy()
    perm = np.arange(n)
    minpiv = np.inf
    for k in range(n):
        p = k
        best = abs(lu[k, k])
        for i in range(k + 1, n):
            x = abs(lu[i, k])
            if x > best:
                best = x
                p = i
        if p != k:
            for j in range(n):
                tmp = lu[k, j]
                lu[k, j] = lu[p, j]
                lu[p, j] = tmp
            tmpi = perm[k]
            perm[k] = perm[p]
            perm[p] = tmpi
        piv = lu[k, k]
        apiv = abs(piv)
        if apiv < minpiv:
            minpiv = apiv
        if apiv == 0.0:
            continue
        for i in range(k + 1, n):
            m = lu[i, k] / piv
            lu[i, k] = m
            for j in range(k + 1, n):
                lu[i, j] -= m * lu[k, j]
    return lu, perm, minpiv


@njit(cache=True)
def lu_solve(lu, perm, b):
    """Solve A x = b columns from a lu_factor output. b has shape (n, nrhs)."""
    n = lu.shape[0]
    nrhs = b.shape[1]
    x = np.empty((n, nrhs))
    for r in range(nrhs):
        for i in range(n):
            x[i, r] = b[perm[i], r]
        for i in range(1, n):
            s = x[i, r]
            for j in range(i):
                s -= lu[i, j] * x[j, r]
            x[i, r] = s
        for i in range(n - 1, -1, -1):
            s = x[i, r]
            for j in range(i + 1, n):
                s -= lu[i, j] * x[j, r]
            x[i, r] = s / lu[i, i]
    return x
