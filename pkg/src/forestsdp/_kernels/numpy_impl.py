"""Pure-numpy twin of the jitted kernels.

Same call signatures and return conventions as numba_impl, selected when the
FSDP_DISABLE_NUMBA flag is set or numba is unavailable.
"""

import numpy as np


def eigh_sym(a_in, max_rot):
    n = a_in.shape[0]
    try:
        w, v = np.linalg.eigh(np.asarray(a_in, dtype=np.float64))
    except np.linalg.LinAlgError:
        return np.zeros(n), np.eye(n), False
    return w, v, True


def lu_factor(a_in):
    n = a_in.shape[0]
    lu = np.array(a_in, dtype=np.float64, copy=True)
    perm = np.arange(n)
    minpiv = np.inf
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        piv = lu[k, k]
        minpiv = min(minpiv, abs(piv))
        if piv == 0.0:
            continue
        lu[k + 1:, k] /= piv
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, minpiv


def lu_solve(lu, perm, b):
    n = lu.shape[0]
    x = np.array(b[perm], dtype=np.float64, copy=True)
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x
