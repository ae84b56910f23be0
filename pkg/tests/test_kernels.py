"""Backend kernels: numba lane and numpy lane must agree."""

import json
import os
import subprocess
import sys

import numpy as np

from forestsdp import _kernels

from conftest import rand_sym


def test_backend_identifies_itself():
    assert _kernels.BACKEND in ("numba", "numpy")


def test_eigh_matches_numpy(rng):
    for _ in range(10):
        a = rand_sym(9, rng)
        w, v, ok = _kernels.eigh_sym(a, 100 * 81)
        assert ok
        w_ref = np.linalg.eigvalsh(a)
        assert np.max(np.abs(np.sort(w) - w_ref)) <= 1e-10
        assert np.max(np.abs(v.T @ v - np.eye(9))) <= 1e-10
        assert np.max(np.abs(v @ np.diag(w) @ v.T - a)) <= 1e-9


def test_lu_round_trip(rng):
    for _ in range(10):
        a = rng.normal(size=(7, 7))
        b = rng.normal(size=(7, 2))
        lu, perm, minpiv = _kernels.lu_factor(a)
        assert minpiv > 0.0
        x = np.column_stack([_kernels.lu_solve(lu, perm, b[:, j]) for j in range(2)])
        assert np.max(np.abs(a @ x - b)) <= 1e-9


def test_lu_reports_singularity():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    _, _, minpiv = _kernels.lu_factor(a)
    assert minpiv <= 1e-12


def test_lanes_agree_across_processes():
    """Same fixed matrix, both lanes, compared through a subprocess."""
    prog = (
        "import json, numpy as np\n"
        "from forestsdp import _kernels\n"
        "a = np.arange(25, dtype=float).reshape(5, 5)\n"
        "a = (a + a.T) / 2.0\n"
        "w, v, ok = _kernels.eigh_sym(a, 100 * 25)\n"
        "print(json.dumps({'backend': _kernels.BACKEND, 'w': sorted(w.tolist())}))\n"
    )
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, FSDP_DISABLE_NUMBA=flag)
        run = subprocess.run(
            [sys.executable, "-c", prog], env=env, capture_output=True, text=True
        )
        assert run.returncode == 0, run.stderr
        out[flag] = json.loads(run.stdout)
    assert out["1"]["backend"] == "numpy"
    diff = np.max(np.abs(np.array(out["0"]["w"]) - np.array(out["1"]["w"])))
    assert diff <= 1e-10
