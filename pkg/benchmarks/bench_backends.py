"""Timing comparison of the jitted and pure-numpy kernel lanes.

Runs the same workload twice in fresh subprocesses, once per lane (the lane
is fixed at import time through FSDP_DISABLE_NUMBA), and prints wall times.
The workload exercises the paths that actually hit the kernels: eigensolves
behind PSD checks and rank counts, LU behind the tridiagonalization steps,
and two full certify-and-recover pipelines.

Usage: python benchmarks/bench_backends.py [--trials N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import numpy as np

from forestsdp import _kernels, devtools, exactness, tridiag

t_import = time.perf_counter()
# touch each kernel once so jit compilation is not billed to the sections
_kernels.eigh_sym(np.eye(3), 300)
lu = _kernels.lu_factor(np.eye(3))
_kernels.lu_solve(lu[0], lu[1], np.ones((3, 1)))
warmup = time.perf_counter() - t_import

trials = int(json.loads(input()))
sections = {}

t0 = time.perf_counter()
for t in range(40 * trials):
    rng = np.random.default_rng(t)
    n = int(rng.integers(6, 30))
    a = rng.normal(size=(n, n))
    _kernels.eigh_sym(a + a.T, 100 * n * n)
sections["eigh"] = time.perf_counter() - t0

t0 = time.perf_counter()
for t in range(60 * trials):
    rng = np.random.default_rng(1000 + t)
    n = int(rng.integers(4, 24))
    A = rng.normal(size=(n, n)); A = A + A.T
    B = rng.normal(size=(n, n)); B = B + B.T
    tridiag.tridiagonalize_with_fallback(A, B, seed=t)
sections["tridiagonalize"] = time.perf_counter() - t0

t0 = time.perf_counter()
for t in range(2 * trials):
    inst = devtools.random_forest_qcqp(8, 3, "random_tree", True, seed=t)
    cert = exactness.certify(inst)
    from forestsdp import model
    exactness.solve_certified(model.as_homogeneous(inst), cert)
sections["certify+recover"] = time.perf_counter() - t0

print(json.dumps({
    "backend": _kernels.BACKEND,
    "warmup_s": warmup,
    "sections": sections,
    "total_s": sum(sections.values()),
}))
"""


def run_lane(disable_numba: bool, trials: int) -> dict:
    env = dict(os.environ)
    env["FSDP_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    proc = subprocess.run(
        [sys.executable, "-c", WORKLOAD],
        input=json.dumps(trials),
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1, help="workload multiplier")
    args = ap.parse_args()

    results = []
    for disable in (False, True):
        res = run_lane(disable, args.trials)
        results.append(res)
        print(f"[{res['backend']:>5}] warmup {res['warmup_s']:.2f}s  "
              + "  ".join(f"{k} {v:.3f}s" for k, v in res["sections"].items())
              + f"  total {res['total_s']:.3f}s")

    if results[0]["backend"] == results[1]["backend"]:
        print("note: both runs used the same lane (numba unavailable?)")
        return
    ratio = results[1]["total_s"] / max(results[0]["total_s"], 1e-9)
    print(f"numpy/numba total time ratio: {ratio:.2f}x")


if __name__ == "__main__":
    main()
