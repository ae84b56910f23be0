"""Command-line front end.

Subcommands: analyze, certify, solve, tridiagonalize, gtrs, gen. Instance
files use the JSON triplet format documented in fileio. Every subcommand
accepts --json for a machine-readable report (schema_version 1, keys
sorted, deterministic for fixed inputs and --seed).

Numeric options resolve as: explicit flag, then FSDP_-prefixed environment
variable, then the library default. Exit codes: 0 success, 1 certification
verdict other than exact (certify only), 2 input problems, 3 numerical
failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import exactness, fileio, model, sdp, sparsity, symlin, tridiag
from . import gtrs as gtrs_mod
from .errors import ForestSdpError, InputError

SCHEMA_VERSION = 1
ENV_PREFIX = "FSDP_"


def _env(name: str, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise InputError(
            f"environment variable {ENV_PREFIX + name}={raw!r} is not a valid {cast.__name__}"
        ) from exc


def _resolve(flag_value, env_name: str, cast, default):
    if flag_value is not None:
        return flag_value
    return _env(env_name, cast, default)


def _parse_eps_schedule(text: str) -> tuple[float, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError("--eps-schedule expects BASE,STEPS (e.g. 1e-2,10)")
    try:
        base = float(parts[0])
        steps = int(parts[1])
    except ValueError as exc:
        raise InputError(f"bad --eps-schedule value {text!r}") from exc
    if base <= 0 or steps < 0:
        raise InputError("--eps-schedule needs BASE > 0 and STEPS >= 0")
    return base, steps


def _plain(obj):
    """Recursively convert report values to JSON-serializable plain types."""
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    return obj


def _edge_1based(edge: tuple[int, int]) -> list[int]:
    return [edge[0] + 1, edge[1] + 1]


def _emit(args, report: dict, human: list[str]) -> None:
    if args.json:
        report = dict(report)
        report["schema_version"] = SCHEMA_VERSION
        print(json.dumps(_plain(report), sort_keys=True, indent=2))
    else:
        for line in human:
            print(line)


def _matrix_rows(mat: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in mat]


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_analyze(args) -> int:
    inst = fileio.load_instance(args.file)
    h = model.as_homogeneous(inst)
    fa = sparsity.analyze_forest(sparsity.build_graph(h.family_matrices()))
    report = {
        "n": inst.n,
        "m": inst.m,
        "homogenized": h.embedded,
        "pattern_dim": h.dim,
        "classification": fa.classification,
        "is_forest": fa.is_forest,
        "connected": fa.connected,
        "components": [len(c) for c in fa.components],
        "edges": [_edge_1based(e) for e in fa.graph.edges],
        "loop_vertices": [v + 1 for v in fa.graph.loops],
    }
    human = [
        f"variables:      {inst.n} ({'homogenized to ' + str(h.dim) if h.embedded else 'pure quadratic'})",
        f"constraints:    {inst.m}",
        f"classification: {fa.classification}",
        f"forest:         {'yes' if fa.is_forest else 'no'}",
        f"connected:      {'yes' if fa.connected else 'no'} ({len(fa.components)} components)",
        f"edges:          {' '.join(str(tuple(_edge_1based(e))) for e in fa.graph.edges) or '(none)'}",
    ]
    _emit(args, report, human)
    return 0


def _certificate_report(cert: exactness.ExactnessCertificate) -> dict:
    per_edge = [
        {
            "edge": _edge_1based(edge),
            "kind": ev.kind,
            "margin": ev.margin,
            "note": ev.note,
        }
        for edge, ev in sorted(cert.per_edge.items())
    ]
    assumptions = None
    if cert.assumptions is not None:
        assumptions = {
            "feasibility": cert.assumptions.feasibility,
            "definite_combination": cert.assumptions.definite_combination,
            "relaxation_slater": cert.assumptions.relaxation_slater,
        }
    return {
        "verdict": cert.verdict,
        "method": cert.method,
        "conditional": cert.conditional,
        "classification": cert.classification,
        "connected": cert.connected,
        "connectors": [_edge_1based(e) for e in cert.connectors],
        "per_edge": per_edge,
        "assumptions": assumptions,
        "notes": list(cert.notes),
    }


def _certificate_human(cert: exactness.ExactnessCertificate) -> list[str]:
    lines = [
        f"verdict:        {cert.verdict}" + (" (conditional)" if cert.conditional else ""),
        f"method:         {cert.method or '-'}",
        f"classification: {cert.classification}",
    ]
    if cert.connectors:
        lines.append(
            "connectors:     " + " ".join(str(tuple(_edge_1based(e))) for e in cert.connectors)
        )
    for edge, ev in sorted(cert.per_edge.items()):
        margin = f" margin={ev.margin:.3e}" if ev.margin is not None else ""
        lines.append(f"  edge {tuple(_edge_1based(edge))}: {ev.kind}{margin}")
    for note in cert.notes:
        lines.append(f"note: {note}")
    return lines


def _cmd_certify(args) -> int:
    inst = fileio.load_instance(args.file)
    y_cap = _resolve(args.ycap, "YCAP", float, sdp.Y_CAP)
    psd_tol = _resolve(args.tol_psd, "TOL_PSD", float, symlin.PSD_TOL)
    cert = exactness.certify(inst, y_cap=y_cap, psd_tol=psd_tol)
    report = _certificate_report(cert)
    _emit(args, report, _certificate_human(cert))
    return 0 if cert.verdict == exactness.VERDICT_EXACT else 1


def _cmd_solve(args) -> int:
    inst = fileio.load_instance(args.file)
    y_cap = _resolve(args.ycap, "YCAP", float, sdp.Y_CAP)
    psd_tol = _resolve(args.tol_psd, "TOL_PSD", float, symlin.PSD_TOL)
    rank1_tol = _resolve(args.tol_rank, "TOL_RANK", float, exactness.RANK1_TOL)
    max_iter = _resolve(args.max_iter, "MAX_ITER", int, sdp.MAX_ITER)
    seed = _resolve(args.seed, "SEED", int, exactness.FALLBACK_SEED)
    schedule = _resolve(args.eps_schedule, "EPS_SCHEDULE", str, None)
    eps_base, eps_steps = (
        _parse_eps_schedule(schedule) if schedule is not None
        else (exactness.EPS_BASE, exactness.EPS_STEPS)
    )

    cert = exactness.certify(inst, y_cap=y_cap, psd_tol=psd_tol)
    h = model.as_homogeneous(inst)
    report = {"certificate": _certificate_report(cert)}
    human = _certificate_human(cert)

    if cert.verdict == exactness.VERDICT_EXACT:
        rel = exactness.solve_certified(
            h, cert, rank1_tol=rank1_tol, eps_base=eps_base, eps_steps=eps_steps,
            seed=seed, max_iter=max_iter,
        )
        x = rel.x if rel.x is not None else rel.z
        report.update({
            "certified": True,
            "value": rel.value,
            "x": [float(v) for v in x],
            "relaxation_value": rel.relaxation.primal_obj,
            "eig_ratio": rel.eig_ratio,
            "used_fallback": rel.used_fallback,
            "eps_used": rel.eps_used,
            "feasibility": inst.max_violation(x),
            "solver_status": rel.relaxation.status,
        })
        human += [
            f"value:          {rel.value:.12g}",
            f"x:              {np.array2string(np.asarray(x), precision=8)}",
            f"relaxation:     {rel.relaxation.primal_obj:.12g}",
            f"eig ratio:      {rel.eig_ratio:.3e}",
            f"fallback:       {'yes, eps=' + format(rel.eps_used, '.3e') if rel.used_fallback else 'no'}",
        ]
    else:
        sol = sdp.solve(exactness.build_sdp_problem(h), max_iter=max_iter)
        report.update({
            "certified": False,
            "relaxation_value": sol.primal_obj,
            "solver_status": sol.status,
            "rank_X": sol.rank_X,
        })
        human += [
            "no exactness certificate; reporting the relaxation bound only",
            f"relaxation:     {sol.primal_obj:.12g} (status {sol.status})",
            f"rank of X:      {sol.rank_X}",
        ]
    _emit(args, report, human)
    return 0


def _cmd_tridiagonalize(args) -> int:
    inst = fileio.load_instance(args.file)
    if inst.m < 1:
        raise InputError("tridiagonalize needs an instance with at least one constraint")
    seed = _resolve(args.seed, "SEED", int, 0)
    K, M = inst.Q[0], inst.Q[1]
    res = tridiag.tridiagonalize_with_fallback(K, M, seed=seed)
    k_used = K + res.epsilon * np.eye(K.shape[0]) if res.epsilon else K
    res_k, res_m = res.congruence_residuals(k_used, M)
    report = {
        "gamma": res.gamma,
        "epsilon": res.epsilon,
        "residual_k": res_k,
        "residual_m": res_m,
        "first_row_unit": res.first_row_unit,
        "U": _matrix_rows(res.U),
        "R_K": _matrix_rows(res.rk),
        "R_M": _matrix_rows(res.rm),
        "steps": [
            {"k": s.k, "xi": s.xi, "tau": s.tau, "nu": s.nu, "sigma": s.sigma}
            for s in res.steps
        ],
    }
    human = [
        f"gamma:      {res.gamma:.12g}",
        f"epsilon:    {res.epsilon:.3e}" if res.epsilon else "epsilon:    0",
        f"residuals:  K {res_k:.3e}   M {res_m:.3e}",
        f"U:\n{np.array2string(res.U, precision=8)}",
        f"R_K:\n{np.array2string(res.rk, precision=8)}",
        f"R_M:\n{np.array2string(res.rm, precision=8)}",
    ]
    _emit(args, report, human)
    return 0


def _cmd_gtrs(args) -> int:
    inst = fileio.load_instance(args.file)
    seed = _resolve(args.seed, "SEED", int, 0)
    max_iter = _resolve(args.max_iter, "MAX_ITER", int, sdp.MAX_ITER)
    res = gtrs_mod.solve_gtrs(inst, seed=seed, max_iter=max_iter)
    report = {
        "value": res.value,
        "x": [float(v) for v in res.x],
        "gamma": res.gamma,
        "epsilon": res.epsilon,
        "feasibility": res.feasibility,
        "relaxation_value": res.relaxation.primal_obj,
        "polished": res.polished,
        "certificate": _certificate_report(res.certificate),
        "notes": list(res.notes),
    }
    human = [
        f"value:       {res.value:.12g}",
        f"x:           {np.array2string(res.x, precision=8)}",
        f"gamma:       {res.gamma:.12g}",
        f"epsilon:     {res.epsilon:.3e}" if res.epsilon else "epsilon:     0",
        f"feasibility: {res.feasibility:.3e}",
        f"certificate: {res.certificate.verdict}"
        + (" (conditional)" if res.conditional else "")
        + f" via {res.certificate.method}",
    ] + [f"note: {n}" for n in res.notes]
    _emit(args, report, human)
    return 0


def _cmd_gen(args) -> int:
    from . import devtools

    seed = _resolve(args.seed, "SEED", int, 0)
    inst = devtools.random_forest_qcqp(
        n=args.n,
        m=args.m,
        shape=args.shape,
        sign_definite=not args.mixed_signs,
        seed=seed,
        n_components=args.components,
    )
    doc = fileio.to_dict(inst)
    text = json.dumps(_plain(doc), sort_keys=True, indent=1)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        if not args.json:
            print(f"wrote {args.output}")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forestsdp",
        description="Certify and solve forest-structured QCQP relaxations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, seed=True) -> None:
        p.add_argument("--json", action="store_true", help="emit a JSON report")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="seed for randomized internals (env FSDP_SEED)")

    p = sub.add_parser("analyze", help="classify the aggregate sparsity pattern")
    p.add_argument("file")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("certify", help="run the exactness certifier cascade")
    p.add_argument("file")
    common(p, seed=False)
    p.add_argument("--ycap", type=float, default=None,
                   help="multiplier cap for pinned-entry feasibility runs (env FSDP_YCAP)")
    p.add_argument("--tol-psd", type=float, default=None,
                   help="eigenvalue tolerance for PSD checks (env FSDP_TOL_PSD)")
    p.set_defaults(handler=_cmd_certify)

    p = sub.add_parser("solve", help="certify, solve the relaxation, recover x")
    p.add_argument("file")
    common(p)
    p.add_argument("--ycap", type=float, default=None)
    p.add_argument("--tol-psd", type=float, default=None)
    p.add_argument("--tol-rank", type=float, default=None,
                   help="eigenvalue-ratio bound for rank-one extraction (env FSDP_TOL_RANK)")
    p.add_argument("--eps-schedule", type=str, default=None,
                   help="perturbation fallback as BASE,STEPS (env FSDP_EPS_SCHEDULE)")
    p.add_argument("--max-iter", type=int, default=None,
                   help="interior-point iteration cap (env FSDP_MAX_ITER)")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("tridiagonalize",
                       help="simultaneously tridiagonalize the objective and first-constraint matrices")
    p.add_argument("file")
    common(p)
    p.set_defaults(handler=_cmd_tridiagonalize)

    p = sub.add_parser("gtrs", help="globally solve a single-constraint instance")
    p.add_argument("file")
    common(p)
    p.add_argument("--max-iter", type=int, default=None)
    p.set_defaults(handler=_cmd_gtrs)

    p = sub.add_parser("gen", help="generate a random forest-patterned instance")
    common(p)
    p.add_argument("-n", type=int, required=True, help="number of variables")
    p.add_argument("-m", type=int, required=True, help="number of pattern constraints")
    p.add_argument("--shape", choices=list(devtools_shapes()), default="random_tree")
    p.add_argument("--mixed-signs", action="store_true",
                   help="draw edge entries without a shared per-edge sign")
    p.add_argument("--components", type=int, default=None,
                   help="component count for the random_forest shape")
    p.add_argument("-o", "--output", default=None, help="write the instance here")
    p.set_defaults(handler=_cmd_gen)

    return parser


def devtools_shapes() -> tuple[str, ...]:
    from . import devtools

    return devtools.SHAPES


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return 0 if code in (0, None) else 2
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ForestSdpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
