"""Command-line interface: batch benchmarks, single runs, exports, self-test."""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .bench import ExperimentConfig, emit_table, export_pareto_cloud, write_experiment
from .cones import ConeSpec, phi, phi_batch
from .linesearch import WolfeParams, check_armijo, check_curvature, wolfe_search
from .manifolds import manifold_from_name, norm, retract
from .objectives import default_manifold_name, problem_from_spec, quad_quad_random
from .solver import nvrcg_run, parse_beta_kind
from .subproblem import brute_force_direction, direction_value, steepest_direction


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nvrcg",
        description="Conjugate gradient methods for vector optimization on manifolds.",
    )
    p.add_argument("--version", action="version", version=f"nvrcg {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run a batch experiment from a JSON config")
    b.add_argument("--config", required=True, help="path to the experiment JSON")
    b.add_argument(
        "--format",
        default="csv",
        choices=["csv", "json", "markdown"],
        help="table format written to output_dir and printed (default csv)",
    )
    b.add_argument("--workers", type=int, default=None, help="worker threads")

    r = sub.add_parser("run", help="solve one instance and print a summary")
    r.add_argument(
        "--problem",
        required=True,
        help="problem spec: inline JSON or a path to a JSON file",
    )
    r.add_argument(
        "--manifold",
        default=None,
        help="manifold name like sphere:2 (default: sphere of the problem dimension)",
    )
    r.add_argument("--beta", default="DY", help="beta rule (FR, CD, DY, PRP-FR, ..., SD)")
    r.add_argument("--c1", type=float, default=0.1)
    r.add_argument("--c2", type=float, default=0.6)
    r.add_argument("--t-init", type=float, default=1.0)
    r.add_argument("--strong", action="store_true", help="use the strong curvature test")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-iter", type=int, default=10000)
    r.add_argument(
        "--assert-level", default="descent", choices=["off", "descent", "full"]
    )
    r.add_argument(
        "--transport-eval",
        default="current",
        choices=["current", "previous"],
        help="evaluation point of the transported-direction term in PRP/LS/HS rules",
    )
    r.add_argument(
        "--allow-raw",
        action="store_true",
        help="permit the raw PRP/LS/HS rules (no convergence guarantee)",
    )
    r.add_argument("--trace-points", action="store_true", help="record full iterates")
    r.add_argument("--json", action="store_true", help="print a JSON summary")

    e = sub.add_parser("pareto", help="export value-space clouds for an experiment")
    e.add_argument("--config", required=True)
    e.add_argument("--out", default=None, help="output directory (overrides config)")

    sub.add_parser("selftest", help="run the built-in property suites")
    return p


def _cmd_bench(args) -> int:
    from pathlib import Path

    raw = json.loads(Path(args.config).read_text())
    if args.workers is not None:
        raw["workers"] = args.workers
    config = ExperimentConfig.from_dict(raw)
    rows, path = write_experiment(config, format=args.format)
    sys.stdout.write(emit_table(rows, args.format))
    print(f"wrote {path}")
    return 0


def _cmd_run(args) -> int:
    obj = problem_from_spec(args.problem)
    man_name = args.manifold or default_manifold_name(obj)
    man = manifold_from_name(man_name)
    cone = ConeSpec.multiobjective(obj.m)
    wolfe = WolfeParams(c1=args.c1, c2=args.c2, t_init=args.t_init, strong=args.strong)
    x0 = man.random_point(np.random.default_rng(args.seed))
    report = nvrcg_run(
        cone,
        obj,
        x0,
        parse_beta_kind(args.beta),
        wolfe,
        max_iter=args.max_iter,
        assert_level=args.assert_level,
        transport_eval=args.transport_eval,
        allow_raw=args.allow_raw,
        trace_points=args.trace_points,
    )
    if args.json:
        print(
            json.dumps(
                {
                    "termination": report.termination,
                    "iterations": report.iterations,
                    "restarts": report.restarts,
                    "final_F": report.final_F.tolist(),
                    "final_norm_v": report.final_norm_v,
                }
            )
        )
    else:
        print(f"termination: {report.termination}")
        print(f"iterations: {report.iterations}")
        print(f"restarts: {report.restarts}")
        print(f"final F: {report.final_F.tolist()}")
        print(f"final |v|: {report.final_norm_v:.3e}")
    return 0


def _cmd_pareto(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    paths = export_pareto_cloud(config, out_dir=args.out)
    for path in paths:
        print(f"wrote {path}")
    return 0


def _selftest_phi(rng) -> list[str]:
    errs = []
    for m in (1, 2, 5):
        cone = ConeSpec.multiobjective(m)
        Y = rng.standard_normal((20000, m))
        Z = rng.standard_normal((20000, m))
        lhs = phi_batch(cone, Y + Z)
        rhs = phi_batch(cone, Y) + phi_batch(cone, Z)
        if np.any(lhs > rhs + 1e-12):
            errs.append(f"subadditivity failed for m={m}")
        if np.any(np.abs(phi_batch(cone, Y) - phi_batch(cone, Z)) >
                  np.linalg.norm(Y - Z, axis=1) + 1e-12):
            errs.append(f"Lipschitz bound failed for m={m}")
    return errs


def _selftest_geometry(rng) -> list[str]:
    errs = []
    h = 1e-6
    for n in (2, 5, 10):
        man = manifold_from_name(f"sphere:{n}")
        for _ in range(20):
            x = man.random_point(rng)
            from .manifolds import TangentVector, project_tangent

            u = project_tangent(x, rng.standard_normal(n))
            fd = (
                man.retract_array(x.coords, h * u.components)
                - man.retract_array(x.coords, -h * u.components)
            ) / (2 * h)
            if np.max(np.abs(fd - u.components)) > 1e-6:
                errs.append(f"retraction derivative mismatch at n={n}")
                break
    return errs


def _selftest_subproblem(rng) -> list[str]:
    errs = []
    for n in (2, 3):
        man = manifold_from_name(f"sphere:{n}")
        cone = ConeSpec.multiobjective(2)
        for trial in range(5):
            obj = quad_quad_random(n, 2, seed=100 * n + trial)
            x = man.random_point(rng)
            res = steepest_direction(cone, obj, x)
            oracle = brute_force_direction(cone, obj, x, grid_resolution=500)
            gap = direction_value(cone, obj, x, res.v) - direction_value(
                cone, obj, x, oracle
            )
            if gap > 2.0 / 500:
                errs.append(f"subproblem beats oracle by too little at n={n}")
                break
    return errs


def _selftest_linesearch(rng) -> list[str]:
    errs = []
    cone = ConeSpec.multiobjective(2)
    params = WolfeParams(c1=0.1, c2=0.6, strong=True)
    accepted = 0
    trials = 0
    for trial in range(60):
        n = int(rng.integers(2, 6))
        man = manifold_from_name(f"sphere:{n}")
        obj = quad_quad_random(n, 2, seed=trial)
        x = man.random_point(rng)
        res = steepest_direction(cone, obj, x)
        if norm(res.v) <= 1e-3:
            continue
        trials += 1
        out = wolfe_search(cone, obj, x, res.v, params)
        if out.status == "accepted":
            accepted += 1
            F_x = obj.eval_F(x)
            psi0 = res.theta - 0.5 * norm(res.v) ** 2
            if not (
                check_armijo(cone, obj, x, res.v, out.t, params.c1, F_x, psi0)
                and check_curvature(
                    cone, obj, x, res.v, out.t, params.c2, psi0, params.strong
                )
            ):
                errs.append("accepted step failed re-verification")
    if trials and accepted != trials:
        errs.append(f"line search accepted only {accepted}/{trials} descent steps")
    return errs


def _cmd_selftest(_args) -> int:
    rng = np.random.default_rng(2024)
    checks = [
        ("scalarization properties", _selftest_phi),
        ("geometry derivatives", _selftest_geometry),
        ("direction subproblem vs grid oracle", _selftest_subproblem),
        ("Wolfe search acceptance", _selftest_linesearch),
    ]
    failed = False
    for name, fn in checks:
        start = time.perf_counter()
        errs = fn(rng)
        dt = time.perf_counter() - start
        if errs:
            failed = True
            for e in errs:
                print(f"[FAIL] {name}: {e}")
        else:
            print(f"[ok]   {name} ({dt:.2f}s)")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "bench":
        return _cmd_bench(args)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "pareto":
        return _cmd_pareto(args)
    if args.command == "selftest":
        return _cmd_selftest(args)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
