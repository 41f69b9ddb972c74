"""Command line harness: single solves, convergence sweeps, scheme comparisons.

Every report lands as delimited text (two columns, "x y value" triples, or a
CSV rate table) with a rendered figure next to it.  Exit codes: 0 on success,
1 for usage problems, 2 when a solve fails numerically.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from convdiff import fd1d, fd2d, fem2d, harness, mesh as meshmod, plotting, problems
from convdiff.harness import ExperimentConfig, run_convergence
from convdiff.linalg import NumericalError

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; this tool uses 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(USAGE_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convdiff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[], help="solve one configuration")
    solve.add_argument("--problem", required=True, help="registry name: p1 or mms2d")
    solve.add_argument("--scheme", required=True, choices=harness.ALL_SCHEMES)
    solve.add_argument("--mesh", required=True, choices=("uniform", "shishkin", "bakhvalov"))
    solve.add_argument("--N", type=int, required=True, dest="n")
    solve.add_argument("--eps", type=float, required=True)
    solve.add_argument("--b1", type=float, default=1.0, help="convection x component (mms2d)")
    solve.add_argument("--b2", type=float, default=1.0, help="convection y component (mms2d)")
    solve.add_argument("--delta", default=None,
                       help="stabilization: coarse_half_h, galerkin_zero, or a number")
    solve.add_argument("--out", default="solution.txt")

    conv = sub.add_parser("convergence", help="run a sweep from a JSON config")
    conv.add_argument("--config", required=True)

    comp = sub.add_parser("compare", help="run two schemes side by side from a JSON config")
    comp.add_argument("--config", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse help or usage failure
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "convergence":
            return _cmd_convergence(args)
        return _cmd_compare(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def _cmd_solve(args) -> int:
    params = {}
    if args.problem == "mms2d":
        params = {"b1": args.b1, "b2": args.b2}
    problem = problems.make_problem(args.problem, eps=args.eps, **params)
    out = Path(args.out)
    fig_path = out.with_suffix(".png")

    if args.scheme in harness.SCHEMES_1D:
        if not hasattr(problem, "u_left"):
            raise ValueError(f"problem {args.problem!r} is not one-dimensional")
        m = _build_mesh_1d(args, problem)
        sol = fd1d.solve_1d(problem, m, args.scheme)
        out.write_text(fd1d.format_solution_1d(sol))
        plotting.save_solution_plot_1d(
            sol, fig_path, exact=problem.exact,
            title=f"{args.problem} / {args.scheme} / {args.mesh} N={args.n}")
        _report_solution(problem, sol.values, lambda e: harness.nodal_max_error(sol, e))
    else:
        if not hasattr(problem, "g"):
            raise ValueError(f"problem {args.problem!r} is not two-dimensional")
        if args.mesh == "bakhvalov":
            raise ValueError("2D runs support uniform and shishkin meshes")
        m2 = _build_mesh_2d(args, problem)
        if args.scheme == "fd2d-upwind":
            sol2 = fd2d.solve_2d(problem, m2)
            values = sol2.values
            err = (lambda e: harness.nodal_max_error(sol2, e))
        else:
            tri = meshmod.triangulate(m2)
            strategy = _strategy_from_arg(args.scheme, args.delta)
            vals = fem2d.solve_fem(problem, tri, strategy)
            values = fem2d.values_on_grid(tri, vals)
            err = (lambda e: float(max(
                abs(v - e(xx, yy)) for v, (xx, yy) in zip(vals, tri.vertices))))
        out.write_text(fd2d.format_grid_values(
            m2.x_mesh.nodes, m2.y_mesh.nodes, values))
        plotting.save_solution_plot_2d(
            m2.x_mesh.nodes, m2.y_mesh.nodes, values, fig_path,
            title=f"{args.problem} / {args.scheme} / {args.mesh} N={args.n}")
        _report_solution(problem, values, err)

    print(f"wrote {out} and {fig_path}")
    return 0


def _report_solution(problem, values, error_fn) -> None:
    arr = np.asarray(values)
    print(f"solution range: [{arr.min():.6g}, {arr.max():.6g}]")
    if problem.exact is not None:
        print(f"nodal max error: {error_fn(problem.exact):.6e}")


def _build_mesh_1d(args, problem):
    if args.mesh == "uniform":
        return meshmod.uniform_mesh_1d(args.n)
    beta = getattr(problem, "beta", 1.0)
    if args.mesh == "shishkin":
        return meshmod.shishkin_mesh_1d(args.n, problem.eps, beta)
    return meshmod.bakhvalov_mesh_1d(args.n, problem.eps, beta)


def _build_mesh_2d(args, problem):
    if args.mesh == "uniform":
        return meshmod.tensor_uniform_2d(args.n)
    b1, b2 = problem.b
    return meshmod.tensor_shishkin_2d(args.n, problem.eps, b1, b2)


def _strategy_from_arg(scheme: str, delta):
    if scheme == "fem-galerkin":
        return fem2d.GALERKIN
    if delta is None or delta == "coarse_half_h":
        return fem2d.COARSE_HALF_H
    if delta == "galerkin_zero":
        return fem2d.GALERKIN
    try:
        return fem2d.user_constant(float(delta))
    except (TypeError, ValueError):
        raise ValueError(f"unrecognized delta strategy {delta!r}") from None


def _load_config(path: str) -> dict:
    with open(path) as handle:
        return json.load(handle)


def _cmd_convergence(args) -> int:
    raw = _load_config(args.config)
    cfg = ExperimentConfig.from_dict(raw)
    table = run_convergence(cfg)
    out = Path(cfg.out or "convergence.csv")
    out.write_text(table.to_csv())
    fig_path = out.with_suffix(".png")
    plotting.save_convergence_plot(
        table, fig_path, title=f"{cfg.problem} / {cfg.scheme} / {cfg.mesh}")
    print(table.to_text(), end="")
    print(f"wrote {out} and {fig_path}")
    return 0


def _cmd_compare(args) -> int:
    raw = _load_config(args.config)
    schemes = raw.get("schemes")
    if not schemes or len(schemes) != 2:
        raise ValueError('compare needs a "schemes" list with exactly two entries')
    base = {k: v for k, v in raw.items() if k != "schemes"}
    out = Path(raw.get("out") or "compare.csv")
    tables = {}
    for scheme in schemes:
        cfg = ExperimentConfig.from_dict({**base, "scheme": scheme})
        tables[scheme] = run_convergence(cfg)
        scheme_out = out.with_name(f"{out.stem}_{scheme}{out.suffix}")
        scheme_out.write_text(tables[scheme].to_csv())
        print(f"--- {scheme} ---")
        print(tables[scheme].to_text(), end="")
        print(f"wrote {scheme_out}")
    fig_path = out.with_suffix(".png")
    plotting.save_convergence_plot(tables, fig_path, title=" vs ".join(schemes))
    print(f"wrote {fig_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
