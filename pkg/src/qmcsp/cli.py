"""Command-line interface: ``qmcsp {points,recourse-eval,dims,run,fixtures}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

log = logging.getLogger("qmcsp")


def _floats(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.replace(",", " ").split()], dtype=np.float64)


def _emit_matrix(a, out):
    for row in np.atleast_2d(a):
        out.write(" ".join(format(float(v), ".17g") for v in row) + "\n")


def cmd_points(args, out):
    from .points import generate_points

    ps = generate_points(args.kind, args.n, args.dim, args.seed, tent=args.tent)
    _emit_matrix(ps.points, out)


def _problem(args):
    from .recourse import load_fixture, load_problem

    if args.problem:
        return load_problem(args.problem)
    return load_fixture(args.fixture)


def cmd_recourse_eval(args, out):
    from .lp import enumerate_vertices
    from .recourse import eval_recourse_dual, eval_recourse_lp

    problem = _problem(args)
    x = _floats(args.x) if args.x else np.zeros(problem.m)
    if args.xi_file:
        xi = np.atleast_2d(np.loadtxt(args.xi_file, dtype=np.float64, ndmin=2))
    elif args.xi:
        xi = np.atleast_2d(_floats(args.xi))
    else:
        raise SystemExit("one of --xi or --xi-file is required")
    if args.method == "dual":
        vl = enumerate_vertices(problem.W, problem.q)
        vals = [eval_recourse_dual(vl.vertices, x, row, problem.h_bar, problem.T)[0]
                for row in xi]
    else:
        vals = [eval_recourse_lp(problem, x, row) for row in xi]
    for v in vals:
        out.write(format(float(v), ".17g") + "\n")


def cmd_dims(args, out):
    from .anova import dimension_report
    from .experiments import (ExperimentConfig, fixed_decision, generate_model, load_config,
                              production_integrand, with_factorization)

    config = load_config(args.config) if args.config else ExperimentConfig()
    problem = generate_model(config.model)
    x = fixed_decision(config, problem)
    prob = with_factorization(problem, args.factorization)
    f = production_integrand(prob, x)
    rep = dimension_report(f, prob.d, epsilon=args.epsilon, top=args.top, n=args.n,
                           replications=args.replications, seed=args.seed)
    text = rep.to_json(indent=2)
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %s", args.out)
    else:
        out.write(text + "\n")


def cmd_run(args, out):
    from dataclasses import replace

    from .experiments import emit_report, load_config, run_experiment

    config = load_config(args.config)
    if args.kind and args.kind != config.test_kind:
        config = replace(config, test_kind=args.kind)
    result = run_experiment(config)
    paths = emit_report(result.records, args.out, gnuplot=not args.no_gnuplot,
                        meta=result.meta())
    for p in (paths.csv, paths.json, paths.gnuplot):
        if p is not None:
            out.write(f"{p}\n")


def cmd_fixtures(args, out):
    from .recourse import FIXTURES, load_fixture, save_problem

    target = Path(args.out)
    target.mkdir(parents=True, exist_ok=True)
    for name in FIXTURES:
        path = save_problem(load_fixture(name), target / f"{name}.txt", comment=name)
        out.write(f"{path}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmcsp", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("points", help="emit a randomized point set")
    p.add_argument("--kind", choices=("mc", "sobol", "lattice"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tent", action="store_true", help="apply the tent transform")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("recourse-eval", help="evaluate Phi(x, xi) on a problem file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixture", choices=("example_3_1", "example_5_3", "example_5_4"))
    src.add_argument("--problem", help="problem file in the plain-text matrix format")
    p.add_argument("--x", help="first-stage decision, comma or space separated")
    p.add_argument("--xi", help="one scenario, comma or space separated")
    p.add_argument("--xi-file", help="whitespace table of scenarios, one per line")
    p.add_argument("--method", choices=("lp", "dual"), default="lp")
    p.set_defaults(func=cmd_recourse_eval)

    p = sub.add_parser("dims", help="effective-dimension report of the production integrand")
    p.add_argument("--config", help="experiment config (YAML or JSON)")
    p.add_argument("--factorization", choices=("pca", "cholesky"), default="pca")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--replications", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--top", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("run", help="run an RMSE experiment and write the report")
    p.add_argument("--kind", choices=("first", "second"))
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output file stem or directory")
    p.add_argument("--no-gnuplot", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fixtures", help="write the example problem files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args, sys.stdout)
    except (ValueError, OSError, RuntimeError) as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
