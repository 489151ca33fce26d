"""Scenario runner exposing the package as subcommands.

Subcommands: integrate, closed-form, spectral, degeneracy, factorize,
stability, sweep.  Every JSON output echoes the full configuration and the
inner-product scale so runs are reproducible; identical configurations
(including the seed) give byte-identical output.  Exit codes: 0 success,
2 configuration error, 3 numerical failure.  NS_THREADS caps the sweep
worker pool.

Initial-data files are JSON objects with components "T0".."T3" (or
"tau1".."tau3" for stability) encoded as row-major [re, im] matrices;
anti-Hermiticity defects above 1e-8 are reported and reprojected.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import degeneracy, flow, positive, serialize, spectral, stability
from .liealg import DEFAULT_SCALE, random_antihermitian, su2_basis

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(p, with_format=False):
    p.add_argument("--algebra", choices=("su2", "un"), default="su2")
    p.add_argument("--n", type=int, default=2, help="matrix size for --algebra un")
    p.add_argument("--kappa", type=float, default=0.8, help="elliptic modulus")
    p.add_argument("--a", type=float, default=1.0, help="elliptic frequency")
    p.add_argument("--b", type=float, default=0.0, help="elliptic phase")
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=DEFAULT_SCALE)
    p.add_argument("--init", help="JSON file with initial data (overrides --algebra)")
    p.add_argument("--output", default="-", help="output path, '-' for stdout")
    if with_format:
        p.add_argument("--format", choices=("json", "csv"), default="json")


def _config_echo(args, names):
    return {k: getattr(args, k) for k in names}

_COMMON_NAMES = (
    "algebra", "n", "kappa", "a", "b", "t_start", "t_end", "steps", "seed", "scale",
)


def _emit(args, text):
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _initial_quadruple(args):
    """Initial data from a file or from the scenario parameters."""
    warnings = []
    if args.init:
        with open(args.init, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        quad, warnings = serialize.quadruple_from_obj(obj)
    elif args.algebra == "su2":
        quad = flow.su2_closed_form(args.a, args.b, args.kappa, args.t_start)
    else:
        rng = np.random.default_rng(args.seed)
        Z = np.zeros((args.n, args.n), dtype=complex)
        quad = np.array([Z] + [random_antihermitian(args.n, rng) for _ in range(3)])
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return quad


def _solution_trajectory(args):
    quad = _initial_quadruple(args)
    cfg = flow.SolverConfig(steps=args.steps)
    return flow.integrate(quad, (args.t_start, args.t_end), cfg)


def cmd_integrate(args):
    traj = _solution_trajectory(args)
    report = flow.conserved_report(traj, scale=args.scale)
    if args.format == "csv":
        _emit(args, "\n".join(serialize.trajectory_csv_lines(traj)) + "\n")
        sys.stderr.write(serialize.dumps(report.as_dict()))
    else:
        obj = {
            "config": _config_echo(args, _COMMON_NAMES),
            "trajectory": serialize.trajectory_to_obj(traj),
            "conserved": report.as_dict(),
        }
        _emit(args, serialize.dumps(obj))
    return EXIT_OK


def cmd_closed_form(args):
    traj = flow.su2_closed_form_trajectory(
        args.a, args.b, args.kappa, (args.t_start, args.t_end), args.steps
    )
    if args.format == "csv":
        _emit(args, "\n".join(serialize.trajectory_csv_lines(traj)) + "\n")
    else:
        obj = {
            "config": _config_echo(args, _COMMON_NAMES),
            "trajectory": serialize.trajectory_to_obj(traj),
        }
        _emit(args, serialize.dumps(obj))
    return EXIT_OK


def cmd_spectral(args):
    traj = _solution_trajectory(args)
    curve = spectral.char_poly(spectral.lax_from_quadruple(traj.samples[0]))
    obj = {
        "config": _config_echo(args, _COMMON_NAMES),
        "curve": curve.as_dict(),
        "curve_reality_defect": curve.reality_defect(),
        "isospectral_drift": spectral.isospectral_drift(traj),
        "lax_residual": spectral.lax_residual(traj),
        "conserved_C": spectral.conserved_C_from_trace(
            spectral.lax_from_quadruple(traj.samples[0]), scale=args.scale
        ),
    }
    _emit(args, serialize.dumps(obj))
    return EXIT_OK


def cmd_degeneracy(args):
    traj = _solution_trajectory(args)
    rep = degeneracy.degeneracy_report(traj, scale=args.scale)
    bound, certified = degeneracy.pi_bound_precheck(traj, scale=args.scale)
    obj = {
        "config": _config_echo(args, _COMMON_NAMES),
        "report": rep.as_dict(),
        "pi_bound": bound,
        "pi_certified": certified,
    }
    _emit(args, serialize.dumps(obj))
    return EXIT_OK


def cmd_factorize(args):
    if args.init:
        with open(args.init, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        triple, warnings = serialize.quadruple_from_obj(obj, ("T1", "T2", "T3"))
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        T1, T2, T3 = triple
    else:
        quad = flow.su2_closed_form(args.a, args.b, args.kappa, args.t_start)
        T1 = quad[1] - 0.5j * args.shift * np.eye(2)
        T2, T3 = quad[2], quad[3]
    rep = positive.positivity_report(T1, T2, T3)
    out = {
        "config": {**_config_echo(args, _COMMON_NAMES), "shift": args.shift},
        "positivity": rep.as_dict(),
    }
    if rep.sampled_positive:
        pair = positive.factorize_triple(T1, T2, T3)
        lhs, rhs, holds = positive.norm_bound_check(T1, T2, T3)
        out["factors"] = pair.as_dict()
        out["norm_bound"] = {"lhs": lhs, "rhs": rhs, "holds": holds}
    else:
        out["factors"] = None
    _emit(args, serialize.dumps(out))
    return EXIT_OK


def cmd_stability(args):
    if args.init:
        with open(args.init, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        triple, warnings = serialize.quadruple_from_obj(obj, ("tau1", "tau2", "tau3"))
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        taus = list(triple)
    else:
        c = [float(x) for x in args.triple.split(",")]
        if len(c) != 3:
            raise ValueError("--triple needs three comma-separated coefficients")
        e1, _, _ = su2_basis()
        taus = [ci * e1 for ci in c]
    rep = stability.stability_spectrum(*taus, scale=args.scale)
    out = {
        "config": {**_config_echo(args, _COMMON_NAMES), "triple": args.triple},
        "report": rep.as_dict(),
    }
    if args.halfline and rep.stable and rep.eta > 0:
        dirs = stability.stable_directions(rep)
        if dirs.shape[1] == 0:
            out["halfline"] = None
        else:
            direction = stability.triple_from_coordinates(dirs[:, 0], rep.basis)
            res = stability.halfline_convergence(
                taus,
                direction,
                amplitude=args.amplitude,
                horizon=args.horizon,
                scale=args.scale,
            )
            out["halfline"] = res.as_dict()
    _emit(args, serialize.dumps(out))
    return EXIT_OK


def _sweep_point(task):
    base, name, value, name2, value2, steps, scale = task
    params = dict(base)
    params[name] = value
    if name2 is not None:
        params[name2] = value2
    traj = flow.su2_closed_form_trajectory(
        params["a"], params["b"], params["kappa"], (0.0, 1.0), steps
    )
    rep = degeneracy.degeneracy_report(traj, scale=scale)
    bound, certified = degeneracy.pi_bound_precheck(traj, scale=scale)
    return params, rep, bound, certified


def cmd_sweep(args):
    base = {"kappa": args.kappa, "a": args.a, "b": args.b}
    if args.param not in base:
        raise ValueError("--param must be one of kappa, a, b")
    grid1 = np.linspace(args.start, args.stop, args.points)
    tasks = []
    if args.param2:
        if args.param2 not in base or args.param2 == args.param:
            raise ValueError("--param2 must be a different one of kappa, a, b")
        grid2 = np.linspace(args.start2, args.stop2, args.points2)
        for v1 in grid1:
            for v2 in grid2:
                tasks.append(
                    (base, args.param, float(v1), args.param2, float(v2), args.steps, args.scale)
                )
    else:
        for v1 in grid1:
            tasks.append((base, args.param, float(v1), None, None, args.steps, args.scale))

    workers = int(os.environ.get("NS_THREADS", "0")) or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_sweep_point, tasks))

    header = [args.param]
    if args.param2:
        header.append(args.param2)
    header += ["sigma_min", "verdict", "determinant", "pi_bound", "pi_certified"]
    lines = [",".join(header)]
    for params, rep, bound, certified in results:
        row = [repr(params[args.param])]
        if args.param2:
            row.append(repr(params[args.param2]))
        row += [
            repr(rep.sigma_min),
            rep.verdict,
            repr(rep.determinant),
            repr(bound),
            str(certified),
        ]
        lines.append(",".join(row))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nahmschmid",
        description="Numerical laboratory for the Nahm-Schmid equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="integrate the equations and audit conservation")
    _add_common(p, with_format=True)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("closed-form", help="sample the su(2) elliptic solution")
    _add_common(p, with_format=True)
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("spectral", help="spectral curve, Lax residual and drift")
    _add_common(p)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("degeneracy", help="shooting test for the degeneracy locus")
    _add_common(p)
    p.set_defaults(func=cmd_degeneracy)

    p = sub.add_parser("factorize", help="positivity report and Rosenblatt factors")
    _add_common(p)
    p.add_argument("--shift", type=float, default=3.0, help="central shift of T1 into u(2)")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("stability", help="stability spectrum of a commuting triple")
    _add_common(p)
    p.add_argument("--triple", default="1,0,0", help="c1,c2,c3 for (c1 e1, c2 e1, c3 e1)")
    p.add_argument("--halfline", action="store_true", help="run the decay-rate experiment")
    p.add_argument("--amplitude", type=float, default=1e-4)
    p.add_argument("--horizon", type=float, default=8.0)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("sweep", help="map sigma_min over a parameter grid (CSV)")
    _add_common(p)
    p.add_argument("--param", required=True, help="kappa, a or b")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--param2", default=None)
    p.add_argument("--from2", dest="start2", type=float, default=0.0)
    p.add_argument("--to2", dest="stop2", type=float, default=1.0)
    p.add_argument("--points2", type=int, default=2)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (flow.NumericalFailure, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
