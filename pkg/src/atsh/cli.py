"""Command-line front end.

Exit codes: 0 success, 1 when any computation fails (including error rows
in a sweep), 2 for bad arguments or configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import bench
from .integrator import ExactUnavailable, StarterMode, integrate
from .methods import MethodId, SingularCoefficient, build, method_names
from .order_conditions import residuals, verify_order
from .problems import BenchmarkId, make_problem
from .stability import (
    FitFailed,
    OutsideDomain,
    StabilityClass,
    estimate_leading,
    phase_point,
    scan_region,
)

EXIT_OK, EXIT_ERROR, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _method(text: str) -> MethodId:
    try:
        return MethodId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _problem(text: str) -> BenchmarkId:
    try:
        return BenchmarkId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cmd_integrate(args) -> int:
    problem = make_problem(args.problem)
    starter = args.starter
    if problem.exact is None:
        if starter is StarterMode.EXACT:
            raise ExactUnavailable(f"{args.problem.value} has no closed-form solution")
        # grid reference fine enough for this stepsize
        problem, default_starter = bench.prepare_problem(args.problem, args.h)
    else:
        default_starter = StarterMode.EXACT
    res = integrate(args.method, problem, args.h, starter or default_starter)
    print(f"method      {args.method.name}")
    print(f"problem     {args.problem.value}")
    print(f"h           {res.h:.17g}")
    print(f"steps       {res.steps}")
    print(f"g_evals     {res.g_evals} (+{res.starter_evals} starter)")
    if res.max_global_error is not None:
        print(f"max error   {res.max_global_error:.6e}")
    if args.out:
        with open(args.out, "w") as fh:
            cols = ["x"] + [f"y{i}" for i in range(problem.dim)]
            fh.write(",".join(cols) + "\n")
            for x, y in zip(res.xs, res.ys):
                fh.write(",".join("%.17g" % v for v in (float(x), *np.real(y))) + "\n")
    if res.max_global_error is not None and not math.isfinite(res.max_global_error):
        print("error: global error overflowed (unstable stepsize)", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = bench.SweepConfig()
    try:
        if args.config:
            bench.load_config(args.config, config)
        for item in args.set or ():
            if "=" not in item:
                raise bench.ConfigError(f"--set expects key=value, got {item!r}")
            bench.apply_setting(config, *item.split("=", 1))
        if args.workers is not None:
            bench.apply_setting(config, "workers", str(args.workers))
        if args.count_starter:
            config.count_starter = True
        if args.timing:
            config.timing = True
        if args.out:
            config.output = args.out
        config.cells()
    except bench.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    records = bench.run_sweep(config)
    if config.output:
        for path in bench.write_outputs(records, config.output, with_plot=args.plot_script and bool(records)):
            print(f"wrote {path}", file=sys.stderr)
    else:
        bench.emit_csv(records, sys.stdout)
    return EXIT_ERROR if bench.report_errors(records) else EXIT_OK


def _cmd_stability(args) -> int:
    grid = scan_region(args.method, (0.0, args.nu_max), (args.z_min, args.z_max),
                       (args.grid, args.grid))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("nu,z,S,P,class\n")
        names = {c.value: c.name.lower() for c in StabilityClass}
        for iz, z in enumerate(grid.zs):
            for inu, nu in enumerate(grid.nus):
                cls = "singular" if grid.singular[iz, inu] else names[int(grid.classes[iz, inu])]
                out.write("%.17g,%.17g,%.17g,%.17g,%s\n"
                          % (nu, z, grid.S[iz, inu], grid.P[iz, inu], cls))
    finally:
        if args.out:
            out.close()
    if args.plot_script:
        if not args.out:
            print("--plot-script needs --out", file=sys.stderr)
            return EXIT_CONFIG
        path = Path(args.out)
        script = path.with_name(path.stem + "_plot.py")
        script.write_text(_STABILITY_PLOT.format(csv_name=path.name, png_name=path.stem + ".png",
                                                 title=args.method.name))
        print(f"wrote {script}", file=sys.stderr)
    return EXIT_OK


_STABILITY_PLOT = '''\
"""nu-z classification map: periodic, absolutely stable, unstable."""
import csv
import os

import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
CODES = {{"unstable": 0, "singular": 0, "absolutely_stable": 1, "periodic": 2}}

nus, zs, cls = [], [], []
with open(os.path.join(HERE, {csv_name!r})) as fh:
    for row in csv.DictReader(fh):
        nus.append(float(row["nu"]))
        zs.append(float(row["z"]))
        cls.append(CODES[row["class"]])
nu_axis = np.unique(nus)
z_axis = np.unique(zs)
grid = np.array(cls).reshape(len(z_axis), len(nu_axis))
fig, ax = plt.subplots(figsize=(6, 5))
ax.pcolormesh(nu_axis, z_axis, grid, shading="nearest", cmap="Greys", vmin=0, vmax=2)
ax.contour(nu_axis, z_axis, grid, levels=[0.5, 1.5], colors="k", linewidths=0.6)
ax.set_xlabel("nu")
ax.set_ylabel("z")
ax.set_title({title!r})
fig.savefig(os.path.join(HERE, {png_name!r}))
'''


def _cmd_phase(args) -> int:
    method = args.method
    try:
        lead = estimate_leading(method, args.omega, args.epsilon)
    except (OutsideDomain, FitFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    r = "inf" if math.isinf(lead.r) else str(lead.r)
    print(f"method {method.name}  omega {args.omega:g}  epsilon {args.epsilon:g}")
    print(f"phase-lag   order q = {lead.q}  constant {lead.c_phi:.10e}")
    print(f"dissipation order r = {r}  constant {lead.c_d:.10e}")
    print("H,phase_lag,dissipation")
    for H in args.H or (0.25, 0.125, 0.0625):
        try:
            pt = phase_point(method, H, args.omega, args.epsilon)
        except OutsideDomain as exc:
            print(f"{H:.17g},outside,{exc}")
            continue
        print(f"{H:.17g},{pt.phase_lag:.17g},{pt.dissipation:.17g}")
    return EXIT_OK


def _cmd_check_order(args) -> int:
    tab = build(args.method, args.nu)
    print(f"{'tree':<7}{'rho':>4}{'lhs':>26}{'rhs':>26}{'residual':>14}")
    for r in residuals(tab, args.up_to):
        print(f"{r.tree_id:<7}{r.rho:>4}{r.lhs:>26.17g}{r.rhs:>26.17g}{r.residual:>14.3e}")
    print(f"verified order p = {verify_order(tab)} (declared {tab.p})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    names = ", ".join(method_names())
    problems = ", ".join(b.value for b in BenchmarkId)
    parser = _Parser(prog="atsh", description="Adapted two-step hybrid methods for perturbed oscillators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", help="integrate one benchmark problem")
    p.add_argument("method", type=_method, help=names)
    p.add_argument("problem", type=_problem, help=problems)
    p.add_argument("--h", type=float, required=True, help="stepsize")
    p.add_argument("--starter", type=StarterMode, choices=list(StarterMode), default=None)
    p.add_argument("--out", help="write the trajectory as CSV")
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("bench", help="run a method x problem x stepsize sweep")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one setting")
    p.add_argument("--workers", type=int)
    p.add_argument("--count-starter", action="store_true", help="include starter evaluations")
    p.add_argument("--timing", action="store_true",
                   help="record wall times (the CSV is then no longer reproducible)")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot-script", action="store_true", help="also write a matplotlib script")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("stability", help="classify a nu-z grid")
    p.add_argument("method", type=_method, help=names)
    p.add_argument("--nu-max", type=float, default=3 * math.pi)
    p.add_argument("--z-min", type=float, default=-5.0)
    p.add_argument("--z-max", type=float, default=5.0)
    p.add_argument("--grid", type=int, default=600)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot-script", action="store_true")
    p.set_defaults(func=_cmd_stability)

    p = sub.add_parser("phase", help="phase-lag and dissipation analysis")
    p.add_argument("method", type=_method, help=names)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--H", type=float, action="append", help="scaled stepsize to tabulate")
    p.set_defaults(func=_cmd_phase)

    p = sub.add_parser("check-order", help="tabulate order-condition residuals")
    p.add_argument("method", type=_method, help=names)
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--up-to", type=int, default=7, choices=range(2, 8))
    p.set_defaults(func=_cmd_check_order)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SingularCoefficient, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
