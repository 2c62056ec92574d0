"""Command line: run scenarios, list built-ins, self-check.

Exit codes: 0 every point converged, 1 some points not converged,
2 configuration error, 3 every point failed.
"""

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy.special import exp1

from .drawdown import SolverControls, drawdown_D
from .errors import ConfigError
from .laplace import confined_series, ddbar_sC, hankel_breakpoints, sbar_C
from .params import DimensionlessGroups
from .scenarios import (builtin, convergence_report, emit_csv, emit_plot_script,
                        list_builtins, override_tolerance, parse_config, run_scenario)
from .transforms import OscillatoryQuadConfig, integrate_oscillatory

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2, 3


def _exit_code(results):
    flags = [f for r in results for f in r.flags]
    if flags and all(f == "failed" for f in flags):
        return EXIT_FAILED
    if any(f != "converged" for f in flags):
        return EXIT_PARTIAL
    return EXIT_OK


def _execute(cfg, args):
    if args.tol_override is not None:
        cfg = replace(cfg, numerics=override_tolerance(cfg.numerics, args.tol_override))
    results = run_scenario(cfg, threads=args.threads, cross_check=args.cross_check)
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        csv_path = emit_csv(results, out / f"{cfg.scenario_id}.csv")
        plot_path = emit_plot_script(results, out / f"plot_{cfg.scenario_id}.py",
                                     csv_name=csv_path.name)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAILED
    report = convergence_report(results)
    (out / f"{cfg.scenario_id}_report.txt").write_text(report, encoding="utf-8")
    print(report, end="")
    print(f"wrote {csv_path} and {plot_path}")
    return _exit_code(results)


def _check(args):
    """Hankel round trip, de Hoog vs Stehfest and the Theis limit."""
    rng = np.random.default_rng(20240611)
    ok = True
    quad = OscillatoryQuadConfig()

    worst = 0.0
    for _ in range(10):
        g = DimensionlessGroups(C_wD=rng.choice([0.0, 10.0, 1e3]), l_D=rng.uniform(0.3, 1.0),
                                r_w_over_b=0.02)
        r_D, z_D, p = rng.uniform(0.05, 2.0), rng.uniform(0.0, 1.0), 10 ** rng.uniform(-3, 2)
        ser = confined_series(g, r_D, p)
        v = integrate_oscillatory(lambda y: ddbar_sC(g, r_D, p, y, z_D, series=ser) * y,
                                  np.sqrt(g.K_D) * r_D, quad,
                                  breakpoints=hankel_breakpoints(g, r_D, p))
        ref = sbar_C(g, r_D, z_D, p)
        worst = max(worst, abs(v - ref) / abs(ref))
    passed = worst <= 1e-4
    ok &= passed
    print(f"{'PASS' if passed else 'FAIL'} Hankel round trip, 10 random nodes: "
          f"max rel error {worst:.2e} (tol 1e-4)")

    g = DimensionlessGroups(C_wD=1e2, l_D=0.6, R_Kr=1e-2, R_Kz=1e-2, R_Ss=1e-2)
    ctl = SolverControls()
    worst = 0.0
    for t in np.logspace(0, 4, 9):
        a = drawdown_D(g, 0.5, 0.25, t, ctl)
        b = drawdown_D(g, 0.5, 0.25, t, ctl, method="stehfest")
        worst = max(worst, abs(a.s_D - b.s_D) / abs(a.s_D))
    passed = worst <= 1e-3
    ok &= passed
    print(f"{'PASS' if passed else 'FAIL'} de Hoog vs Stehfest, 9 times: "
          f"max rel difference {worst:.2e} (tol 1e-3)")

    # fully penetrating line source, negligible specific yield, instant drainage
    g = DimensionlessGroups(r_w_over_b=5e-7, S_D=1e-7, a_kD=1e6, a_cD=1e6)
    worst = 0.0
    for t in np.logspace(-1, 3, 9):
        s = drawdown_D(g, 0.5, 0.5, t, ctl).s_D
        w = exp1(1.0 / (4.0 * t))
        worst = max(worst, abs(s - w) / w)
    passed = worst <= 1e-3
    ok &= passed
    print(f"{'PASS' if passed else 'FAIL'} Theis limit, 9 times: max rel error {worst:.2e} "
          f"(tol 1e-3)")
    return EXIT_OK if ok else EXIT_PARTIAL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="leaky-unconfined",
        description="Time-drawdown curves for a pumped leaky unconfined aquifer.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="directory for CSV, plot script, report")
    common.add_argument("--cross-check", action="store_true",
                        help="also invert with Gaver-Stehfest and report the discrepancy")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: $LEAKYAQ_THREADS or CPU count)")
    common.add_argument("--tol-override", type=float, default=None,
                        help="set every relative tolerance to this value")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run a scenario file")
    p.add_argument("config", help="YAML scenario file")
    p = sub.add_parser("builtin", parents=[common], help="run a built-in figure scenario")
    p.add_argument("name", help="one of: " + ", ".join(list_builtins()))
    sub.add_parser("list-builtins", help="list built-in scenarios")
    sub.add_parser("check", help="round-trip, cross-inversion and Theis self-checks")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-builtins":
            for name in list_builtins():
                cfg = builtin(name)
                sweep = f"sweep {cfg.variants.label}" if cfg.variants else "single curve"
                obs = "; ".join(o.describe() for o in cfg.observations)
                print(f"{name:6s} {obs}; {sweep}")
            return EXIT_OK
        if args.command == "check":
            return _check(args)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.tol_override is not None and not (args.tol_override > 0
                                                  and math.isfinite(args.tol_override)):
            raise ConfigError("--tol-override must be positive")
        cfg = parse_config(Path(args.config)) if args.command == "run" else builtin(args.name)
        return _execute(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
