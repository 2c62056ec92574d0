"""Invert every built-in scenario with both de Hoog and Gaver-Stehfest.

Prints the largest relative discrepancy per curve over converged points and
exits non-zero if any exceeds the tolerance (default 1e-3).

    python3 scripts/cross_check.py [--tol 1e-3] [names ...]
"""

import argparse
import sys

from leaky_unconfined.scenarios import builtin, list_builtins, run_scenario


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*", help="built-in scenarios (default: all)")
    parser.add_argument("--tol", type=float, default=1e-3)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)

    worst = 0.0
    for name in args.names or list_builtins():
        for res in run_scenario(builtin(name), threads=args.threads, cross_check=True):
            d = res.max_discrepancy
            skipped = sum(f != "converged" for f in res.flags)
            worst = max(worst, d)
            note = f" ({skipped} non-converged skipped)" if skipped else ""
            print(f"{name:6s} {res.label:45s} {d:.2e}{note}")
    print(f"max discrepancy {worst:.2e} (tol {args.tol:g})")
    return 0 if worst <= args.tol else 1


if __name__ == "__main__":
    sys.exit(main())
