"""Compute the built-in figure scenarios and write CSV, plot scripts and reports.

    python3 scripts/make_figures.py --out-dir figures fig2b fig7
    python3 scripts/make_figures.py --out-dir figures          # all of them

Each scenario gives ``<id>.csv``, ``plot_<id>.py`` and ``<id>_report.txt``;
run the plot scripts (matplotlib required) to get the PNGs.
"""

import argparse
import sys
import time
from pathlib import Path

from leaky_unconfined.scenarios import (builtin, convergence_report, emit_csv, emit_plot_script,
                                        list_builtins, run_scenario)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*", help="built-in scenarios (default: all)")
    parser.add_argument("--out-dir", default="figures")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = args.names or list_builtins()
    not_converged = 0
    for name in names:
        start = time.perf_counter()
        results = run_scenario(builtin(name), threads=args.threads)
        emit_csv(results, out / f"{name}.csv")
        emit_plot_script(results, out / f"plot_{name}.py")
        report = convergence_report(results)
        (out / f"{name}_report.txt").write_text(report, encoding="utf-8")
        bad = sum(f != "converged" for r in results for f in r.flags)
        not_converged += bad
        print(f"{name}: {len(results)} curves, {bad} non-converged points, "
              f"{time.perf_counter() - start:.1f} s")
    return 1 if not_converged else 0


if __name__ == "__main__":
    sys.exit(main())
