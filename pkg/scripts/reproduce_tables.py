"""Recompute the per-model regression table and the group statistics.

Prints computed vs. tabulated values with residuals and writes the CSVs.

    python3 scripts/reproduce_tables.py --out results/
"""
import argparse
import sys

from metfatigue.analysis import EvaluationGrid, IccVariant
from metfatigue.report import build_validation_report, write_report


def _f(v, width=8):
    return f"{'-':>{width}}" if v is None else f"{v:>{width}.4f}"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--variant", default=IccVariant.ONE_WAY.value,
                    choices=[v.value for v in IccVariant])
    ap.add_argument("--grid-start", type=float, default=0.16)
    ap.add_argument("--log-space", action="store_true", help="Pearson r on log values")
    ap.add_argument("--out", default=None, help="directory for the CSV tables")
    args = ap.parse_args(argv)

    report = build_validation_report(grid=EvaluationGrid(start=args.grid_start),
                                     variant=args.variant, log_space=args.log_space)
    print(f"{'model':24s} {'m':>8s} {'gold':>8s} {'r':>8s} {'gold':>8s} "
          f"{'icc1':>8s} {'gold':>8s} {'icc2':>8s} {'gold':>8s}")
    for r in report.rows:
        c, g = r.computed, r.golden
        print(f"{r.id:24s}" + "".join(f" {_f(c.get(k))} {_f(g.get(k))}"
                                      for k in ("m", "r", "icc1", "icc2")))
    print()
    for g in report.groups:
        print(f"{g.group:10s} n={len(g.members):2d} mean={_f(g.computed.get('mean_m'))} "
              f"({_f(g.golden.get('mean_m'))}) std={_f(g.computed.get('std_m'))} "
              f"({_f(g.golden.get('std_m'))}) excluded={','.join(g.excluded) or '-'}")
    print()
    for line in report.failures():
        print("MISMATCH", line)
    if args.out:
        for path in write_report(report, args.out):
            print("wrote", path)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
