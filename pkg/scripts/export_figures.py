"""Write the data behind every figure (ICC diagram, normal plot, band) as CSV.

    python3 scripts/export_figures.py --out figures/
"""
import argparse
from pathlib import Path

from metfatigue.catalog import Group
from metfatigue.errors import MetFatigueError
from metfatigue.report import FigureKind, export_figure_data


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for group in Group:
        for kind in FigureKind:
            try:
                table = export_figure_data(kind, group)
            except MetFatigueError as exc:
                print(f"skip {kind.value}/{group.value}: {exc}")
                continue
            path = out / f"{kind.value}_{group.value.lower()}.csv"
            path.write_text(table.to_csv())
            print(f"wrote {path} ({len(table.rows)} rows)")


if __name__ == "__main__":
    main()
