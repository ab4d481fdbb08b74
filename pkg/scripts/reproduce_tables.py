#!/usr/bin/env python3
"""Regenerate both model-problem efficiency tables and print them side by
side with the reference mesh counts.

Usage: python scripts/reproduce_tables.py [outdir]
"""

import sys
from pathlib import Path

from zndevans.cli import main as cli_main
from zndevans.modelbench import C_COLUMNS, LAMBDA_ROWS, reproduce_table


def print_table(table):
    name = {"factored": "decay factored out", "unfactored": "unfactored"}[table.variant]
    print(f"\n=== table {table.which} ({name}); cells are ours/reference ===")
    header = "lambda".rjust(12) + "".join(
        f"   fwd c={c:<6g}" for c in C_COLUMNS
    ) + "".join(f"   bwd c={c:<6g}" for c in C_COLUMNS)
    print(header)
    fwd, bwd = table.counts("forward"), table.counts("backward")
    rf, rb = table.reference("forward"), table.reference("backward")
    for i, lam in enumerate(LAMBDA_ROWS):
        cells = [f"{fwd[i, j]:5d}/{rf[i, j]:<5d}" for j in range(3)]
        cells += [f"{bwd[i, j]:5d}/{rb[i, j]:<5d}" for j in range(3)]
        print(f"{lam!s:>12} " + " ".join(cells))
    failures = table.trend_failures()
    print("trend check:", "ok" if not failures else f"{len(failures)} failures")
    for f in failures:
        print("  -", f)


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("bench_out")
    outdir.mkdir(parents=True, exist_ok=True)
    for which in (1, 2):
        print_table(reproduce_table(which))
        rc = cli_main(["bench", "--table", str(which),
                       "--out", str(outdir / f"table{which}.csv")])
        if rc != 0:
            sys.exit(rc)
    print(f"\nCSV written under {outdir}/")


if __name__ == "__main__":
    main()
