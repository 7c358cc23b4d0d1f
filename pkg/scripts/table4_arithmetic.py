#!/usr/bin/env python3
"""Recompute F from the published precision/recall pairs and the combination gains.

Usage:
    python scripts/table4_arithmetic.py [--table tests/fixtures/table4_results.tsv]
"""
from __future__ import annotations

import argparse
import csv
from pathlib import Path

from nereval.scoring import error_reduction, fbeta, fmt
from nereval.significance import verdict_for_interval

DEFAULT_TABLE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "table4_results.tsv"

# (language, best single system F, combined F of the selected five systems)
COMBINED = [("English", 88.76, 90.30), ("German", 72.41, 74.17)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--table", type=Path, default=DEFAULT_TABLE)
    args = ap.parse_args()

    with open(args.table, newline="") as fh:
        rows = list(csv.DictReader(fh, delimiter="\t"))

    print(f"{'lang':<8} {'system':<14} {'P':>7} {'R':>7} {'F pub':>7} {'F calc':>8} {'diff':>7}")
    for r in rows:
        f = fbeta(float(r["precision"]), float(r["recall"]))
        print(
            f"{r['language']:<8} {r['system']:<14} {r['precision']:>7} {r['recall']:>7} "
            f"{r['f']:>7} {fmt(f):>8} {f - float(r['f']):>+7.4f}"
        )

    print()
    for lang, best, combined in COMBINED:
        print(f"{lang}: {best} -> {combined}, error reduction {error_reduction(best, combined):.1f}%")

    # intervals rebuilt as F ± margin from the table; the real ones need the system outputs
    print()
    by_name = {(r["language"], r["system"]): r for r in rows}
    for lang, a, b in [("English", "Chieu", "Florian"), ("English", "Klein", "Florian"),
                       ("German", "Klein", "Florian"), ("German", "Zhang", "Florian"),
                       ("German", "Mayfield", "Florian")]:
        ra, rb = by_name[(lang, a)], by_name[(lang, b)]
        fb, m = float(rb["f"]), float(rb["margin"])
        v = verdict_for_interval(float(ra["f"]), (fb - m, fb + m))
        print(
            f"{lang}: {a} {ra['f']} vs {b} {rb['f']}±{rb['margin']} -> "
            f"{'significant' if v.significant else 'not significant'}"
        )


if __name__ == "__main__":
    main()
