#!/usr/bin/env python3
"""Large-window timing run: both spectral sequences plus the stem-group
extraction at a chosen window, with phase timings."""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from etass import adams as A
from etass import bockstein as B
from etass import homotopy as H


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-mw", type=int, default=256)
    ap.add_argument("--verify", default="sample", choices=["auto", "all", "sample", "off"])
    args = ap.parse_args()
    mw = args.max_mw

    t0 = time.time()
    _, beinf = B.run_bockstein(mw, verify=args.verify)
    t1 = time.time()
    print(f"first sequence: {t1 - t0:.1f}s")
    ok1 = B.compare_pages(beinf, B.closed_form_einfty(mw, beinf.columns), "b").ok
    t2 = time.time()
    print(f"  closed-form equality: {ok1} ({t2 - t1:.1f}s)")

    pages, aeinf = A.run_adams(mw, verify=args.verify)
    t3 = time.time()
    print(f"second sequence: {t3 - t2:.1f}s")
    e3 = pages[1]
    ok2 = B.compare_pages(e3, A.closed_form_e3(mw, e3.columns), "e3").ok
    ok3 = B.compare_pages(aeinf, A.closed_form_einfty(mw, aeinf.columns), "einf").ok
    print(f"  page-3 equality: {ok2}, stable equality: {ok3}")

    groups = H.extract_groups(aeinf)
    ok4 = H.groups_vs_order_formula(groups).ok
    nonzero = sum(1 for g in groups if not g.is_trivial)
    print(f"groups: formula holds: {ok4}, {nonzero} nonzero stems")
    print(f"total: {time.time() - t0:.1f}s")
    return 0 if all((ok1, ok2, ok3, ok4)) else 1


if __name__ == "__main__":
    sys.exit(main())
