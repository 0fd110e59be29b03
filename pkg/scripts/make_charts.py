#!/usr/bin/env python3
"""Render the four standard charts (first page, page 3, both stable
pages) as SVG and ASCII into an output directory."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from etass.adams import run_adams
from etass.bockstein import build_e1, run_bockstein
from etass.charts import render


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-mw", type=int, default=64)
    ap.add_argument("--out", default="charts")
    ap.add_argument("--mw-window", type=int, default=None, help="clip the horizontal axis")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mw_hi = args.mw_window or args.max_mw

    _, bock_einf = run_bockstein(args.max_mw)
    adams_pages, adams_einf = run_adams(args.max_mw)
    pages = {
        "e1": build_e1(args.max_mw),
        "bockstein-einf": bock_einf,
        "e3": adams_pages[1] if len(adams_pages) > 1 else adams_pages[0],
        "einf": adams_einf,
    }
    for name, page in pages.items():
        for fmt, suffix in (("svg", "svg"), ("ascii", "txt")):
            path = out / f"{name}.{suffix}"
            path.write_text(render(page, fmt, mw_hi=mw_hi), encoding="utf-8")
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
