"""Command-line driver and the serialization schema.

Page dumps use one fixed JSON shape:

    {"page": r, "kind": "bockstein"|"adams", "max_mw": N,
     "classes": [{"mw", "c", "label", "rho_exp", "p_exp", "v_exps"}],
     "differentials": [{"r", "source_label", "target_labels"}],
     "towers": [{"generator_label", "length"} | {"generator_label", "infinite"}]}

Runs are deterministic, so identical invocations produce byte-identical
output.  ETASS_THREADS caps the worker count for per-column page work.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import adams as adams_mod
from . import bockstein as bock_mod
from . import brackets as bracket_mod
from . import charts as charts_mod
from . import ext as ext_mod
from . import homotopy as homotopy_mod
from .homotopy import two_adic_valuation
from .report import Report

DEFAULT_MW = 64


def page_dump(page: bock_mod.Page) -> dict:
    """A page in the fixed dump schema."""
    classes = []
    for mw, c, m in page.classes():
        classes.append(
            {
                "mw": mw,
                "c": c,
                "label": str(m),
                "rho_exp": m.rho_exp,
                "p_exp": m.p_exp,
                "v_exps": {str(n): a for n, a in m.v_exps},
            }
        )
    differentials = [
        {
            "r": page.r,
            "source_label": str(src),
            "target_labels": [str(t) for t in targets],
        }
        for src, targets in page.differentials()
    ]
    towers = []
    for t in page.towers():
        entry: dict = {"generator_label": str(t.generator)}
        if t.truncated:
            entry["infinite"] = True
        else:
            entry["length"] = t.length
        towers.append(entry)
    return {
        "page": page.r,
        "kind": page.kind,
        "max_mw": page.max_mw,
        "classes": classes,
        "differentials": differentials,
        "towers": towers,
    }


class Session:
    """Caches the expensive runs so 'verify all' computes each once."""

    def __init__(self, mw_max: int, verify: str = "auto", seed: int = 0):
        self.mw_max = mw_max
        self.verify = verify
        self.seed = seed
        self._bockstein = None
        self._adams = None
        self._e3 = None
        self._groups = None

    def bockstein(self):
        if self._bockstein is None:
            self._bockstein = bock_mod.run_bockstein(
                self.mw_max, verify=self.verify, seed=self.seed
            )
        return self._bockstein

    def adams(self):
        if self._adams is None:
            self._adams = adams_mod.run_adams(
                self.mw_max, verify=self.verify, seed=self.seed
            )
        return self._adams

    def e3(self):
        if self._e3 is None:
            pages, _ = self.adams()
            if len(pages) > 1 and pages[1].label == "adams-E3":
                self._e3 = pages[1]
            else:
                self._e3 = adams_mod.compute_e3(self.mw_max)
        return self._e3

    def groups(self):
        if self._groups is None:
            _, einf = self.adams()
            self._groups = homotopy_mod.extract_groups(einf)
        return self._groups


def verify_bockstein(s: Session) -> Report:
    rep = Report()
    pages, einf = s.bockstein()
    rep.extend(
        bock_mod.compare_pages(
            einf,
            bock_mod.closed_form_einfty(s.mw_max, einf.columns),
            "bockstein-einfty",
        )
    )
    rep.extend(bock_mod.rho_inverted_check(einf))
    return rep


def verify_ext(s: Session) -> Report:
    rep = Report()
    _, einf = s.bockstein()
    rep.extend(ext_mod.unique_detection_scan(s.mw_max))
    rep.extend(ext_mod.vanishing_scan(s.mw_max, page=einf))
    rep.extend(ext_mod.massey_scan(s.mw_max))
    rep.extend(ext_mod.product_consistency(s.mw_max, trials=500, seed=s.seed))
    return rep


def verify_adams(s: Session) -> Report:
    rep = Report()
    pages, einf = s.adams()
    e3 = s.e3()
    rep.extend(
        bock_mod.compare_pages(
            e3, adams_mod.closed_form_e3(s.mw_max, e3.columns), "adams-e3"
        )
    )
    rep.extend(
        bock_mod.compare_pages(
            einf, adams_mod.closed_form_einfty(s.mw_max, einf.columns), "adams-einfty"
        )
    )
    rep.extend(adams_mod.check_e3_products(s.mw_max, e3=e3))
    rep.extend(adams_mod.mod4_vanishing_scan(einf))
    rep.extend(adams_mod.exhaustive_hit_scan(e3, einf, s.mw_max))
    rep.extend(ext_mod.stem_finiteness_scan(einf))
    return rep


def verify_groups(s: Session) -> Report:
    rep = Report()
    groups = s.groups()
    rep.extend(homotopy_mod.groups_vs_order_formula(groups))
    rep.extend(homotopy_mod.ring_structure_report(groups))
    return rep


def verify_brackets(s: Session) -> Report:
    rep = Report()
    _, einf = s.adams()
    rep.extend(bracket_mod.table5_report(einf, s.groups()))
    example = bracket_mod.decompose(3, 10)
    rep.add(
        "bracket-example",
        "P^40*lambda3",
        bracket_mod.render(example, unicode=False) == "<2^8, lambda7, P^8lambda3>",
        bracket_mod.render(example, unicode=False),
    )
    rep.extend(bracket_mod.chow_obstruction_check())
    return rep


def verify_oracle(s: Session) -> Report:
    rep = Report()
    rep.extend(adams_mod.dga_homology_oracle(6, 40))
    rep.extend(
        adams_mod.oracle_spot_check(s.mw_max, count=20, seed=s.seed, e3=s.e3())
    )
    return rep


VERIFY_SUITES = {
    "bockstein": verify_bockstein,
    "ext": verify_ext,
    "adams": verify_adams,
    "groups": verify_groups,
    "brackets": verify_brackets,
    "oracle": verify_oracle,
}


def _dump_pages(pages, einf, directory: str) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for page in list(pages) + [einf]:
        path = out / f"{page.label}.json"
        path.write_text(json.dumps(page_dump(page), indent=2), encoding="utf-8")
        print(f"wrote {path}")


def _cmd_bockstein(args) -> int:
    pages, einf = bock_mod.run_bockstein(args.max_mw, verify=args.page_verify)
    for page in pages:
        n_diff = len(page.differentials())
        print(f"{page.label}: {n_diff} differentials")
    towers = [t for t in einf.towers() if not t.truncated]
    print(f"{einf.label}: {len(towers)} torsion towers, mw <= {args.max_mw}")
    if args.dump_pages:
        _dump_pages(pages, einf, args.dump_pages)
    return 0


def _cmd_adams(args) -> int:
    pages, einf = adams_mod.run_adams(args.max_mw, verify=args.page_verify)
    for page in pages:
        print(f"{page.label}: {len(page.differentials())} differentials")
    towers = [t for t in einf.towers() if not t.truncated]
    print(f"{einf.label}: {len(towers)} torsion towers, mw <= {args.max_mw}")
    if args.dump_pages:
        _dump_pages(pages, einf, args.dump_pages)
    return 0


def _cmd_groups(args) -> int:
    s = Session(args.max_mw)
    for g in s.groups():
        if not g.is_trivial:
            print(g.describe())
    return 0


def _stem_to_nk(mw: int) -> tuple[int, int]:
    if mw < 3 or mw % 4 != 3:
        raise SystemExit(f"error: stem {mw} carries no generator")
    n = two_adic_valuation(mw + 1)
    k = ((mw + 1) // 2 ** n - 1) // 2
    return n, k


def _cmd_brackets(args) -> int:
    stems = (
        [mw for mw in range(3, DEFAULT_MW, 4)] if args.all else [args.mw]
    )
    if args.mw is None and not args.all:
        raise SystemExit("error: need --mw M or --all")
    payload = []
    for mw in stems:
        n, k = _stem_to_nk(mw)
        expr = bracket_mod.decompose(n, k)
        if args.json:
            payload.append({"mw": mw, "bracket": bracket_mod.to_dict(expr)})
        elif args.nested:
            print(f"mw={mw}: {bracket_mod.render(expr, nested=True)}")
        else:
            print(bracket_mod.render(expr) if not args.all else f"mw={mw}: {bracket_mod.render(expr)}")
    if args.json:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    return 0


def _cmd_chart(args) -> int:
    s = Session(args.max_mw)
    if args.page == "e1":
        page = bock_mod.build_e1(args.max_mw)
    elif args.page == "bockstein-einf":
        page = s.bockstein()[1]
    elif args.page == "e3":
        page = s.e3()
    else:
        page = s.adams()[1]
    doc = charts_mod.render(page, args.format)
    Path(args.out).write_text(doc, encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def _cmd_verify(args) -> int:
    t0 = time.time()
    s = Session(args.max_mw, verify=args.page_verify)
    which = (
        list(VERIFY_SUITES) if args.suite == "all" else [args.suite]
    )
    full = Report()
    for name in which:
        rep = VERIFY_SUITES[name](s)
        status = "PASS" if rep.ok else "FAIL"
        print(f"[{status}] {name}: {rep.summary()}")
        for item in rep.failures()[:10]:
            print(f"    FAIL {item.check} [{item.instance}] {item.detail}")
        full.extend(rep)
    print(f"total: {full.summary()} in {time.time() - t0:.1f}s")
    if args.json:
        Path(args.json).write_text(full.to_json(), encoding="utf-8")
    return 0 if full.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etass",
        description=(
            "Exact spectral-sequence engine for the eta-inverted stable "
            "stems over the reals"
        ),
        epilog="ETASS_THREADS caps the internal worker count.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, dump=False):
        p.add_argument("--max-mw", type=int, default=DEFAULT_MW)
        p.add_argument(
            "--page-verify",
            choices=["auto", "all", "sample", "off"],
            default="auto",
            help="per-bidegree replay density for page transitions",
        )
        if dump:
            p.add_argument("--dump-pages", metavar="DIR")

    p = sub.add_parser("bockstein", help="run the first spectral sequence")
    add_common(p, dump=True)
    p.set_defaults(fn=_cmd_bockstein)

    p = sub.add_parser("adams", help="run the second spectral sequence")
    add_common(p, dump=True)
    p.set_defaults(fn=_cmd_adams)

    p = sub.add_parser("groups", help="print the stem groups")
    add_common(p)
    p.set_defaults(fn=_cmd_groups)

    p = sub.add_parser("brackets", help="bracket decompositions of the generators")
    p.add_argument("--mw", type=int)
    p.add_argument("--all", action="store_true")
    p.add_argument("--nested", action="store_true", help="expand to the leaves")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_brackets)

    p = sub.add_parser("chart", help="render a page")
    p.add_argument("--page", choices=["e1", "e3", "einf", "bockstein-einf"], required=True)
    p.add_argument("--format", choices=["svg", "ascii", "json"], required=True)
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(fn=_cmd_chart)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["all", *VERIFY_SUITES])
    p.add_argument("--json", metavar="FILE", help="write the full report as JSON")
    add_common(p)
    p.set_defaults(fn=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
