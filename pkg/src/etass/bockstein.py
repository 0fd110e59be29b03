"""The rho-Bockstein spectral sequence and the shared page engine.

A page stores, for every Milnor-Witt column, the rho-towers that are
alive: each rho-free monomial (a "family") spans the tower of its rho
multiples, and the page keeps the interval of rho exponents alive plus
the interval already hit by earlier differentials.  Differentials on
these pages send single monomials to single monomials, so each page
transition decomposes into tower-to-tower blocks whose homology is
interval arithmetic; every step is then replayed per bidegree through
gf2.kernel_basis/quotient_basis (at every bidegree up to
DENSE_VERIFY_LIMIT, on a deterministic sample above it) and any
disagreement raises.

Only pages r = 2^n - 1 carry differentials; the page list returned by
run_bockstein walks exactly those, and the E-infinity page is compared
against the closed-form answer by the caller.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .algebra import (
    Bidegree,
    Derivation,
    Monomial,
    leibniz_apply,
)
from .gf2 import Echelon, F2Matrix, F2Vector, kernel_basis, quotient_basis
from .parallel import tmap
from .report import Report

MW_MAX_DEFAULT = 64

# full per-bidegree verification below this window size, sampling above
DENSE_VERIFY_LIMIT = 96
# sampled replays skip instances whose three columns exceed this; the
# interval transition is still fully asserted there
SAMPLE_DIM_CAP = 1500
SAMPLES_PER_COLUMN = 6


def c_max_for(mw_max: int) -> int:
    return 2 * mw_max + 8


class EngineError(Exception):
    """The computed pages violate a structural invariant."""


class RepresentativeNotMonomial(EngineError):
    """A homology class has no single-monomial representative."""


# ---------------------------------------------------------------------------
# interval arithmetic on disjoint sorted half-open runs

Runs = tuple[tuple[int, int], ...]

EMPTY: Runs = ()


def runs_make(pairs: Iterable[tuple[int, int]]) -> Runs:
    pairs = sorted((lo, hi) for lo, hi in pairs if lo < hi)
    out: list[tuple[int, int]] = []
    for lo, hi in pairs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return tuple(out)


def runs_intersect(a: Runs, b: Runs) -> Runs:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def runs_subtract(a: Runs, b: Runs) -> Runs:
    if not a or not b:
        return a
    out = []
    j = 0
    for lo, hi in a:
        cur = lo
        while j < len(b) and b[j][1] <= cur:
            j += 1
        k = j
        while k < len(b) and b[k][0] < hi:
            blo, bhi = b[k]
            if cur < blo:
                out.append((cur, min(blo, hi)))
            cur = max(cur, bhi)
            if cur >= hi:
                break
            k += 1
        if cur < hi:
            out.append((cur, hi))
    return tuple(out)


def runs_union(a: Runs, b: Runs) -> Runs:
    return runs_make(list(a) + list(b))


def runs_shift(a: Runs, k: int) -> Runs:
    return tuple((lo + k, hi + k) for lo, hi in a)


def runs_clip(a: Runs, lo: int, hi: int) -> Runs:
    return runs_intersect(a, ((lo, hi),)) if lo < hi else EMPTY


def runs_total(a: Runs) -> int:
    return sum(hi - lo for lo, hi in a)


def runs_contain(a: Runs, x: int) -> bool:
    for lo, hi in a:
        if lo <= x < hi:
            return True
        if x < lo:
            return False
    return False


def runs_subset(a: Runs, b: Runs) -> bool:
    return runs_subtract(a, b) == EMPTY


# ---------------------------------------------------------------------------
# columns of rho-free families

def _fam_key0(fam: Monomial):
    """Column-local order key; the induced order of classes inside one
    bidegree is independent of the Chow coordinate."""
    deg0 = fam.total_exponent
    c0 = fam.bidegree.c
    return (deg0 - c0, c0) + fam.sort_key()[1][1:]


@dataclass
class Column:
    fams: list[Monomial]  # sorted by _fam_key0
    c0: dict[Monomial, int]


def enumerate_families(mw_max: int) -> dict[int, Column]:
    """All rho-free monomials over the window's generators, by mw."""
    vs = []
    n = 2
    while 2 ** n - 1 <= mw_max + 1:
        vs.append(n)
        n += 1
    per_mw: dict[int, list[Monomial]] = {m: [] for m in range(mw_max + 2)}

    def rec(i: int, mw: int, acc: dict[int, int]):
        e = 0
        while mw + 4 * e <= mw_max + 1:
            per_mw[mw + 4 * e].append(Monomial.make(0, e, acc))
            e += 1
        for j in range(i, len(vs)):
            step = 2 ** vs[j] - 1
            if mw + step > mw_max + 1:
                break
            acc[vs[j]] = acc.get(vs[j], 0) + 1
            rec(j, mw + step, acc)
            acc[vs[j]] -= 1
            if not acc[vs[j]]:
                del acc[vs[j]]

    rec(0, 0, {})
    cols = {}
    for mw, fams in per_mw.items():
        fams.sort(key=_fam_key0)
        cols[mw] = Column(fams, {f: f.bidegree.c for f in fams})
    return cols


# ---------------------------------------------------------------------------
# towers and pages

@dataclass(frozen=True)
class TorsionTower:
    """One maximal rho-run: generator, number of alive classes, and
    whether the run was cut off by the Chow truncation rather than by
    torsion."""

    generator: Monomial
    length: int
    truncated: bool

    @property
    def mw(self) -> int:
        return self.generator.bidegree.mw


Edge = tuple[Monomial, int, int]  # (target family, rho shift, minimal source b)


@dataclass
class Page:
    """One spectral-sequence page over the truncated window.

    `alive` holds the surviving rho-intervals per family, `zero` the
    intervals already hit (known-zero classes).  `rule` is the
    differential acting on this page (None once the sequence has
    collapsed); `edges` is its family-level form used for matrices.
    """

    kind: str
    label: str
    r: int
    max_mw: int
    c_max: int
    c_internal: int
    columns: dict[int, Column]
    alive: dict[int, dict[Monomial, Runs]]
    zero: dict[int, dict[Monomial, Runs]]
    rule: Derivation | None = None
    edges: dict[int, dict[Monomial, Edge]] = field(default_factory=dict)
    # differential given as an explicit class-level map instead of a
    # derivation (the later Adams pages)
    rule_fn: Callable[[Monomial], list[Monomial]] | None = None
    shift_override: Bidegree | None = None
    # ring-level torsion of the underlying model: monomials it reports
    # as zero are the zero element, not classes
    is_model_zero: Callable[[Monomial], bool] | None = None
    _alive_sorted: dict[int, list[tuple[Monomial, int, Runs]]] = field(
        default_factory=dict, repr=False
    )
    _c0_index: dict[int, tuple] = field(default_factory=dict, repr=False)
    _dims_cache: dict[int, dict[int, int]] = field(default_factory=dict, repr=False)
    _image_cache: dict[Monomial, list[Monomial]] = field(
        default_factory=dict, repr=False
    )

    # -- basis ----------------------------------------------------------
    def alive_runs(self, mw: int, fam: Monomial) -> Runs:
        return self.alive.get(mw, {}).get(fam, EMPTY)

    def _column_alive(self, mw: int) -> list[tuple[Monomial, int, Runs]]:
        """(family, c0, runs) for the alive families in column order."""
        cached = self._alive_sorted.get(mw)
        if cached is None:
            col = self.columns.get(mw)
            per = self.alive.get(mw, {})
            cached = (
                []
                if col is None
                else [
                    (fam, col.c0[fam], per[fam]) for fam in col.fams if fam in per
                ]
            )
            self._alive_sorted[mw] = cached
        return cached

    def _column_by_c0(self, mw: int):
        """Alive families bucketed for Chow lookups: entries sorted by
        c0 with their column position, plus the widest run extent."""
        cached = self._c0_index.get(mw)
        if cached is None:
            entries = sorted(
                (c0, pos, fam, runs)
                for pos, (fam, c0, runs) in enumerate(self._column_alive(mw))
            )
            c0s = [e[0] for e in entries]
            maxspan = max((r[-1][1] for *_, r in entries if r), default=0)
            cached = (c0s, entries, maxspan)
            self._c0_index[mw] = cached
        return cached

    def basis_at(self, mw: int, c: int) -> list[Monomial]:
        """Ordered class representatives at one bidegree."""
        import bisect

        c0s, entries, maxspan = self._column_by_c0(mw)
        hi = bisect.bisect_right(c0s, c)
        lo = bisect.bisect_left(c0s, c - maxspan + 1) if maxspan else hi
        picked = []
        for c0, pos, fam, runs in entries[lo:hi]:
            b = c - c0
            if runs_contain(runs, b):
                picked.append((pos, fam.times_rho(b) if b else fam))
        picked.sort()
        return [m for _, m in picked]

    def dim_at(self, mw: int, c: int) -> int:
        return len(self.basis_at(mw, c))

    def dims_column(self, mw: int) -> dict[int, int]:
        """dim at every Chow degree of one column, c <= c_max."""
        cached = self._dims_cache.get(mw)
        if cached is not None:
            return cached
        diff = [0] * (self.c_max + 2)
        col = self.columns.get(mw)
        if col is None:
            self._dims_cache[mw] = {}
            return {}
        for fam, runs in self.alive.get(mw, {}).items():
            c0 = col.c0[fam]
            for lo, hi in runs:
                a = c0 + lo
                b = min(c0 + hi, self.c_max + 1)
                if a <= self.c_max and a < b:
                    diff[a] += 1
                    diff[b] -= 1
        out: dict[int, int] = {}
        acc = 0
        for c in range(self.c_max + 1):
            acc += diff[c]
            if acc:
                out[c] = acc
        self._dims_cache[mw] = out
        return out

    def status(self, m: Monomial) -> str:
        """'alive', 'zero', or 'absent' for a monomial on this page."""
        fam = Monomial(0, m.p_exp, m.v_exps)
        mw = fam.bidegree.mw
        b = m.rho_exp
        if runs_contain(self.alive.get(mw, {}).get(fam, EMPTY), b):
            return "alive"
        if runs_contain(self.zero.get(mw, {}).get(fam, EMPTY), b):
            return "zero"
        if self.is_model_zero is not None and self.is_model_zero(m):
            return "zero"
        return "absent"

    # -- differential ----------------------------------------------------
    def apply_rule(self, m: Monomial) -> list[Monomial]:
        if self.rule is None and self.rule_fn is None:
            return []
        cached = self._image_cache.get(m)
        if cached is None:
            cached = (
                self.rule_fn(m) if self.rule_fn is not None else leibniz_apply(self.rule, m)
            )
            self._image_cache[m] = cached
        return cached

    def image_classes(self, m: Monomial) -> list[Monomial]:
        """Image of a class under the page differential, expanded over
        the alive classes of the target bidegree."""
        out = []
        for term in self.apply_rule(m):
            st = self.status(term)
            if st == "alive":
                out.append(term)
            elif st != "zero":
                raise EngineError(f"image term {term} is neither alive nor hit")
        return out

    def diff_shift(self) -> Bidegree:
        if self.rule is not None:
            return self.rule.shift
        if self.shift_override is not None:
            return self.shift_override
        return Bidegree(-1, 0)

    def diff_matrix_at(self, mw: int, c: int) -> tuple[F2Matrix, list[Monomial], list[Monomial]]:
        """(matrix, source basis, target basis); column j is the image
        of source class j expanded over target classes."""
        shift = self.diff_shift()
        src = self.basis_at(mw, c)
        tgt = self.basis_at(mw + shift.mw, c + shift.c)
        index = {m: i for i, m in enumerate(tgt)}
        rows_bits = [0] * len(tgt)
        for j, m in enumerate(src):
            for img in self.image_classes(m):
                rows_bits[index[img]] ^= 1 << j
        rows = tuple(F2Vector(len(src), b) for b in rows_bits)
        return F2Matrix(len(src), rows), src, tgt

    def differentials(self) -> list[tuple[Monomial, list[Monomial]]]:
        """All nonzero differentials on this page inside the reporting
        window, as (source class, image classes)."""
        if self.rule is None and self.rule_fn is None:
            return []
        out = []
        for mw in sorted(self.alive):
            if mw > self.max_mw:
                continue
            for fam, c0, runs in self._column_alive(mw):
                for lo, hi in runs:
                    for b in range(lo, min(hi, self.c_max - c0 + 1)):
                        m = fam.times_rho(b) if b else fam
                        img = self.image_classes(m)
                        if img:
                            out.append((m, img))
        return out

    # -- rho action -------------------------------------------------------
    def rho_matrix_at(self, mw: int, c: int) -> F2Matrix:
        """Multiplication by rho from (mw, c) to (mw, c+1) in the page
        bases."""
        src = self.basis_at(mw, c)
        tgt = self.basis_at(mw, c + 1)
        index = {m: i for i, m in enumerate(tgt)}
        rows_bits = [0] * len(tgt)
        for j, m in enumerate(src):
            up = m.times_rho()
            st = self.status(up)
            if st == "alive":
                rows_bits[index[up]] |= 1 << j
            elif st != "zero":
                raise EngineError(f"rho multiple {up} is neither alive nor hit")
        return F2Matrix(len(src), tuple(F2Vector(len(src), b) for b in rows_bits))

    def towers(self) -> list[TorsionTower]:
        out = []
        for mw in sorted(self.alive):
            if mw > self.max_mw:
                continue
            col = self.columns[mw]
            for fam in col.fams:
                runs = self.alive[mw].get(fam)
                if not runs:
                    continue
                blim = self.c_internal - col.c0[fam] + 1
                for lo, hi in runs:
                    out.append(
                        TorsionTower(
                            generator=fam.times_rho(lo) if lo else fam,
                            length=hi - lo,
                            truncated=hi >= blim,
                        )
                    )
        return out

    def classes(self) -> Iterable[tuple[int, int, Monomial]]:
        """(mw, c, class) over the reporting window, ordered."""
        for mw in sorted(self.alive):
            if mw > self.max_mw:
                continue
            col = self.columns[mw]
            per_c: dict[int, list[Monomial]] = {}
            for fam in col.fams:
                c0 = col.c0[fam]
                for lo, hi in self.alive[mw].get(fam, EMPTY):
                    for b in range(lo, min(hi, self.c_max - c0 + 1)):
                        per_c.setdefault(c0 + b, []).append(
                            fam.times_rho(b) if b else fam
                        )
            for c in sorted(per_c):
                ordered = self.basis_at(mw, c)
                assert set(ordered) == set(per_c[c])
                for m in ordered:
                    yield mw, c, m


# ---------------------------------------------------------------------------
# differential rules

def bockstein_rule(n: int) -> Derivation:
    """Page 2^n - 1 differential: the block generator P^(2^(n-2)) maps
    to rho^(2^n - 1) v_n; every other page generator is a cycle, and P
    powers attached to a v family of index below n ride along."""
    if n < 2:
        raise ValueError("n >= 2")
    r = 2 ** n - 1
    block = 2 ** (n - 2) if n > 2 else 1
    image = Monomial.make(r, 0, {n: 1})
    return Derivation(
        r=r,
        shift=Bidegree(-1, 0),
        all_v_cycles=True,
        p_rule=(block, image),
        p_attach_min=n,
    )


def _edges_from_rule(
    alive: dict[int, dict[Monomial, Runs]], rule: Derivation
) -> dict[int, dict[Monomial, Edge]]:
    """Family-level form of a single-monomial derivation on the alive
    families, with injectivity of family images checked per target
    column."""
    edges: dict[int, dict[Monomial, Edge]] = {}
    back: dict[tuple[int, Monomial], Monomial] = {}
    p_only = rule.p_rule is not None and not rule.v_rules
    attach = rule.p_attach_min
    for mw in sorted(alive):
        for fam in alive[mw]:
            if p_only and not fam.p_exp:
                continue
            # the attachment test leibniz_apply would perform anyway
            if attach is not None and fam.min_v is not None and fam.min_v < attach:
                continue
            img = leibniz_apply(rule, fam)
            if not img:
                continue
            if len(img) != 1:
                raise EngineError(f"family image of {fam} is not a single monomial")
            (target,) = img
            if target.rho_exp < rule.r:
                raise EngineError(f"family image {target} has rho exponent below r")
            tfam = Monomial(0, target.p_exp, target.v_exps)
            key = (mw - 1, tfam)
            if key in back:
                raise EngineError(f"families {back[key]} and {fam} share image {tfam}")
            back[key] = fam
            edges.setdefault(mw, {})[fam] = (tfam, target.rho_exp, 0)
    return edges


# ---------------------------------------------------------------------------
# page transitions

def _advance(page: Page) -> tuple[dict[int, dict[Monomial, Runs]], dict[int, dict[Monomial, Runs]]]:
    """Homology of the page differential, tower by tower.

    Each family maps to at most one family and receives from at most
    one, so every bidegree's matrix is a direct sum of 1x1 blocks and
    the surviving classes form interval complements.  The per-bidegree
    claim is re-derived through gf2 by verify_transition afterwards.
    """
    incoming: dict[int, dict[Monomial, tuple[Monomial, int, int]]] = {}
    for mw, per in page.edges.items():
        for fam, (tfam, delta, min_b) in per.items():
            incoming.setdefault(mw - 1, {})[tfam] = (fam, delta, min_b)

    new_alive: dict[int, dict[Monomial, Runs]] = {}
    new_zero: dict[int, dict[Monomial, Runs]] = {}
    for mw, per_fam in page.alive.items():
        na: dict[Monomial, Runs] = {}
        nz: dict[Monomial, Runs] = dict(page.zero.get(mw, {}))
        out_edges = page.edges.get(mw, {})
        in_edges = incoming.get(mw, {})
        for fam, runs in per_fam.items():
            if not out_edges and not in_edges:
                na[fam] = runs
                continue
            edge = out_edges.get(fam)
            if edge is not None:
                tfam, delta, min_b = edge
                target_alive = page.alive_runs(mw - 1, tfam)
                nonzero_domain = runs_intersect(
                    runs_shift(target_alive, -delta),
                    ((min_b, runs[-1][1]),) if runs else EMPTY,
                )
                kernel = runs_subtract(runs, nonzero_domain)
            else:
                kernel = runs
            inc = in_edges.get(fam)
            if inc is not None:
                sfam, sdelta, smin = inc
                src_alive = page.alive_runs(mw + 1, sfam)
                src_alive = runs_intersect(
                    src_alive, ((smin, src_alive[-1][1]),) if src_alive else EMPTY
                )
                hit = runs_intersect(runs_shift(src_alive, sdelta), runs)
            else:
                hit = EMPTY
            if hit and not runs_subset(hit, kernel):
                raise EngineError(f"d o d != 0 at mw={mw} family {fam}")
            alive = runs_subtract(kernel, hit)
            if alive:
                na[fam] = alive
            if hit:
                nz[fam] = runs_union(nz.get(fam, EMPTY), hit)
        new_alive[mw] = na
        new_zero[mw] = {f: r for f, r in nz.items() if r}
    return new_alive, new_zero


def _replay_bidegree(
    page: Page,
    new_alive: dict[int, dict[Monomial, Runs]],
    new_zero: dict[int, dict[Monomial, Runs]],
    mw: int,
    c: int,
) -> None:
    """Recompute the homology at one bidegree with gf2 and compare.

    Kernel and coset representatives come from kernel_basis and
    quotient_basis on the honest Leibniz-expanded matrices; raises
    EngineError (or RepresentativeNotMonomial) on any disagreement with
    the tower transition.
    """
    shift = page.diff_shift()
    mid = page.basis_at(mw, c)
    if not mid:
        return
    src = page.basis_at(mw + 1, c - shift.c)
    tgt = page.basis_at(mw - 1, c + shift.c)
    tgt_index = {m: i for i, m in enumerate(tgt)}

    def expand_bits(m: Monomial, index: dict[Monomial, int]) -> int:
        bits = 0
        for term in page.apply_rule(m):
            i = index.get(term)
            if i is not None:
                bits ^= 1 << i
            elif page.status(term) != "zero":
                raise EngineError(f"image term {term} is neither alive nor hit")
        return bits

    rows_bits = [0] * len(tgt)
    for j, m in enumerate(mid):
        col = expand_bits(m, tgt_index)
        while col:
            i = (col & -col).bit_length() - 1
            rows_bits[i] |= 1 << j
            col &= col - 1
    m_out = F2Matrix(len(mid), tuple(F2Vector(len(mid), b) for b in rows_bits))
    kernel = kernel_basis(m_out)
    mid_index = {m: i for i, m in enumerate(mid)}
    boundaries = [
        F2Vector(len(mid), b)
        for b in (expand_bits(m, mid_index) for m in src)
        if b
    ]
    reps = quotient_basis(boundaries, kernel)

    got: list[Monomial] = []
    for v in reps:
        sup = v.support()
        if len(sup) != 1:
            raise RepresentativeNotMonomial(
                f"no single-monomial representative at mw={mw}, c={c}: {v.coeffs()}"
            )
        got.append(mid[sup[0]])

    # surviving classes are a subset of the old ones, in the same order
    new_col = new_alive.get(mw, {})
    expected = [
        m
        for m in mid
        if runs_contain(
            new_col.get(Monomial(0, m.p_exp, m.v_exps), EMPTY), m.rho_exp
        )
    ]
    if got != expected:
        raise EngineError(
            f"homology mismatch at mw={mw}, c={c}: gf2 gives {list(map(str, got))}, "
            f"towers give {list(map(str, expected))}"
        )

    # classes newly hit must span exactly the boundary space
    ech = Echelon()
    for v in boundaries:
        ech.insert(v.bits)
    newly_zero = []
    for i, m in enumerate(mid):
        fam = Monomial(0, m.p_exp, m.v_exps)
        b = m.rho_exp
        if runs_contain(new_zero.get(mw, {}).get(fam, EMPTY), b) and not runs_contain(
            page.zero.get(mw, {}).get(fam, EMPTY), b
        ):
            newly_zero.append(i)
            if not ech.contains(1 << i):
                raise EngineError(f"class {m} marked hit but outside boundary span")
    if len(newly_zero) != ech.rank:
        raise EngineError(f"boundary rank mismatch at mw={mw}, c={c}")


def verify_transition(
    page: Page,
    new_alive,
    new_zero,
    mode: str,
    seed: int = 0,
) -> int:
    """Replay the transition per bidegree via gf2.  mode 'all' covers
    every bidegree with classes; 'sample' covers all run endpoints plus
    deterministic random picks per column, skipping instances larger
    than SAMPLE_DIM_CAP.  Returns the number of bidegrees checked."""
    if mode == "off":
        return 0

    def column_bidegrees(mw: int) -> list[int]:
        col = page.columns.get(mw)
        if col is None:
            return []
        cs: set[int] = set()
        if mode == "all":
            for fam, runs in page.alive.get(mw, {}).items():
                c0 = col.c0[fam]
                for lo, hi in runs:
                    cs.update(range(c0 + lo, min(c0 + hi, page.c_internal + 1)))
        else:
            rng = random.Random((seed, page.r, mw).__hash__())
            pool: set[int] = set()
            column = page._column_alive(mw)
            stride = max(1, len(column) // 64)
            for fam, c0, runs in column[:: stride]:
                for lo, hi in runs:
                    pool.add(c0 + lo)
                    pool.add(min(c0 + hi - 1, page.c_internal))
                    pool.add(min(c0 + hi, page.c_internal))
                    pool.add((c0 + lo + min(c0 + hi, page.c_internal)) // 2)
            dims = {d: page.dims_column(mw + d) for d in (-1, 0, 1)}
            pool = {
                c
                for c in pool
                if dims[0].get(c, 0)
                and dims[0].get(c, 0) + dims[1].get(c, 0) + dims[-1].get(c, 0)
                <= SAMPLE_DIM_CAP
            }
            cs = set(rng.sample(sorted(pool), min(len(pool), SAMPLES_PER_COLUMN)))
        return sorted(c for c in cs if 0 <= c <= page.c_internal)

    def check_column(mw: int) -> int:
        count = 0
        for c in column_bidegrees(mw):
            _replay_bidegree(page, new_alive, new_zero, mw, c)
            count += 1
        return count

    return sum(tmap(check_column, sorted(page.alive)))


# ---------------------------------------------------------------------------
# the Bockstein run

def _full_runs(columns: dict[int, Column], c_internal: int) -> dict[int, dict[Monomial, Runs]]:
    alive: dict[int, dict[Monomial, Runs]] = {}
    for mw, col in columns.items():
        alive[mw] = {
            fam: ((0, c_internal - col.c0[fam] + 1),)
            for fam in col.fams
            if col.c0[fam] <= c_internal
        }
    return alive


def build_e1(mw_max: int) -> Page:
    """The first page: every monomial over rho, P, v_n, no relations,
    zero differential."""
    if mw_max < 0:
        raise ValueError("mw_max >= 0")
    c_max = c_max_for(mw_max)
    columns = enumerate_families(mw_max)
    return Page(
        kind="bockstein",
        label="bockstein-E1",
        r=1,
        max_mw=mw_max,
        c_max=c_max,
        c_internal=c_max,
        columns=columns,
        alive=_full_runs(columns, c_max),
        zero={mw: {} for mw in columns},
    )


def bockstein_page_indices(mw_max: int) -> list[int]:
    out = []
    n = 2
    while 2 ** n - 1 <= mw_max + 1:
        out.append(2 ** n - 1)
        n += 1
    return out


def run_bockstein(
    mw_max: int,
    *,
    verify: str = "auto",
    seed: int = 0,
) -> tuple[list[Page], Page]:
    """Run the sequence from E1 to its last differential page.

    Returns the pages that carry differentials (r = 2^n - 1) and the
    stable page after the last one; all other page indices are identity
    steps.  verify is 'all', 'sample', 'off' or 'auto' (dense up to
    DENSE_VERIFY_LIMIT).
    """
    if verify == "auto":
        verify = "all" if mw_max <= DENSE_VERIFY_LIMIT else "sample"
    e1 = build_e1(mw_max)
    columns = e1.columns
    alive, zero = e1.alive, e1.zero
    pages: list[Page] = []
    last_r = 1
    for r in bockstein_page_indices(mw_max):
        n = r.bit_length()  # r = 2^n - 1
        rule = bockstein_rule(n)
        page = Page(
            kind="bockstein",
            label=f"bockstein-E{r}",
            r=r,
            max_mw=mw_max,
            c_max=e1.c_max,
            c_internal=e1.c_internal,
            columns=columns,
            alive=alive,
            zero=zero,
            rule=rule,
            edges=_edges_from_rule(alive, rule),
        )
        new_alive, new_zero = _advance(page)
        verify_transition(page, new_alive, new_zero, verify, seed)
        pages.append(page)
        alive, zero = new_alive, new_zero
        last_r = r
    einfty = Page(
        kind="bockstein",
        label="bockstein-Einf",
        r=last_r + 1,
        max_mw=mw_max,
        c_max=e1.c_max,
        c_internal=e1.c_internal,
        columns=columns,
        alive=alive,
        zero=zero,
    )
    return pages, einfty


def closed_form_einfty(mw_max: int, columns: dict[int, Column] | None = None) -> Page:
    """The predicted stable page: the rho tower on 1, and for every
    normal monomial with minimal v index n a tower of length 2^n - 1.

    Pass the columns of an already-built page to skip re-enumeration.
    """
    if mw_max < 0:
        raise ValueError("mw_max >= 0")
    c_max = c_max_for(mw_max)
    if columns is None:
        columns = enumerate_families(mw_max)
    alive: dict[int, dict[Monomial, Runs]] = {}
    for mw, col in columns.items():
        per: dict[Monomial, Runs] = {}
        for fam in col.fams:
            n = fam.min_v
            if n is None:
                if fam.p_exp == 0:
                    per[fam] = ((0, c_max - col.c0[fam] + 1),)
                continue
            if fam.p_exp % 2 ** (n - 1):
                continue
            per[fam] = ((0, 2 ** n - 1),)
        alive[mw] = per
    return Page(
        kind="bockstein",
        label="bockstein-Einf-closed-form",
        r=0,
        max_mw=mw_max,
        c_max=c_max,
        c_internal=c_max,
        columns=columns,
        alive=alive,
        zero={mw: {} for mw in columns},
    )


def compare_pages(computed: Page, predicted: Page, check: str) -> Report:
    """Dimension-by-bidegree and tower-by-tower equality inside the
    reporting window."""
    rep = Report()
    bad_dims = []
    for mw in range(computed.max_mw + 1):
        got = computed.dims_column(mw)
        want = predicted.dims_column(mw)
        if got != want:
            diffs = {
                c: (got.get(c, 0), want.get(c, 0))
                for c in sorted(set(got) | set(want))
                if got.get(c, 0) != want.get(c, 0)
            }
            bad_dims.append((mw, diffs))
    rep.add(
        check,
        "dimensions",
        not bad_dims,
        "" if not bad_dims else f"mismatched columns: {bad_dims[:4]}",
    )
    got_towers = sorted(
        (t.generator.bidegree.mw, t.generator.bidegree.c, t.length, t.truncated)
        for t in computed.towers()
    )
    want_towers = sorted(
        (t.generator.bidegree.mw, t.generator.bidegree.c, t.length, t.truncated)
        for t in predicted.towers()
    )
    rep.add(
        check,
        "towers",
        got_towers == want_towers,
        "" if got_towers == want_towers else "tower lists differ",
    )
    return rep


def rho_inverted_check(einfty: Page) -> Report:
    """Only the 0-column may carry a tower that reaches the truncation
    boundary."""
    rep = Report()
    boundary = [t for t in einfty.towers() if t.truncated]
    bad = [t for t in boundary if t.mw != 0]
    rep.add(
        "rho-inverted",
        "unbounded towers confined to mw=0",
        not bad,
        "" if not bad else f"boundary towers at {[str(t.generator) for t in bad]}",
    )
    rep.add(
        "rho-inverted",
        "mw=0 tower unbounded",
        any(t.mw == 0 for t in boundary),
        "",
    )
    return rep
