"""Graded monomial algebra underlying every spectral-sequence page.

Generators and their (Milnor-Witt, Chow) degrees:

    rho  (0, 1)       P  (4, 4)       v_n  (2^n - 1, 1)  for n >= 2

The unit h1 is normalized away throughout, so bidegrees live in the
plane where it vanishes.  Monomials are exponent data over these
generators; the normal form attaches all P powers to the v generator of
minimal index (divisibility p_exp = 0 mod 2^(n-1)) and enforces the
torsion bound rho_exp <= 2^n - 2 when requested.  Values are immutable
and operations pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class NormalizationFailure(Exception):
    """Exponent data does not admit the shifted normal form."""


class MissingRule(Exception):
    """A derivation met a factor with no rule and no cycle declaration."""


@dataclass(frozen=True, order=True)
class Bidegree:
    """A point (mw, c) in the Milnor-Witt/Chow plane."""

    mw: int
    c: int

    def __add__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.mw + other.mw, self.c + other.c)

    def __sub__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.mw - other.mw, self.c - other.c)

    def scaled(self, k: int) -> "Bidegree":
        return Bidegree(self.mw * k, self.c * k)


@dataclass(frozen=True)
class GeneratorSymbol:
    """One of rho, P, or v_n (n >= 2)."""

    kind: str  # "rho" | "P" | "v"
    index: int | None = None

    def __post_init__(self):
        if self.kind not in ("rho", "P", "v"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if (self.kind == "v") != (self.index is not None):
            raise ValueError("index is for v generators only")
        if self.kind == "v" and self.index < 2:
            raise ValueError("v generators start at index 2")

    @property
    def degree(self) -> Bidegree:
        if self.kind == "rho":
            return Bidegree(0, 1)
        if self.kind == "P":
            return Bidegree(4, 4)
        return Bidegree(2 ** self.index - 1, 1)


RHO = GeneratorSymbol("rho")
P = GeneratorSymbol("P")


def v(n: int) -> GeneratorSymbol:
    return GeneratorSymbol("v", n)


def v_degree(n: int) -> Bidegree:
    return Bidegree(2 ** n - 1, 1)


def default_generators(mw_max: int) -> list[GeneratorSymbol]:
    """rho, P and every v_n that fits the window (2^n - 1 <= mw_max + 1)."""
    gens = [RHO, P]
    n = 2
    while 2 ** n - 1 <= mw_max + 1:
        gens.append(v(n))
        n += 1
    return gens


def max_v_index(mw_max: int) -> int:
    n = 2
    while 2 ** (n + 1) - 1 <= mw_max + 1:
        n += 1
    return n


@dataclass(frozen=True, eq=False)
class Monomial:
    """rho^b P^e v_{n1}^{a1} ... as exponent data.

    v_exps is stored as a sorted tuple of (index, positive exponent)
    pairs so monomials are hashable and canonical.  Equality is by
    exponent data, so a monomial and its normal-form certificate wrapper
    compare equal.
    """

    rho_exp: int = 0
    p_exp: int = 0
    v_exps: tuple[tuple[int, int], ...] = ()

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return (
            self.rho_exp == other.rho_exp
            and self.p_exp == other.p_exp
            and self.v_exps == other.v_exps
        )

    def __hash__(self):
        return self._hash

    def __post_init__(self):
        if self.rho_exp < 0 or self.p_exp < 0:
            raise ValueError("negative exponent")
        last = 1
        for n, a in self.v_exps:
            if n <= last or a <= 0:
                raise ValueError("v_exps must be sorted with positive exponents")
            last = n
        object.__setattr__(
            self, "_hash", hash((self.rho_exp, self.p_exp, self.v_exps))
        )

    @classmethod
    def make(cls, rho: int = 0, p: int = 0, vs: Mapping[int, int] | None = None) -> "Monomial":
        pairs = tuple(sorted((n, a) for n, a in (vs or {}).items() if a))
        return cls(rho, p, pairs)

    @property
    def v_dict(self) -> dict[int, int]:
        return dict(self.v_exps)

    @property
    def min_v(self) -> int | None:
        return self.v_exps[0][0] if self.v_exps else None

    @property
    def bidegree(self) -> Bidegree:
        cached = getattr(self, "_bidegree", None)
        if cached is None:
            mw = 4 * self.p_exp
            c = self.rho_exp + 4 * self.p_exp
            for n, a in self.v_exps:
                mw += a * (2 ** n - 1)
                c += a
            cached = Bidegree(mw, c)
            object.__setattr__(self, "_bidegree", cached)
        return cached

    @property
    def total_exponent(self) -> int:
        return self.rho_exp + self.p_exp + sum(a for _, a in self.v_exps)

    def sort_key(self):
        """Graded reverse-lexicographic key, generator order rho < P < v2 < ...

        Between equal total exponents, the monomial with more of the
        earliest differing generator sorts first.
        """
        tail = [-self.rho_exp, -self.p_exp]
        if self.v_exps:
            top = self.v_exps[-1][0]
            exps = self.v_dict
            tail.extend(-exps.get(n, 0) for n in range(2, top + 1))
        return (self.total_exponent, tuple(tail))

    def is_one(self) -> bool:
        return self.rho_exp == 0 and self.p_exp == 0 and not self.v_exps

    def times_rho(self, k: int = 1) -> "Monomial":
        return Monomial(self.rho_exp + k, self.p_exp, self.v_exps)

    def raw_product(self, other: "Monomial") -> "Monomial":
        """Exponentwise sum, no normalization."""
        if not other.v_exps:
            pairs = self.v_exps
        elif not self.v_exps:
            pairs = other.v_exps
        else:
            merged = dict(self.v_exps)
            for n, a in other.v_exps:
                merged[n] = merged.get(n, 0) + a
            pairs = tuple(sorted(merged.items()))
        return Monomial(
            self.rho_exp + other.rho_exp, self.p_exp + other.p_exp, pairs
        )

    def without_v(self, n: int) -> "Monomial":
        """Divide by one factor of v_n."""
        pairs = []
        found = False
        for i, a in self.v_exps:
            if i == n:
                found = True
                if a > 1:
                    pairs.append((i, a - 1))
            else:
                pairs.append((i, a))
        if not found:
            raise ValueError(f"no v_{n} factor")
        return Monomial(self.rho_exp, self.p_exp, tuple(pairs))

    def __str__(self) -> str:
        parts = []
        if self.rho_exp:
            parts.append("rho" if self.rho_exp == 1 else f"rho^{self.rho_exp}")
        if self.p_exp:
            parts.append("P" if self.p_exp == 1 else f"P^{self.p_exp}")
        for n, a in self.v_exps:
            parts.append(f"v{n}" if a == 1 else f"v{n}^{a}")
        return " ".join(parts) if parts else "1"


@dataclass(frozen=True, eq=False)
class NormalMonomial(Monomial):
    """A monomial in shifted normal form.

    Construction checks the certificate: with minimal v index n, p_exp
    is a multiple of 2^(n-1); with no v factors, p_exp is zero.  The
    torsion bound is checked by normalize(), not here, so that both
    torsion modes can share the type.
    """

    def __post_init__(self):
        super().__post_init__()
        n = self.min_v
        if n is None:
            if self.p_exp:
                raise NormalizationFailure(f"pure P power P^{self.p_exp} is not normal")
        elif self.p_exp % 2 ** (n - 1):
            raise NormalizationFailure(
                f"p_exp {self.p_exp} not a multiple of 2^{n - 1} for minimal v_{n}"
            )


def normalize(m: Monomial, torsion: bool = True) -> NormalMonomial | None:
    """Shifted normal form of m, or None when torsion annihilates it.

    Raises NormalizationFailure on malformed input (p_exp not divisible
    by 2^(n_min - 1), or a pure P power); such input cannot arise from
    products of normal monomials.
    """
    n = m.min_v
    if torsion and n is not None and m.rho_exp >= 2 ** n - 1:
        return None
    return NormalMonomial(m.rho_exp, m.p_exp, m.v_exps)


def multiply(a: NormalMonomial, b: NormalMonomial) -> NormalMonomial | None:
    """Product in the truncated ring: exponent sum, then normal form
    with the torsion rule enabled."""
    return normalize(a.raw_product(b), torsion=True)


def enumerate_monomials(deg: Bidegree, generators: Sequence[GeneratorSymbol]) -> list[Monomial]:
    """All monomials of exactly this bidegree, in canonical order.

    Finite because every generator has Chow degree >= 1.
    """
    if deg.mw < 0 or deg.c < 0:
        raise ValueError("bidegree must be nonnegative")
    vs = sorted(g.index for g in generators if g.kind == "v")
    has_rho = any(g.kind == "rho" for g in generators)
    has_p = any(g.kind == "P" for g in generators)
    out: list[Monomial] = []

    def close(mw: int, c: int, acc: dict[int, int], p_exp: int):
        if mw != 0:
            return
        if c == 0:
            out.append(Monomial.make(0, p_exp, acc))
        elif has_rho:
            out.append(Monomial.make(c, p_exp, acc))

    def rec(i: int, mw: int, c: int, acc: dict[int, int], p_exp: int):
        if mw < 0 or c < 0:
            return
        if i == len(vs):
            close(mw, c, acc, p_exp)
            return
        n = vs[i]
        dmw = 2 ** n - 1
        a = 0
        while a * dmw <= mw and a <= c:
            if a:
                acc[n] = a
            rec(i + 1, mw - a * dmw, c - a, acc, p_exp)
            acc.pop(n, None)
            a += 1

    e = 0
    while 4 * e <= deg.mw and 4 * e <= deg.c:
        rec(0, deg.mw - 4 * e, deg.c - 4 * e, {}, e)
        if not has_p:
            break
        e += 1
    out.sort(key=Monomial.sort_key)
    return out


def enumerate_normal_monomials(deg: Bidegree, mw_max: int, torsion: bool = True) -> list[NormalMonomial]:
    """All normal monomials of this bidegree over default_generators."""
    out = []
    for m in enumerate_monomials(deg, default_generators(mw_max)):
        try:
            nm = normalize(m, torsion=torsion)
        except NormalizationFailure:
            continue
        if nm is not None:
            out.append(nm)
    return out


MonomialSum = tuple[Monomial, ...]


def _reduce_mod2(terms: list[Monomial]) -> list[Monomial]:
    if len(terms) <= 1:
        return terms
    counts: dict[Monomial, int] = {}
    for t in terms:
        counts[t] = counts.get(t, 0) + 1
    kept = [t for t, k in counts.items() if k % 2]
    kept.sort(key=Monomial.sort_key)
    return kept


@dataclass(frozen=True)
class Derivation:
    """A page differential presented by rules on generators.

    v_rules maps a v index to the image of that generator; a v index in
    v_cycles (or any index when all_v_cycles) is a declared cycle.
    p_rule = (q, image) differentiates P through the block generator
    P^q; p_exp must then be a multiple of q.  When p_attach_min = n, a
    monomial whose minimal v index is below n carries its P power as
    part of that torsion family's generator, which is a cycle, so no
    P term is produced.  rho is always a cycle.

    Every rule must shift bidegree by `shift`, checked on construction.
    """

    r: int
    shift: Bidegree
    v_rules: Mapping[int, MonomialSum] = field(default_factory=dict)
    all_v_cycles: bool = False
    v_cycles: frozenset[int] = frozenset()
    p_rule: tuple[int, Monomial] | None = None
    p_attach_min: int | None = None
    normalize_terms: bool = False

    def __post_init__(self):
        for n, terms in self.v_rules.items():
            src = v_degree(n)
            for t in terms:
                if t.bidegree != src + self.shift:
                    raise ValueError(f"rule for v{n} does not shift degree by {self.shift}")
        if self.p_rule is not None:
            q, img = self.p_rule
            if img.bidegree != Bidegree(4 * q, 4 * q) + self.shift:
                raise ValueError(f"rule for P^{q} does not shift degree by {self.shift}")


def leibniz_apply(d: Derivation, m: Monomial) -> list[Monomial]:
    """Apply the derivation to a monomial by the Leibniz rule.

    Sums the rule over factor positions; even multiplicities cancel in
    characteristic 2, so only the parity of each exponent matters.
    Raises MissingRule when a factor has no declared behavior.
    """
    terms: list[Monomial] = []
    for n, a in m.v_exps:
        rule = d.v_rules.get(n)
        if rule is not None:
            if a % 2:
                rest = m.without_v(n)
                terms.extend(rest.raw_product(t) for t in rule)
        elif not (d.all_v_cycles or n in d.v_cycles):
            raise MissingRule(f"no rule or cycle declaration for v{n}")
    if m.p_exp:
        attached = (
            d.p_attach_min is not None
            and m.min_v is not None
            and m.min_v < d.p_attach_min
        )
        if d.p_rule is not None and not attached:
            q, img = d.p_rule
            if m.p_exp % q:
                raise MissingRule(
                    f"P^{m.p_exp} is not a power of the block generator P^{q}"
                )
            if (m.p_exp // q) % 2:
                rest = Monomial(m.rho_exp, m.p_exp - q, m.v_exps)
                terms.append(rest.raw_product(img))
    out = _reduce_mod2(terms)
    if d.normalize_terms:
        kept = []
        for t in out:
            nt = normalize(t, torsion=True)
            if nt is not None:
                kept.append(nt)
        return kept
    return out
