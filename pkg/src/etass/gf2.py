"""Exact linear algebra over the two-element field.

Vectors pack their coefficients into a single Python integer (bit ``i``
is coordinate ``i``), so a row operation is one XOR regardless of width.
Everything is immutable after construction and all operations are pure,
so the functions here are safe to call from concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class SubspaceNotContained(Exception):
    """A vector of the claimed subspace is outside the ambient span."""


def _low_bit(bits: int) -> int:
    """Index of the lowest set bit (bits must be nonzero)."""
    return (bits & -bits).bit_length() - 1


@dataclass(frozen=True)
class F2Vector:
    """A fixed-length vector over GF(2); addition is bitwise XOR."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("coefficient index out of range")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "F2Vector":
        coeffs = list(coeffs)
        bits = 0
        for i, x in enumerate(coeffs):
            if x & 1:
                bits |= 1 << i
        return cls(len(coeffs), bits)

    @classmethod
    def unit(cls, length: int, index: int) -> "F2Vector":
        if not 0 <= index < length:
            raise ValueError("unit index out of range")
        return cls(length, 1 << index)

    def __add__(self, other: "F2Vector") -> "F2Vector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return F2Vector(self.length, self.bits ^ other.bits)

    __xor__ = __add__

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def support(self) -> list[int]:
        """Indices of the nonzero coordinates, ascending."""
        out, b = [], self.bits
        while b:
            i = _low_bit(b)
            out.append(i)
            b &= b - 1
        return out

    def coeffs(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def dot(self, other: "F2Vector") -> int:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return (self.bits & other.bits).bit_count() & 1


@dataclass(frozen=True)
class F2Matrix:
    """A matrix over GF(2), stored as a tuple of rows of equal length."""

    cols: int
    rows: tuple[F2Vector, ...]

    def __post_init__(self):
        for row in self.rows:
            if row.length != self.cols:
                raise ValueError("row length != cols")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int] | F2Vector], cols: int | None = None) -> "F2Matrix":
        vecs = [r if isinstance(r, F2Vector) else F2Vector.from_coeffs(r) for r in rows]
        if cols is None:
            if not vecs:
                raise ValueError("cols required for an empty matrix")
            cols = vecs[0].length
        return cls(cols, tuple(vecs))

    @classmethod
    def zero(cls, nrows: int, cols: int) -> "F2Matrix":
        return cls(cols, tuple(F2Vector(cols) for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, tuple(F2Vector.unit(n, i) for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> F2Vector:
        bits = 0
        for i, row in enumerate(self.rows):
            if (row.bits >> j) & 1:
                bits |= 1 << i
        return F2Vector(self.nrows, bits)

    def transpose(self) -> "F2Matrix":
        return F2Matrix(self.nrows, tuple(self.column(j) for j in range(self.cols)))

    def apply(self, v: F2Vector) -> F2Vector:
        """Matrix-vector product; v has length cols, result length nrows."""
        if v.length != self.cols:
            raise ValueError("length mismatch")
        bits = 0
        for i, row in enumerate(self.rows):
            if (row.bits & v.bits).bit_count() & 1:
                bits |= 1 << i
        return F2Vector(self.nrows, bits)


class Echelon:
    """Mutable reduced-echelon accumulator keyed by pivot column.

    Internal helper for rank/membership bookkeeping; rows are raw ints.
    """

    def __init__(self):
        self.pivots: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, bits: int) -> int:
        """Reduce bits against the stored rows; zero iff in the span.

        Stored rows are mutually reduced (0 in every other pivot
        column), so one pass in any order fully reduces.
        """
        if not bits:
            return 0
        for p, row in self.pivots.items():
            if (bits >> p) & 1:
                bits ^= row
                if not bits:
                    return 0
        return bits

    def insert(self, bits: int) -> bool:
        """Add a vector to the span.  Returns True if the rank grew."""
        bits = self.reduce(bits)
        if not bits:
            return False
        p = _low_bit(bits)
        for q, row in self.pivots.items():
            if (row >> p) & 1:
                self.pivots[q] = row ^ bits
        self.pivots[p] = bits
        return True

    def contains(self, bits: int) -> bool:
        return self.reduce(bits) == 0


def row_reduce(m: F2Matrix) -> tuple[F2Matrix, int, list[int]]:
    """Reduced row-echelon form over GF(2).

    Returns (reduced, rank, pivot_cols).  The reduced matrix has the
    nonzero rows first, ordered by strictly increasing pivot column,
    each pivot column containing a single 1; zero rows follow.
    """
    ech = Echelon()
    for row in m.rows:
        ech.insert(row.bits)
    pivot_cols = sorted(ech.pivots)
    out_rows = [F2Vector(m.cols, ech.pivots[p]) for p in pivot_cols]
    out_rows.extend(F2Vector(m.cols) for _ in range(m.nrows - len(out_rows)))
    return F2Matrix(m.cols, tuple(out_rows)), len(pivot_cols), pivot_cols


def rank(m: F2Matrix) -> int:
    return row_reduce(m)[1]


def kernel_basis(m: F2Matrix) -> list[F2Vector]:
    """Basis of {v : m.apply(v) = 0}, one vector per free column.

    The basis vector for free column f has coordinate f equal to 1 and
    support otherwise only on pivot columns, so the output is linearly
    independent and deterministic.
    """
    reduced, r, pivot_cols = row_reduce(m)
    pivot_set = set(pivot_cols)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        bits = 1 << f
        for i, p in enumerate(pivot_cols):
            if (reduced.rows[i].bits >> f) & 1:
                bits |= 1 << p
        basis.append(F2Vector(m.cols, bits))
    assert len(basis) == m.cols - r
    return basis


def quotient_basis(subspace: Sequence[F2Vector], ambient: Sequence[F2Vector]) -> list[F2Vector]:
    """Coset representatives for span(ambient) / span(subspace).

    Every subspace vector must lie in the ambient span, else
    SubspaceNotContained.  Representatives are chosen greedily,
    preferring standard basis vectors in index order (then ambient
    vectors in the given order), so the output is deterministic and a
    single-coordinate coset is always represented by its standard
    vector.
    """
    if not ambient:
        if any(not v.is_zero() for v in subspace):
            raise SubspaceNotContained("nonzero subspace with empty ambient")
        return []
    length = ambient[0].length
    amb = Echelon()
    for v in ambient:
        if v.length != length:
            raise ValueError("length mismatch in ambient")
        amb.insert(v.bits)
    acc = Echelon()
    for v in subspace:
        if v.length != length:
            raise ValueError("length mismatch in subspace")
        if not amb.contains(v.bits):
            raise SubspaceNotContained(f"vector {v.support()} outside ambient span")
        acc.insert(v.bits)
    want = amb.rank - acc.rank
    reps: list[F2Vector] = []
    for i in range(length):
        if len(reps) == want:
            return reps
        unit = 1 << i
        if amb.contains(unit) and acc.insert(unit):
            reps.append(F2Vector(length, unit))
    for v in ambient:
        if len(reps) == want:
            return reps
        if acc.insert(v.bits):
            reps.append(v)
    assert len(reps) == want
    return reps
