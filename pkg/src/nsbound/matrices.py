"""Matrices over the Laurent polynomial ring: determinants, minors, norms.

Determinants are exact.  Small matrices use cofactor expansion; from size 4
upwards a fraction-free Bareiss elimination keeps intermediate entries from
blowing up, with the required exact divisions carried out by leading-term
polynomial division (a failed division indicates a bug, not bad input, and
raises accordingly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .poly import DimensionMismatch, GaussianRational, LaurentPoly

DEFAULT_MINOR_CAP = 10**6


class ZeroMatrixError(ValueError):
    """The all-zero matrix has no non-vanishing minor."""


class MinorSearchCapExceeded(RuntimeError):
    """Minor enumeration would exceed the configured candidate budget."""

    def __init__(self, size: int, candidates: int, cap: int):
        super().__init__(
            f"minor search at size {size} needs {candidates} candidate index"
            f" pairs, beyond the cap of {cap}"
        )
        self.size = size
        self.candidates = candidates
        self.cap = cap


class ExactDivisionError(ArithmeticError):
    """Internal error: a division that must be exact left a remainder."""


class PolyMatrix:
    """A rectangular matrix of LaurentPoly entries sharing one dimension."""

    __slots__ = ("rows", "cols", "dim", "entries")

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]]):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix needs at least one row and one column")
        ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        dim = max(p.dim for r in rows for p in r)
        lifted = [[p.lift(dim) for p in r] for r in rows]
        self.rows = len(rows)
        self.cols = ncols
        self.dim = dim
        self.entries = tuple(tuple(r) for r in lifted)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def __repr__(self) -> str:
        return f"<PolyMatrix {self.rows}x{self.cols} over {self.dim} variables>"

    def is_zero(self) -> bool:
        return all(p.is_zero() for r in self.entries for p in r)

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> PolyMatrix:
        rows = list(rows)
        cols = list(cols)
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def star_transpose(self) -> PolyMatrix:
        """Transpose combined with the star involution on every entry."""
        return PolyMatrix(
            [[self.entries[i][j].star() for i in range(self.rows)] for j in range(self.cols)]
        )

    def l1_norm(self) -> float:
        """Max over entries of the entry L1 norms (0.0 for the zero matrix)."""
        return max(p.l1_norm() for r in self.entries for p in r)

    def op_norm_upper(self) -> float:
        """Certified upper bound rows*cols*l1_norm for the operator norm."""
        return self.rows * self.cols * self.l1_norm()


# -- exact division and determinants ---------------------------------------


def _shift_to_ordinary(p: LaurentPoly) -> tuple[LaurentPoly, tuple[int, ...]]:
    """Divide out the per-coordinate valuation so all exponents are >= 0.

    Normalizing both operands of a division to valuation exactly 0 makes
    the quotient an ordinary polynomial whenever the Laurent quotient
    exists, so plain leading-term division applies.
    """
    if p.is_zero():
        return p, (0,) * p.dim
    mins = [min(exp[j] for exp in p.terms) for j in range(p.dim)]
    shifted = LaurentPoly(
        p.dim,
        {tuple(e - m for e, m in zip(exp, mins)): c for exp, c in p.terms.items()},
    )
    return shifted, tuple(mins)


def exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact quotient a / b in the Laurent ring; raises if b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero():
        return LaurentPoly.zero(a.dim)
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")
    ah, sa = _shift_to_ordinary(a)
    bh, sb = _shift_to_ordinary(b)
    b_lead_exp = next(reversed(bh.terms))
    b_lead_coeff = bh.terms[b_lead_exp]
    quotient: dict[tuple[int, ...], GaussianRational] = {}
    rem = ah
    while not rem.is_zero():
        r_lead_exp = next(reversed(rem.terms))
        t_exp = tuple(r - b for r, b in zip(r_lead_exp, b_lead_exp))
        if any(e < 0 for e in t_exp):
            raise ExactDivisionError(
                "leading term is not divisible; quotient would not be exact"
            )
        t_coeff = rem.terms[r_lead_exp] / b_lead_coeff
        quotient[t_exp] = t_coeff
        rem = rem - LaurentPoly.monomial(rem.dim, t_exp, t_coeff) * bh
    shift = tuple(x - y for x, y in zip(sa, sb))
    return LaurentPoly(
        a.dim, {tuple(e + s for e, s in zip(exp, shift)): c for exp, c in quotient.items()}
    )


def determinant_cofactor(B: PolyMatrix) -> LaurentPoly:
    """Determinant by recursive first-row expansion (exact, exponential)."""
    if B.rows != B.cols:
        raise ValueError(f"determinant of a non-square {B.rows}x{B.cols} matrix")
    return _det_cofactor(B.entries, B.dim)


def _det_cofactor(rows: Sequence[Sequence[LaurentPoly]], dim: int) -> LaurentPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = LaurentPoly.zero(dim)
    for j, top in enumerate(rows[0]):
        if top.is_zero():
            continue
        sub = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        cof = top * _det_cofactor(sub, dim)
        total = total + cof if j % 2 == 0 else total - cof
    return total


def determinant_bareiss(B: PolyMatrix) -> LaurentPoly:
    """Determinant by fraction-free elimination with exact division."""
    if B.rows != B.cols:
        raise ValueError(f"determinant of a non-square {B.rows}x{B.cols} matrix")
    n = B.rows
    M = [list(row) for row in B.entries]
    sign = 1
    prev = LaurentPoly.const(B.dim, 1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return LaurentPoly.zero(B.dim)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                elt = M[k][k] * M[i][j] - M[i][k] * M[k][j]
                if k > 0:
                    elt = exact_div(elt, prev)
                M[i][j] = elt
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def determinant(B: PolyMatrix) -> LaurentPoly:
    """Exact determinant: cofactor expansion up to 3x3, Bareiss beyond."""
    if B.rows != B.cols:
        raise ValueError(f"determinant of a non-square {B.rows}x{B.cols} matrix")
    if B.rows <= 3:
        return determinant_cofactor(B)
    return determinant_bareiss(B)


def minor(A: PolyMatrix, rows: Iterable[int], cols: Iterable[int]) -> LaurentPoly:
    """Determinant of the submatrix selected by 0-based row/column sets."""
    rows = sorted(set(rows))
    cols = sorted(set(cols))
    if len(rows) != len(cols):
        raise ValueError(f"row set of size {len(rows)} vs column set of size {len(cols)}")
    if not rows:
        raise ValueError("empty index sets")
    if rows[0] < 0 or rows[-1] >= A.rows or cols[0] < 0 or cols[-1] >= A.cols:
        raise IndexError("minor index out of range")
    return determinant(A.submatrix(rows, cols))


@dataclass(frozen=True)
class MinorCertificate:
    """A maximal non-vanishing minor: index sets, size, exact determinant.

    ``row_set`` and ``col_set`` are 0-based.  ``b_l1`` is the L1 norm of
    the selected square submatrix.
    """

    row_set: tuple[int, ...]
    col_set: tuple[int, ...]
    size: int
    det: LaurentPoly
    b_l1: float


def _size_guard(m: int, n: int, k: int, cap: int) -> None:
    candidates = math.comb(m, k) * math.comb(n, k)
    if candidates > cap:
        raise MinorSearchCapExceeded(k, candidates, cap)


def iter_nonvanishing_minors(
    A: PolyMatrix, size: int, cap: int = DEFAULT_MINOR_CAP
):
    """Yield every non-vanishing minor certificate of the given size.

    Index sets are visited in lexicographic order (rows outer, columns
    inner), so the iteration order is deterministic.
    """
    _size_guard(A.rows, A.cols, size, cap)
    for I in combinations(range(A.rows), size):
        for J in combinations(range(A.cols), size):
            sub = A.submatrix(I, J)
            det = determinant(sub)
            if not det.is_zero():
                yield MinorCertificate(I, J, size, det, sub.l1_norm())


def max_nonvanishing_minor(
    A: PolyMatrix, cap: int = DEFAULT_MINOR_CAP
) -> MinorCertificate:
    """First non-vanishing minor of maximal size.

    Sizes are tried in descending order from min(rows, cols); within a
    size, index sets in lexicographic order, first hit wins.  The zero
    matrix is rejected.  Budget overruns raise MinorSearchCapExceeded.
    """
    if A.is_zero():
        raise ZeroMatrixError("the zero matrix has no non-vanishing minor")
    for size in range(min(A.rows, A.cols), 0, -1):
        for cert in iter_nonvanishing_minors(A, size, cap):
            return cert
    raise AssertionError("a non-zero matrix has a non-zero 1x1 minor")
