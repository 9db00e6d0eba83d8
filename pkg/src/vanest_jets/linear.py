"""Exact rational linear algebra on small sparse matrices.

Scalars are gmpy2 ``mpq`` rationals when gmpy2 is installed, else
:class:`fractions.Fraction`; both are exact.  Matrices store only nonzero
entries in a dict keyed by ``(row, col)``.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

try:  # mpq arithmetic is roughly ten times faster than Fraction
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rational


def Q(x) -> Rational:
    """Coerce ints, strings like ``"3/2"`` and Fractions to an exact rational."""
    if isinstance(x, Rational):
        return x
    return Rational(x)


class SparseMatrix:
    """A rows x cols matrix over Q with no stored zeros."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Dict[Tuple[int, int], Rational]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        clean: Dict[Tuple[int, int], Rational] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
            v = Q(v)
            if v:
                clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ent = {}
        for i, r in enumerate(rows):
            if len(r) != nc:
                raise ValueError("ragged rows")
            for j, v in enumerate(r):
                if v:
                    ent[(i, j)] = Q(v)
        return cls(nr, nc, ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): Rational(1) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    def to_rows(self) -> List[List[Rational]]:
        out = [[Rational(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._same_shape(other)
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, ent)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, c) -> "SparseMatrix":
        c = Q(c)
        return SparseMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: Dict[int, List[Tuple[int, Rational]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        ent: Dict[Tuple[int, int], Rational] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                ent[(i, j)] = ent.get((i, j), 0) + a * b
        return SparseMatrix(self.rows, other.cols, ent)

    def apply(self, v: Sequence) -> List[Rational]:
        if len(v) != self.cols:
            raise ValueError("vector length does not match columns")
        out = [Rational(0)] * self.rows
        for (i, j), a in self.entries.items():
            if v[j]:
                out[i] += a * v[j]
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def _same_shape(self, other: "SparseMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")


def _rref(rows: List[Dict[int, Rational]], ncols: int) -> Tuple[List[Dict[int, Rational]], List[int]]:
    """Reduced row echelon form of sparse rows; returns (rows, pivot columns)."""
    pivots: List[int] = []
    reduced: List[Dict[int, Rational]] = []
    work = [dict(r) for r in rows if r]
    for col in range(ncols):
        piv = None
        for idx, r in enumerate(work):
            if r.get(col):
                piv = idx
                break
        if piv is None:
            continue
        prow = work.pop(piv)
        inv = 1 / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        for r in work + reduced:
            f = r.get(col)
            if f:
                for c, v in prow.items():
                    nv = r.get(c, 0) - f * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
        work = [r for r in work if r]
        reduced.append(prow)
        pivots.append(col)
    return reduced, pivots


def _rows_of(m: SparseMatrix) -> List[Dict[int, Rational]]:
    rows: List[Dict[int, Rational]] = [dict() for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    return rows


def rank(m: SparseMatrix) -> int:
    return len(_rref(_rows_of(m), m.cols)[1])


def rank_and_kernel(m: SparseMatrix) -> Tuple[int, List[List[Rational]]]:
    """Rank of ``m`` and a basis of its right kernel."""
    red, pivots = _rref(_rows_of(m), m.cols)
    pivset = set(pivots)
    basis: List[List[Rational]] = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = [Rational(0)] * m.cols
        v[free] = Rational(1)
        for r, pc in zip(red, pivots):
            c = r.get(free)
            if c:
                v[pc] = -c
        basis.append(v)
    return len(pivots), basis


def solve_in_image(m: SparseMatrix, b: Sequence) -> Optional[List[Rational]]:
    """Some x with ``m x = b``, or None when b is not in the column space."""
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.rows}")
    rows = _rows_of(m)
    aug = m.cols
    for i, bi in enumerate(b):
        bi = Q(bi)
        if bi:
            rows[i][aug] = bi
    red, pivots = _rref(rows, m.cols + 1)
    if aug in pivots:
        return None
    x = [Rational(0)] * m.cols
    for r, pc in zip(red, pivots):
        x[pc] = r.get(aug, Rational(0))
    return x


def vector_is_zero(v: Iterable) -> bool:
    return not any(v)
