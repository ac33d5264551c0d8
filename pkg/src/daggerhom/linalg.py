"""Exact sparse linear algebra over the rationals.

Rows are cleared of denominators and eliminated fraction-free (integer
cross-multiplication followed by removal of the row content), which keeps
entries small without ever leaving the integers.  Kernels are read off the
fully reduced echelon form and returned as exact :class:`Fraction` vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Tuple

Vector = Dict[int, Fraction]


class NotAComplex(ValueError):
    """``d_out @ d_in`` is nonzero; ``witness`` is an offending column."""

    def __init__(self, witness: int):
        super().__init__(f"composition is nonzero on column {witness}")
        self.witness = witness


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    entries: Mapping[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
            v = Fraction(v)
            if v:
                clean[i, j] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    @classmethod
    def from_dense(cls, rows: List[List]) -> "SparseMatrix":
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols,
                   {(i, j): Fraction(v) for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def from_columns(cls, rows: int, columns: Iterable[Mapping[int, Fraction]]) -> "SparseMatrix":
        entries = {}
        ncols = 0
        for j, col in enumerate(columns):
            ncols = j + 1
            for i, v in col.items():
                entries[i, j] = v
        return cls(rows, ncols, entries)

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self) -> List[Vector]:
        out: List[Vector] = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column_dicts(self) -> List[Vector]:
        out: List[Vector] = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def apply(self, vec: Mapping[int, Fraction]) -> Vector:
        cols = self.column_dicts()
        out: Vector = {}
        for j, x in vec.items():
            if not x:
                continue
            for i, v in cols[j].items():
                out[i] = out.get(i, 0) + v * x
        return {i: v for i, v in out.items() if v}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        scols = self.column_dicts()
        entries = {}
        for j, col in enumerate(other.column_dicts()):
            acc: Vector = {}
            for k, w in col.items():
                for i, v in scols[k].items():
                    acc[i] = acc.get(i, 0) + v * w
            for i, v in acc.items():
                if v:
                    entries[i, j] = v
        return SparseMatrix(self.rows, other.cols, entries)

    def is_zero(self) -> bool:
        return not self.entries


def hstack(blocks: List[SparseMatrix]) -> SparseMatrix:
    rows = blocks[0].rows
    entries = {}
    offset = 0
    for b in blocks:
        if b.rows != rows:
            raise ValueError("row count mismatch in hstack")
        for (i, j), v in b.entries.items():
            entries[i, j + offset] = v
        offset += b.cols
    return SparseMatrix(rows, offset, entries)


def vstack(blocks: List[SparseMatrix]) -> SparseMatrix:
    return hstack([b.transpose() for b in blocks]).transpose()


def _integer_row(row: Mapping[int, Fraction]) -> Dict[int, int]:
    den = reduce(lcm, (Fraction(v).denominator for v in row.values()), 1)
    ints = {j: int(Fraction(v) * den) for j, v in row.items() if v}
    return _primitive(ints)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = reduce(gcd, row.values(), 0)
    if g > 1:
        row = {j: v // g for j, v in row.items()}
    return row


def _eliminate(row: Dict[int, int], pivot_row: Dict[int, int], col: int) -> Dict[int, int]:
    # row <- p*row - r*pivot_row, then strip the content
    p = pivot_row[col]
    r = row[col]
    g = gcd(p, r)
    p //= g
    r //= g
    out = {j: p * v for j, v in row.items()}
    for j, v in pivot_row.items():
        w = out.get(j, 0) - r * v
        if w:
            out[j] = w
        else:
            out.pop(j, None)
    return _primitive(out)


def echelon(m: SparseMatrix) -> Tuple[List[Dict[int, int]], List[int]]:
    """Fully reduced fraction-free echelon form.

    Returns integer rows and their pivot columns; each pivot column is zero in
    every other row.
    """
    pivots = _forward(m)
    order = sorted(pivots)
    # back-substitution to clear entries above the pivots
    for idx in range(len(order) - 1, -1, -1):
        col = order[idx]
        prow = pivots[col]
        for other in order[:idx]:
            orow = pivots[other]
            if col in orow:
                pivots[other] = _eliminate(orow, prow, col)
    return [pivots[c] for c in order], order


def _forward(m: SparseMatrix) -> Dict[int, Dict[int, int]]:
    pivots: Dict[int, Dict[int, int]] = {}
    for raw in m.row_dicts():
        if not raw:
            continue
        row = _integer_row(raw)
        while row:
            col = min(row)
            prow = pivots.get(col)
            if prow is None:
                pivots[col] = row
                break
            row = _eliminate(row, prow, col)
    return pivots


def rank(m: SparseMatrix) -> int:
    # eliminate along the shorter side
    if m.cols < m.rows:
        m = m.transpose()
    return len(_forward(m))


def kernel_basis(m: SparseMatrix) -> List[Vector]:
    """Exact basis of ``{v : m v = 0}``, one vector per free column."""
    rows, pivot_cols = echelon(m)
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vec: Vector = {free: Fraction(1)}
        for row, pc in zip(rows, pivot_cols):
            c = row.get(free)
            if c:
                vec[pc] = Fraction(-c, row[pc])
        basis.append(vec)
    return basis


def homology_dim(d_in: SparseMatrix, d_out: SparseMatrix, check: bool = True) -> int:
    """``dim ker(d_out) - rank(d_in)`` for ``C_in -> C -> C_out``."""
    if d_in.rows != d_out.cols:
        raise ValueError("d_in and d_out are not composable")
    if check:
        comp = d_out @ d_in
        if not comp.is_zero():
            raise NotAComplex(min(j for _, j in comp.entries))
    return d_out.cols - rank(d_out) - rank(d_in)


def annihilator(m: SparseMatrix) -> SparseMatrix:
    """Rows spanning the linear forms vanishing on the column span of ``m``.

    The result ``Q`` satisfies ``Q @ m == 0`` and ``ker Q == colspan(m)``; it is
    a coordinate system on the quotient by the column span.
    """
    vecs = kernel_basis(m.transpose())
    return SparseMatrix(len(vecs), m.rows,
                        {(i, j): v for i, vec in enumerate(vecs) for j, v in vec.items()})
