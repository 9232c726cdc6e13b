"""Exact sparse linear algebra over the rationals.

Matrices are stored as a mapping (row, col) -> Fraction with zero entries
omitted.  Elimination is fraction-based and fully deterministic: pivots are
taken column by column from the left, and within a column the lowest
remaining row index wins.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Rational = Fraction
Vector = List[Fraction]


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    entries: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry ({r},{c}) outside {self.rows}x{self.cols}")
            v = Fraction(v)
            if v:
                clean[(r, c)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], ncols: Optional[int] = None) -> "SparseMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionMismatch("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    ent[(i, j)] = Fraction(v)
        return cls(nrows, ncols, ent)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "SparseMatrix":
        ent = {}
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise DimensionMismatch("column length differs from row count")
            for i, v in enumerate(col):
                if v:
                    ent[(i, j)] = Fraction(v)
        return cls(nrows, len(columns), ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    def to_dense(self) -> List[Vector]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def column(self, c: int) -> Vector:
        col = [Fraction(0)] * self.rows
        for (r, cc), v in self.entries.items():
            if cc == c:
                col[r] = v
        return col

    def column_dicts(self) -> List[Dict[int, Fraction]]:
        cols: List[Dict[int, Fraction]] = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def row_dicts(self) -> List[Dict[int, Fraction]]:
        rows: List[Dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        by_row: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc: Dict[Tuple[int, int], Fraction] = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                acc[(r, c)] = acc.get((r, c), Fraction(0)) + v * w
        return SparseMatrix(self.rows, other.cols, acc)

    def apply(self, vec: Sequence) -> Vector:
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length differs from column count")
        out = [Fraction(0)] * self.rows
        for (r, c), v in self.entries.items():
            if vec[c]:
                out[r] += v * vec[c]
        return out

    def is_zero(self) -> bool:
        return not self.entries


def _reduce_rows(rows: List[Dict[int, Fraction]], ncols: int):
    """In-place Gauss-Jordan on a list of sparse rows.

    Returns (pivot columns, ordered pivot rows) where pivot rows are normalised
    to leading coefficient 1 and cleared above and below.
    """
    remaining = [r for r in rows if r]
    pivots: List[int] = []
    pivot_rows: List[Dict[int, Fraction]] = []
    # column -> indices in `remaining` that have a nonzero there
    for col in range(ncols):
        choice = None
        for idx, row in enumerate(remaining):
            if row.get(col):
                choice = idx
                break
        if choice is None:
            continue
        prow = remaining.pop(choice)
        inv = 1 / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        for idx, row in enumerate(remaining):
            f = row.get(col)
            if f:
                for c, v in prow.items():
                    nv = row.get(c, 0) - f * v
                    if nv:
                        row[c] = nv
                    else:
                        row.pop(c, None)
        for row in pivot_rows:
            f = row.get(col)
            if f:
                for c, v in prow.items():
                    nv = row.get(c, 0) - f * v
                    if nv:
                        row[c] = nv
                    else:
                        row.pop(c, None)
        remaining = [r for r in remaining if r]
        pivots.append(col)
        pivot_rows.append(prow)
        if not remaining:
            break
    return pivots, pivot_rows


def row_reduce(m: SparseMatrix) -> Tuple[int, List[int], SparseMatrix]:
    """Reduced row-echelon form; returns (rank, pivot columns, reduced matrix)."""
    rows = [dict(r) for r in m.row_dicts()]
    pivots, prows = _reduce_rows(rows, m.cols)
    ent = {}
    for i, row in enumerate(prows):
        for c, v in row.items():
            ent[(i, c)] = v
    return len(pivots), pivots, SparseMatrix(m.rows, m.cols, ent)


def rank(m: SparseMatrix) -> int:
    return row_reduce(m)[0]


def kernel_basis(m: SparseMatrix) -> List[Vector]:
    _, pivots, red = row_reduce(m)
    pivot_set = set(pivots)
    rows = red.row_dicts()
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * m.cols
        vec[free] = Fraction(1)
        for i, p in enumerate(pivots):
            v = rows[i].get(free)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def in_span(target: Sequence, generators: Sequence[Sequence]) -> Optional[Vector]:
    """Coefficients c with sum c_i g_i == target, or None."""
    n = len(target)
    for g in generators:
        if len(g) != n:
            raise DimensionMismatch("generator length differs from target length")
    k = len(generators)
    # augmented system: rows indexed by coordinates, columns by generators + target
    rows = []
    for i in range(n):
        row = {}
        for j, g in enumerate(generators):
            if g[i]:
                row[j] = Fraction(g[i])
        if target[i]:
            row[k] = Fraction(target[i])
        rows.append(row)
    pivots, prows = _reduce_rows(rows, k + 1)
    if k in pivots:
        return None
    coeffs = [Fraction(0)] * k
    for p, row in zip(pivots, prows):
        coeffs[p] = row.get(k, Fraction(0))
    return coeffs


class EchelonSpan:
    """Incrementally grown subspace with fast membership tests."""

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: Dict[int, Dict[int, Fraction]] = {}  # pivot -> normalised row

    def __len__(self):
        return len(self._rows)

    def residual(self, vec) -> Dict[int, Fraction]:
        if isinstance(vec, dict):
            cur = {c: Fraction(v) for c, v in vec.items() if v}
        else:
            cur = {i: Fraction(v) for i, v in enumerate(vec) if v}
        # pivots are processed in increasing order; residual entries only move right
        for p in sorted(self._rows):
            f = cur.get(p)
            if f:
                for c, v in self._rows[p].items():
                    nv = cur.get(c, 0) - f * v
                    if nv:
                        cur[c] = nv
                    else:
                        cur.pop(c, None)
        return cur

    def contains(self, vec) -> bool:
        return not self.residual(vec)

    def add(self, vec) -> bool:
        res = self.residual(vec)
        if not res:
            return False
        p = min(res)
        inv = 1 / res[p]
        row = {c: v * inv for c, v in res.items()}
        # keep existing rows reduced against the new pivot
        for q, other in self._rows.items():
            f = other.get(p)
            if f:
                for c, v in row.items():
                    nv = other.get(c, 0) - f * v
                    if nv:
                        other[c] = nv
                    else:
                        other.pop(c, None)
        self._rows[p] = row
        return True


class QuotientCoordinates:
    """Coordinates in a fixed basis of a quotient space span(basis) + R / R."""

    def __init__(self, dim: int, relations, basis):
        self.dim = dim
        self.size = len(basis)
        self.relations = EchelonSpan(dim)
        for r in relations:
            self.relations.add(r)
        self._rows: Dict[int, Tuple[Dict[int, Fraction], Dict[int, Fraction]]] = {}
        for i, b in enumerate(basis):
            res, tag = self._reduce(self.relations.residual(b), {})
            if not res:
                raise ValueError("basis is dependent modulo the relations")
            p = min(res)
            inv = 1 / res[p]
            tag = {k: -v for k, v in tag.items()}
            tag[i] = tag.get(i, 0) + 1
            self._rows[p] = ({c: v * inv for c, v in res.items()}, {k: v * inv for k, v in tag.items()})

    def _reduce(self, cur, coeffs):
        for p in sorted(self._rows):
            f = cur.get(p)
            if not f:
                continue
            row, tag = self._rows[p]
            for c, v in row.items():
                nv = cur.get(c, 0) - f * v
                if nv:
                    cur[c] = nv
                else:
                    cur.pop(c, None)
            for k, v in tag.items():
                coeffs[k] = coeffs.get(k, 0) + f * v
        return cur, coeffs

    def coordinates(self, vec) -> Optional[Vector]:
        """Coefficients of vec in the basis modulo the relations, or None."""
        res, coeffs = self._reduce(self.relations.residual(vec), {})
        if res:
            return None
        return [Fraction(coeffs.get(i, 0)) for i in range(self.size)]


@dataclass
class ChainComplexQ:
    """Chain complex of finite-dimensional Q-vector spaces.

    ``boundaries[n]`` is the matrix of d_n : C_n -> C_{n-1} with
    rows indexed by the basis of C_{n-1} and columns by the basis of C_n.
    """

    bases: Dict[int, List] = field(default_factory=dict)
    boundaries: Dict[int, SparseMatrix] = field(default_factory=dict)

    def dim(self, n: int) -> int:
        return len(self.bases.get(n, ()))

    def boundary(self, n: int) -> SparseMatrix:
        m = self.boundaries.get(n)
        if m is None:
            return SparseMatrix.zero(self.dim(n - 1), self.dim(n))
        return m

    def check_square_zero(self) -> List[int]:
        bad = []
        for n in sorted(self.boundaries):
            if n - 1 in self.boundaries:
                if not self.boundary(n - 1).matmul(self.boundary(n)).is_zero():
                    bad.append(n)
        return bad


@dataclass
class HomologyAt:
    betti: int
    representatives: List[Vector]
    boundary_matrix: SparseMatrix  # columns span the boundaries in C_n


def homology_at(c: ChainComplexQ, n: int) -> HomologyAt:
    dn = c.boundary(n)
    dn1 = c.boundary(n + 1)
    dim = c.dim(n)
    if dn.cols != dim or dn1.rows != dim:
        raise DimensionMismatch(
            f"boundary shapes at degree {n} do not match: d_n is {dn.rows}x{dn.cols}, "
            f"d_(n+1) is {dn1.rows}x{dn1.cols}, dim C_n = {dim}"
        )
    cycles = kernel_basis(dn)
    span = EchelonSpan(dim)
    for col in dn1.column_dicts():
        span.add(col)
    reps = []
    for z in cycles:
        if span.add(z):
            reps.append(z)
    return HomologyAt(len(reps), reps, dn1)
