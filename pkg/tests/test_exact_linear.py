from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dglkit.exact_linear import (
    ChainComplexQ,
    DimensionMismatch,
    EchelonSpan,
    QuotientCoordinates,
    SparseMatrix,
    homology_at,
    in_span,
    kernel_basis,
    rank,
    row_reduce,
)

small = st.integers(-3, 3)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_rank_of_identity_and_zero():
    assert rank(SparseMatrix.identity(4)) == 4
    assert rank(SparseMatrix.zero(3, 5)) == 0


def test_fractions_stay_exact():
    m = SparseMatrix.from_dense([[3, 1], [1, Fraction(1, 3)]])
    assert rank(m) == 1
    assert kernel_basis(m) == [[Fraction(-1, 3), Fraction(1)]]


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        SparseMatrix.from_dense([[1, 2], [3]])
    with pytest.raises(IndexError):
        SparseMatrix(2, 2, {(2, 0): 1})


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_rank_nullity(rows):
    m = SparseMatrix.from_dense(rows)
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.cols
    for v in ker:
        assert all(x == 0 for x in m.apply(v))


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_reduced_form_has_same_row_space(rows):
    m = SparseMatrix.from_dense(rows)
    r, pivots, red = row_reduce(m)
    assert len(pivots) == r
    dense = red.to_dense()
    for row in rows:
        assert in_span(row, dense[:r]) is not None


@given(matrices(4, 4), st.lists(small, min_size=4, max_size=4))
@settings(max_examples=60, deadline=None)
def test_in_span_coefficients_reconstruct(rows, coeffs):
    gens = [list(r) + [0] * (4 - len(r)) for r in rows]
    target = [sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(4)]
    found = in_span(target, gens)
    assert found is not None
    assert [sum(c * g[i] for c, g in zip(found, gens)) for i in range(4)] == target


def test_echelon_span_membership():
    span = EchelonSpan(3)
    assert span.add([1, 1, 0])
    assert not span.add([2, 2, 0])
    assert span.contains({0: 3, 1: 3})
    assert not span.contains([0, 0, 1])
    assert len(span) == 1


def test_quotient_coordinates():
    q = QuotientCoordinates(3, [[1, 1, 0]], [[1, 0, 0], [0, 0, 1]])
    assert q.coordinates([0, 1, 0]) == [-1, 0]
    assert q.coordinates([2, 0, 5]) == [2, 5]
    with pytest.raises(ValueError):
        QuotientCoordinates(2, [[1, 0]], [[2, 0]])


def test_homology_of_a_circle():
    # two vertices, two edges forming a loop
    d1 = SparseMatrix.from_dense([[-1, -1], [1, 1]])
    cx = ChainComplexQ({0: [0, 1], 1: [0, 1]}, {1: d1})
    assert cx.check_square_zero() == []
    assert homology_at(cx, 0).betti == 1
    assert homology_at(cx, 1).betti == 1


@given(matrices(4, 4))
@settings(max_examples=40, deadline=None)
def test_euler_characteristic(rows):
    m = SparseMatrix.from_dense(rows)
    cx = ChainComplexQ({0: [None] * m.rows, 1: [None] * m.cols}, {1: m})
    assert homology_at(cx, 0).betti - homology_at(cx, 1).betti == m.rows - m.cols
