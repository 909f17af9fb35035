# tests/test_exact_linalg.py
from __future__ import annotations
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import matrices, sized_matrices, to_sympy
from core.exact_linalg import (
    Matrix, NotNilpotentError, ShapeError, SingularMatrixError, SparseSpan,
    column_echelon, conjugate_partition, format_rational, inverse, is_column_echelon,
    jordan_matrix, jordan_partition, nilpotent_jordan, nullspace, parse_rational,
    rank, rank_normal_form, row_reduce,
)
from core.superalgebra import random_unimodular

M = Matrix.from_rows


def diag_ir(r: int, rows: int, cols: int) -> Matrix:
    return Matrix.block_diag(Matrix.identity(r), Matrix.zeros(rows - r, cols - r))


# ---------- rationals ----------
@pytest.mark.parametrize("raw, want", [
    ("3/6", Fraction(1, 2)), ("4", Fraction(4)), (" -7 / 21 ", Fraction(-1, 3)),
    (5, Fraction(5)), (Fraction(2, 3), Fraction(2, 3)), ("+2", Fraction(2)),
])
def test_parse_rational_accepts(raw, want):
    assert parse_rational(raw) == want


@pytest.mark.parametrize("raw", [0.5, True, "a/b", "1/0", "1.5", None, [1]])
def test_parse_rational_rejects(raw):
    with pytest.raises(ValueError):
        parse_rational(raw)


def test_format_rational_lowest_terms():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(-8, 4)) == "-2"


# ---------- matrix basics ----------
def test_shape_checks():
    with pytest.raises(ShapeError):
        M([[1, 2]]) @ M([[1, 2]])
    with pytest.raises(ShapeError):
        M([[1]]) + M([[1, 2]])
    with pytest.raises(ShapeError):
        Matrix(2, 2, ((Fraction(1),),))


def test_block_and_sub():
    A, B = M([[1, 2], [3, 4]]), M([[5], [6]])
    C, D = M([[7, 8]]), M([[9]])
    full = Matrix.block([[A, B], [C, D]])
    assert full == M([[1, 2, 5], [3, 4, 6], [7, 8, 9]])
    assert full.sub(0, 2, 2, 3) == B
    assert full.with_entry(2, 2, "1/2")[2, 2] == Fraction(1, 2)


def test_zero_sized_blocks():
    Z = Matrix.block([[Matrix.zeros(0, 0), Matrix.zeros(0, 2)], [Matrix.zeros(2, 0), Matrix.identity(2)]])
    assert Z == Matrix.identity(2)
    assert Matrix.zeros(0, 3).T.shape == (3, 0)


# ---------- rank ----------
@pytest.mark.parametrize("mat, want", [
    (Matrix.zeros(2, 3), 0),
    (Matrix.identity(3), 3),
    (M([[1, 2], [2, 4]]), 1),
])
def test_rank_examples(mat, want):
    assert rank(mat) == want


@given(sized_matrices())
def test_rank_matches_sympy(X):
    assert rank(X) == to_sympy(X).rank()


# ---------- rank normal form ----------
def test_rank_normal_form_zero_and_identity():
    A, B, r = rank_normal_form(Matrix.zeros(2, 3))
    assert (A, B, r) == (Matrix.identity(2), Matrix.identity(3), 0)
    A, B, r = rank_normal_form(Matrix.identity(3))
    assert (A, B, r) == (Matrix.identity(3), Matrix.identity(3), 3)


def test_rank_normal_form_shift():
    X = M([[0, 1], [0, 0]])
    A, B, r = rank_normal_form(X)
    assert r == 1
    assert inverse(A) @ X @ B == M([[1, 0], [0, 0]])


@given(sized_matrices())
def test_rank_normal_form_equation(X):
    A, B, r = rank_normal_form(X)
    assert r == rank(X)
    assert inverse(A) @ X @ B == diag_ir(r, X.rows, X.cols)


# ---------- inverse ----------
def test_inverse_examples():
    assert inverse(Matrix.identity(3)) == Matrix.identity(3)
    assert inverse(M([[2, 0], [0, 3]])) == M([["1/2", 0], [0, "1/3"]])
    with pytest.raises(SingularMatrixError):
        inverse(M([[1, 2], [2, 4]]))
    with pytest.raises(ShapeError):
        inverse(Matrix.zeros(2, 3))


def test_inverse_lower_block_formula(rng):
    A11 = random_unimodular(2, rng, 3, 2)
    B22 = random_unimodular(3, rng, 3, 2)
    B21 = Matrix.from_rows([[int(v) for v in rng.integers(-3, 4, size=2)] for _ in range(3)], 2)
    full = Matrix.block([[A11, Matrix.zeros(2, 3)], [B21, B22]])
    A11i, B22i = inverse(A11), inverse(B22)
    want = Matrix.block([[A11i, Matrix.zeros(2, 3)], [-(B22i @ B21 @ A11i), B22i]])
    assert inverse(full) == want


@given(st.integers(1, 4).flatmap(lambda k: matrices(k, k)))
def test_inverse_property(X):
    if to_sympy(X).det() == 0:
        with pytest.raises(SingularMatrixError):
            inverse(X)
    else:
        assert X @ inverse(X) == Matrix.identity(X.rows)


# ---------- row reduction / nullspace ----------
@given(sized_matrices())
def test_row_reduce_is_rref(X):
    R, E, pivots = row_reduce(X)
    assert R @ X == E
    assert pivots == sorted(pivots)
    for i, p in enumerate(pivots):
        assert E[i, p] == 1
        assert all(E[k, p] == 0 for k in range(E.rows) if k != i)
    assert all(not any(E.row(i)) for i in range(len(pivots), E.rows))


@given(sized_matrices())
def test_nullspace_dimension_and_kernel(X):
    basis = nullspace(X)
    assert len(basis) == X.cols - rank(X)
    for v in basis:
        assert not any(X.apply(v))


# ---------- column echelon ----------
def test_column_echelon_examples():
    T, E = column_echelon(Matrix.zeros(2, 3))
    assert T == Matrix.zeros(2, 3) and E == Matrix.identity(3)
    T, E = column_echelon(Matrix.identity(2))
    assert T == Matrix.identity(2) and E == Matrix.identity(2)
    X = M([[0, 2], [0, 0], [1, 0]])
    T, E = column_echelon(X)
    assert T == X @ E
    assert is_column_echelon(T)


@given(sized_matrices())
def test_column_echelon_property(X):
    T, E = column_echelon(X)
    assert T == X @ E
    assert is_column_echelon(T)
    assert rank(E) == X.cols


def test_is_column_echelon_rejects():
    assert not is_column_echelon(M([[0, 1], [1, 0]]))  # pivot rows decrease
    assert not is_column_echelon(M([[0, 1], [0, 0]]))  # zero column on the left
    assert not is_column_echelon(M([[2], [0]]))  # pivot not 1
    assert not is_column_echelon(M([[1, 0], [1, 1]]))  # pivot row not clean


# ---------- Jordan ----------
def test_conjugate_partition():
    assert conjugate_partition([3, 1]) == (2, 1, 1)
    assert conjugate_partition([]) == ()


def test_nilpotent_jordan_examples():
    P, part = nilpotent_jordan(Matrix.zeros(3, 3))
    assert part == (1, 1, 1)
    P, part = nilpotent_jordan(M([[0, 1], [0, 0]]))
    assert part == (2,) and P == Matrix.identity(2)
    X = M([[0, 0], [1, 0]])
    P, part = nilpotent_jordan(X)
    assert part == (2,)
    assert inverse(P) @ X @ P == M([[0, 1], [0, 0]])


def test_nilpotent_jordan_rejects():
    with pytest.raises(NotNilpotentError):
        nilpotent_jordan(M([[1, 0], [0, 0]]))
    with pytest.raises(NotNilpotentError):
        jordan_partition(M([[0, 1], [1, 0]]))


def test_jordan_form_is_fixed():
    J = jordan_matrix((3, 2, 2, 1))
    P, part = nilpotent_jordan(J)
    assert part == (3, 2, 2, 1)
    assert P == Matrix.identity(8)


partitions_small = st.lists(st.integers(1, 3), min_size=0, max_size=3).map(lambda xs: tuple(sorted(xs, reverse=True)))


@given(partitions_small, st.integers(0, 10_000))
def test_nilpotent_jordan_recovers_conjugated_partition(part, seed):
    import numpy as np

    r = sum(part)
    G = random_unimodular(r, np.random.default_rng(seed), 2, 2)
    X = inverse(G) @ jordan_matrix(part) @ G
    P, got = nilpotent_jordan(X)
    assert got == part
    assert jordan_partition(X) == part
    assert inverse(P) @ X @ P == jordan_matrix(part)
    # sympy: ranks of powers agree
    SX = to_sympy(X)
    for k in range(1, r + 1):
        assert rank(X.power(k)) == (SX ** k).rank()


# ---------- sparse span ----------
def test_sparse_span_coordinates():
    sp = SparseSpan()
    assert sp.add({0: Fraction(1), 1: Fraction(1)}, "u")
    assert sp.add({1: Fraction(1)}, "v")
    assert not sp.add({0: Fraction(2), 1: Fraction(5)}, "w")
    assert len(sp) == 2
    assert sp.coordinates({0: Fraction(2), 1: Fraction(5)}) == {"u": 2, "v": 3}
    assert sp.coordinates({2: Fraction(1)}) is None
    assert sp.contains({})


def test_sympy_oracle_agrees_on_known_rank():
    assert to_sympy(M([[1, 2], [2, 4]])).rank() == 1
    assert sympy.Matrix([[0, 1], [0, 0]]).is_nilpotent()
