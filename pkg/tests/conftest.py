# tests/conftest.py
from __future__ import annotations
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import HealthCheck, settings, strategies as st

from core.exact_linalg import Matrix
from core.superalgebra import AlgebraKind, GroupElement, OddElement, random_group_element

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=3)
small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def matrices(draw, rows: int, cols: int, entries=small_rationals) -> Matrix:
    data = [[draw(entries) for _ in range(cols)] for _ in range(rows)]
    return Matrix.from_rows(data, cols)


@st.composite
def sized_matrices(draw, max_rows: int = 4, max_cols: int = 4, entries=small_rationals) -> Matrix:
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    return draw(matrices(r, c, entries))


@st.composite
def odd_elements(draw, m: int, n: int, entries=small_ints) -> OddElement:
    return OddElement(m, n, draw(matrices(m, n, entries)), draw(matrices(n, m, entries)))


def to_sympy(M: Matrix) -> sympy.Matrix:
    return sympy.Matrix(M.rows, M.cols, [sympy.Rational(v.numerator, v.denominator) for r in M.data for v in r])


def random_gl(m: int, n: int, seed: int | list[int]) -> GroupElement:
    return random_group_element(AlgebraKind.gl(m, n), np.random.default_rng(seed))


def frac_rows(M: Matrix) -> list[list[Fraction]]:
    return [list(r) for r in M.data]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)
