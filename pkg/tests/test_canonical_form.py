# tests/test_canonical_form.py
from __future__ import annotations
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import random_gl
from core.exact_linalg import Matrix, jordan_matrix
from core.nilcone import sample_nilcone
from core.orbit_params import OrbitParams, PivotMaps
from core.superalgebra import AlgebraKind, GroupElement, OddElement, act
from features.canonical.canonical_form import (
    STAGE_NAMES, NotInConeError, build_L, build_M, canonicalize, centralizer_lift, is_canonical,
)
from features.canonical.render import render_result
from features.census.orbit_census import enumerate_reps, orbit_signature, rep_matrix

M = Matrix.from_rows


# ---------- централизатор ----------
decreasing_partitions = st.lists(st.integers(1, 3), min_size=1, max_size=4).map(
    lambda xs: tuple(sorted(xs, reverse=True))
)


@given(decreasing_partitions, st.data())
def test_centralizer_lift_commutes_with_jordan(part, data):
    t = len(part)
    D = [[data.draw(st.integers(-2, 2)) for _ in range(t)] for _ in range(t)]
    L = centralizer_lift(part, D)
    J = jordan_matrix(part)
    assert L @ J == J @ L


@given(decreasing_partitions, st.data())
def test_build_L_adds_end_rows(part, data):
    t = len(part)
    if t < 2:
        return
    j = data.draw(st.integers(2, t))
    i = data.draw(st.integers(1, j - 1))
    alpha = data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=2))
    L = build_L(part, j, i, alpha)
    J = jordan_matrix(part)
    assert L @ J == J @ L
    f = PivotMaps.from_partition(part).f
    r = sum(part)
    Z = Matrix.from_rows([[(a * 7 + b) % 5 - 2 for b in range(3)] for a in range(r)], 3)
    got = (L @ Z).row(f[j - 1] - 1)
    want = [x + alpha * y for x, y in zip(Z.row(f[j - 1] - 1), Z.row(f[i - 1] - 1))]
    assert list(got) == want


def test_build_M_scales_one_block():
    part = (2, 1)
    Mj = build_M(part, 1, 3)
    assert Mj == M([[3, 0, 0], [0, 3, 0], [0, 0, 1]])
    assert Mj @ build_M(part, 1, Fraction(1, 3)) == Matrix.identity(3)
    assert Mj @ jordan_matrix(part) == jordan_matrix(part) @ Mj


def test_centralizer_builders_reject_bad_input():
    with pytest.raises(ValueError):
        build_L((2, 1), 1, 2, 1)
    with pytest.raises(ValueError):
        build_L((2, 1), 3, 1, 1)
    with pytest.raises(ValueError):
        build_M((2, 1), 1, 0)
    with pytest.raises(ValueError):
        build_M((2, 1), 3, 1)
    with pytest.raises(ValueError):
        centralizer_lift((2, 1), [[1]])


# ---------- примеры ----------
def test_zero_element():
    res = canonicalize(OddElement.zero(2, 3))
    assert res.params == OrbitParams()
    assert res.g == GroupElement.identity(2, 3)
    assert res.y.is_zero()


def test_canonical_example_is_fixed():
    y = OddElement.from_rows([[1, 0], [0, 0]], [[0, 1], [0, 0]])
    res = canonicalize(y)
    assert res.params == OrbitParams(r=1, partition=(1,), c_pivots=(1,))
    assert res.y == y
    assert res.g == GroupElement.identity(2, 2)


def test_single_jordan_block_from_lower_shift():
    x = OddElement.from_rows([[1, 0], [0, 1]], [[0, 0], [1, 0]])
    res = canonicalize(x)
    assert res.params == OrbitParams(r=2, partition=(2,))
    assert res.y == rep_matrix(res.params, 2, 2)
    assert act(res.g, x) == res.y


def test_rejects_elements_outside_the_cone():
    with pytest.raises(NotInConeError):
        canonicalize(OddElement.from_rows([[1]], [[1]]))
    with pytest.raises(NotInConeError):
        canonicalize(OddElement(2, 2, Matrix.identity(2), M([[1, 0], [0, 0]])))


@pytest.mark.parametrize("m, n", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_idempotent_on_representatives(m, n):
    for p in enumerate_reps(m, n):
        res = canonicalize(rep_matrix(p, m, n))
        assert res.g == GroupElement.identity(m, n)
        assert res.params == p


# ---------- орбиты ----------
def _round_trip(m: int, n: int, p: OrbitParams, seed) -> None:
    rep = rep_matrix(p, m, n)
    x = act(random_gl(m, n, seed), rep)
    res = canonicalize(x)
    assert res.params == p
    assert res.y == rep
    assert act(res.g, x) == res.y
    assert orbit_signature(x) == orbit_signature(rep)


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (2, 3)])
def test_conjugated_representatives_come_back(m, n):
    for k, p in enumerate(enumerate_reps(m, n)):
        for i in range(2):
            _round_trip(m, n, p, [k, i])


@pytest.mark.slow
@pytest.mark.parametrize("m, n", [(m, n) for m in range(1, 4) for n in range(1, 4)])
def test_conjugated_representatives_come_back_many(m, n):
    for k, p in enumerate(enumerate_reps(m, n)):
        for i in range(50):
            _round_trip(m, n, p, [m, n, k, i])


@pytest.mark.parametrize("m, n", [(2, 2), (3, 3), (3, 1)])
@given(seed=st.integers(0, 100_000))
def test_samples_land_in_the_census(m, n, seed):
    x = sample_nilcone(AlgebraKind.gl(m, n), seed)
    res = canonicalize(x)
    assert res.params in set(enumerate_reps(m, n))
    assert act(res.g, x) == res.y


# ---------- распознавание ----------
def test_is_canonical_recognizes_representatives():
    p = OrbitParams(r=3, partition=(2, 1), c_pivots=(3,), r_pivots=(1,), s=0)
    assert is_canonical(rep_matrix(p, 4, 4)) == p


@pytest.mark.parametrize("y", [
    # вес 2 вместо 1 у ведущего элемента C
    OddElement.from_rows([[1, 0], [0, 0]], [[0, 2], [0, 0]]),
    # нижний жорданов блок
    OddElement.from_rows([[1, 0], [0, 1]], [[0, 0], [1, 0]]),
    # блоки (1, 2) идут по возрастанию
    OddElement.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[0, 0, 0], [0, 0, 1], [0, 0, 0]]),
    # C-only после блока без ведущих того же размера
    OddElement.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 0]], [[0, 0, 0], [0, 0, 1], [0, 0, 0]]),
    # Y⁺ не диагональна
    OddElement.from_rows([[0, 1], [0, 0]], [[0, 0], [0, 0]]),
])
def test_is_canonical_rejects(y):
    assert is_canonical(y) is None


# ---------- трасса ----------
def test_trace_composes_to_g():
    x = act(random_gl(3, 3, 42), rep_matrix(OrbitParams(r=2, partition=(1, 1), c_pivots=(1,), r_pivots=(2,)), 3, 3))
    res = canonicalize(x, trace=True)
    stages = [s.stage for s in res.trace]
    assert stages == sorted(stages)
    assert {1, 3, 5, 8} <= set(stages)
    assert all(1 <= s <= len(STAGE_NAMES) for s in stages)
    g = GroupElement.identity(3, 3)
    for step in res.trace:
        g = step.g * g
    assert g == res.g
    assert res.trace[-1].y == res.y
    assert canonicalize(x).trace == ()
    assert canonicalize(x) == res


def test_render_result():
    x = OddElement.from_rows([[2, 0], [0, 0]], [[0, 1], [0, 0]])
    res = canonicalize(x, trace=True)
    out = render_result(res, with_trace=True)
    assert out["params"] == {"r": 1, "partition": [1], "c_pivots": [1], "r_pivots": [], "s": 0}
    assert out["y"]["xminus"] == [["0", "1"], ["0", "0"]]
    assert out["trace"][0]["stage"] == 1
    assert out["trace"][0]["name"] == STAGE_NAMES[1]
    assert "trace" not in render_result(res)
