# src/core/nilcone.py
from __future__ import annotations
from typing import Sequence

import numpy as np

from core.decorators import log_operation
from core.exact_linalg import Matrix
from core.orbit_params import InvalidParamsError, OrbitParams, enumerate_params, rep_matrix
from core.superalgebra import (
    AlgebraKind, Family, OddElement, act, invariants, odd_membership,
    orthogonal_form, random_group_element, symplectic_form,
)
from services.logger_setup import get_logger
from services.util import NILCONE_ENTRY_BOUND, NILCONE_SAMPLE_FACTORS

logger = get_logger("core.nilcone")


# ====== ПРЕДИКАТЫ ======
def in_nilcone_gl(x: OddElement) -> bool:
    return not any(invariants(x))


def in_nilcone(kind: AlgebraKind, x: OddElement) -> bool:
    return odd_membership(kind, x) and in_nilcone_gl(x)


def in_self_commuting(x: OddElement) -> bool:
    return (x.xplus @ x.xminus).is_zero() and (x.xminus @ x.xplus).is_zero()


def nilpotency_holds(x: OddElement) -> bool:
    """(X⁺X⁻)^m = 0, эквивалент обнуления всех инвариантов."""
    return (x.xplus @ x.xminus).power(x.m).is_zero()


# ====== ЗАТРАВКИ ДЛЯ НЕ-gl АЛГЕБР ======
def _rand_rows(rng: np.random.Generator, rows: int, cols: int, bound: int) -> list[list[int]]:
    return [[int(v) for v in rng.integers(-bound, bound + 1, size=cols)] for _ in range(rows)]


def _seed_q(n: int, rng: np.random.Generator) -> OddElement:
    # Y = Σ E_{i, a+i}, Y² = 0; (Y, Y) ∈ q(n)
    a = int(rng.integers(0, n // 2 + 1))
    rows = [[0] * n for _ in range(n)]
    for i in range(a):
        rows[i][a + i] = 1
    Y = Matrix.from_rows(rows, n)
    return OddElement(n, n, Y, Y)


def _seed_p(n: int, rng: np.random.Generator, bound: int) -> OddElement:
    # симметричный блок на первых a координатах, кососимметричный на остальных
    a = int(rng.integers(0, n + 1))
    S = [[0] * n for _ in range(n)]
    K = [[0] * n for _ in range(n)]
    for i in range(a):
        for j in range(i, a):
            S[i][j] = S[j][i] = int(rng.integers(-bound, bound + 1))
    for i in range(a, n):
        for j in range(i + 1, n):
            v = int(rng.integers(-bound, bound + 1))
            K[i][j], K[j][i] = v, -v
    return OddElement(n, n, Matrix.from_rows(S, n), Matrix.from_rows(K, n))


def _seed_osp(kind: AlgebraKind, rng: np.random.Generator, bound: int) -> OddElement:
    # X⁺ на изотропных строках формы F_o и лагранжевых столбцах F_s
    M, N = kind.ambient
    k = kind.m
    first = 1 if kind.family is Family.OSP_ODD else 0
    P = [[0] * N for _ in range(M)]
    for i in range(first, first + k):
        for j in range(kind.n):
            P[i][j] = int(rng.integers(-bound, bound + 1))
    xplus = Matrix.from_rows(P, N)
    F, S = orthogonal_form(kind), symplectic_form(kind)
    return OddElement(M, N, xplus, -(S @ xplus.T @ F))


# ====== СЭМПЛИРОВАНИЕ ======
@log_operation("sample_nilcone")
def sample_nilcone(
    kind: AlgebraKind,
    seed: int | Sequence[int],
    params: OrbitParams | None = None,
    *,
    bound: int = NILCONE_ENTRY_BOUND,
    factors: int = NILCONE_SAMPLE_FACTORS,
) -> OddElement:
    """
    Случайная точка конуса: представитель, сопряжённый случайным элементом группы.
    Для gl/sl берётся rep_matrix(params), без params выбирается случайная орбита;
    для остальных алгебр берётся самокоммутирующая затравка внутри g₁.
    """
    rng = np.random.default_rng(seed)
    M, N = kind.ambient
    if kind.family in (Family.GL, Family.SL):
        if params is None:
            census = enumerate_params(M, N)
            params = census[int(rng.integers(0, len(census)))]
        rep = rep_matrix(params, M, N)
    else:
        if params is not None:
            raise InvalidParamsError(f"orbit parameters are only defined for gl/sl, not {kind}")
        if kind.family is Family.Q:
            rep = _seed_q(N, rng)
        elif kind.family is Family.P:
            rep = _seed_p(N, rng, bound)
        else:
            rep = _seed_osp(kind, rng, bound)
    g = random_group_element(kind, rng, bound, factors)
    x = act(g, rep)
    if not in_nilcone(kind, x):
        raise RuntimeError(f"sampled element left the cone of {kind}")
    return x
