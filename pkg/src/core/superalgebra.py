# src/core/superalgebra.py
from __future__ import annotations
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable

import numpy as np

from core.decorators import log_operation
from core.exact_linalg import Matrix, ShapeError, SingularMatrixError, SparseSpan, inverse
from services.logger_setup import get_logger
from services.util import NILCONE_ENTRY_BOUND, NILCONE_MAX_REPORTED, NILCONE_SAMPLE_FACTORS

logger = get_logger("core.superalgebra")


class KindError(ValueError):
    pass


# ====== ТИПЫ АЛГЕБР ======
class Family(str, Enum):
    GL = "gl"
    SL = "sl"
    OSP_ODD = "osp_odd"
    OSP_EVEN = "osp_even"
    Q = "q"
    P = "p"


_GLSL_RE = re.compile(r"^\s*(gl|sl|osp)\s*\(\s*(\d+)\s*\|\s*(\d+)\s*\)\s*$", re.I)
_QP_RE = re.compile(r"^\s*(q|p)\s*\(\s*(\d+)\s*\)\s*$", re.I)


@dataclass(frozen=True)
class AlgebraKind:
    """
    family + размерные параметры.
    OSP_ODD(m, n) это osp(2m+1|2n), OSP_EVEN(m, n) это osp(2m|2n); для Q и P m == n.
    """

    family: Family
    m: int
    n: int

    def __post_init__(self) -> None:
        f, m, n = self.family, self.m, self.n
        if f in (Family.GL, Family.SL, Family.OSP_EVEN) and (m < 1 or n < 1):
            raise KindError(f"{f.value}: parameters must be positive, got ({m}, {n})")
        if f is Family.OSP_ODD and (m < 0 or n < 1):
            raise KindError(f"osp(2m+1|2n) needs m >= 0, n >= 1, got ({m}, {n})")
        if f in (Family.Q, Family.P) and (n < 1 or m != n):
            raise KindError(f"{f.value}(n) needs n >= 1")

    @classmethod
    def gl(cls, m: int, n: int) -> "AlgebraKind":
        return cls(Family.GL, m, n)

    @property
    def ambient(self) -> tuple[int, int]:
        if self.family is Family.OSP_ODD:
            return 2 * self.m + 1, 2 * self.n
        if self.family is Family.OSP_EVEN:
            return 2 * self.m, 2 * self.n
        return self.m, self.n

    def __str__(self) -> str:
        if self.family in (Family.Q, Family.P):
            return f"{self.family.value}({self.n})"
        if self.family in (Family.OSP_ODD, Family.OSP_EVEN):
            M, N = self.ambient
            return f"osp({M}|{N})"
        return f"{self.family.value}({self.m}|{self.n})"


def parse_kind(raw: str) -> AlgebraKind:
    m = _GLSL_RE.match(raw or "")
    if m:
        name, a, b = m.group(1).lower(), int(m.group(2)), int(m.group(3))
        if name == "gl":
            return AlgebraKind(Family.GL, a, b)
        if name == "sl":
            return AlgebraKind(Family.SL, a, b)
        if b % 2 or b == 0:
            raise KindError(f"osp({a}|{b}): the odd size must be even and positive")
        if a % 2:
            return AlgebraKind(Family.OSP_ODD, (a - 1) // 2, b // 2)
        return AlgebraKind(Family.OSP_EVEN, a // 2, b // 2)
    m = _QP_RE.match(raw or "")
    if m:
        fam = Family.Q if m.group(1).lower() == "q" else Family.P
        n = int(m.group(2))
        return AlgebraKind(fam, n, n)
    raise KindError(f"unknown algebra kind: {raw!r}")


# ====== ЭЛЕМЕНТЫ ======
@dataclass(frozen=True)
class OddElement:
    m: int
    n: int
    xplus: Matrix
    xminus: Matrix

    def __post_init__(self) -> None:
        if self.xplus.shape != (self.m, self.n) or self.xminus.shape != (self.n, self.m):
            raise ShapeError(
                f"odd element of gl({self.m}|{self.n}) needs X+ {self.m}x{self.n} and X- {self.n}x{self.m}, "
                f"got {self.xplus.shape} and {self.xminus.shape}"
            )

    @classmethod
    def zero(cls, m: int, n: int) -> "OddElement":
        return cls(m, n, Matrix.zeros(m, n), Matrix.zeros(n, m))

    @classmethod
    def from_rows(cls, xplus: Any, xminus: Any, m: int | None = None, n: int | None = None) -> "OddElement":
        if m is None or n is None:
            P = Matrix.from_rows(xplus)
            m, n = P.rows, P.cols
        return cls(m, n, Matrix.from_rows(xplus, n), Matrix.from_rows(xminus, m))

    def __add__(self, other: "OddElement") -> "OddElement":
        return OddElement(self.m, self.n, self.xplus + other.xplus, self.xminus + other.xminus)

    def __sub__(self, other: "OddElement") -> "OddElement":
        return OddElement(self.m, self.n, self.xplus - other.xplus, self.xminus - other.xminus)

    def scale(self, c: Any) -> "OddElement":
        return OddElement(self.m, self.n, self.xplus.scale(c), self.xminus.scale(c))

    def is_zero(self) -> bool:
        return self.xplus.is_zero() and self.xminus.is_zero()

    def vector(self) -> dict[Hashable, Fraction]:
        v: dict[Hashable, Fraction] = {}
        for i, j, x in self.xplus.entries():
            if x:
                v[("+", i, j)] = x
        for i, j, x in self.xminus.entries():
            if x:
                v[("-", i, j)] = x
        return v


@dataclass(frozen=True)
class EvenElement:
    m: int
    n: int
    a: Matrix
    b: Matrix

    def __post_init__(self) -> None:
        if self.a.shape != (self.m, self.m) or self.b.shape != (self.n, self.n):
            raise ShapeError(f"even element of gl({self.m}|{self.n}) has blocks {self.a.shape}, {self.b.shape}")

    @classmethod
    def zero(cls, m: int, n: int) -> "EvenElement":
        return cls(m, n, Matrix.zeros(m, m), Matrix.zeros(n, n))

    def __add__(self, other: "EvenElement") -> "EvenElement":
        return EvenElement(self.m, self.n, self.a + other.a, self.b + other.b)

    def scale(self, c: Any) -> "EvenElement":
        return EvenElement(self.m, self.n, self.a.scale(c), self.b.scale(c))

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def supertrace(self) -> Fraction:
        return self.a.trace() - self.b.trace()

    def vector(self) -> dict[Hashable, Fraction]:
        v: dict[Hashable, Fraction] = {}
        for i, j, x in self.a.entries():
            if x:
                v[("a", i, j)] = x
        for i, j, x in self.b.entries():
            if x:
                v[("b", i, j)] = x
        return v


@dataclass(frozen=True)
class GroupElement:
    """(A, B) из GL_m × GL_n; обратные считаются при создании и кешируются."""

    m: int
    n: int
    A: Matrix
    B: Matrix
    A_inv: Matrix = field(init=False, repr=False, compare=False)
    B_inv: Matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.A.shape != (self.m, self.m) or self.B.shape != (self.n, self.n):
            raise ShapeError(f"group element of GL{self.m} x GL{self.n} has blocks {self.A.shape}, {self.B.shape}")
        object.__setattr__(self, "A_inv", inverse(self.A))
        object.__setattr__(self, "B_inv", inverse(self.B))

    @classmethod
    def identity(cls, m: int, n: int) -> "GroupElement":
        return cls(m, n, Matrix.identity(m), Matrix.identity(n))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        # (A1,B1)(A2,B2) = (A2·A1, B2·B1), тогда act будет левым действием
        if (self.m, self.n) != (other.m, other.n):
            raise ShapeError("group elements of different groups")
        return GroupElement(self.m, self.n, other.A @ self.A, other.B @ self.B)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.m, self.n, self.A_inv, self.B_inv)


# ====== ДЕЙСТВИЕ, СКОБКИ, ИНВАРИАНТЫ ======
def _check_same(*elems: Any) -> None:
    sizes = {(e.m, e.n) for e in elems}
    if len(sizes) != 1:
        raise ShapeError(f"size mismatch: {sorted(sizes)}")


def act(g: GroupElement, x: OddElement) -> OddElement:
    _check_same(g, x)
    return OddElement(x.m, x.n, g.A_inv @ x.xplus @ g.B, g.B_inv @ x.xminus @ g.A)


def bracket_odd(x: OddElement, y: OddElement) -> EvenElement:
    _check_same(x, y)
    return EvenElement(
        x.m,
        x.n,
        x.xplus @ y.xminus + y.xplus @ x.xminus,
        x.xminus @ y.xplus + y.xminus @ x.xplus,
    )


def bracket_even_odd(e: EvenElement, x: OddElement) -> OddElement:
    _check_same(e, x)
    return OddElement(x.m, x.n, e.a @ x.xplus - x.xplus @ e.b, e.b @ x.xminus - x.xminus @ e.a)


def bracket_even(e: EvenElement, f: EvenElement) -> EvenElement:
    _check_same(e, f)
    return EvenElement(e.m, e.n, e.a @ f.a - f.a @ e.a, e.b @ f.b - f.b @ e.b)


def invariants(x: OddElement) -> list[Fraction]:
    """Tr((X⁺X⁻)^k), k = 1..min(m, n)."""
    prod = x.xplus @ x.xminus
    out: list[Fraction] = []
    power = prod
    for _ in range(min(x.m, x.n)):
        out.append(power.trace())
        power = power @ prod
    return out


# ====== РЕАЛИЗАЦИИ ======
def _unit(rows: int, cols: int, i: int, j: int, value: int = 1) -> Matrix:
    return Matrix.zeros(rows, cols).with_entry(i, j, value)


def orthogonal_form(kind: AlgebraKind) -> Matrix:
    """F_o: [[1,0,0],[0,0,I],[0,I,0]] для osp(2m+1|2n), [[0,I],[I,0]] для osp(2m|2n)."""
    k = kind.m
    I, Z = Matrix.identity(k), Matrix.zeros(k, k)
    swap = Matrix.block([[Z, I], [I, Z]])
    if kind.family is Family.OSP_ODD:
        return Matrix.block_diag(Matrix.identity(1), swap)
    return swap


def symplectic_form(kind: AlgebraKind) -> Matrix:
    """F_s = [[0, I_n], [-I_n, 0]]."""
    k = kind.n
    I, Z = Matrix.identity(k), Matrix.zeros(k, k)
    return Matrix.block([[Z, I], [-I, Z]])


def _sym_basis(n: int) -> list[tuple[str, Matrix]]:
    out = []
    for i in range(n):
        for j in range(i, n):
            E = _unit(n, n, i, j)
            out.append((f"sym({i},{j})", E if i == j else E + E.T))
    return out


def _skew_basis(n: int) -> list[tuple[str, Matrix]]:
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            E = _unit(n, n, i, j)
            out.append((f"skew({i},{j})", E - E.T))
    return out


def _full_basis(rows: int, cols: int) -> list[tuple[str, Matrix]]:
    return [(f"E({i},{j})", _unit(rows, cols, i, j)) for i in range(rows) for j in range(cols)]


def odd_membership(kind: AlgebraKind, x: OddElement) -> bool:
    M, N = kind.ambient
    if (x.m, x.n) != (M, N):
        raise ShapeError(f"{kind} lives in gl({M}|{N}), element is in gl({x.m}|{x.n})")
    fam = kind.family
    if fam in (Family.GL, Family.SL):
        return True
    if fam is Family.Q:
        return x.xplus == x.xminus
    if fam is Family.P:
        return x.xplus.is_symmetric() and x.xminus.is_skew()
    F, S = orthogonal_form(kind), symplectic_form(kind)
    return x.xminus == -(S @ x.xplus.T @ F)


def even_membership(kind: AlgebraKind, e: EvenElement) -> bool:
    M, N = kind.ambient
    if (e.m, e.n) != (M, N):
        raise ShapeError(f"{kind} lives in gl({M}|{N}), element is in gl({e.m}|{e.n})")
    fam = kind.family
    if fam is Family.GL:
        return True
    if fam is Family.SL:
        return e.supertrace() == 0
    if fam is Family.Q:
        return e.a == e.b
    if fam is Family.P:
        return e.b == -e.a.T
    F, S = orthogonal_form(kind), symplectic_form(kind)
    return (F @ e.a).is_skew() and (S @ e.b).is_symmetric()


@dataclass(frozen=True)
class ComplementBasis:
    kind: AlgebraKind
    even_basis: tuple[EvenElement, ...]
    odd_basis: tuple[OddElement, ...]
    g_even_basis: tuple[EvenElement, ...]
    g_odd_basis: tuple[OddElement, ...]
    labels: dict[str, tuple[str, ...]] = field(default_factory=dict, compare=False)

    @property
    def dims(self) -> dict[str, int]:
        return {
            "g0": len(self.g_even_basis),
            "g1": len(self.g_odd_basis),
            "M0": len(self.even_basis),
            "M1": len(self.odd_basis),
        }


def complement_basis(kind: AlgebraKind, literal_table: bool = False) -> ComplementBasis:
    """
    Базисы g₀, g₁ и дополнения M₀, M₁ внутри gl(M|N).
    literal_table: для sl взять прямую (kI_m, -kI_n) вместо span{I}.
    """
    M, N = kind.ambient
    fam = kind.family
    zM, zN = Matrix.zeros(M, M), Matrix.zeros(N, N)
    g0: list[tuple[str, EvenElement]] = []
    g1: list[tuple[str, OddElement]] = []
    m0: list[tuple[str, EvenElement]] = []
    m1: list[tuple[str, OddElement]] = []

    def even(a: Matrix, b: Matrix) -> EvenElement:
        return EvenElement(M, N, a, b)

    def odd(p: Matrix, q: Matrix) -> OddElement:
        return OddElement(M, N, p, q)

    if fam in (Family.GL, Family.SL):
        # для sl диагональные E(i,i) заменяются разностями ниже
        for i in range(M):
            for j in range(M):
                if fam is Family.GL or i != j:
                    g0.append((f"a.E({i},{j})", even(_unit(M, M, i, j), zN)))
        for i in range(N):
            for j in range(N):
                if fam is Family.GL or i != j:
                    g0.append((f"b.E({i},{j})", even(zM, _unit(N, N, i, j))))
        if fam is Family.SL:
            # диагональ с нулевым суперследом
            for i in range(M - 1):
                g0.append((f"a.h({i})", even(_unit(M, M, i, i) - _unit(M, M, i + 1, i + 1), zN)))
            for j in range(N - 1):
                g0.append((f"b.h({j})", even(zM, _unit(N, N, j, j) - _unit(N, N, j + 1, j + 1))))
            g0.append(("h(0|0)", even(_unit(M, M, 0, 0), _unit(N, N, 0, 0))))
            if literal_table:
                m0.append(("k(I,-I)", even(Matrix.identity(M), -Matrix.identity(N))))
            else:
                m0.append(("k(I,I)", even(Matrix.identity(M), Matrix.identity(N))))
        for lab, E in _full_basis(M, N):
            g1.append((f"+.{lab}", odd(E, Matrix.zeros(N, M))))
        for lab, E in _full_basis(N, M):
            g1.append((f"-.{lab}", odd(Matrix.zeros(M, N), E)))

    elif fam is Family.Q:
        for lab, E in _full_basis(N, N):
            g0.append((f"(a,a).{lab}", even(E, E)))
            m0.append((f"(a,-a).{lab}", even(E, -E)))
            g1.append((f"(b,b).{lab}", odd(E, E)))
            m1.append((f"(b,-b).{lab}", odd(E, -E)))

    elif fam is Family.P:
        for lab, E in _full_basis(N, N):
            g0.append((f"(a,-at).{lab}", even(E, -E.T)))
            m0.append((f"(a,at).{lab}", even(E, E.T)))
        for lab, S in _sym_basis(N):
            g1.append((f"+.{lab}", odd(S, zN)))
            m1.append((f"-.{lab}", odd(zN, S)))
        for lab, K in _skew_basis(N):
            g1.append((f"-.{lab}", odd(zN, K)))
            m1.append((f"+.{lab}", odd(K, zN)))

    else:
        F, S = orthogonal_form(kind), symplectic_form(kind)
        S_inv = inverse(S)
        for lab, K in _skew_basis(M):
            g0.append((f"so.{lab}", even(F @ K, zN)))
        for lab, Y in _sym_basis(N):
            g0.append((f"sp.{lab}", even(zM, S_inv @ Y)))
        for lab, Y in _sym_basis(M):
            m0.append((f"a.F{lab}", even(F @ Y, zN)))
        for lab, K in _skew_basis(N):
            m0.append((f"b.S{lab}", even(zM, S_inv @ K)))
        for lab, E in _full_basis(M, N):
            image = S @ E.T @ F
            g1.append((f"g.{lab}", odd(E, -image)))
            m1.append((f"m.{lab}", odd(E, image)))

    return ComplementBasis(
        kind=kind,
        even_basis=tuple(e for _, e in m0),
        odd_basis=tuple(x for _, x in m1),
        g_even_basis=tuple(e for _, e in g0),
        g_odd_basis=tuple(x for _, x in g1),
        labels={
            "g0": tuple(l for l, _ in g0),
            "g1": tuple(l for l, _ in g1),
            "M0": tuple(l for l, _ in m0),
            "M1": tuple(l for l, _ in m1),
        },
    )


def decompose(kind: AlgebraKind, x: OddElement, basis: ComplementBasis | None = None) -> tuple[OddElement, OddElement]:
    """x = gpart + mpart, gpart ∈ g₁, mpart ∈ M₁."""
    M, N = kind.ambient
    if (x.m, x.n) != (M, N):
        raise ShapeError(f"{kind} lives in gl({M}|{N}), element is in gl({x.m}|{x.n})")
    cb = basis or complement_basis(kind)
    span = SparseSpan()
    for i, u in enumerate(cb.g_odd_basis):
        span.add(u.vector(), ("g", i))
    for j, v in enumerate(cb.odd_basis):
        span.add(v.vector(), ("m", j))
    coords = span.coordinates(x.vector())
    if coords is None:
        raise ArithmeticError(f"{kind}: g1 + M1 does not span the odd part")
    gpart, mpart = OddElement.zero(M, N), OddElement.zero(M, N)
    for (side, i), c in coords.items():
        if side == "g":
            gpart = gpart + cb.g_odd_basis[i].scale(c)
        else:
            mpart = mpart + cb.odd_basis[i].scale(c)
    return gpart, mpart


# ====== ПРОВЕРКА ДОПОЛНЕНИЯ ======
@dataclass
class ComplementReport:
    kind: str
    passed: bool
    checks: dict[str, bool]
    dims: dict[str, int]
    brackets_checked: int
    failures: list[dict[str, Any]] = field(default_factory=list)

    def to_payload(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "checks": dict(self.checks),
            "dims": dict(self.dims),
            "brackets_checked": self.brackets_checked,
            "failures": list(self.failures),
        }


def osp_block_relations(kind: AlgebraKind, e: EvenElement) -> list[str]:
    """
    Нарушенные блочные соотношения для элемента M₀ алгебры osp.
    Для osp(2m+1|2n) блоки A: 1, m, m; для osp(2m|2n): m, m. Блоки B: n, n.
    """
    k, n = kind.m, kind.n
    a, b = e.a, e.b
    bad: list[str] = []
    if kind.family is Family.OSP_ODD:
        cuts = [(0, 1), (1, 1 + k), (1 + k, 1 + 2 * k)]
        A = lambda i, j: a.sub(cuts[i - 1][0], cuts[i - 1][1], cuts[j - 1][0], cuts[j - 1][1])
        rel = {
            "A12=A31^t": A(1, 2) == A(3, 1).T,
            "A13=A21^t": A(1, 3) == A(2, 1).T,
            "A33=A22^t": A(3, 3) == A(2, 2).T,
            "A23 symmetric": A(2, 3).is_symmetric(),
            "A32 symmetric": A(3, 2).is_symmetric(),
        }
    else:
        cuts = [(0, k), (k, 2 * k)]
        A = lambda i, j: a.sub(cuts[i - 1][0], cuts[i - 1][1], cuts[j - 1][0], cuts[j - 1][1])
        rel = {
            "A22=A11^t": A(2, 2) == A(1, 1).T,
            "A12 symmetric": A(1, 2).is_symmetric(),
            "A21 symmetric": A(2, 1).is_symmetric(),
        }
    bc = [(0, n), (n, 2 * n)]
    B = lambda i, j: b.sub(bc[i - 1][0], bc[i - 1][1], bc[j - 1][0], bc[j - 1][1])
    rel["B22=B11^t"] = B(2, 2) == B(1, 1).T
    rel["B12 skew"] = B(1, 2).is_skew()
    rel["B21 skew"] = B(2, 1).is_skew()
    for name, ok in rel.items():
        if not ok:
            bad.append(name)
    return bad


@log_operation("verify_complement")
def verify_complement(kind: AlgebraKind, literal_table: bool = False) -> ComplementReport:
    """
    Прямая сумма gl = g ⊕ M по чётностям и [g, M] ⊆ M на всех парах базисных векторов;
    для osp дополнительно блочные соотношения на скобках [g₁, M₁].
    """
    M, N = kind.ambient
    cb = complement_basis(kind, literal_table=literal_table)
    lab = cb.labels
    failures: list[dict[str, Any]] = []
    checks: dict[str, bool] = {}

    def fail(check: str, **info: Any) -> None:
        if len(failures) < NILCONE_MAX_REPORTED:
            failures.append({"check": check, **info})

    dims = cb.dims
    checks["dim_even"] = dims["g0"] + dims["M0"] == M * M + N * N
    checks["dim_odd"] = dims["g1"] + dims["M1"] == 2 * M * N
    for name in ("dim_even", "dim_odd"):
        if not checks[name]:
            fail(name, dims=dims)

    # независимость объединённых базисов
    for parity, parts in (("even", (("g0", cb.g_even_basis), ("M0", cb.even_basis))),
                          ("odd", (("g1", cb.g_odd_basis), ("M1", cb.odd_basis)))):
        span = SparseSpan()
        ok = True
        for part, elems in parts:
            for i, u in enumerate(elems):
                if not span.add(u.vector()):
                    ok = False
                    fail(f"direct_sum_{parity}", element=f"{part}:{lab[part][i]}")
        checks[f"direct_sum_{parity}"] = ok

    checks["g_membership"] = all(odd_membership(kind, u) for u in cb.g_odd_basis) and all(
        even_membership(kind, e) for e in cb.g_even_basis
    )
    if not checks["g_membership"]:
        fail("g_membership")

    span_m0, span_m1 = SparseSpan(), SparseSpan()
    for e in cb.even_basis:
        span_m0.add(e.vector())
    for v in cb.odd_basis:
        span_m1.add(v.vector())

    counted = 0

    def run(check: str, gpart: str, mpart: str, gs: Iterable, ms: Iterable,
            op: Callable[[Any, Any], Any], target: SparseSpan) -> None:
        nonlocal counted
        ok = True
        ms = list(ms)
        for i, u in enumerate(gs):
            for j, v in enumerate(ms):
                counted += 1
                if not target.contains(op(u, v).vector()):
                    ok = False
                    fail(check, g=f"{gpart}:{lab[gpart][i]}", m=f"{mpart}:{lab[mpart][j]}")
        checks[check] = ok

    run("bracket_g0_M0", "g0", "M0", cb.g_even_basis, cb.even_basis, bracket_even, span_m0)
    run("bracket_g0_M1", "g0", "M1", cb.g_even_basis, cb.odd_basis, bracket_even_odd, span_m1)
    run("bracket_g1_M0", "g1", "M0", cb.g_odd_basis, cb.even_basis, lambda x, e: bracket_even_odd(e, x), span_m1)
    run("bracket_g1_M1", "g1", "M1", cb.g_odd_basis, cb.odd_basis, bracket_odd, span_m0)

    if kind.family in (Family.OSP_ODD, Family.OSP_EVEN):
        ok = True
        for i, u in enumerate(cb.g_odd_basis):
            for j, v in enumerate(cb.odd_basis):
                broken = osp_block_relations(kind, bracket_odd(u, v))
                if broken:
                    ok = False
                    fail("osp_block_relations", g=f"g1:{lab['g1'][i]}", m=f"M1:{lab['M1'][j]}", relations=broken)
        checks["osp_block_relations"] = ok

    report = ComplementReport(
        kind=str(kind),
        passed=all(checks.values()),
        checks=checks,
        dims=dims,
        brackets_checked=counted,
        failures=failures,
    )
    logger.info({"event": "complement_verified", "kind": str(kind), "passed": report.passed, "brackets": counted})
    return report


# ====== СЛУЧАЙНЫЕ ЭЛЕМЕНТЫ ГРУППЫ ======
def _rand_int(rng: np.random.Generator, bound: int) -> int:
    return int(rng.integers(-bound, bound + 1))


def random_unimodular(n: int, rng: np.random.Generator, bound: int = NILCONE_ENTRY_BOUND,
                      factors: int = NILCONE_SAMPLE_FACTORS) -> Matrix:
    """Произведение унитреугольных целочисленных матриц: det = 1."""
    out = Matrix.identity(n)
    for _ in range(max(1, factors)):
        L = [[1 if i == j else (_rand_int(rng, bound) if j < i else 0) for j in range(n)] for i in range(n)]
        U = [[1 if i == j else (_rand_int(rng, bound) if j > i else 0) for j in range(n)] for i in range(n)]
        out = out @ Matrix.from_rows(L, n) @ Matrix.from_rows(U, n)
    return out


def _random_skew(n: int, rng: np.random.Generator, bound: int) -> Matrix:
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = _rand_int(rng, bound)
            rows[i][j], rows[j][i] = v, -v
    return Matrix.from_rows(rows, n)


def _random_sym(n: int, rng: np.random.Generator, bound: int) -> Matrix:
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = _rand_int(rng, bound)
            rows[i][j] = rows[j][i] = v
    return Matrix.from_rows(rows, n)


def _cayley(a: Matrix) -> Matrix | None:
    I = Matrix.identity(a.rows)
    try:
        return inverse(I - a) @ (I + a)
    except SingularMatrixError:
        return None


def _random_cayley(make: Callable[[], Matrix], size: int, factors: int, attempts: int = 50) -> Matrix:
    out = Matrix.identity(size)
    for _ in range(max(1, factors)):
        for _ in range(attempts):
            c = _cayley(make())
            if c is not None:
                out = out @ c
                break
        else:
            raise ArithmeticError("could not draw a nonsingular Cayley transform")
    return out


def random_group_element(kind: AlgebraKind, rng: np.random.Generator,
                         bound: int = NILCONE_ENTRY_BOUND, factors: int = NILCONE_SAMPLE_FACTORS) -> GroupElement:
    """Случайный элемент чётной группы алгебры kind, действующий в объемлющей gl(M|N)."""
    M, N = kind.ambient
    fam = kind.family
    if fam in (Family.GL, Family.SL):
        return GroupElement(M, N, random_unimodular(M, rng, bound, factors), random_unimodular(N, rng, bound, factors))
    if fam is Family.Q:
        A = random_unimodular(N, rng, bound, factors)
        return GroupElement(M, N, A, A)
    if fam is Family.P:
        A = random_unimodular(N, rng, bound, factors)
        return GroupElement(M, N, A, inverse(A.T))
    F, S = orthogonal_form(kind), symplectic_form(kind)
    S_inv = inverse(S)
    A = _random_cayley(lambda: F @ _random_skew(M, rng, bound), M, factors)
    B = _random_cayley(lambda: S_inv @ _random_sym(N, rng, bound), N, factors)
    return GroupElement(M, N, A, B)
