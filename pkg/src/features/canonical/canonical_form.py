# src/features/canonical/canonical_form.py
from __future__ import annotations
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from core.decorators import log_operation
from core.exact_linalg import (
    Matrix, NotNilpotentError, column_echelon, inverse, jordan_matrix,
    nilpotent_jordan, rank_normal_form,
)
from core.nilcone import in_nilcone_gl
from core.orbit_params import OrbitParams, PivotMaps, equal_runs, rep_matrix
from core.superalgebra import GroupElement, OddElement, act
from services.logger_setup import get_logger

logger = get_logger("features.canonical")


class NotInConeError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: int, msg: str):
        super().__init__(f"stage {stage}: {msg}")
        self.stage = stage


STAGE_NAMES = {
    1: "rank_normal_form",
    2: "centralizer_lock",
    3: "jordanize",
    4: "clear_off_pivot",
    5: "echelon",
    6: "reduce_c",
    7: "reduce_r",
    8: "normalize_xi22",
    9: "kill_xi11_xi12",
    10: "kill_xi21",
}


@dataclass(frozen=True)
class TraceStep:
    stage: int
    name: str
    g: GroupElement
    y: OddElement


@dataclass(frozen=True)
class CanonicalResult:
    g: GroupElement
    params: OrbitParams
    y: OddElement
    trace: tuple[TraceStep, ...] = field(default=(), compare=False)


# ====== ЦЕНТРАЛИЗАТОР J ======
def _block_offsets(partition: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for k in partition:
        out.append(acc)
        acc += k
    return out


def centralizer_lift(partition: Sequence[int], D: Sequence[Sequence[Fraction | int]]) -> Matrix:
    """
    Матрица из централизатора J = jordan_matrix(partition): блок (j, i) равен
    d_ji·(0 | I_kj) при kj <= ki и d_ji·(I_ki ; 0) при kj > ki.
    """
    t = len(partition)
    if len(D) != t or any(len(row) != t for row in D):
        raise ValueError(f"D must be {t}x{t}")
    off = _block_offsets(partition)
    size = sum(partition)
    rows = [[Fraction(0)] * size for _ in range(size)]
    for j in range(t):
        for i in range(t):
            d = Fraction(D[j][i])
            if not d:
                continue
            kj, ki = partition[j], partition[i]
            for a in range(min(kj, ki)):
                if kj <= ki:
                    rows[off[j] + a][off[i] + ki - kj + a] = d
                else:
                    rows[off[j] + a][off[i] + a] = d
    return Matrix(size, size, tuple(tuple(r) for r in rows))


def build_L(partition: Sequence[int], j: int, i: int, alpha: Fraction | int) -> Matrix:
    """
    I + блок (j, i) = (0 | alpha·I_kj); 1 <= i < j <= t.
    Умножение слева прибавляет к строке f(j) строку f(i), умноженную на alpha.
    """
    t = len(partition)
    if not (1 <= i < j <= t):
        raise ValueError(f"build_L needs 1 <= i < j <= {t}, got i={i}, j={j}")
    D = [[Fraction(int(a == b)) for b in range(t)] for a in range(t)]
    D[j - 1][i - 1] = Fraction(alpha)
    return centralizer_lift(partition, D)


def build_M(partition: Sequence[int], j: int, alpha: Fraction | int) -> Matrix:
    """Масштабирует j-й жорданов блок на alpha != 0."""
    t = len(partition)
    if not (1 <= j <= t):
        raise ValueError(f"build_M needs 1 <= j <= {t}, got {j}")
    if Fraction(alpha) == 0:
        raise ValueError("build_M needs alpha != 0")
    D = [[Fraction(int(a == b)) for b in range(t)] for a in range(t)]
    D[j - 1][j - 1] = Fraction(alpha)
    return centralizer_lift(partition, D)


def _identity_rows(t: int) -> list[list[Fraction]]:
    return [[Fraction(int(a == b)) for b in range(t)] for a in range(t)]


# ====== КОНВЕЙЕР ======
class _Pipeline:
    def __init__(self, x: OddElement, keep_trace: bool):
        self.m, self.n = x.m, x.n
        self.y = x
        self.g = GroupElement.identity(x.m, x.n)
        self.trace: list[TraceStep] | None = [] if keep_trace else None
        self.r = 0
        self.partition: tuple[int, ...] = ()
        self.locked = False

    # --- блоки Y⁻ ---
    def block(self, name: str) -> Matrix:
        r, m, n, Y = self.r, self.m, self.n, self.y.xminus
        return {
            "11": lambda: Y.sub(0, r, 0, r),
            "12": lambda: Y.sub(0, r, r, m),
            "21": lambda: Y.sub(r, n, 0, r),
            "22": lambda: Y.sub(r, n, r, m),
        }[name]()

    @property
    def pm(self) -> PivotMaps:
        return PivotMaps.from_partition(self.partition)

    def c_hat(self) -> Matrix:
        """Строки Y⁻₁₂ на концах блоков."""
        Y12 = self.block("12")
        return Matrix.from_rows([Y12.row(f - 1) for f in self.pm.f], self.m - self.r)

    def r_hat(self) -> Matrix:
        """Столбцы Y⁻₂₁ в началах блоков."""
        Y21 = self.block("21")
        return Matrix.from_columns([Y21.col(g - 1) for g in self.pm.g_map], self.n - self.r)

    # --- применение шага ---
    def apply(self, stage: int, step: GroupElement, name: str | None = None) -> None:
        if self.locked and self.y.xplus @ step.B != step.A @ self.y.xplus:
            raise StageError(stage, "step leaves the centralizer of Y+")
        self.y = act(step, self.y)
        self.g = step * self.g
        if self.locked and self.partition and self.block("11") != jordan_matrix(self.partition):
            raise StageError(stage, "step moved the Jordan block")
        if self.trace is not None:
            self.trace.append(TraceStep(stage, name or STAGE_NAMES[stage], step, self.y))

    def centralizer(
        self,
        A11: Matrix | None = None,
        A12: Matrix | None = None,
        A22: Matrix | None = None,
        B21: Matrix | None = None,
        B22: Matrix | None = None,
    ) -> GroupElement:
        """(A, B) = ([[A11, A12], [0, A22]], [[A11, 0], [B21, B22]])."""
        r, m, n = self.r, self.m, self.n
        A11 = Matrix.identity(r) if A11 is None else A11
        A12 = Matrix.zeros(r, m - r) if A12 is None else A12
        A22 = Matrix.identity(m - r) if A22 is None else A22
        B21 = Matrix.zeros(n - r, r) if B21 is None else B21
        B22 = Matrix.identity(n - r) if B22 is None else B22
        A = Matrix.block([[A11, A12], [Matrix.zeros(m - r, r), A22]])
        B = Matrix.block([[A11, Matrix.zeros(r, n - r)], [B21, B22]])
        return GroupElement(m, n, A, B)

    def lift(self, D: list[list[Fraction]]) -> Matrix:
        return centralizer_lift(self.partition, D)

    # --- стадии ---
    def stage1(self) -> None:
        A, B, r = rank_normal_form(self.y.xplus)
        self.apply(1, GroupElement(self.m, self.n, A, B))
        self.r = r

    def stage2(self) -> None:
        r, m, n = self.r, self.m, self.n
        expected = Matrix.block_diag(Matrix.identity(r), Matrix.zeros(m - r, n - r))
        if self.y.xplus != expected:
            raise StageError(2, "Y+ is not diag(I_r, 0)")
        self.locked = True

    def stage3(self) -> None:
        try:
            P, partition = nilpotent_jordan(self.block("11"))
        except NotNilpotentError as e:
            raise StageError(3, "Y-_11 has a nonzero eigenvalue") from e
        self.partition = partition
        self.apply(3, self.centralizer(A11=P))
        if self.block("11") != jordan_matrix(partition):
            raise StageError(3, "Y-_11 is not in Jordan form")

    def clear_off_pivot(self, stage: int) -> None:
        """Обнуляет неконцевые строки Y⁻₁₂ через A12 и ненулевые столбцы вне начал Y⁻₂₁ через B21."""
        r = self.r
        if r == 0:
            return
        ends = {f - 1 for f in self.pm.f}
        starts = {g - 1 for g in self.pm.g_map}

        Y12 = self.block("12")
        if any(Y12.row(i)[c] for i in range(r) if i not in ends for c in range(Y12.cols)):
            A12 = Matrix.zeros(r, self.m - r)
            for i in range(r):
                if i not in ends:
                    A12 = A12.with_block(i + 1, 0, -Y12.sub(i, i + 1, 0, Y12.cols))
            self.apply(stage, self.centralizer(A12=A12), "clear_y12")

        Y21 = self.block("21")
        if any(Y21.col(c)[q] for c in range(r) if c not in starts for q in range(Y21.rows)):
            B21 = Matrix.zeros(self.n - r, r)
            for c in range(r):
                if c not in starts:
                    B21 = B21.with_block(0, c - 1, Y21.sub(0, Y21.rows, c, c + 1))
            self.apply(stage, self.centralizer(B21=B21), "clear_y21")

    def stage4(self) -> None:
        self.clear_off_pivot(4)
        ends = {f - 1 for f in self.pm.f}
        starts = {g - 1 for g in self.pm.g_map}
        Y12, Y21 = self.block("12"), self.block("21")
        if any(v for i, _, v in Y12.entries() if i not in ends) or any(
            v for _, c, v in Y21.entries() if c not in starts
        ):
            raise StageError(4, "off-pivot entries survived")

    def stage5(self) -> None:
        _, E = column_echelon(self.block("12"))
        _, E2 = column_echelon(self.block("21").T)
        self.apply(5, self.centralizer(A22=E, B22=inverse(E2.T)))

    def stage6(self) -> tuple[int, ...]:
        """Y⁻₁₂ -> (C_{r1} | 0); возвращает индексы блоков с ведущими элементами C."""
        t = len(self.partition)
        pivot_block_of_col: list[int] = []
        c_blocks: list[int] = []
        for start, size in equal_runs(self.partition):
            group = range(start, start + size)
            C = self.c_hat()
            D = _identity_rows(t)
            touched = False
            for j in group:
                for c, i in enumerate(pivot_block_of_col):
                    alpha = C[j, c]
                    if alpha:
                        D[j][i] = alpha
                        touched = True
            if touched:
                self.apply(6, self.centralizer(A11=self.lift(D)), "clear_earlier_columns")
                self.clear_off_pivot(6)

            u = len(pivot_block_of_col)
            C = self.c_hat()
            H = C.sub(start, start + size, u, C.cols)
            Aa, Bb, rho = rank_normal_form(H)
            D = _identity_rows(t)
            for a in range(size):
                for b in range(size):
                    D[start + a][start + b] = Aa[a, b]
            A22 = Matrix.block_diag(Matrix.identity(u), Bb)
            self.apply(6, self.centralizer(A11=self.lift(D), A22=A22), "group_rank_normal_form")
            self.clear_off_pivot(6)
            for a in range(rho):
                pivot_block_of_col.append(start + a)
                c_blocks.append(start + a)

        expected = self._c_form(c_blocks)
        if self.block("12") != expected:
            raise StageError(6, "Y-_12 is not (C | 0)")
        return tuple(c_blocks)

    def _c_form(self, c_blocks: Sequence[int]) -> Matrix:
        out = Matrix.zeros(self.r, self.m - self.r)
        for p, j in enumerate(c_blocks):
            out = out.with_entry(self.pm.f[j] - 1, p, 1)
        return out

    def _r_form(self, r_blocks: Sequence[int]) -> Matrix:
        out = Matrix.zeros(self.n - self.r, self.r)
        for q, j in enumerate(r_blocks):
            out = out.with_entry(q, self.pm.g_map[j] - 1, 1)
        return out

    def stage7(self, c_blocks: tuple[int, ...]) -> tuple[int, ...]:
        """Y⁻₂₁ -> R_{r2}, сохраняя (C | 0)."""
        t = len(self.partition)
        r_blocks: list[int] = []
        col_of_cblock = {j: p for p, j in enumerate(c_blocks)}
        for start, size in equal_runs(self.partition):
            group = list(range(start, start + size))
            cg = [j for j in group if j in col_of_cblock]
            ng = [j for j in group if j not in col_of_cblock]

            # строки, уже занятые старшими группами
            R = self.r_hat()
            D = _identity_rows(t)
            touched = False
            for q, i in enumerate(r_blocks):
                for j in group:
                    beta = R[q, j]
                    if beta:
                        D[i][j] = -beta
                        touched = True
            if touched:
                self.apply(7, self.centralizer(A11=self.lift(D)), "clear_earlier_rows")
                self.clear_off_pivot(7)

            w = len(r_blocks)
            nb = 0
            if cg:
                # (i) столбцы блоков с C; компенсация через A22 на столбцах их ведущих
                R = self.r_hat()
                H1 = Matrix.from_columns([R.col(j)[w:] for j in cg], R.rows - w)
                Pa, Pb, nb = rank_normal_form(H1)
                D = _identity_rows(t)
                A22 = Matrix.identity(self.m - self.r)
                for a, ja in enumerate(cg):
                    for b, jb in enumerate(cg):
                        D[ja][jb] = Pb[a, b]
                        A22 = A22.with_entry(col_of_cblock[ja], col_of_cblock[jb], Pb[a, b])
                B22 = Matrix.block_diag(Matrix.identity(w), Pa)
                self.apply(7, self.centralizer(A11=self.lift(D), A22=A22, B22=B22), "c_columns_rank_normal_form")
                self.clear_off_pivot(7)

                # (ii) верхние nb строк в столбцах без C
                R = self.r_hat()
                D = _identity_rows(t)
                touched = False
                for c in range(nb):
                    for i in ng:
                        val = R[w + c, i]
                        if val:
                            D[cg[c]][i] = -val
                            touched = True
                if touched:
                    self.apply(7, self.centralizer(A11=self.lift(D)), "clear_shared_rows")
                    self.clear_off_pivot(7)

            nr = 0
            if ng:
                # (iii) оставшиеся строки в столбцах без C
                R = self.r_hat()
                top = w + nb
                H2 = Matrix.from_columns([R.col(j)[top:] for j in ng], R.rows - top)
                Qa, Qb, nr = rank_normal_form(H2)
                D = _identity_rows(t)
                for a, ja in enumerate(ng):
                    for b, jb in enumerate(ng):
                        D[ja][jb] = Qb[a, b]
                B22 = Matrix.block_diag(Matrix.identity(top), Qa)
                self.apply(7, self.centralizer(A11=self.lift(D), B22=B22), "r_columns_rank_normal_form")
                self.clear_off_pivot(7)

            r_blocks.extend(cg[:nb])
            r_blocks.extend(ng[:nr])

        if self.block("21") != self._r_form(r_blocks):
            raise StageError(7, "Y-_21 is not R_{r2}")
        if self.block("12") != self._c_form(c_blocks):
            raise StageError(7, "Y-_12 left (C | 0)")
        return tuple(r_blocks)

    def stage8(self, r1: int, r2: int) -> int:
        r, m, n = self.r, self.m, self.n
        xi22 = self.block("22").sub(r2, n - r, r1, m - r)
        Sa, Sb, s = rank_normal_form(xi22)
        A22 = Matrix.block_diag(Matrix.identity(r1), Sb)
        B22 = Matrix.block_diag(Matrix.identity(r2), Sa)
        self.apply(8, self.centralizer(A22=A22, B22=B22))
        target = Matrix.block_diag(Matrix.identity(s), Matrix.zeros(n - r - r2 - s, m - r - r1 - s))
        if self.block("22").sub(r2, n - r, r1, m - r) != target:
            raise StageError(8, "xi22 is not diag(I_s, 0)")
        return s

    def stage9(self, r_blocks: tuple[int, ...]) -> None:
        r, m = self.r, self.m
        Y22 = self.block("22")
        if not r_blocks or Y22.sub(0, len(r_blocks), 0, Y22.cols).is_zero():
            return
        A12 = Matrix.zeros(r, m - r)
        for q, j in enumerate(r_blocks):
            A12 = A12.with_block(self.pm.g_map[j] - 1, 0, -Y22.sub(q, q + 1, 0, Y22.cols))
        self.apply(9, self.centralizer(A12=A12))
        if not self.block("22").sub(0, len(r_blocks), 0, Y22.cols).is_zero():
            raise StageError(9, "xi11 / xi12 survived")

    def stage10(self, c_blocks: tuple[int, ...], r2: int) -> None:
        r, n = self.r, self.n
        Y22 = self.block("22")
        r1 = len(c_blocks)
        if not r1 or Y22.sub(r2, Y22.rows, 0, r1).is_zero():
            return
        B21 = Matrix.zeros(n - r, r)
        for row in range(r2, n - r):
            for p, j in enumerate(c_blocks):
                if Y22[row, p]:
                    B21 = B21.with_entry(row, self.pm.f[j] - 1, Y22[row, p])
        self.apply(10, self.centralizer(B21=B21))
        if not self.block("22").sub(r2, Y22.rows, 0, r1).is_zero():
            raise StageError(10, "xi21 survived")


@log_operation("canonicalize")
def canonicalize(x: OddElement, trace: bool = False) -> CanonicalResult:
    """
    Приводит точку нильпотентного конуса gl(m|n) к представителю орбиты.
    Возвращает накопленный элемент группы g с act(g, x) = y.
    """
    if not in_nilcone_gl(x):
        raise NotInConeError("element is not in the nilpotent cone (some Tr((X+X-)^k) != 0)")
    pipe = _Pipeline(x, trace)
    pipe.stage1()
    pipe.stage2()
    pipe.stage3()
    pipe.stage4()
    pipe.stage5()
    c_blocks = pipe.stage6()
    r_blocks = pipe.stage7(c_blocks)
    s = pipe.stage8(len(c_blocks), len(r_blocks))
    pipe.stage9(r_blocks)
    pipe.stage10(c_blocks, len(r_blocks))

    pm = pipe.pm
    params = OrbitParams(
        r=pipe.r,
        partition=pipe.partition,
        c_pivots=tuple(pm.f[j] for j in c_blocks),
        r_pivots=tuple(pm.g_map[j] for j in r_blocks),
        s=s,
    )
    y = pipe.y
    if y != rep_matrix(params, x.m, x.n):
        raise StageError(10, "final element differs from the orbit representative")
    if act(pipe.g, x) != y:
        raise StageError(10, "accumulated group element does not reproduce y")
    if is_canonical(y) != params:
        raise StageError(10, "representative is not recognized as canonical")
    logger.debug({"event": "canonicalized", "m": x.m, "n": x.n, "params": params.to_payload()})
    return CanonicalResult(g=pipe.g, params=params, y=y, trace=tuple(pipe.trace or ()))


# ====== РАСПОЗНАВАНИЕ ======
def _jordan_shape(Y11: Matrix) -> tuple[int, ...] | None:
    r = Y11.rows
    for i, j, v in Y11.entries():
        if v and not (j == i + 1 and v == 1):
            return None
    parts, run = [], 1
    for i in range(r - 1):
        if Y11[i, i + 1] == 1:
            run += 1
        else:
            parts.append(run)
            run = 1
    if r:
        parts.append(run)
    return tuple(parts)


def _unit_position(vec: Sequence[Fraction]) -> int | None:
    """Индекс единственной единицы; -1 для нулевого вектора; None иначе."""
    nz = [i for i, v in enumerate(vec) if v]
    if not nz:
        return -1
    if len(nz) == 1 and vec[nz[0]] == 1:
        return nz[0]
    return None


def _pivot_list(vectors: Sequence[Sequence[Fraction]], allowed: set[int]) -> tuple[int, ...] | None:
    out: list[int] = []
    seen_zero = False
    for vec in vectors:
        pos = _unit_position(vec)
        if pos is None:
            return None
        if pos == -1:
            seen_zero = True
            continue
        if seen_zero or pos not in allowed or (out and pos <= out[-1]):
            return None
        out.append(pos)
    return tuple(out)


def is_canonical(y: OddElement) -> OrbitParams | None:
    """Параметры, если y ровно совпадает с представителем своей орбиты; иначе None."""
    m, n = y.m, y.n
    P = y.xplus
    r = 0
    while r < min(m, n) and P[r, r] == 1:
        r += 1
    if P != Matrix.block_diag(Matrix.identity(r), Matrix.zeros(m - r, n - r)):
        return None
    Ym = y.xminus
    partition = _jordan_shape(Ym.sub(0, r, 0, r))
    if partition is None or any(a < b for a, b in zip(partition, partition[1:])):
        return None
    pm = PivotMaps.from_partition(partition)
    Y12 = Ym.sub(0, r, r, m)
    Y21 = Ym.sub(r, n, 0, r)
    c_rows = _pivot_list([Y12.col(p) for p in range(Y12.cols)], {f - 1 for f in pm.f})
    r_cols = _pivot_list([Y21.row(q) for q in range(Y21.rows)], {g - 1 for g in pm.g_map})
    if c_rows is None or r_cols is None:
        return None
    r1, r2 = len(c_rows), len(r_cols)
    Y22 = Ym.sub(r, n, r, m)
    s = 0
    while r2 + s < Y22.rows and r1 + s < Y22.cols and Y22[r2 + s, r1 + s] == 1:
        s += 1
    expected = Matrix.zeros(Y22.rows, Y22.cols)
    for a in range(s):
        expected = expected.with_entry(r2 + a, r1 + a, 1)
    if Y22 != expected:
        return None
    params = OrbitParams(r, partition, tuple(i + 1 for i in c_rows), tuple(j + 1 for j in r_cols), s)
    try:
        params.validate(m, n)
    except ValueError:
        return None
    return params if params.is_normalized() else None
