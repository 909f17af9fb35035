# src/core/exact_linalg.py
from __future__ import annotations
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable, Iterator, Sequence

Row = tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class ShapeError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class NotNilpotentError(ValueError):
    pass


# ====== РАЦИОНАЛЬНЫЕ ЧИСЛА ======
def parse_rational(raw: Any) -> Fraction:
    """
    Принимает int, Fraction или строку "p" / "p/q".
    float и bool не принимаются: точность важнее удобства.
    """
    if isinstance(raw, bool):
        raise ValueError(f"not a rational: {raw!r}")
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        m = _RATIONAL_RE.match(raw)
        if not m:
            raise ValueError(f"not a rational: {raw!r}")
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ValueError(f"zero denominator: {raw!r}")
        return Fraction(int(m.group(1)), den)
    raise ValueError(f"not a rational: {raw!r}")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


# ====== МАТРИЦА ======
@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    data: tuple[Row, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"negative shape {self.rows}x{self.cols}")
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ShapeError(f"data does not match shape {self.rows}x{self.cols}")

    # --- конструкторы ---
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], cols: int | None = None) -> "Matrix":
        data = tuple(tuple(parse_rational(v) for v in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        z = Fraction(0)
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Fraction]], rows: int) -> "Matrix":
        return cls(len(columns), rows, tuple(tuple(c) for c in columns)).T if columns else cls.zeros(rows, 0)

    @classmethod
    def block(cls, grid: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Склейка блочной матрицы; высоты и ширины блоков должны согласовываться."""
        if not grid:
            return cls.zeros(0, 0)
        widths = [b.cols for b in grid[0]]
        out: list[Row] = []
        total_cols = sum(widths)
        for brow in grid:
            if [b.cols for b in brow] != widths:
                raise ShapeError("block column widths disagree")
            h = brow[0].rows if brow else 0
            if any(b.rows != h for b in brow):
                raise ShapeError("block row heights disagree")
            for i in range(h):
                out.append(tuple(x for b in brow for x in b.data[i]))
        return cls(len(out), total_cols, tuple(out))

    @classmethod
    def block_diag(cls, *blocks: "Matrix") -> "Matrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        rows: list[list[Fraction]] = [[Fraction(0)] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                rows[r0 + i][c0:c0 + b.cols] = b.data[i]
            r0 += b.rows
            c0 += b.cols
        return cls(n, m, tuple(tuple(r) for r in rows))

    # --- доступ ---
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> Row:
        return self.data[i]

    def col(self, j: int) -> Row:
        return tuple(r[j] for r in self.data)

    def entries(self) -> Iterator[tuple[int, int, Fraction]]:
        for i, r in enumerate(self.data):
            for j, v in enumerate(r):
                yield i, j, v

    def sub(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(r1 - r0, c1 - c0, tuple(r[c0:c1] for r in self.data[r0:r1]))

    def with_block(self, r0: int, c0: int, blk: "Matrix") -> "Matrix":
        if r0 + blk.rows > self.rows or c0 + blk.cols > self.cols:
            raise ShapeError("block does not fit")
        rows = [list(r) for r in self.data]
        for i in range(blk.rows):
            rows[r0 + i][c0:c0 + blk.cols] = blk.data[i]
        return Matrix(self.rows, self.cols, tuple(tuple(r) for r in rows))

    def with_entry(self, i: int, j: int, value: Any) -> "Matrix":
        rows = [list(r) for r in self.data]
        rows[i][j] = parse_rational(value)
        return Matrix(self.rows, self.cols, tuple(tuple(r) for r in rows))

    # --- арифметика ---
    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def _same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.data))

    def scale(self, c: Any) -> "Matrix":
        c = parse_rational(c)
        return Matrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        z = Fraction(0)
        out: list[Row] = []
        for r in self.data:
            acc = [z] * other.cols
            for k, a in enumerate(r):
                if a:
                    brow = other.data[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] += a * b
            out.append(tuple(acc))
        return Matrix(self.rows, other.cols, tuple(out))

    def apply(self, v: Sequence[Fraction]) -> Row:
        if len(v) != self.cols:
            raise ShapeError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self.data)

    def power(self, k: int) -> "Matrix":
        if not self.is_square:
            raise ShapeError("power of a non-square matrix")
        out = Matrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def trace(self) -> Fraction:
        if not self.is_square:
            raise ShapeError("trace of a non-square matrix")
        return sum((self.data[i][i] for i in range(self.rows)), Fraction(0))

    def is_zero(self) -> bool:
        return not any(v for r in self.data for v in r)

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.T

    def is_skew(self) -> bool:
        return self.is_square and self == -self.T

    def to_lists(self) -> list[list[str]]:
        return [[format_rational(v) for v in r] for r in self.data]

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.to_lists()})"


def unit_vector(n: int, i: int) -> Row:
    return tuple(Fraction(int(k == i)) for k in range(n))


# ====== ГАУСС-ЖОРДАН ======
def row_reduce(M: Matrix) -> tuple[Matrix, Matrix, list[int]]:
    """
    Приведение к ступенчатому виду с единичными ведущими элементами.
    Возвращает (R, E, pivots): R обратима, E = R·M, pivots это столбцы ведущих элементов.
    Ведущий столбец ищется слева направо, строка — сверху вниз.
    """
    n = M.rows
    a = [list(r) for r in M.data]
    r_ops = [list(r) for r in Matrix.identity(n).data]
    pivots: list[int] = []
    top = 0
    for c in range(M.cols):
        if top >= n:
            break
        p = next((i for i in range(top, n) if a[i][c]), None)
        if p is None:
            continue
        if p != top:
            a[top], a[p] = a[p], a[top]
            r_ops[top], r_ops[p] = r_ops[p], r_ops[top]
        inv = 1 / a[top][c]
        if inv != 1:
            a[top] = [v * inv for v in a[top]]
            r_ops[top] = [v * inv for v in r_ops[top]]
        for i in range(n):
            if i != top and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[top])]
                r_ops[i] = [x - f * y for x, y in zip(r_ops[i], r_ops[top])]
        pivots.append(c)
        top += 1
    R = Matrix(n, n, tuple(tuple(r) for r in r_ops))
    E = Matrix(n, M.cols, tuple(tuple(r) for r in a))
    return R, E, pivots


def rank(M: Matrix) -> int:
    return len(row_reduce(M)[2])


def inverse(M: Matrix) -> Matrix:
    if not M.is_square:
        raise ShapeError(f"inverse of non-square {M.shape}")
    R, _, pivots = row_reduce(M)
    if len(pivots) < M.rows:
        raise SingularMatrixError(f"singular {M.rows}x{M.cols} matrix (rank {len(pivots)})")
    return R


def nullspace(M: Matrix) -> list[Row]:
    """Базис ядра; по одному вектору на свободный столбец, в порядке столбцов."""
    _, E, pivots = row_reduce(M)
    pivset = set(pivots)
    out: list[Row] = []
    for f in range(M.cols):
        if f in pivset:
            continue
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -E[i, f]
        out.append(tuple(v))
    return out


def rank_normal_form(X: Matrix) -> tuple[Matrix, Matrix, int]:
    """
    (A, B, r) с A⁻¹·X·B = diag(I_r, 0).
    A⁻¹ = R из row_reduce; B: сначала единичные векторы ведущих столбцов, затем базис ядра.
    """
    R, E, pivots = row_reduce(X)
    r = len(pivots)
    cols = [unit_vector(X.cols, p) for p in pivots] + nullspace(X)
    B = Matrix.from_columns(cols, X.cols)
    A = inverse(R)
    return A, B, r


def column_echelon(M: Matrix) -> tuple[Matrix, Matrix]:
    """T = M·E в приведённом столбцовом ступенчатом виде (транспонированный RREF)."""
    R, Ered, _ = row_reduce(M.T)
    return Ered.T, R.T


def is_column_echelon(T: Matrix) -> bool:
    """
    Нулевые столбцы справа; ведущий элемент столбца равен 1 и единственный ненулевой в своей строке;
    строки ведущих элементов строго возрастают.
    """
    last_row = -1
    seen_zero = False
    for j in range(T.cols):
        col = T.col(j)
        p = next((i for i, v in enumerate(col) if v), None)
        if p is None:
            seen_zero = True
            continue
        if seen_zero or col[p] != 1 or p <= last_row:
            return False
        if any(T[p, k] for k in range(T.cols) if k != j):
            return False
        last_row = p
    return True


# ====== НИЛЬПОТЕНТНЫЕ МАТРИЦЫ ======
def jordan_matrix(partition: Sequence[int]) -> Matrix:
    blocks = []
    for k in partition:
        blocks.append(Matrix(k, k, tuple(tuple(Fraction(int(j == i + 1)) for j in range(k)) for i in range(k))))
    return Matrix.block_diag(*blocks)


def conjugate_partition(parts: Iterable[int]) -> tuple[int, ...]:
    parts = [p for p in parts if p > 0]
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p > i) for i in range(max(parts)))


def jordan_partition(M: Matrix) -> tuple[int, ...]:
    """Размеры жордановых блоков нильпотентной M по рангам степеней."""
    n = M.rows
    ranks = [n]
    P = M
    while ranks[-1] > 0:
        rk = rank(P)
        if rk == ranks[-1]:
            raise NotNilpotentError("matrix is not nilpotent")
        ranks.append(rk)
        P = P @ M
    # число блоков размера >= k равно rank M^{k-1} - rank M^k
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    return conjugate_partition(at_least)


def nilpotent_jordan(M: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """
    P, partition с P⁻¹·M·P = jordan_matrix(partition), блоки по убыванию.
    Цепочки строятся по фильтрации ядер M^k, верхушки выбираются слева направо.
    """
    if not M.is_square:
        raise ShapeError(f"nilpotent_jordan of non-square {M.shape}")
    n = M.rows
    if n == 0:
        return Matrix.zeros(0, 0), ()
    powers = [Matrix.identity(n)]
    while not powers[-1].is_zero():
        if len(powers) > n:
            raise NotNilpotentError("matrix is not nilpotent")
        powers.append(powers[-1] @ M)
    h = len(powers) - 1
    kernels = {k: nullspace(powers[k]) for k in range(h + 1)}

    tops: list[tuple[int, Row]] = []  # (длина цепочки, верхний вектор)
    for k in range(h, 0, -1):
        span = SparseSpan()
        for v in kernels[k - 1]:
            span.add(_as_dict(v))
        for length, v in tops:
            span.add(_as_dict(powers[length - k].apply(v)))
        for u in kernels[k]:
            d = _as_dict(u)
            if not span.contains(d):
                span.add(d)
                tops.append((k, u))

    columns: list[Row] = []
    partition: list[int] = []
    for length, v in tops:
        chain = [powers[length - 1 - c].apply(v) for c in range(length)]
        columns.extend(chain)
        partition.append(length)
    P = Matrix.from_columns(columns, n)
    J = jordan_matrix(partition)
    if inverse(P) @ M @ P != J:
        raise ArithmeticError("jordan basis check failed")
    return P, tuple(partition)


# ====== РАЗРЕЖЕННАЯ ЛИНЕЙНАЯ ОБОЛОЧКА ======
def _as_dict(v: Sequence[Fraction]) -> dict[int, Fraction]:
    return {i: x for i, x in enumerate(v) if x}


class SparseSpan:
    """
    Инкрементальная линейная оболочка разреженных векторов над Q.
    Хранит для каждого базисного вектора его выражение через добавленные метки,
    так что coordinates() решает линейную систему точно.
    """

    def __init__(self) -> None:
        self._basis: list[tuple[Hashable, dict[Hashable, Fraction], dict[Hashable, Fraction]]] = []
        self._labels: list[Hashable] = []

    def __len__(self) -> int:
        return len(self._basis)

    def _reduce(self, vec: dict[Hashable, Fraction]) -> tuple[dict[Hashable, Fraction], dict[Hashable, Fraction]]:
        r = {k: v for k, v in vec.items() if v}
        combo: dict[Hashable, Fraction] = {}
        for pivot, bvec, bcombo in self._basis:
            c = r.get(pivot)
            if not c:
                continue
            for k, v in bvec.items():
                nv = r.get(k, 0) - c * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
            for lab, v in bcombo.items():
                nv = combo.get(lab, 0) + c * v
                if nv:
                    combo[lab] = nv
                else:
                    combo.pop(lab, None)
        return r, combo

    def add(self, vec: dict[Hashable, Fraction], label: Hashable | None = None) -> bool:
        """Добавляет вектор; False, если он уже лежит в оболочке."""
        label = len(self._labels) if label is None else label
        r, combo = self._reduce(vec)
        if not r:
            return False
        pivot = min(r)
        inv = 1 / r[pivot]
        bvec = {k: v * inv for k, v in r.items()}
        # b = (vec - Σ c_i b_i) / piv
        bcombo = {lab: -v * inv for lab, v in combo.items()}
        bcombo[label] = bcombo.get(label, 0) + inv
        self._basis.append((pivot, bvec, {k: v for k, v in bcombo.items() if v}))
        self._labels.append(label)
        return True

    def contains(self, vec: dict[Hashable, Fraction]) -> bool:
        return not self._reduce(vec)[0]

    def coordinates(self, vec: dict[Hashable, Fraction]) -> dict[Hashable, Fraction] | None:
        """Коэффициенты vec по добавленным независимым векторам или None."""
        r, combo = self._reduce(vec)
        return None if r else combo

