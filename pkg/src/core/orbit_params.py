# src/core/orbit_params.py
from __future__ import annotations
from dataclasses import dataclass
from itertools import combinations, product
from typing import Any, Iterator, Sequence

from core.exact_linalg import Matrix
from core.superalgebra import OddElement


class InvalidParamsError(ValueError):
    pass


# ====== ПОЗИЦИИ ВЕДУЩИХ ЭЛЕМЕНТОВ ======
@dataclass(frozen=True)
class PivotMaps:
    """f(j) = k1+…+kj: концы блоков (строки C); g(j) = 1+k1+…+k(j-1): начала (столбцы R). Нумерация с 1."""

    f: tuple[int, ...]
    g_map: tuple[int, ...]

    @classmethod
    def from_partition(cls, partition: tuple[int, ...]) -> "PivotMaps":
        f, g, acc = [], [], 0
        for k in partition:
            g.append(acc + 1)
            acc += k
            f.append(acc)
        return cls(tuple(f), tuple(g))


# Тип блока по присоединённым ведущим элементам; внутри группы равных размеров идут по возрастанию
BOTH, C_ONLY, R_ONLY, NONE = 0, 1, 2, 3


@dataclass(frozen=True)
class OrbitParams:
    r: int = 0
    partition: tuple[int, ...] = ()
    c_pivots: tuple[int, ...] = ()
    r_pivots: tuple[int, ...] = ()
    s: int = 0

    @property
    def r1(self) -> int:
        return len(self.c_pivots)

    @property
    def r2(self) -> int:
        return len(self.r_pivots)

    @property
    def pivots(self) -> PivotMaps:
        return PivotMaps.from_partition(self.partition)

    def sort_key(self) -> tuple:
        return (self.r, self.partition, self.c_pivots, self.r_pivots, self.s)

    def validate(self, m: int, n: int) -> "OrbitParams":
        def bad(msg: str) -> InvalidParamsError:
            return InvalidParamsError(f"{msg} for gl({m}|{n}): {self.to_payload()}")

        if m < 1 or n < 1:
            raise InvalidParamsError(f"gl({m}|{n}): sizes must be positive")
        if self.r < 0 or self.s < 0:
            raise bad("negative r or s")
        if self.r > min(m, n):
            raise bad("r exceeds min(m, n)")
        if any(k < 1 for k in self.partition) or sum(self.partition) != self.r:
            raise bad("partition must consist of positive parts summing to r")
        if any(a < b for a, b in zip(self.partition, self.partition[1:])):
            raise bad("partition must be weakly decreasing")
        pm = self.pivots
        for name, piv, allowed in (("c_pivots", self.c_pivots, pm.f), ("r_pivots", self.r_pivots, pm.g_map)):
            if any(a >= b for a, b in zip(piv, piv[1:])):
                raise bad(f"{name} must be strictly increasing")
            if not set(piv) <= set(allowed):
                raise bad(f"{name} must lie in {list(allowed)}")
        if self.r1 > m - self.r:
            raise bad("too many C pivots")
        if self.r2 > n - self.r:
            raise bad("too many R pivots")
        if self.s > min(n - self.r - self.r2, m - self.r - self.r1):
            raise bad("s too large")
        return self

    def block_types(self) -> tuple[int, ...]:
        pm = self.pivots
        cs, rs = set(self.c_pivots), set(self.r_pivots)
        out = []
        for fj, gj in zip(pm.f, pm.g_map):
            has_c, has_r = fj in cs, gj in rs
            out.append(BOTH if has_c and has_r else C_ONLY if has_c else R_ONLY if has_r else NONE)
        return tuple(out)

    def is_normalized(self) -> bool:
        """Внутри каждой группы блоков равного размера типы идут по возрастанию."""
        types = self.block_types()
        return all(
            not (self.partition[j] == self.partition[j + 1] and types[j] > types[j + 1])
            for j in range(len(self.partition) - 1)
        )

    def is_self_commuting(self) -> bool:
        return all(k == 1 for k in self.partition) and not self.c_pivots and not self.r_pivots

    def to_payload(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "partition": list(self.partition),
            "c_pivots": list(self.c_pivots),
            "r_pivots": list(self.r_pivots),
            "s": self.s,
        }


# ====== ПРЕДСТАВИТЕЛЬ ОРБИТЫ ======
def rep_matrix(p: OrbitParams, m: int, n: int) -> OddElement:
    """Y⁺ = diag(I_r, 0); Y⁻ из блоков J, C_{r1}, R_{r2} и diag(I_s, 0) на месте ξ22."""
    p.validate(m, n)
    r, r1, r2 = p.r, p.r1, p.r2
    yp = [[0] * n for _ in range(m)]
    for i in range(r):
        yp[i][i] = 1
    ym = [[0] * m for _ in range(n)]
    acc = 0
    for k in p.partition:
        for i in range(k - 1):
            ym[acc + i][acc + i + 1] = 1
        acc += k
    for col, row in enumerate(p.c_pivots):
        ym[row - 1][r + col] = 1
    for row, col in enumerate(p.r_pivots):
        ym[r + row][col - 1] = 1
    for a in range(p.s):
        ym[r + r2 + a][r + r1 + a] = 1
    return OddElement(m, n, Matrix.from_rows(yp, n), Matrix.from_rows(ym, m))


# ====== ПЕРЕЧИСЛЕНИЕ ======
def partitions(r: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    if r == 0:
        yield ()
        return
    top = r if max_part is None else min(r, max_part)
    for k in range(top, 0, -1):
        for rest in partitions(r - k, k):
            yield (k,) + rest


def _subsets(items: tuple[int, ...], max_size: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for size in range(min(max_size, len(items)) + 1):
        out.extend(combinations(items, size))
    return sorted(out)


def equal_runs(partition: Sequence[int]) -> list[tuple[int, int]]:
    """(начальный индекс, длина) серий равных частей."""
    out: list[tuple[int, int]] = []
    j = 0
    while j < len(partition):
        e = j
        while e + 1 < len(partition) and partition[e + 1] == partition[j]:
            e += 1
        out.append((j, e - j + 1))
        j = e + 1
    return out


def _normalized_pivots(partition: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    pm = PivotMaps.from_partition(partition)
    per_group = []
    for start, size in equal_runs(partition):
        options = []
        # (both, c_only, r_only), остальные без ведущих
        for nb in range(size + 1):
            for nc in range(size - nb + 1):
                for nr in range(size - nb - nc + 1):
                    types = [BOTH] * nb + [C_ONLY] * nc + [R_ONLY] * nr + [NONE] * (size - nb - nc - nr)
                    options.append((start, types))
        per_group.append(options)
    for choice in product(*per_group):
        cs, rs = [], []
        for start, types in choice:
            for off, t in enumerate(types):
                j = start + off
                if t in (BOTH, C_ONLY):
                    cs.append(pm.f[j])
                if t in (BOTH, R_ONLY):
                    rs.append(pm.g_map[j])
        yield tuple(sorted(cs)), tuple(sorted(rs))


def enumerate_params(m: int, n: int, redundant: bool = False) -> list[OrbitParams]:
    """
    Все допустимые наборы параметров в каноническом порядке.
    redundant=False оставляет по одному набору на орбиту (нормализованные).
    """
    if m < 1 or n < 1:
        raise InvalidParamsError(f"gl({m}|{n}): sizes must be positive")
    out: list[OrbitParams] = []
    for r in range(min(m, n) + 1):
        for part in partitions(r):
            if redundant:
                pm = PivotMaps.from_partition(part)
                pivot_sets = [
                    (cs, rs)
                    for cs in _subsets(pm.f, m - r)
                    for rs in _subsets(pm.g_map, n - r)
                ]
            else:
                pivot_sets = [
                    (cs, rs)
                    for cs, rs in _normalized_pivots(part)
                    if len(cs) <= m - r and len(rs) <= n - r
                ]
            for cs, rs in pivot_sets:
                for s in range(min(n - r - len(rs), m - r - len(cs)) + 1):
                    out.append(OrbitParams(r, part, cs, rs, s))
    out.sort(key=OrbitParams.sort_key)
    return out
