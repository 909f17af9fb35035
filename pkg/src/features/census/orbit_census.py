# src/features/census/orbit_census.py
from __future__ import annotations
from collections import defaultdict
from dataclasses import dataclass
from typing import Any

from core.exact_linalg import Matrix, rank
from core.nilcone import in_self_commuting
from core.orbit_params import OrbitParams, enumerate_params, rep_matrix
from core.superalgebra import OddElement
from services.logger_setup import get_logger
from services.util import NILCONE_CENSUS_WARN

logger = get_logger("features.census")

__all__ = [
    "OrbitParams", "OrbitSignature", "rep_matrix", "enumerate_reps", "orbit_signature",
    "ds_reps", "ds_params", "signature_collisions", "census_summary",
]


@dataclass(frozen=True)
class OrbitSignature:
    """Ранги чередующихся слов X⁺X⁻X⁺… и X⁻X⁺X⁻… длины 1..m+n."""

    m: int
    n: int
    word_ranks: tuple[tuple[str, int], ...]

    def as_dict(self) -> dict[str, int]:
        return dict(self.word_ranks)


def enumerate_reps(m: int, n: int, redundant: bool = False) -> list[OrbitParams]:
    """
    Параметры представителей орбит на конусе gl(m|n), по одному на орбиту.
    redundant=True: все наборы, допустимые по ограничениям на r, r1, r2, s.
    """
    if m + n > NILCONE_CENSUS_WARN:
        logger.warning({"event": "census_large", "m": m, "n": n, "warn_at": NILCONE_CENSUS_WARN})
    out = enumerate_params(m, n, redundant=redundant)
    logger.debug({"event": "census_enumerated", "m": m, "n": n, "redundant": redundant, "count": len(out)})
    return out


def _words(x: OddElement) -> list[tuple[str, Matrix]]:
    out: list[tuple[str, Matrix]] = []
    for first, second, a, b in (("+", "-", x.xplus, x.xminus), ("-", "+", x.xminus, x.xplus)):
        word, prod = first, a
        out.append((word, prod))
        factors = (b, a)
        for step in range(1, x.m + x.n):
            prod = prod @ factors[(step - 1) % 2]
            word += second if step % 2 else first
            out.append((word, prod))
    return out


def orbit_signature(x: OddElement) -> OrbitSignature:
    return OrbitSignature(x.m, x.n, tuple((w, rank(p)) for w, p in _words(x)))


def ds_params(m: int, n: int) -> list[OrbitParams]:
    """Самокоммутирующие представители: J = 0, без C и R; только I_r и I_s."""
    return [p for p in enumerate_reps(m, n) if in_self_commuting(rep_matrix(p, m, n))]


def ds_reps(m: int, n: int) -> list[tuple[int, int]]:
    return [(p.r, p.s) for p in ds_params(m, n)]


def signature_collisions(m: int, n: int) -> list[list[OrbitParams]]:
    """Группы (из всех допустимых наборов) с совпадающей сигнатурой; одиночки не включаются."""
    buckets: dict[OrbitSignature, list[OrbitParams]] = defaultdict(list)
    for p in enumerate_reps(m, n, redundant=True):
        buckets[orbit_signature(rep_matrix(p, m, n))].append(p)
    groups = [g for g in buckets.values() if len(g) > 1]
    groups.sort(key=lambda g: g[0].sort_key())
    return groups


def census_summary(m: int, n: int, params: list[OrbitParams]) -> dict[str, Any]:
    return {
        "m": m,
        "n": n,
        "orbit_count": len(params),
        "ds_count": sum(1 for p in params if p.is_self_commuting()),
    }
