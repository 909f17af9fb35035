# src/core/schemas.py
from __future__ import annotations
from fractions import Fraction
from typing import Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PositiveInt

from core.exact_linalg import Matrix, ShapeError, parse_rational
from core.orbit_params import OrbitParams
from core.superalgebra import GroupElement, OddElement

# "p/q", "p" или целое; float и bool не принимаются
Rational = Annotated[Fraction, BeforeValidator(parse_rational)]


class ElementModel(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    m: PositiveInt
    n: PositiveInt
    xplus: list[list[Rational]]
    xminus: list[list[Rational]]

    def to_element(self) -> OddElement:
        """Размеры проверяются здесь, чтобы отличать shape_mismatch от плохих записей."""
        m, n = self.m, self.n
        for name, rows, (h, w) in (("xplus", self.xplus, (m, n)), ("xminus", self.xminus, (n, m))):
            if len(rows) != h or any(len(r) != w for r in rows):
                got = f"{len(rows)}x{len(rows[0]) if rows else 0}"
                raise ShapeError(f"{name} must be {h}x{w} for m={m}, n={n}, got {got}")
        return OddElement(
            m,
            n,
            Matrix(m, n, tuple(tuple(r) for r in self.xplus)),
            Matrix(n, m, tuple(tuple(r) for r in self.xminus)),
        )


class ParamsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: int = Field(default=0, ge=0)
    partition: list[PositiveInt] = Field(default_factory=list)
    c_pivots: list[PositiveInt] = Field(default_factory=list)
    r_pivots: list[PositiveInt] = Field(default_factory=list)
    s: int = Field(default=0, ge=0)

    def to_params(self) -> OrbitParams:
        return OrbitParams(self.r, tuple(self.partition), tuple(self.c_pivots), tuple(self.r_pivots), self.s)


def matrix_payload(M: Matrix) -> list[list[str]]:
    return M.to_lists()


def element_payload(x: OddElement) -> dict[str, Any]:
    return {"m": x.m, "n": x.n, "xplus": matrix_payload(x.xplus), "xminus": matrix_payload(x.xminus)}


def group_payload(g: GroupElement) -> dict[str, Any]:
    return {"m": g.m, "n": g.n, "A": matrix_payload(g.A), "B": matrix_payload(g.B)}
