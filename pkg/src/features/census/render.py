# src/features/census/render.py
from __future__ import annotations
from typing import Any, Callable, Iterable, Iterator

from core.orbit_params import OrbitParams
from features.census.orbit_census import OrbitSignature


def render_params(p: OrbitParams, sig: OrbitSignature | None = None) -> dict[str, Any]:
    rec: dict[str, Any] = {"kind": "orbit", **p.to_payload()}
    if sig is not None:
        rec["signature"] = sig.as_dict()
    return rec


def render_census(
    params: Iterable[OrbitParams],
    summary: dict[str, Any],
    ds_only: bool = False,
    signature_of: Callable[[OrbitParams], OrbitSignature] | None = None,
) -> Iterator[dict[str, Any]]:
    """Строки JSONL: сначала орбиты в каноническом порядке, последней идёт сводка."""
    for p in params:
        if ds_only:
            yield {"kind": "ds", "r": p.r, "s": p.s}
        else:
            yield render_params(p, signature_of(p) if signature_of else None)
    yield {"kind": "summary", **summary}


def render_collisions(groups: list[list[OrbitParams]]) -> list[list[dict[str, Any]]]:
    return [[p.to_payload() for p in g] for g in groups]
