# src/features/canonical/render.py
from __future__ import annotations
from typing import Any

from core.schemas import element_payload, group_payload
from features.canonical.canonical_form import CanonicalResult, TraceStep


def render_step(step: TraceStep) -> dict[str, Any]:
    g = group_payload(step.g)
    return {"stage": step.stage, "name": step.name, "A": g["A"], "B": g["B"], "y": element_payload(step.y)}


def render_result(res: CanonicalResult, with_trace: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "g": group_payload(res.g),
        "params": res.params.to_payload(),
        "y": element_payload(res.y),
    }
    if with_trace:
        out["trace"] = [render_step(s) for s in res.trace]
    return out
