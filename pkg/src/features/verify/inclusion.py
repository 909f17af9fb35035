# src/features/verify/inclusion.py
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from core.decorators import log_operation
from core.nilcone import in_nilcone_gl, in_self_commuting, sample_nilcone
from core.orbit_params import rep_matrix
from core.schemas import element_payload
from core.superalgebra import AlgebraKind, act, random_group_element
from features.canonical.canonical_form import canonicalize
from features.census.orbit_census import ds_params, enumerate_reps, orbit_signature
from services.logger_setup import get_logger
from services.util import NILCONE_MAX_REPORTED, NILCONE_SEED

logger = get_logger("features.verify")


@dataclass
class VerifyReport:
    check: str
    m: int
    n: int
    samples: int
    seed: int
    failures: list[dict[str, Any]] = field(default_factory=list)
    failed: int = 0

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def fail(self, **info: Any) -> None:
        self.failed += 1
        if len(self.failures) < NILCONE_MAX_REPORTED:
            self.failures.append(info)

    def to_payload(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "m": self.m,
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "failed": self.failed,
            "failures": list(self.failures),
        }


def _check_samples(samples: int) -> None:
    if samples < 0:
        raise ValueError(f"samples must be >= 0, got {samples}")


@log_operation("verify_inclusion")
def verify_inclusion(m: int, n: int, samples: int, seed: int = NILCONE_SEED) -> VerifyReport:
    """
    Сопряжения случайных самокоммутирующих представителей: каждое должно
    остаться самокоммутирующим и лежать в нильпотентном конусе.
    """
    _check_samples(samples)
    kind = AlgebraKind.gl(m, n)
    reps = ds_params(m, n)
    report = VerifyReport("inclusion", m, n, samples, seed)
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        p = reps[int(rng.integers(0, len(reps)))]
        x = act(random_group_element(kind, rng), rep_matrix(p, m, n))
        sc, cone = in_self_commuting(x), in_nilcone_gl(x)
        if not (sc and cone):
            report.fail(index=i, params=p.to_payload(), self_commuting=sc, in_nilcone=cone,
                        element=element_payload(x))
    logger.info({"event": "inclusion_verified", "m": m, "n": n, "samples": samples, "failed": report.failed})
    return report


@log_operation("verify_finiteness")
def verify_finiteness(m: int, n: int, samples: int, seed: int = NILCONE_SEED) -> VerifyReport:
    """Случайные точки конуса приводятся к представителю из перечня орбит."""
    _check_samples(samples)
    kind = AlgebraKind.gl(m, n)
    census = set(enumerate_reps(m, n))
    report = VerifyReport("finiteness", m, n, samples, seed)
    for i in range(samples):
        x = sample_nilcone(kind, [seed, i])
        res = canonicalize(x)
        reasons = []
        if res.params not in census:
            reasons.append("params_not_in_census")
        if act(res.g, x) != res.y:
            reasons.append("group_element_mismatch")
        if orbit_signature(x) != orbit_signature(res.y):
            reasons.append("signature_changed")
        if reasons:
            report.fail(index=i, reasons=reasons, params=res.params.to_payload(), element=element_payload(x))
    logger.info({"event": "finiteness_verified", "m": m, "n": n, "samples": samples, "failed": report.failed})
    return report
