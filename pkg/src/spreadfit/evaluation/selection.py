"""Best-family choice from per-family performance measures."""

from __future__ import annotations

import math

from ..dists import FAMILY_ORDER, Family
from ..errors import NoCandidate


def select_best(measures: dict[Family, float]) -> Family:
    """Argmin of the performance measure; ties go to the earlier family
    in the canonical table order."""
    best = None
    for family in FAMILY_ORDER:
        if family not in measures:
            continue
        value = measures[family]
        if value is None or not math.isfinite(value):
            continue
        if best is None or value < best[1]:
            best = (family, value)
    if best is None:
        raise NoCandidate("no family produced a finite performance measure")
    return best[0]


def runner_up_gap(measures: dict[Family, float]) -> float | None:
    """Relative gap |L1 - L2| / L2 between best and second best."""
    finite = sorted(
        (v for v in measures.values() if v is not None and math.isfinite(v))
    )
    if len(finite) < 2 or finite[1] == 0:
        return None
    return abs(finite[0] - finite[1]) / abs(finite[1])
