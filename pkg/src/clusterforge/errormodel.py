"""Closed-form entangler error probability and schedule-level estimates.

``alpha`` here is always the coherent-beam amplitude, never the qubit
amplitude of an input state.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields, replace
from typing import Sequence

from .compiler import ResourceCount

DEFAULT_THRESHOLD = 10.0
REFERENCE_EQUIV = 40  # 5x5 lattice


@dataclass(frozen=True)
class EntanglerParams:
    alpha: float
    gamma: float
    theta: float
    eta: float

    def __post_init__(self):
        for name in ("alpha", "gamma", "theta", "eta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if not 0 <= self.theta <= math.pi / 2:
            raise ValueError("theta must lie in [0, pi/2]")
        if not 0 <= self.eta <= 1:
            raise ValueError("eta must lie in [0, 1]")


PARAM_NAMES = tuple(f.name for f in fields(EntanglerParams))


def error_probability(p: EntanglerParams) -> float:
    """exp{-2 (1 - exp(-eta gamma^2 theta^2 / 2)) alpha^2 sin^2 theta}.

    Read as an equality; the true value may carry an unknown prefactor.
    """
    qnd = -math.expm1(-0.5 * p.eta * p.gamma**2 * p.theta**2)
    return math.exp(-2.0 * qnd * p.alpha**2 * math.sin(p.theta) ** 2)


@dataclass(frozen=True)
class RegimeReport:
    alpha_sin_theta: float
    eta_gamma2_theta2: float
    deterministic: bool


def regime_check(p: EntanglerParams, threshold: float = DEFAULT_THRESHOLD) -> RegimeReport:
    a = p.alpha * math.sin(p.theta)
    b = p.eta * p.gamma**2 * p.theta**2
    return RegimeReport(a, b, a >= threshold and b >= threshold)


def schedule_success(p: EntanglerParams, rc: ResourceCount | int) -> float:
    """Whole-schedule success assuming independent entangler failures."""
    equiv = rc if isinstance(rc, int) else rc.entangler_equiv
    return (1.0 - error_probability(p)) ** equiv


@dataclass(frozen=True)
class SweepRow:
    value: float
    p_error: float
    success_40: float


def sweep(base: EntanglerParams, axis: str, values: Sequence[float]) -> list[SweepRow]:
    if axis not in PARAM_NAMES:
        raise ValueError(f"unknown axis {axis!r}; choose from {', '.join(PARAM_NAMES)}")
    rows = []
    for value in values:
        p = replace(base, **{axis: float(value)})
        rows.append(SweepRow(float(value), error_probability(p), schedule_success(p, REFERENCE_EQUIV)))
    return rows


def parse_range(text: str) -> tuple[str, list[float]]:
    """Parse ``axis=start:stop:steps`` into the axis and evenly spaced values."""
    try:
        axis, span = text.split("=", 1)
        start, stop, steps = span.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError as exc:
        raise ValueError(f"bad sweep {text!r}, expected axis=start:stop:steps") from exc
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return axis, [start]
    return axis, [start + (stop - start) * i / (steps - 1) for i in range(steps)]


def to_csv(axis: str, rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axis", "value", "p_error", "success_n40"])
    for row in rows:
        w.writerow([axis, f"{row.value:.12g}", f"{row.p_error:.12g}", f"{row.success_40:.12g}"])
    return buf.getvalue()
