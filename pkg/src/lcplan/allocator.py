"""Greedy packing of resonators into a frequency band.

Adjacent centers must satisfy the guard-banded spacing rule

    f[i+1] - f[i] >= bw(f[i])/2 + bw(f[i+1])/2 + guard

with ``bw(f) = f / Q_eff(f)``. Starting from ``f_min`` each next center is
the smallest frequency meeting the rule at equality, and the plan stops at
the last center not above ``f_max``.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Any

from .errors import DomainError, LCPlanError, SaturationError
from .resonance import MIN_Q, capacitance_for

logger = logging.getLogger(__name__)

# relative width at which bisection stops; far below 0.1 Hz across any RF band
BISECT_RTOL = 1e-13
# geometric step used to bracket the first root of the spacing residual
SCAN_RATIO = 1.01
# centers within this relative distance of f_max still count as in band
EDGE_RTOL = 1e-9
SEARCH_CAP_FACTOR = 10.0

SWEEP_PARAMETERS = ("inductance", "guard_band", "loss_margin", "f_max")


@dataclass(frozen=True)
class BandPlan:
    """Inputs of an allocation run."""

    f_min: float
    f_max: float
    inductance: float
    loss: Any
    guard_band: float = 0.0
    loss_margin: float = 0.0

    def __post_init__(self):
        if not (0 < self.f_min < self.f_max) or not math.isfinite(self.f_max):
            raise DomainError(f"need 0 < f_min < f_max, got [{self.f_min!r}, {self.f_max!r}]")
        if self.guard_band < 0:
            raise DomainError(f"guard band must be non-negative, got {self.guard_band!r}")
        if self.loss_margin < 0:
            raise DomainError(f"loss margin must be non-negative, got {self.loss_margin!r}")
        if not (self.inductance > 0):
            raise DomainError(f"inductance must be positive, got {self.inductance!r}")

    def q(self, f):
        return self.loss.q_at(f, self.inductance, self.loss_margin)

    def bandwidth(self, f):
        return f / self.q(f)


@dataclass(frozen=True)
class AllocationEntry:
    index: int
    center: float
    capacitance: float
    bandwidth: float

    @property
    def q(self):
        return self.center / self.bandwidth

    @property
    def band_lo(self):
        return self.center - self.bandwidth / 2

    @property
    def band_hi(self):
        return self.center + self.bandwidth / 2


@dataclass(frozen=True)
class AllocationPlan:
    entries: tuple
    plan: BandPlan
    warnings: tuple = ()
    tolerances: dict = field(default_factory=lambda: {
        "bisect_rtol": BISECT_RTOL,
        "scan_ratio": SCAN_RATIO,
        "edge_rtol": EDGE_RTOL,
    })

    @property
    def count(self):
        return len(self.entries)

    @property
    def centers(self):
        return [e.center for e in self.entries]

    def to_dict(self):
        p = self.plan
        return {
            "band": {
                "f_min_hz": p.f_min,
                "f_max_hz": p.f_max,
                "guard_hz": p.guard_band,
                "margin_ohm": p.loss_margin,
                "inductance_h": p.inductance,
            },
            "entries": [
                {
                    "i": e.index,
                    "f0_hz": e.center,
                    "c_farad": e.capacitance,
                    "bw_hz": e.bandwidth,
                    "lo_hz": e.band_lo,
                    "hi_hz": e.band_hi,
                }
                for e in self.entries
            ],
            "count": self.count,
            "tolerances": dict(self.tolerances),
            "warnings": list(self.warnings),
        }


def _bisect(g, lo, hi):
    # invariant: g(lo) < 0 <= g(hi); returns hi so the spacing rule holds as >=
    while hi - lo > BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def next_center(f_i, plan, cap=None):
    """Smallest frequency above ``f_i`` that meets the spacing rule at equality.

    The residual ``g(f) = (f - f_i) - bw(f_i)/2 - bw(f)/2 - guard`` is scanned
    upward in 1% geometric steps (plus the loss table's own nodes, where
    ``g`` may kink) until it turns non-negative; the first bracketing step
    is then bisected.

    Raises:
        SaturationError: ``g`` stays negative up to ``cap`` (default 10 f_max).
    """
    if f_i < plan.f_min * (1 - EDGE_RTOL):
        raise DomainError(f"center {f_i!r} lies below f_min {plan.f_min!r}")
    if cap is None:
        cap = SEARCH_CAP_FACTOR * plan.f_max
    bandwidth = plan.bandwidth
    offset = f_i + bandwidth(f_i) / 2 + plan.guard_band

    def g(f):
        return f - offset - bandwidth(f) / 2

    nodes = plan.loss.nodes
    k = bisect_right(nodes, f_i)
    lo = f_i
    while lo < cap:
        hi = min(lo * SCAN_RATIO, cap)
        while k < len(nodes) and nodes[k] <= lo:
            k += 1
        if k < len(nodes) and nodes[k] < hi:
            hi = nodes[k]
        if g(hi) >= 0:
            return _bisect(g, lo, hi)
        lo = hi
    raise SaturationError(
        f"no center above {f_i:.6g} Hz satisfies the spacing rule below {cap:.6g} Hz")


def allocate(plan):
    """Pack as many resonators as fit between ``plan.f_min`` and ``plan.f_max``.

    The first center sits exactly at ``f_min``. Each entry carries the
    capacitance that tunes the shared plan inductance to its center.

    Raises:
        DomainError: Q at a placed center is 0.5 or lower.
    """
    limit = plan.f_max * (1 + EDGE_RTOL)
    entries = []
    f = plan.f_min
    while True:
        q = plan.q(f)
        if not (q > MIN_Q):
            raise DomainError(f"effective Q {q:.4g} at {f:.6g} Hz is not above {MIN_Q}")
        entries.append(AllocationEntry(
            index=len(entries) + 1,
            center=f,
            capacitance=capacitance_for(f, plan.inductance),
            bandwidth=f / q,
        ))
        try:
            f = next_center(f, plan)
        except SaturationError:
            break
        if f > limit:
            break

    warnings = []
    lo, hi = plan.loss.span
    last = entries[-1].center
    if plan.f_min < lo or last > hi:
        warnings.append(
            f"loss data span [{lo:.6g}, {hi:.6g}] Hz does not cover centers "
            f"[{plan.f_min:.6g}, {last:.6g}] Hz; endpoint values were held")
        logger.warning(warnings[-1])
    return AllocationPlan(tuple(entries), plan, tuple(warnings))


def constant_q_count(f_min, f_max, q):
    """Closed-form addressable count for constant Q and no guard band.

    With constant Q every step multiplies the center by (2Q+1)/(2Q-1), so
    N = 1 + floor(ln(f_max/f_min) / ln((2Q+1)/(2Q-1))).
    """
    if not (q > MIN_Q):
        raise DomainError(f"Q must exceed {MIN_Q}, got {q!r}")
    if not (0 < f_min < f_max):
        raise DomainError(f"need 0 < f_min < f_max, got [{f_min!r}, {f_max!r}]")
    step = math.log((2 * q + 1) / (2 * q - 1))
    return 1 + math.floor((math.log(f_max / f_min) + EDGE_RTOL) / step)


@dataclass(frozen=True)
class SweepRow:
    value: float
    count: int | None
    error: str | None = None


_FIELD = {
    "inductance": "inductance",
    "guard_band": "guard_band",
    "guard": "guard_band",
    "loss_margin": "loss_margin",
    "margin": "loss_margin",
    "f_max": "f_max",
}


def sweep(base, parameter, values):
    """Allocate once per value of one plan parameter.

    A failing value yields a row with ``count=None`` and the error text;
    the remaining values still run. Rows follow the input order.
    """
    try:
        name = _FIELD[parameter]
    except KeyError:
        raise ValueError(f"unknown sweep parameter {parameter!r}") from None
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    rows = []
    for value in values:
        try:
            result = allocate(replace(base, **{name: value}))
            rows.append(SweepRow(value, result.count))
        except LCPlanError as exc:
            logger.warning("sweep %s=%r failed: %s", name, value, exc)
            rows.append(SweepRow(value, None, str(exc)))
    return rows


def sweep_plans(base, parameter, values):
    """Like :func:`sweep` but return the full plans (``None`` on failure)."""
    name = _FIELD[parameter]
    out = []
    for value in values:
        try:
            out.append(allocate(replace(base, **{name: value})))
        except LCPlanError:
            out.append(None)
    return out


def sweep_to_csv(rows):
    """Render sweep rows as ``param_value,count`` text, adding an error column if needed."""
    failed = any(r.error is not None for r in rows)
    lines = ["param_value,count,error" if failed else "param_value,count"]
    for r in rows:
        count = "" if r.count is None else str(r.count)
        if failed:
            err = (r.error or "").replace(",", ";").replace("\n", " ")
            lines.append(f"{r.value!r},{count},{err}")
        else:
            lines.append(f"{r.value!r},{count}")
    return "\n".join(lines) + "\n"
