"""Trigger bands, cross-triggering and the charge/discharge cycle.

A device carries two tanks: a charger that feeds a storage bank and a
trigger that dumps the bank into the actuator coil. A tone triggers a
device when the trigger tank's normalized response at that tone reaches
the device threshold (half power by default).
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, MultiBandError, NoBandError, ScheduleError
from .resonance import (
    HALF_POWER,
    ResonatorSpec,
    band_crossings,
    check_q,
    half_power_edges,
    normalized_response,
    stored_energy,
)


@dataclass(frozen=True)
class Tank:
    """A resonator together with its loaded Q."""

    spec: ResonatorSpec
    q: float

    def __post_init__(self):
        check_q(self.q)

    @property
    def f0(self):
        return self.spec.f0

    def response(self, f):
        return normalized_response(f, self.f0, self.q)

    @classmethod
    def from_dict(cls, d, label=""):
        return cls(ResonatorSpec(float(d["l_h"]), float(d["c_farad"]), label), float(d["q"]))

    def to_dict(self):
        return {"l_h": self.spec.inductance, "c_farad": self.spec.capacitance, "q": self.q}


@dataclass(frozen=True)
class Device:
    """One addressable actuator.

    ``charger`` may be ``None`` when only trigger selectivity matters (for
    instance devices synthesized from an allocation plan); such a device
    cannot run a charge cycle.
    """

    label: str
    trigger: Tank
    charger: Tank | None = None
    bank_capacitance: float = 330e-6
    clamp_voltage: float = 24.0
    threshold: float = HALF_POWER

    def __post_init__(self):
        if not (0.0 < self.threshold < 1.0):
            raise DomainError(f"threshold must lie in (0, 1), got {self.threshold!r}")
        if not (self.bank_capacitance > 0):
            raise DomainError("bank capacitance must be positive")
        if not (self.clamp_voltage > 0):
            raise DomainError("clamp voltage must be positive")
        if self.charger is not None and math.isclose(self.charger.f0, self.trigger.f0, rel_tol=1e-12):
            raise DomainError(f"{self.label}: charger and trigger share a resonant frequency")

    def triggers_at(self, f):
        return self.trigger.response(f) >= self.threshold

    def charges_at(self, f):
        return self.charger is not None and self.charger.response(f) >= HALF_POWER

    @property
    def clamp_energy(self):
        return stored_energy(self.bank_capacitance, self.clamp_voltage)

    @classmethod
    def from_dict(cls, d):
        label = str(d["label"])
        charger = d.get("charger")
        return cls(
            label=label,
            trigger=Tank.from_dict(d["trigger"], label),
            charger=None if charger is None else Tank.from_dict(charger, label),
            bank_capacitance=float(d.get("bank_c_farad", 330e-6)),
            clamp_voltage=float(d.get("clamp_v", 24.0)),
            threshold=float(d.get("threshold", HALF_POWER)),
        )

    def to_dict(self):
        return {
            "label": self.label,
            "charger": None if self.charger is None else self.charger.to_dict(),
            "trigger": self.trigger.to_dict(),
            "bank_c_farad": self.bank_capacitance,
            "clamp_v": self.clamp_voltage,
            "threshold": self.threshold,
        }


def load_devices(source):
    """Read a device-set JSON document (path, stream or parsed list)."""
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    elif isinstance(source, list):
        data = source
    else:
        data = json.load(source)
    if not isinstance(data, list) or not data:
        raise ValueError("device file must hold a non-empty JSON list")
    try:
        return [Device.from_dict(d) for d in data]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed device entry: {exc}") from None


def devices_from_plan(allocation, threshold=HALF_POWER):
    """Turn every entry of an allocation plan into a trigger-only device."""
    L = allocation.plan.inductance
    return [
        Device(
            label=str(e.index),
            trigger=Tank(ResonatorSpec(L, e.capacitance, str(e.index)), e.q),
            threshold=threshold,
        )
        for e in allocation.entries
    ]


@dataclass(frozen=True)
class TriggerBand:
    device_label: str
    lo: float
    hi: float
    tested_grid: tuple = field(default=(), repr=False)

    @property
    def width(self):
        return self.hi - self.lo


def default_grid(devices, step=1e3):
    """A grid at ``step`` spacing wide enough for every device's trigger band."""
    lo = min(half_power_edges(d.trigger.f0, d.trigger.q)[0] for d in devices)
    hi = max(half_power_edges(d.trigger.f0, d.trigger.q)[1] for d in devices)
    lo = max(step, math.floor(0.5 * lo / step) * step)
    hi = math.ceil(1.5 * hi / step) * step
    return np.arange(lo, hi + step / 2, step)


def _runs(mask):
    # (start, stop) index pairs of consecutive True values
    runs, start = [], None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(mask)))
    return runs


def trigger_band(device, grid=None):
    """Band of excitation frequencies that trigger ``device``.

    Grid points whose response meets the device threshold are marked; the
    contiguous run around the trigger resonance is returned with its edges
    refined by linear interpolation between grid points.

    Raises:
        NoBandError: no grid point triggers.
        MultiBandError: triggering grid points form more than one run.
    """
    grid = default_grid([device]) if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a strictly increasing list of at least two frequencies")
    mags = device.trigger.response(grid)
    runs = _runs(mags >= device.threshold)
    if not runs:
        raise NoBandError(f"{device.label}: no grid frequency reaches the trigger threshold")
    if len(runs) > 1:
        spans = [(float(grid[a]), float(grid[b - 1])) for a, b in runs]
        raise MultiBandError(f"{device.label}: triggering set splits into {len(runs)} bands", spans)
    a, _ = runs[0]
    lo, hi = band_crossings(grid, mags, device.threshold, around=a)
    return TriggerBand(device.label, float(lo), float(hi), tuple(grid.tolist()))


@dataclass(frozen=True)
class Overlap:
    pair: tuple
    lo: float
    hi: float

    @property
    def width(self):
        return self.hi - self.lo


def overlaps(bands):
    """Every pairwise intersection of positive width, in input-pair order."""
    out = []
    for a, b in itertools.combinations(bands, 2):
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        if hi > lo:
            out.append(Overlap((a.device_label, b.device_label), lo, hi))
    return out


def triggered_set(devices, excitation):
    """Labels of every device that a single tone at ``excitation`` triggers."""
    if not devices:
        raise ValueError("need at least one device")
    return {d.label for d in devices if d.triggers_at(excitation)}


def max_simultaneous(devices, grid):
    """Largest number of devices triggered together by any tone on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    hits = np.zeros(grid.shape, dtype=int)
    for d in devices:
        hits += d.trigger.response(grid) >= d.threshold
    return int(hits.max()) if hits.size else 0


def bands_to_csv(bands):
    lines = ["label,lo_hz,hi_hz"]
    lines += [f"{b.device_label},{b.lo!r},{b.hi!r}" for b in bands]
    return "\n".join(lines) + "\n"


def overlaps_to_csv(items):
    lines = ["pair,lo_hz,hi_hz,width_hz"]
    lines += [f"{o.pair[0]}-{o.pair[1]},{o.lo!r},{o.hi!r},{o.width!r}" for o in items]
    return "\n".join(lines) + "\n"


class CycleState(enum.Enum):
    IDLE = "Idle"
    CHARGING = "Charging"
    TRIGGERED = "Triggered"


@dataclass(frozen=True)
class CycleEvent:
    time: float
    state: CycleState
    bank_voltage: float
    bank_energy: float


@dataclass(frozen=True)
class CycleTrace:
    events: tuple
    bank_capacitance: float
    clamp_voltage: float

    @property
    def final(self):
        return self.events[-1]

    def states(self):
        return [e.state for e in self.events]

    def to_csv(self):
        lines = ["t_s,state,v_volt,e_joule"]
        lines += [f"{e.time!r},{e.state.value},{e.bank_voltage!r},{e.bank_energy!r}"
                  for e in self.events]
        return "\n".join(lines) + "\n"


def run_cycle(device, schedule, charge_power, dt=0.01):
    """Simulate the storage bank through a schedule of single tones.

    While a tone sits in the charger's half-power band the bank gains
    ``charge_power`` watts until it reaches the clamp voltage. A tone that
    triggers the device empties the bank at once. Any other tone leaves
    the bank untouched. Trigger takes precedence over charging.

    Args:
        device: Device whose bank is simulated; must have a charger.
        schedule: Sequence of ``(duration_s, excitation_hz)`` segments.
        charge_power: Harvested power delivered to the bank in watts.
        dt: Sampling step for the fixed-step trace rows.

    Returns:
        CycleTrace with a row at every state change and every ``dt``.
    """
    schedule = list(schedule)
    if not schedule:
        raise ScheduleError("schedule is empty")
    if device.charger is None:
        raise DomainError(f"{device.label}: no charger tank to run a cycle with")
    if not (charge_power > 0):
        raise DomainError(f"charge power must be positive, got {charge_power!r}")
    if not (dt > 0):
        raise DomainError(f"dt must be positive, got {dt!r}")
    for duration, excitation in schedule:
        if not (duration > 0):
            raise ScheduleError(f"segment duration must be positive, got {duration!r}")
        if not (excitation > 0):
            raise ScheduleError(f"excitation must be positive, got {excitation!r}")

    C = device.bank_capacitance
    e_max = device.clamp_energy

    def row(t, state, energy):
        v = math.sqrt(2.0 * energy / C)
        if energy >= e_max:
            v = device.clamp_voltage
        return CycleEvent(t, state, v, stored_energy(C, v))

    events = [row(0.0, CycleState.IDLE, 0.0)]
    t0, energy, state = 0.0, 0.0, CycleState.IDLE
    for duration, excitation in schedule:
        if device.triggers_at(excitation):
            new_state = CycleState.TRIGGERED
        elif device.charges_at(excitation):
            new_state = CycleState.CHARGING
        else:
            new_state = CycleState.IDLE
        if new_state is CycleState.TRIGGERED:
            energy = 0.0
        if new_state is not state:
            events.append(row(t0, new_state, energy))
            state = new_state

        steps = max(1, math.ceil(duration / dt - 1e-9))
        e_start = energy
        for k in range(1, steps + 1):
            tau = min(k * dt, duration)
            if state is CycleState.CHARGING:
                energy = min(e_start + charge_power * tau, e_max)
            events.append(row(t0 + tau, state, energy))
        t0 += duration
    return CycleTrace(tuple(events), C, device.clamp_voltage)
