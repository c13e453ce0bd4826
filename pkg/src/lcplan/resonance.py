"""Closed-form LC resonator math.

All quantities are base SI: hertz, henries, farads, ohms, volts, joules.
The frequency response used throughout the package is the second-order
bandpass magnitude

    |H(f)| = 1 / sqrt(1 + Q^2 (f/f0 - f0/f)^2)

whose -3 dB width is exactly ``f0 / Q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BandExceedsGridError, DomainError, NoBandError

TWO_PI = 2.0 * math.pi
HALF_POWER = 1.0 / math.sqrt(2.0)

# Below this the lower half-power edge of the response is not a positive frequency.
MIN_Q = 0.5


def _require_positive(**values):
    for name, value in values.items():
        if not (value > 0) or not math.isfinite(value):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


def check_q(q):
    """Raise DomainError unless ``q`` supports a half-power band."""
    if not (q > MIN_Q) or not math.isfinite(q):
        raise DomainError(f"Q must exceed {MIN_Q}, got {q!r}")
    return float(q)


@dataclass(frozen=True)
class ResonatorSpec:
    """An inductor-capacitor pair."""

    inductance: float
    capacitance: float
    label: str = ""

    def __post_init__(self):
        _require_positive(inductance=self.inductance, capacitance=self.capacitance)

    @property
    def f0(self):
        return resonant_frequency(self)


@dataclass(frozen=True)
class CouplingLink:
    coupling_coefficient: float
    transmitter_inductance: float
    receiver_inductance: float

    def __post_init__(self):
        k = self.coupling_coefficient
        if not (0.0 <= k <= 1.0):
            raise DomainError(f"coupling coefficient must lie in [0, 1], got {k!r}")
        _require_positive(transmitter_inductance=self.transmitter_inductance,
                          receiver_inductance=self.receiver_inductance)


@dataclass(frozen=True)
class EnergyState:
    """Charge held on a capacitor at a given voltage."""

    capacitance: float
    voltage: float

    def __post_init__(self):
        _require_positive(capacitance=self.capacitance)

    @property
    def energy(self):
        return stored_energy(self.capacitance, self.voltage)


@dataclass(frozen=True)
class ResponseCurve:
    """Sampled normalized magnitude of one resonator.

    ``frequencies`` must be strictly increasing; ``magnitudes`` holds the
    matching samples in (0, 1].
    """

    center_frequency: float
    q: float
    frequencies: np.ndarray = field(repr=False)
    magnitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        m = np.asarray(self.magnitudes, dtype=float)
        if f.shape != m.shape or f.ndim != 1:
            raise ValueError("frequencies and magnitudes must be 1-D arrays of equal length")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "magnitudes", m)

    @property
    def samples(self):
        return list(zip(self.frequencies.tolist(), self.magnitudes.tolist()))

    @classmethod
    def sample(cls, f0, q, grid):
        """Evaluate :func:`normalized_response` on ``grid``."""
        grid = np.asarray(grid, dtype=float)
        return cls(float(f0), float(q), grid, normalized_response(grid, f0, q))


def resonant_frequency(spec):
    """Natural frequency 1/(2 pi sqrt(LC)) of an LC pair."""
    _require_positive(inductance=spec.inductance, capacitance=spec.capacitance)
    return 1.0 / (TWO_PI * math.sqrt(spec.inductance * spec.capacitance))


def capacitance_for(target_f0, inductance):
    """Capacitance that tunes ``inductance`` to ``target_f0``."""
    _require_positive(target_f0=target_f0, inductance=inductance)
    w = TWO_PI * target_f0
    return 1.0 / (w * w * inductance)


def half_power_bandwidth(f0, q):
    """-3 dB bandwidth f0/Q."""
    _require_positive(f0=f0)
    return f0 / check_q(q)


def half_power_edges(f0, q):
    """Exact lower and upper -3 dB frequencies of the canonical response."""
    _require_positive(f0=f0)
    q = check_q(q)
    root = math.sqrt(1.0 + 1.0 / (4.0 * q * q))
    half = 1.0 / (2.0 * q)
    return f0 * (root - half), f0 * (root + half)


def series_q(f0, inductance, rs):
    """Quality factor 2 pi f0 L / R_s of a series-loss tank."""
    _require_positive(f0=f0, inductance=inductance)
    if rs == 0:
        raise DomainError("series resistance of zero gives an unbounded Q")
    _require_positive(rs=rs)
    return TWO_PI * f0 * inductance / rs


def effective_q(f, inductance, rs_at_f, margin_es=0.0):
    """Quality factor with a worst-case additive series-resistance margin.

    Args:
        f: Frequency in Hz.
        inductance: Tank inductance in H.
        rs_at_f: Series resistance at ``f`` in ohms.
        margin_es: Extra resistance in ohms added to ``rs_at_f``.

    Returns:
        2 pi f L / (R_s + e_s).
    """
    if margin_es < 0:
        raise DomainError(f"loss margin must be non-negative, got {margin_es!r}")
    _require_positive(rs_at_f=rs_at_f)
    return series_q(f, inductance, rs_at_f + margin_es)


def normalized_response(f, f0, q):
    """Peak-normalized magnitude of the second-order bandpass response.

    Accepts scalars or arrays for ``f``; returns the same shape.
    """
    _require_positive(f0=f0, q=q)
    arr = np.asarray(f, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("frequencies must be positive")
    detune = arr / f0 - f0 / arr
    out = 1.0 / np.sqrt(1.0 + (q * detune) ** 2)
    if out.ndim == 0:
        return float(out)
    return out


def stored_energy(capacitance, voltage):
    """Energy C V^2 / 2 held on a capacitor."""
    _require_positive(capacitance=capacitance)
    return 0.5 * capacitance * voltage * voltage


def mutual_inductance(link):
    """M = k sqrt(L_T L_R)."""
    k = link.coupling_coefficient
    if not (0.0 <= k <= 1.0):
        raise DomainError(f"coupling coefficient must lie in [0, 1], got {k!r}")
    return k * math.sqrt(link.transmitter_inductance * link.receiver_inductance)


def _crossing(f_a, m_a, f_b, m_b, threshold):
    # linear interpolation of magnitude between two bracketing samples
    return f_a + (threshold - m_a) * (f_b - f_a) / (m_b - m_a)


def band_crossings(frequencies, magnitudes, threshold, around=None):
    """Locate the threshold crossings that bracket one peak.

    Walks outward from sample index ``around`` (default: the largest
    sample) and returns ``(lower, upper)`` with each edge placed by linear
    interpolation between the two samples that straddle ``threshold``.

    Raises:
        NoBandError: the starting sample is below threshold.
        BandExceedsGridError: either side never drops below threshold.
    """
    f = np.asarray(frequencies, dtype=float)
    m = np.asarray(magnitudes, dtype=float)
    peak = int(np.argmax(m)) if around is None else int(around)
    if m[peak] < threshold:
        raise NoBandError(
            f"peak magnitude {m[peak]:.6g} is below threshold {threshold:.6g}")

    below = np.nonzero(m[:peak] < threshold)[0]
    if below.size == 0:
        raise BandExceedsGridError("response does not fall below threshold under the peak")
    i = int(below[-1])
    lower = _crossing(f[i], m[i], f[i + 1], m[i + 1], threshold)

    above = np.nonzero(m[peak + 1:] < threshold)[0]
    if above.size == 0:
        raise BandExceedsGridError("response does not fall below threshold over the peak")
    j = peak + 1 + int(above[0])
    upper = _crossing(f[j - 1], m[j - 1], f[j], m[j], threshold)
    return lower, upper


def measured_bandwidth(curve, threshold=HALF_POWER):
    """Width of the band around the peak where the curve meets ``threshold``.

    Mirrors how a bench sweep is read: the two crossings are interpolated
    linearly between the neighbouring samples.
    """
    if len(curve.frequencies) < 3:
        raise ValueError("need at least three samples")
    if not (0.0 < threshold < 1.0):
        raise DomainError(f"threshold must lie in (0, 1), got {threshold!r}")
    lower, upper = band_crossings(curve.frequencies, curve.magnitudes, threshold)
    return upper - lower
