"""Frequency-dependent loss data for resonator tanks.

A loss table is a short list of ``(frequency, value)`` nodes where the
value is either a quality factor measured with a reference inductor or a
series resistance in ohms. Values are interpolated piecewise-linearly in
log-frequency, which is how datasheet curves are usually drawn.

File format::

    # comment lines start with '#'
    frequency_hz,q          (or frequency_hz,rs_ohm)
    100000,30
    1000000,50

Columns may be separated by a comma or by whitespace; CRLF is accepted.
"""

from __future__ import annotations

import enum
import io
import logging
import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

from .errors import DomainError, InsufficientDataError, LossTableError
from .resonance import TWO_PI

logger = logging.getLogger(__name__)


class LossKind(enum.Enum):
    Q = "q"
    SERIES_RESISTANCE = "rs_ohm"


_SPLIT = re.compile(r"\s*,\s*|\s+")


@dataclass(frozen=True)
class LossTable:
    """Tabulated loss versus frequency.

    For ``kind == LossKind.Q`` the Q values are taken to have been measured
    with ``reference_inductance``; they are converted to a series
    resistance at that inductance before being reapplied to any other
    inductance. Outside the tabulated span the nearest endpoint value is
    used.
    """

    frequencies: tuple
    values: tuple
    kind: LossKind = LossKind.Q
    reference_inductance: float | None = None

    def __post_init__(self):
        f = tuple(float(x) for x in self.frequencies)
        v = tuple(float(x) for x in self.values)
        if len(f) != len(v):
            raise LossTableError("frequency and value columns differ in length")
        if len(f) < 2:
            raise InsufficientDataError(f"need at least 2 rows, got {len(f)}")
        for i, (fi, vi) in enumerate(zip(f, v)):
            if not (fi > 0 and math.isfinite(fi)):
                raise LossTableError(f"row {i + 1}: frequency must be positive, got {fi!r}")
            if not (vi > 0 and math.isfinite(vi)):
                raise LossTableError(f"row {i + 1}: value must be positive, got {vi!r}")
            if i and fi <= f[i - 1]:
                raise LossTableError(f"row {i + 1}: frequencies must be strictly increasing")
        kind = LossKind(self.kind)
        if kind is LossKind.Q:
            ref = self.reference_inductance
            if ref is None or not (ref > 0):
                raise LossTableError("a Q table needs a positive reference_inductance")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "_log_f", tuple(math.log(x) for x in f))

    @property
    def span(self):
        return self.frequencies[0], self.frequencies[-1]

    @property
    def nodes(self):
        return self.frequencies

    def covers(self, f):
        return self.frequencies[0] <= f <= self.frequencies[-1]

    def value_at(self, f):
        """Raw interpolated table value (Q or ohms) at ``f``."""
        fs, vs = self.frequencies, self.values
        if f <= fs[0]:
            return vs[0]
        if f >= fs[-1]:
            return vs[-1]
        i = bisect_right(fs, f)
        if fs[i - 1] == f:
            return vs[i - 1]
        x0, x1 = self._log_f[i - 1], self._log_f[i]
        t = (math.log(f) - x0) / (x1 - x0)
        return vs[i - 1] + t * (vs[i] - vs[i - 1])

    def rs_at(self, f):
        """Series resistance in ohms at ``f``.

        Q tables are converted at the reference inductance, so the result
        does not depend on the inductance later used with it.
        """
        v = self.value_at(f)
        if self.kind is LossKind.SERIES_RESISTANCE:
            return v
        return TWO_PI * f * self.reference_inductance / v

    def q_at(self, f, inductance, margin_es=0.0):
        """Effective Q at ``f`` for a tank of ``inductance`` with loss margin ``margin_es``."""
        if margin_es < 0:
            raise DomainError(f"loss margin must be non-negative, got {margin_es!r}")
        if margin_es == 0 and self.kind is LossKind.Q:
            q = self.value_at(f)
            if inductance == self.reference_inductance:
                return q
            return q * (inductance / self.reference_inductance)
        return TWO_PI * f * inductance / (self.rs_at(f) + margin_es)

    def to_text(self):
        header = f"frequency_hz,{self.kind.value}"
        rows = [f"{f!r},{v!r}" for f, v in zip(self.frequencies, self.values)]
        return "\n".join([header, *rows]) + "\n"


@dataclass(frozen=True)
class ConstantQ:
    """A loss model whose Q is the same at every frequency.

    Used for closed-form checks and the ``--const-q`` CLI shortcut. The Q
    applies at any inductance; a margin is applied through the implied
    series resistance 2 pi f L / Q.
    """

    q: float

    def __post_init__(self):
        if not (self.q > 0 and math.isfinite(self.q)):
            raise DomainError(f"Q must be positive and finite, got {self.q!r}")

    nodes = ()
    span = (0.0, math.inf)

    def covers(self, f):
        return True

    def rs_at(self, f, inductance):
        return TWO_PI * f * inductance / self.q

    def q_at(self, f, inductance, margin_es=0.0):
        if margin_es < 0:
            raise DomainError(f"loss margin must be non-negative, got {margin_es!r}")
        if margin_es == 0:
            return self.q
        return TWO_PI * f * inductance / (self.rs_at(f, inductance) + margin_es)


@dataclass(frozen=True)
class LossComponents:
    """Dominant series-loss contributions of an LC tank, in ohms."""

    inductor_loss: float = 0.0
    capacitor_esr: float = 0.0
    interconnect: float = 0.0

    def __post_init__(self):
        parts = (self.inductor_loss, self.capacitor_esr, self.interconnect)
        if any(p < 0 for p in parts):
            raise DomainError("loss components must be non-negative")
        if not any(p > 0 for p in parts):
            raise DomainError("at least one loss component must be positive")


def composite_rs(parts):
    """Total series resistance R_L + ESR_C + R_pcb."""
    return parts.inductor_loss + parts.capacitor_esr + parts.interconnect


def _parse_kind(name, line_no):
    name = name.strip().lower()
    for kind in LossKind:
        if name == kind.value:
            return kind
    raise LossTableError(f"unknown value column {name!r} (expected 'q' or 'rs_ohm')", line_no)


def load_loss_table(source, kind=None, reference_inductance=None):
    """Read a loss table from a path, text stream or string.

    Args:
        source: Path, open text stream, or the table text itself.
        kind: Expected :class:`LossKind`. When omitted the header decides.
        reference_inductance: Inductance the Q column was measured with;
            required for Q tables.

    Raises:
        LossTableError: a malformed row, with its line number.
        InsufficientDataError: fewer than two data rows.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, str) and "\n" not in source and Path(source).exists():
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()

    header_kind = None
    freqs, values = [], []
    for line_no, raw in enumerate(io.StringIO(text, newline=None), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = [c for c in _SPLIT.split(line) if c]
        if header_kind is None:
            if len(cols) != 2 or cols[0].lower() != "frequency_hz":
                raise LossTableError(
                    "header must be 'frequency_hz,q' or 'frequency_hz,rs_ohm'", line_no)
            header_kind = _parse_kind(cols[1], line_no)
            continue
        if len(cols) != 2:
            raise LossTableError(f"expected 2 columns, got {len(cols)}", line_no)
        try:
            f, v = float(cols[0]), float(cols[1])
        except ValueError:
            raise LossTableError(f"non-numeric row {line!r}", line_no) from None
        if not (f > 0 and math.isfinite(f)) or not (v > 0 and math.isfinite(v)):
            raise LossTableError("frequency and value must be positive", line_no)
        if freqs and f <= freqs[-1]:
            raise LossTableError(
                f"frequency {f:g} Hz is not above the previous row ({freqs[-1]:g} Hz)", line_no)
        freqs.append(f)
        values.append(v)

    if header_kind is None:
        raise InsufficientDataError("table has no header and no rows")
    if kind is not None and LossKind(kind) is not header_kind:
        raise LossTableError(f"expected a {LossKind(kind).value} table, header says {header_kind.value}")
    if len(freqs) < 2:
        raise InsufficientDataError(f"need at least 2 rows, got {len(freqs)}")
    if header_kind is LossKind.SERIES_RESISTANCE:
        reference_inductance = None
    return LossTable(tuple(freqs), tuple(values), header_kind, reference_inductance)
