"""Engineering-suffix parsing and formatting for CLI boundaries.

Everything inside the package is plain SI floats. These helpers turn
strings such as ``"100kHz"``, ``"10uH"`` or ``"4.7n"`` into floats and
back again for display.
"""

import math
import re

_PREFIXES = {
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "μ": 1e-6,
    "m": 1e-3,
    "": 1.0,
    "k": 1e3,
    "K": 1e3,
    "M": 1e6,
    "G": 1e9,
}

# unit -> accepted spellings (case-sensitive except where listed twice)
_UNITS = {
    "Hz": ("Hz", "hz", "HZ"),
    "H": ("H", "h"),
    "F": ("F", "f"),
    "ohm": ("ohm", "Ohm", "ohms", "Ω", "R"),
    "V": ("V", "v"),
    "W": ("W", "w"),
    "s": ("s",),
    "J": ("J",),
}

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_QUANTITY = re.compile(rf"^\s*(?P<num>{_NUMBER})\s*(?P<rest>[^\s\d.+-]*)\s*$")


def parse_quantity(text, unit=None):
    """Parse a number with an optional SI prefix and unit symbol.

    ``unit`` names the expected base unit ("Hz", "H", "F", "ohm", "V", "W",
    "s"). The unit symbol is optional in the text; when present it must
    match. A bare prefix such as ``"10u"`` is accepted.

    Raises:
        ValueError: the text is not a recognisable quantity.
    """
    if isinstance(text, (int, float)):
        return float(text)
    m = _QUANTITY.match(text)
    if m is None:
        raise ValueError(f"cannot parse quantity {text!r}")
    value = float(m.group("num"))
    rest = m.group("rest")
    if not rest:
        return value

    spellings = _UNITS.get(unit, ()) if unit else tuple(
        s for group in _UNITS.values() for s in group)
    # longest spelling first so "Hz" wins over "H" for prefix "M"
    for spelling in sorted(spellings, key=len, reverse=True):
        if rest.endswith(spelling):
            prefix = rest[: -len(spelling)]
            if prefix in _PREFIXES:
                return value * _PREFIXES[prefix]
    if rest in _PREFIXES:
        return value * _PREFIXES[rest]
    raise ValueError(f"cannot parse quantity {text!r} as {unit or 'a number'}")


def parse_range(text, unit=None):
    """Parse ``"lo:hi"`` into two floats."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"expected lo:hi, got {text!r}")
    return parse_quantity(parts[0], unit), parse_quantity(parts[1], unit)


def parse_grid(text, unit="Hz"):
    """Parse ``"lo:hi:step"`` into an inclusive list of grid points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected lo:hi:step, got {text!r}")
    lo, hi, step = (parse_quantity(p, unit) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"invalid grid {text!r}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + i * step for i in range(n + 1)]


def format_quantity(value, unit, digits=4):
    """Format a float with an engineering prefix, e.g. ``1.125 MHz``."""
    if value == 0 or not math.isfinite(value):
        return f"{value:g} {unit}"
    exponent = int(math.floor(math.log10(abs(value)) / 3) * 3)
    exponent = max(-12, min(9, exponent))
    prefix = {-12: "p", -9: "n", -6: "u", -3: "m", 0: "", 3: "k", 6: "M", 9: "G"}[exponent]
    return f"{value / 10 ** exponent:.{digits}g} {prefix}{unit}"
