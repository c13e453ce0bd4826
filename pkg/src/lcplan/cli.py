"""Command-line entry point.

    lcplan allocate  --band 100kHz:1MHz --inductance 10uH --loss-table q.csv --out plan.json
    lcplan sweep     --band 100kHz:1MHz --loss-table q.csv --param inductance --values 10uH,1uH
    lcplan response  --plan plan.json --grid 90kHz:1.1MHz:100Hz --out curves.csv
    lcplan triggers  --devices devices.json
    lcplan cycle     --devices devices.json --schedule 1s@charger,1s@trigger --charge-power 0.2W

Exit codes: 0 success, 1 computation or input-data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .allocator import BandPlan, allocate, sweep, sweep_to_csv
from .errors import LCPlanError
from .loss_tables import ConstantQ, LossKind, load_loss_table
from .resonance import ResonatorSpec, normalized_response
from .selectivity import (
    Device,
    Tank,
    bands_to_csv,
    default_grid,
    devices_from_plan,
    load_devices,
    max_simultaneous,
    overlaps,
    overlaps_to_csv,
    run_cycle,
    trigger_band,
)
from .units import format_quantity, parse_grid, parse_quantity, parse_range

logger = logging.getLogger("lcplan")

EXIT_OK, EXIT_ERROR, EXIT_USAGE = 0, 1, 2

_PARAM_UNITS = {
    "inductance": "H",
    "guard": "Hz",
    "guard_band": "Hz",
    "margin": "ohm",
    "loss_margin": "ohm",
    "f_max": "Hz",
}


def _quantity(unit):
    def convert(text):
        try:
            return parse_quantity(text, unit)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    convert.__name__ = unit
    return convert


def _band(text):
    try:
        lo, hi = parse_range(text, "Hz")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return lo, hi


def _grid(text):
    try:
        return parse_grid(text, "Hz")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _resonator(text):
    try:
        f0, q = text.split(":")
        return parse_quantity(f0, "Hz"), float(q)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected f0:Q, got {text!r}") from None


def _existing_file(text):
    path = Path(text)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {text}")
    return path


def _add_plan_args(p):
    p.add_argument("--band", type=_band, required=True, metavar="LO:HI",
                   help="frequency band, e.g. 100kHz:1MHz")
    p.add_argument("--inductance", type=_quantity("H"), default=10e-6,
                   help="shared tank inductance (default 10uH)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--loss-table", type=_existing_file, metavar="PATH")
    src.add_argument("--const-q", type=float, metavar="Q")
    p.add_argument("--table-inductance", type=_quantity("H"), default=None,
                   help="inductance a Q table was measured with (default: --inductance)")
    p.add_argument("--guard", type=_quantity("Hz"), default=0.0, help="guard band (default 0)")
    p.add_argument("--margin", type=_quantity("ohm"), default=0.0,
                   help="worst-case extra series resistance (default 0)")


def _plan_from_args(args):
    f_min, f_max = args.band
    if args.const_q is not None:
        loss = ConstantQ(args.const_q)
    else:
        ref = args.table_inductance or args.inductance
        loss = load_loss_table(args.loss_table, reference_inductance=ref)
        if loss.kind is LossKind.SERIES_RESISTANCE and args.table_inductance:
            logger.warning("--table-inductance is ignored for series-resistance tables")
    return BandPlan(f_min, f_max, args.inductance, loss, args.guard, args.margin)


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _plan_summary(result):
    p = result.plan
    lines = [
        f"N = {result.count} resonators in [{format_quantity(p.f_min, 'Hz')}, "
        f"{format_quantity(p.f_max, 'Hz')}] (L = {format_quantity(p.inductance, 'H')}, "
        f"guard {format_quantity(p.guard_band, 'Hz')}, margin {p.loss_margin:g} ohm)",
    ]
    first, last = result.entries[0], result.entries[-1]
    lines.append(f"first f0 {format_quantity(first.center, 'Hz', 7)} bw {format_quantity(first.bandwidth, 'Hz')}, "
                 f"last f0 {format_quantity(last.center, 'Hz', 7)} bw {format_quantity(last.bandwidth, 'Hz')}")
    lines += [f"warning: {w}" for w in result.warnings]
    return "\n".join(lines)


def _plan_csv(result):
    rows = ["i,f0_hz,c_farad,bw_hz,lo_hz,hi_hz"]
    rows += [f"{e.index},{e.center!r},{e.capacitance!r},{e.bandwidth!r},{e.band_lo!r},{e.band_hi!r}"
             for e in result.entries]
    return "\n".join(rows) + "\n"


def cmd_allocate(args):
    result = allocate(_plan_from_args(args))
    if args.out:
        if args.format == "csv":
            _write(args.out, _plan_csv(result))
        else:
            _write(args.out, json.dumps(result.to_dict(), indent=2) + "\n")
    print(_plan_summary(result))
    return EXIT_OK


def cmd_sweep(args, parser):
    unit = _PARAM_UNITS[args.param]
    items = [v for v in args.values.split(",") if v.strip()]
    if not items:
        parser.error("--values needs at least one value")
    try:
        values = [parse_quantity(v.strip(), unit) for v in items]
    except ValueError as exc:
        parser.error(str(exc))
    rows = sweep(_plan_from_args(args), args.param, values)
    text = sweep_to_csv(rows)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK if any(r.count is not None for r in rows) else EXIT_ERROR


def _load_plan_document(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        L = float(doc["band"]["inductance_h"])
        tanks = []
        for e in doc["entries"]:
            spec = ResonatorSpec(L, float(e["c_farad"]), str(e["i"]))
            tanks.append((str(e["i"]), float(e["f0_hz"]), float(e["f0_hz"]) / float(e["bw_hz"]), spec))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed plan document: {exc}") from None
    return doc, tanks


def cmd_response(args):
    curves = []  # (label, f0, q)
    if args.plan:
        _, tanks = _load_plan_document(args.plan)
        curves += [(label, f0, q) for label, f0, q, _ in tanks]
    if args.devices:
        for d in load_devices(args.devices):
            curves.append((f"{d.label}/trigger", d.trigger.f0, d.trigger.q))
            if d.charger is not None:
                curves.append((f"{d.label}/charger", d.charger.f0, d.charger.q))
    curves += [(f"{f0:g}", f0, q) for f0, q in args.resonator or ()]
    if not curves:
        raise ValueError("give --plan, --devices or at least one --resonator")

    grid = np.asarray(args.grid, dtype=float)
    lines = ["resonator_index,frequency_hz,magnitude"]
    covered = [c for c in curves if grid[0] <= c[1] <= grid[-1]]
    if not covered:
        print("warning: grid covers no resonance; no curves written", file=sys.stderr)
    else:
        for index, (label, f0, q) in enumerate(curves, start=1):
            mags = normalized_response(grid, f0, q)
            lines += [f"{index},{f!r},{m!r}" for f, m in zip(grid.tolist(), mags.tolist())]
            print(f"{index}: {label} f0 {format_quantity(f0, 'Hz', 7)} Q {q:.4g}")
    if args.out:
        _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _devices_from_args(args):
    if args.devices:
        devices = load_devices(args.devices)
    else:
        _, tanks = _load_plan_document(args.plan)
        devices = [Device(label, Tank(spec, q)) for label, _, q, spec in tanks]
    if getattr(args, "threshold", None) is not None:
        devices = [Device(d.label, d.trigger, d.charger, d.bank_capacitance, d.clamp_voltage,
                          args.threshold) for d in devices]
    return devices


def cmd_triggers(args):
    devices = _devices_from_args(args)
    grid = np.asarray(args.grid, dtype=float) if args.grid else default_grid(devices)
    bands = [trigger_band(d, grid) for d in devices]
    pairs = overlaps(bands) if len(bands) > 1 else []
    if args.bands_out:
        _write(args.bands_out, bands_to_csv(bands))
    if args.overlaps_out:
        _write(args.overlaps_out, overlaps_to_csv(pairs))
    for b in bands:
        print(f"device {b.device_label}: {format_quantity(b.lo, 'Hz', 6)} .. "
              f"{format_quantity(b.hi, 'Hz', 6)} (width {format_quantity(b.width, 'Hz')})")
    for o in pairs:
        print(f"overlap {o.pair[0]}-{o.pair[1]}: {format_quantity(o.lo, 'Hz', 6)} .. "
              f"{format_quantity(o.hi, 'Hz', 6)} (width {format_quantity(o.width, 'Hz')})")
    if not pairs:
        print("no overlapping trigger bands")
    print(f"max simultaneous = {max_simultaneous(devices, grid)}")
    return EXIT_OK


def parse_schedule(text, device):
    """Parse ``"1s@charger,1s@734kHz"`` into ``[(duration, excitation), ...]``."""
    segments = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        if "@" not in item:
            raise ValueError(f"schedule item {item!r} is not duration@frequency")
        duration, freq = item.split("@", 1)
        key = freq.strip().lower()
        if key == "charger":
            if device.charger is None:
                raise ValueError(f"device {device.label} has no charger")
            f = device.charger.f0
        elif key == "trigger":
            f = device.trigger.f0
        else:
            f = parse_quantity(freq, "Hz")
        segments.append((parse_quantity(duration, "s"), f))
    if not segments:
        raise ValueError("schedule is empty")
    return segments


def cmd_cycle(args):
    devices = load_devices(args.devices)
    if args.device is None:
        device = devices[0]
    else:
        matches = [d for d in devices if d.label == args.device]
        if not matches:
            raise ValueError(f"no device labelled {args.device!r}")
        device = matches[0]
    schedule = parse_schedule(args.schedule, device)
    trace = run_cycle(device, schedule, args.charge_power, args.dt)
    if args.out:
        _write(args.out, trace.to_csv())
    peak = max(trace.events, key=lambda e: e.bank_energy)
    print(f"device {device.label}: {len(trace.events)} samples, peak {peak.bank_voltage:.4g} V "
          f"/ {peak.bank_energy * 1e3:.5g} mJ, final state {trace.final.state.value} "
          f"E = {trace.final.bank_energy:.4g} J")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lcplan", description="Plan and analyse frequency-addressed LC resonator networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("allocate", help="pack resonators into a band")
    _add_plan_args(p)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("sweep", help="addressable count versus one plan parameter")
    _add_plan_args(p)
    p.add_argument("--param", required=True, choices=sorted(_PARAM_UNITS))
    p.add_argument("--values", required=True, help="comma-separated values, e.g. 10uH,1uH")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("response", help="sample normalized response curves")
    p.add_argument("--plan", type=_existing_file)
    p.add_argument("--devices", type=_existing_file)
    p.add_argument("--resonator", type=_resonator, action="append", metavar="F0:Q")
    p.add_argument("--grid", type=_grid, required=True, metavar="LO:HI:STEP")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("triggers", help="trigger bands, overlaps and selectivity verdict")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--devices", type=_existing_file)
    src.add_argument("--plan", type=_existing_file)
    p.add_argument("--grid", type=_grid, metavar="LO:HI:STEP", help="default: 1 kHz steps")
    p.add_argument("--threshold", type=float, help="override every device threshold")
    p.add_argument("--bands-out", type=Path)
    p.add_argument("--overlaps-out", type=Path)

    p = sub.add_parser("cycle", help="simulate the charge/trigger cycle of one device")
    p.add_argument("--devices", type=_existing_file, required=True)
    p.add_argument("--device", help="device label (default: first in file)")
    p.add_argument("--schedule", required=True, help="e.g. 1s@charger,1s@trigger or 1s@1.14MHz")
    p.add_argument("--charge-power", type=_quantity("W"), required=True)
    p.add_argument("--dt", type=_quantity("s"), default=0.01)
    p.add_argument("--out", type=Path)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.subcommand == "allocate":
            return cmd_allocate(args)
        if args.subcommand == "sweep":
            return cmd_sweep(args, parser)
        if args.subcommand == "response":
            return cmd_response(args)
        if args.subcommand == "triggers":
            return cmd_triggers(args)
        return cmd_cycle(args)
    except (LCPlanError, ValueError, OSError) as exc:
        print(f"lcplan: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
