import json
import math

import pytest

import lcplan
from lcplan.cli import main, parse_schedule

TABLE = str(lcplan.data_path("inductor_10uH_q.csv"))
DEVICES = str(lcplan.data_path("prototype_devices.json"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_allocate_constant_q(capsys, tmp_path):
    out_file = tmp_path / "plan.json"
    code, out, _ = run(capsys, "allocate", "--band", "100kHz:1MHz", "--const-q", "10",
                       "--out", str(out_file))
    assert code == 0
    assert "N = 24" in out
    doc = json.loads(out_file.read_text())
    assert doc["count"] == 24


def test_allocate_fixture_table(capsys, tmp_path):
    out_file = tmp_path / "plan.json"
    code, out, _ = run(capsys, "allocate", "--band", "100kHz:1MHz", "--inductance", "10uH",
                       "--loss-table", TABLE, "--out", str(out_file))
    assert code == 0
    n = json.loads(out_file.read_text())["count"]
    assert 177 * 0.75 <= n <= 177 * 1.25


def test_allocate_csv_format(capsys, tmp_path):
    out_file = tmp_path / "plan.csv"
    run(capsys, "allocate", "--band", "100kHz:1MHz", "--const-q", "10", "--out", str(out_file),
        "--format", "csv")
    lines = out_file.read_text().splitlines()
    assert lines[0] == "i,f0_hz,c_farad,bw_hz,lo_hz,hi_hz"
    assert len(lines) == 25


@pytest.mark.parametrize("argv", [
    ["allocate", "--const-q", "10"],
    ["allocate", "--band", "100kHz:1MHz"],
    ["allocate", "--band", "100kHz:1MHz", "--const-q", "10", "--loss-table", TABLE],
    ["allocate", "--band", "nonsense", "--const-q", "10"],
    ["allocate", "--band", "100kHz:1MHz", "--loss-table", "/no/such/file.csv"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_allocate_domain_error_exit_1(capsys):
    code, _, err = run(capsys, "allocate", "--band", "1MHz:100kHz", "--const-q", "10")
    assert code == 1
    assert "error" in err


def test_malformed_table_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("frequency_hz,q\n1e5,30\n9e4,40\n")
    code, _, err = run(capsys, "allocate", "--band", "100kHz:1MHz", "--loss-table", str(bad))
    assert code == 1
    assert "line 3" in err


def test_sweep_inductance(capsys):
    code, out, _ = run(capsys, "sweep", "--band", "100kHz:1MHz", "--loss-table", TABLE,
                       "--param", "inductance", "--values", "10uH,1uH")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "param_value,count"
    counts = [int(line.split(",")[1]) for line in lines[1:]]
    assert counts[0] > counts[1]


def test_sweep_guard_non_increasing(capsys, tmp_path):
    out_file = tmp_path / "sweep.csv"
    run(capsys, "sweep", "--band", "100kHz:1MHz", "--const-q", "40", "--param", "guard",
        "--values", "0,1kHz,5kHz,20kHz", "--out", str(out_file))
    counts = [int(line.split(",")[1]) for line in out_file.read_text().splitlines()[1:]]
    assert counts == sorted(counts, reverse=True)


def test_sweep_empty_values_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--band", "100kHz:1MHz", "--const-q", "10", "--param", "guard", "--values", ","])
    assert info.value.code == 2


def test_response_single_resonator(capsys, tmp_path):
    out_file = tmp_path / "curves.csv"
    code, _, _ = run(capsys, "response", "--resonator", "1MHz:50", "--grid", "990kHz:1010kHz:1kHz",
                     "--out", str(out_file))
    assert code == 0
    rows = [line.split(",") for line in out_file.read_text().splitlines()[1:]]
    assert len(rows) == 21
    assert [float(m) for _, _, m in rows].count(1.0) == 1


def test_response_plan_curves_cross_below_half_power(capsys, tmp_path):
    plan = tmp_path / "plan.json"
    run(capsys, "allocate", "--band", "100kHz:200kHz", "--const-q", "20", "--out", str(plan))
    curves = tmp_path / "curves.csv"
    code, _, _ = run(capsys, "response", "--plan", str(plan), "--grid", "90kHz:220kHz:10Hz",
                     "--out", str(curves))
    assert code == 0
    by_index = {}
    for line in curves.read_text().splitlines()[1:]:
        i, _, m = line.split(",")
        by_index.setdefault(int(i), []).append(float(m))
    n = json.loads(plan.read_text())["count"]
    assert sorted(by_index) == list(range(1, n + 1))
    for a, b in zip(range(1, n), range(2, n + 1)):
        both = [min(x, y) for x, y in zip(by_index[a], by_index[b])]
        assert max(both) < 1 / math.sqrt(2)


def test_response_uncovered_grid_warns(capsys, tmp_path):
    out_file = tmp_path / "curves.csv"
    code, _, err = run(capsys, "response", "--resonator", "1MHz:50", "--grid", "10kHz:20kHz:1kHz",
                       "--out", str(out_file))
    assert code == 0
    assert "warning" in err
    assert out_file.read_text() == "resonator_index,frequency_hz,magnitude\n"


def test_triggers_fixture_devices(capsys, tmp_path):
    bands, pairs = tmp_path / "bands.csv", tmp_path / "overlaps.csv"
    code, out, _ = run(capsys, "triggers", "--devices", DEVICES, "--bands-out", str(bands),
                       "--overlaps-out", str(pairs))
    assert code == 0
    assert len(bands.read_text().splitlines()) == 4
    assert pairs.read_text().splitlines()[0] == "pair,lo_hz,hi_hz,width_hz"
    assert "max simultaneous = 2" in out


def test_triggers_single_device(capsys, tmp_path):
    one = tmp_path / "one.json"
    one.write_text(json.dumps(json.loads(open(DEVICES).read())[:1]))
    code, out, _ = run(capsys, "triggers", "--devices", str(one))
    assert code == 0
    assert "no overlapping trigger bands" in out
    assert "max simultaneous = 1" in out


def test_triggers_on_plan(capsys, tmp_path):
    plan = tmp_path / "plan.json"
    run(capsys, "allocate", "--band", "100kHz:1MHz", "--const-q", "10", "--out", str(plan))
    code, out, _ = run(capsys, "triggers", "--plan", str(plan), "--grid", "50kHz:1.2MHz:50Hz")
    assert code == 0
    assert "max simultaneous = 1" in out


def test_cycle_charge_and_trigger(capsys, tmp_path):
    out_file = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "cycle", "--devices", DEVICES, "--device", "1",
                       "--schedule", "1s@charger,1s@trigger", "--charge-power", "0.2W",
                       "--out", str(out_file))
    assert code == 0
    assert "peak 24 V / 95.04 mJ" in out
    lines = out_file.read_text().splitlines()
    assert lines[0] == "t_s,state,v_volt,e_joule"
    last = lines[-1].split(",")
    assert last[1] == "Triggered" and float(last[3]) == 0.0


def test_cycle_out_of_band_idle(capsys, tmp_path):
    out_file = tmp_path / "trace.csv"
    run(capsys, "cycle", "--devices", DEVICES, "--schedule", "0.5s@2MHz", "--charge-power", "1W",
        "--out", str(out_file))
    states = {line.split(",")[1] for line in out_file.read_text().splitlines()[1:]}
    assert states == {"Idle"}


def test_cycle_unknown_device_exit_1(capsys):
    code, _, err = run(capsys, "cycle", "--devices", DEVICES, "--device", "9",
                       "--schedule", "1s@charger", "--charge-power", "0.2W")
    assert code == 1


def test_malformed_devices_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "triggers", "--devices", str(bad))
    assert code == 1


def test_parse_schedule(devices):
    d = devices[0]
    got = parse_schedule("1s@charger, 500ms@734kHz,2s@trigger", d)
    assert got == [(1.0, d.charger.f0), (0.5, 734e3), (2.0, d.trigger.f0)]
    for bad in ("", "1s", "1s@nowhere"):
        with pytest.raises(ValueError):
            parse_schedule(bad, d)


def test_outputs_are_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run(capsys, "allocate", "--band", "100kHz:1MHz", "--loss-table", TABLE, "--guard", "500Hz",
            "--margin", "0.2ohm", "--out", str(path))
    assert a.read_bytes() == b.read_bytes()
