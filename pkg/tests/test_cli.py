import json

import pytest

from risim.cli import main
from risim.presets import make_preset

SMALL_CONFIG = """
n_slots = 2
seed = 5

[[ris]]
position = [199.875, 15.0, 5.0]
n_elements = 8
"""


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def _write_config(tmp_path, text=SMALL_CONFIG):
    path = tmp_path / "scenario.toml"
    path.write_text(text)
    return str(path)


def test_run_regionmap_preset(tmp_path):
    out = tmp_path / "out"
    assert run_cli(["run", "--preset", "fig5", "--out", str(out)]) == 0
    lines = (out / "regionmap.csv").read_text().splitlines()
    assert lines[0] == "blocker_x_m,ue_x_m,candidate,gain_db"
    assert len(lines) == 1 + 3 * 201
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["files"] == ["regionmap.csv"]
    assert manifest["preset"] == "fig5"
    expected = make_preset("fig5").base_scenario.content_hash()
    assert manifest["scenario_hash"]["base"] == expected


def test_run_outputs_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run_cli(["run", "--preset", "fig5", "--out", str(out)]) == 0
    for name in ("regionmap.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_rejects_zero_trials(tmp_path):
    code = run_cli(["run", "--preset", "fig5", "--trials", "0",
                    "--out", str(tmp_path / "x")])
    assert code == 2


def test_sim_default_point(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    assert run_cli(["sim", "--config", cfg, "--trials", "1",
                    "--grid-step", "50", "--out", str(out)]) == 0
    lines = (out / "metrics.csv").read_text().splitlines()
    assert lines[0] == ("sweep_name,sweep_value,scheme,throughput_bps,"
                        "outage_prob,mean_se_bpshz,n_slots,ci_halfwidth_bps")
    body = [line.split(",") for line in lines[1:]]
    assert len(body) == 5
    assert {row[2] for row in body} == {
        "LSRPA", "Benchmark", "RandomPhase", "NoRisMmw", "NoRisSub6"}
    assert all(row[0] == "tx_power_dbm" and row[1] == "30" for row in body)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["sweep"] == {"variable": "tx_power_dbm",
                                 "values": [30.0]}
    assert manifest["seed"] == 5


def test_sim_sweep_and_scheme_filter(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    assert run_cli(["sim", "--config", cfg, "--trials", "1",
                    "--schemes", "NoRisMmw,Benchmark",
                    "--sweep", "tx_power_dbm", "--from", "10", "--to", "20",
                    "--step", "5", "--out", str(out)]) == 0
    lines = (out / "metrics.csv").read_text().splitlines()
    assert len(lines) == 1 + 3 * 2
    values = {line.split(",")[1] for line in lines[1:]}
    assert values == {"10", "15", "20"}


def test_sim_trajectory_output(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out"
    assert run_cli(["sim", "--config", cfg, "--trials", "1",
                    "--schemes", "NoRisMmw", "--trajectory",
                    "--out", str(out)]) == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0].startswith("slot,time_s,ue_x_m")
    assert len(lines) == 1 + 2 * 2


def test_sim_error_codes(tmp_path):
    cfg = _write_config(tmp_path)
    out = str(tmp_path / "out")
    assert run_cli(["sim", "--config", cfg, "--schemes", "Bogus",
                    "--out", out]) == 2
    assert run_cli(["sim", "--config", cfg, "--from", "10",
                    "--out", out]) == 2
    assert run_cli(["sim", "--config", cfg, "--sweep", "tx_power_dbm",
                    "--out", out]) == 2
    assert run_cli(["sim", "--config", cfg, "--trials", "0",
                    "--out", out]) == 2
    bad = _write_config(tmp_path, "vpl_db = -3.0\n")
    assert run_cli(["sim", "--config", bad, "--out", out]) == 2
    missing = str(tmp_path / "nope.toml")
    assert run_cli(["sim", "--config", missing, "--out", out]) == 3


def test_usage_errors():
    assert run_cli([]) == 1
    assert run_cli(["run"]) == 1
    assert run_cli(["run", "--preset", "fig9", "--out", "x"]) == 1
    assert run_cli(["sim", "--config", "a", "--bogus"]) == 1


def test_regionmap_source_exclusivity(tmp_path):
    out = str(tmp_path / "out")
    assert run_cli(["regionmap", "--out", out]) == 2
    cfg = _write_config(tmp_path)
    assert run_cli(["regionmap", "--preset", "fig5", "--config", cfg,
                    "--out", out]) == 2


def test_regionmap_custom_blockers(tmp_path):
    out = tmp_path / "out"
    assert run_cli(["regionmap", "--preset", "fig5",
                    "--blockers", "110,150", "--grid-step", "50",
                    "--out", str(out)]) == 0
    lines = (out / "regionmap.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 9
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["blockers"] == [110.0, 150.0]
