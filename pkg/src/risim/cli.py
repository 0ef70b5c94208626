"""Command-line experiment runner and CSV emission.

Exit codes: 0 success, 1 usage, 2 validation (bad config, preset, or
sweep values), 3 runtime failure.

CSV schemas (header row, UTF-8, "." decimal separator, fixed order):

  metrics*.csv   sweep_name,sweep_value,scheme,throughput_bps,
                 outage_prob,mean_se_bpshz,n_slots,ci_halfwidth_bps
  trajectory.csv slot,time_s,ue_x_m,blocker_x_m,direct_blocked,scheme,
                 path,se_bpshz,rate_bps,outage
  regionmap.csv  blocker_x_m,ue_x_m,candidate,gain_db

Presets with hardware-impairment or sub-6 GHz variants write one
metrics file per variant (metrics.csv, metrics_impaired.csv, ...).

manifest.json records the command inputs, effective seed and trial
count, one scenario content hash per variant, and the emitted files.
It contains no timestamps, so identical invocations are byte-identical.

Scenario config file schema: see the config module docstring.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from importlib import metadata
from pathlib import Path

from .config import load_config
from .engine import SWEEP_VARIABLES, MetricsTable, sweep, trajectory_snapshot
from .presets import ALL_SCHEMES, PRESET_NAMES, Preset, make_preset
from .regionmap import build_region_map, map_to_figure_rows
from .scenario import Scenario, ScenarioError
from .schemes import SchemeId, check_scheme_supported

METRICS_HEADER = ("sweep_name", "sweep_value", "scheme", "throughput_bps",
                  "outage_prob", "mean_se_bpshz", "n_slots",
                  "ci_halfwidth_bps")
TRAJECTORY_HEADER = ("slot", "time_s", "ue_x_m", "blocker_x_m",
                     "direct_blocked", "scheme", "path", "se_bpshz",
                     "rate_bps", "outage")
REGIONMAP_HEADER = ("blocker_x_m", "ue_x_m", "candidate", "gain_db")


def _version() -> str:
    try:
        return metadata.version("risim")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def _fmt(value) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else format(value, ".10g")
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(cell) for cell in row) + "\n")


def write_metrics_csv(path: Path, table: MetricsTable) -> None:
    rows = [(table.sweep_name,) + row for row in table.rows]
    _write_csv(path, METRICS_HEADER, rows)


def supported_schemes(scenario: Scenario) -> list[SchemeId]:
    """All schemes whose required nodes the scenario provides."""
    out = []
    for scheme in ALL_SCHEMES:
        try:
            check_scheme_supported(scenario, scheme)
        except ScenarioError:
            continue
        out.append(scheme)
    return out


def _parse_schemes(arg: str) -> list[SchemeId]:
    by_name = {s.value: s for s in SchemeId}
    out = []
    for name in arg.split(","):
        name = name.strip()
        if name not in by_name:
            raise ScenarioError(
                f"unknown scheme {name!r}; choose from "
                f"{', '.join(by_name)}")
        out.append(by_name[name])
    return out


def _write_manifest(out_dir: Path, payload: dict) -> None:
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _map_kwargs(args) -> dict:
    return {"grid_step": args.grid_step} if args.grid_step else {}


def _run_preset(preset: Preset, seed: int, trials: int, out: Path,
                map_kwargs: dict) -> list[str]:
    files = []
    if preset.sweep_variable is not None:
        for suffix, sc in preset.variants:
            table = sweep(sc, preset.schemes, preset.sweep_variable,
                          preset.sweep_values, trials, seed=seed,
                          map_kwargs=map_kwargs)
            name = f"metrics{suffix}.csv"
            write_metrics_csv(out / name, table)
            files.append(name)
    if preset.trajectory:
        sc = preset.base_scenario
        rm = build_region_map(sc, **map_kwargs)
        rows = trajectory_snapshot(sc, preset.schemes, seed=seed,
                                   region_map=rm)
        _write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, rows)
        files.append("trajectory.csv")
    if preset.regionmap_blockers is not None:
        rm = build_region_map(preset.base_scenario,
                              blocker_positions=preset.regionmap_blockers,
                              **map_kwargs)
        _write_csv(out / "regionmap.csv", REGIONMAP_HEADER,
                   map_to_figure_rows(rm))
        files.append("regionmap.csv")
    return files


def cmd_run(args) -> int:
    preset = make_preset(args.preset, args.ris)
    seed = args.seed if args.seed is not None else preset.base_scenario.seed
    trials = args.trials if args.trials is not None else preset.default_trials
    if trials < 1:
        raise ScenarioError("trials must be >= 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = _run_preset(preset, seed, trials, out, _map_kwargs(args))
    _write_manifest(out, {
        "tool": "risim", "version": _version(), "command": "run",
        "preset": args.preset, "ris": args.ris, "seed": seed,
        "trials": trials,
        "scenario_hash": {suffix or "base": sc.content_hash()
                          for suffix, sc in preset.variants},
        "files": files})
    print(f"wrote {', '.join(files + ['manifest.json'])} to {out}")
    return 0


def _sweep_values(args, scenario: Scenario) -> tuple[str, list[float]]:
    if args.sweep is None:
        for flag in ("start", "stop", "step"):
            if getattr(args, flag) is not None:
                raise ScenarioError("--from/--to/--step need --sweep")
        return "tx_power_dbm", [scenario.tx_power_dbm]
    if args.sweep not in SWEEP_VARIABLES:
        raise ScenarioError(f"unknown sweep variable {args.sweep!r}; "
                            f"choose from {SWEEP_VARIABLES}")
    if args.start is None or args.stop is None or args.step is None:
        raise ScenarioError("--sweep needs --from, --to, and --step")
    if args.step <= 0 or args.stop < args.start:
        raise ScenarioError("need --step > 0 and --to >= --from")
    values, v = [], args.start
    while v <= args.stop + 1e-9:
        values.append(round(v, 9))
        v += args.step
    return args.sweep, values


def cmd_sim(args) -> int:
    scenario = load_config(args.config)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    seed = scenario.seed
    if args.trials < 1:
        raise ScenarioError("trials must be >= 1")
    schemes = _parse_schemes(args.schemes) if args.schemes \
        else supported_schemes(scenario)
    for s in schemes:
        check_scheme_supported(scenario, s)
    variable, values = _sweep_values(args, scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = sweep(scenario, schemes, variable, values, args.trials,
                  seed=seed, map_kwargs=_map_kwargs(args))
    write_metrics_csv(out / "metrics.csv", table)
    files = ["metrics.csv"]
    if args.trajectory:
        rm = None
        if any(s in (SchemeId.LSRPA, SchemeId.RandomPhase) for s in schemes):
            rm = build_region_map(scenario, **_map_kwargs(args))
        rows = trajectory_snapshot(scenario, schemes, seed=seed,
                                   region_map=rm)
        _write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, rows)
        files.append("trajectory.csv")
    _write_manifest(out, {
        "tool": "risim", "version": _version(), "command": "sim",
        "config": str(args.config), "seed": seed, "trials": args.trials,
        "sweep": {"variable": variable,
                  "values": [float(v) for v in values]},
        "schemes": [s.value for s in schemes],
        "scenario_hash": {"base": scenario.content_hash()},
        "files": files})
    print(f"wrote {', '.join(files + ['manifest.json'])} to {out}")
    return 0


def cmd_regionmap(args) -> int:
    if (args.preset is None) == (args.config is None):
        raise ScenarioError("regionmap needs exactly one of --preset "
                            "or --config")
    if args.preset is not None:
        scenario = make_preset(args.preset, args.ris).base_scenario
        source = {"preset": args.preset, "ris": args.ris}
    else:
        scenario = load_config(args.config)
        source = {"config": str(args.config)}
    blockers = None
    if args.blockers:
        blockers = [float(tok) for tok in args.blockers.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rm = build_region_map(scenario, blocker_positions=blockers,
                          **_map_kwargs(args))
    _write_csv(out / "regionmap.csv", REGIONMAP_HEADER,
               map_to_figure_rows(rm))
    _write_manifest(out, {
        "tool": "risim", "version": _version(), "command": "regionmap",
        **source,
        "blockers": blockers,
        "scenario_hash": {"base": scenario.content_hash()},
        "files": ["regionmap.csv"]})
    print(f"wrote regionmap.csv, manifest.json to {out}")
    return 0


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="risim",
                     description="Highway blockage pre-avoidance simulator")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="run a named preset")
    run.add_argument("--preset", required=True, choices=PRESET_NAMES)
    run.add_argument("--ris", type=int, default=2,
                     help="panel count for fig2 (2 or 3)")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--trials", type=int, default=None,
                     help="trials per sweep value (preset default if unset)")
    run.add_argument("--out", required=True)
    run.add_argument("--grid-step", type=float, default=None,
                     help="region-map cell size in metres")
    run.set_defaults(func=cmd_run)

    sim = sub.add_parser("sim", help="run a custom scenario config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--sweep", default=None,
                     help=f"one of {', '.join(SWEEP_VARIABLES)}")
    sim.add_argument("--from", dest="start", type=float, default=None)
    sim.add_argument("--to", dest="stop", type=float, default=None)
    sim.add_argument("--step", type=float, default=None)
    sim.add_argument("--schemes", default=None,
                     help="comma-separated scheme names (default: all "
                          "the scenario supports)")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--trials", type=int, default=10)
    sim.add_argument("--trajectory", action="store_true",
                     help="also write per-slot trajectory.csv")
    sim.add_argument("--out", required=True)
    sim.add_argument("--grid-step", type=float, default=None)
    sim.set_defaults(func=cmd_sim)

    rmap = sub.add_parser("regionmap", help="build and export the map only")
    rmap.add_argument("--preset", choices=PRESET_NAMES, default=None)
    rmap.add_argument("--ris", type=int, default=2)
    rmap.add_argument("--config", default=None)
    rmap.add_argument("--blockers", default=None,
                      help="comma-separated blocker x positions")
    rmap.add_argument("--out", required=True)
    rmap.add_argument("--grid-step", type=float, default=None)
    rmap.set_defaults(func=cmd_regionmap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"risim: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"risim: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:                       # noqa: BLE001
        print(f"risim: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
