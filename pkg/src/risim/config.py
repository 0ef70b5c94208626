"""Scenario configuration files.

TOML, flat keys plus repeated [[ris]] blocks.  Every key is optional and
defaults to the Scenario default; unknown keys anywhere are hard errors.

Top level:
  carrier_hz, bandwidth_hz, tx_power_dbm, noise_psd_dbm_hz,
  noise_figure_db, vpl_db, rate_threshold_bpshz, fixed_rate_mode,
  slot_duration_s, n_slots, csit_overhead_per_path, seed,
  bs_position = [x, y, z], bs_antennas, ue_antennas

Sections:
  [ue]          start = [x,y,z], velocity = [vx,vy,vz]
  [blocker]     present (false drops the blocker), center, velocity,
                length, width, height
  [sub6]        carrier_hz, bandwidth_hz, vpl_db, bs_antennas
  [impairments] kappa_tx, kappa_rx, enabled
  [channel]     exponent_direct, exponent_ris, exponent_repeater,
                k_direct_db, k_ris_db, k_repeater_db, ris_hop_ref_db,
                ris_proxy_penalty_db
  [prediction]  horizon_slots, report_interval_slots, noise_std_m
  [extra_bs]    position, n_antennas, handover_penalty_slots
  [[ris]]       position, n_elements, element_spacing, phase_noise_bound
  [[repeater]]  position, n_antennas, tx_power_dbm
"""

from __future__ import annotations

import dataclasses

try:
    import tomllib
except ModuleNotFoundError:                        # Python < 3.11
    import tomli as tomllib

from .scenario import (BlockerBox, ChannelModel, ExtraBsSpec,
                       ImpairmentSpec, Pose, PredictionSpec, RepeaterSpec,
                       RisSpec, Scenario, ScenarioError, Sub6Spec)


class ConfigError(ScenarioError):
    """Malformed or unknown configuration content."""


def _vec3(value, where: str) -> tuple[float, float, float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 3
            or not all(isinstance(v, (int, float)) for v in value)):
        raise ConfigError(f"{where} must be a list of three numbers")
    return (float(value[0]), float(value[1]), float(value[2]))


def _reject_unknown(data: dict, allowed, where: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _fill(cls, data: dict, where: str, vec_fields=(), **fixed):
    """Instantiate a spec dataclass from a TOML table, strictly."""
    names = [f.name for f in dataclasses.fields(cls)
             if f.name not in fixed]
    _reject_unknown(data, names, where)
    kwargs = dict(fixed)
    for name in names:
        if name in data:
            value = data[name]
            kwargs[name] = _vec3(value, f"{where}.{name}") \
                if name in vec_fields else value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad value in {where}: {exc}") from exc


_TOP_SCALARS = ("carrier_hz", "bandwidth_hz", "tx_power_dbm",
                "noise_psd_dbm_hz", "noise_figure_db", "vpl_db",
                "rate_threshold_bpshz", "fixed_rate_mode",
                "slot_duration_s", "n_slots", "csit_overhead_per_path",
                "seed", "bs_antennas", "ue_antennas")
_SECTIONS = ("ue", "blocker", "sub6", "impairments", "channel",
             "prediction", "extra_bs", "ris", "repeater")


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a Scenario from parsed TOML content."""
    _reject_unknown(data, _TOP_SCALARS + _SECTIONS + ("bs_position",),
                    "top level")
    kwargs = {}
    for key in _TOP_SCALARS:
        if key in data:
            kwargs[key] = data[key]
    if "bs_position" in data:
        kwargs["bs_position"] = _vec3(data["bs_position"], "bs_position")

    if "ue" in data:
        ue = dict(data["ue"])
        _reject_unknown(ue, ("start", "velocity"), "[ue]")
        start = _vec3(ue.get("start", (120.0, 0.0, 1.5)), "ue.start")
        vel = _vec3(ue.get("velocity", (30.0, 0.0, 0.0)), "ue.velocity")
        kwargs["ue_start"] = Pose(start, vel)

    if "blocker" in data:
        blk = dict(data["blocker"])
        _reject_unknown(blk, ("present", "center", "velocity", "length",
                              "width", "height"), "[blocker]")
        if not blk.pop("present", True):
            kwargs["blocker"] = None
        else:
            center = _vec3(blk.pop("center", (100.0, 3.5, 2.0)),
                           "blocker.center")
            vel = _vec3(blk.pop("velocity", (20.0, 0.0, 0.0)),
                        "blocker.velocity")
            kwargs["blocker"] = _fill(BlockerBox, blk, "[blocker]",
                                      pose=Pose(center, vel))

    if "sub6" in data:
        kwargs["sub6"] = _fill(Sub6Spec, dict(data["sub6"]), "[sub6]")
    if "impairments" in data:
        kwargs["impairments"] = _fill(ImpairmentSpec,
                                      dict(data["impairments"]),
                                      "[impairments]")
    if "channel" in data:
        kwargs["channel"] = _fill(ChannelModel, dict(data["channel"]),
                                  "[channel]")
    if "prediction" in data:
        kwargs["prediction"] = _fill(PredictionSpec,
                                     dict(data["prediction"]),
                                     "[prediction]")
    if "extra_bs" in data:
        kwargs["extra_bs"] = _fill(ExtraBsSpec, dict(data["extra_bs"]),
                                   "[extra_bs]", vec_fields=("position",))

    ris_blocks = data.get("ris", [])
    if not isinstance(ris_blocks, list):
        raise ConfigError("[[ris]] must be an array of tables")
    kwargs["ris_list"] = tuple(
        _fill(RisSpec, dict(block), f"[[ris]] #{i + 1}",
              vec_fields=("position",))
        for i, block in enumerate(ris_blocks))

    rep_blocks = data.get("repeater", [])
    if not isinstance(rep_blocks, list):
        raise ConfigError("[[repeater]] must be an array of tables")
    kwargs["repeaters"] = tuple(
        _fill(RepeaterSpec, dict(block), f"[[repeater]] #{i + 1}",
              vec_fields=("position",))
        for i, block in enumerate(rep_blocks))

    scenario = Scenario(**kwargs)
    scenario.validate()
    return scenario


def load_config(path) -> Scenario:
    """Parse, build, and validate a scenario from a TOML file."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc
    return scenario_from_dict(data)
