"""Canned experiments, one per reproduced figure.

Every preset fully determines a runnable experiment given a seed.  The
highway deployment they share: BS at the origin side of the road, two
repeater-equipped reflecting panels down the road, a truck overtaking
the UE on the neighbouring lane.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .scenario import (BlockerBox, ExtraBsSpec, ImpairmentSpec, Pose,
                       RepeaterSpec, RisSpec, Scenario, ScenarioError,
                       Sub6Spec, ris_x_for_hop)
from .schemes import SchemeId

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6")

ALL_SCHEMES = (SchemeId.LSRPA, SchemeId.Benchmark, SchemeId.RandomPhase,
               SchemeId.NoRisMmw, SchemeId.NoRisSub6,
               SchemeId.AdditionalBs, SchemeId.Repeater)

# Panel mount height/offset (shared by all presets): roadside gantry
# posts between the lanes' edge and the BS mast.
RIS_Y = 15.0
RIS_Z = 5.0
_BS = (0.0, 20.0, 10.0)


@dataclass(frozen=True)
class Preset:
    """A named experiment: scenario variants plus what to emit.

    variants maps a metrics-file suffix ("" for the base file) to a full
    scenario; sweep_variable None means no metrics table is produced.
    """

    name: str
    variants: tuple[tuple[str, Scenario], ...]
    schemes: tuple[SchemeId, ...]
    sweep_variable: str | None
    sweep_values: tuple[float, ...]
    default_trials: int
    trajectory: bool = False
    regionmap_blockers: tuple[float, ...] | None = None

    @property
    def base_scenario(self) -> Scenario:
        return self.variants[0][1]


def _ris(hop_m: float, n_elements: int) -> RisSpec:
    x = ris_x_for_hop(_BS, hop_m, RIS_Y, RIS_Z)
    return RisSpec(position=(x, RIS_Y, RIS_Z), n_elements=n_elements)


def _deployment(n_elements: int, n_ris: int) -> dict:
    hops = (200.0, 126.0, 150.0)[:n_ris]
    ris_list = tuple(_ris(h, n_elements) for h in hops)
    repeaters = tuple(RepeaterSpec(position=r.position, n_antennas=16,
                                   tx_power_dbm=32.0)
                      for r in ris_list[:2])
    return dict(
        bs_position=_BS, bs_antennas=16, ue_antennas=4,
        carrier_hz=28e9, bandwidth_hz=10e6, vpl_db=40.0,
        sub6=Sub6Spec(carrier_hz=2.8e9, bandwidth_hz=5e6, vpl_db=20.0,
                      bs_antennas=16),
        ris_list=ris_list, repeaters=repeaters,
        extra_bs=ExtraBsSpec(position=(1500.0, 20.0, 10.0), n_antennas=16),
        ue_start=Pose((120.0, 0.0, 1.5), (30.0, 0.0, 0.0)),
        blocker=BlockerBox(pose=Pose((100.0, 3.5, 2.0), (20.0, 0.0, 0.0))),
        n_slots=200, rate_threshold_bpshz=0.0)


def _impaired(scenario: Scenario) -> Scenario:
    return dataclasses.replace(
        scenario, impairments=ImpairmentSpec(enabled=True))


def make_preset(name: str, n_ris: int = 2) -> Preset:
    """Build a preset; n_ris (2 or 3) is honoured by fig2 only."""
    if name not in PRESET_NAMES:
        raise ScenarioError(
            f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    if n_ris not in (2, 3):
        raise ScenarioError("n_ris must be 2 or 3")

    if name == "fig2":
        sc = Scenario(**_deployment(200, n_ris))
        return Preset(
            name=name,
            variants=(("", sc), ("_impaired", _impaired(sc))),
            schemes=ALL_SCHEMES,
            sweep_variable="tx_power_dbm",
            sweep_values=tuple(float(p) for p in range(0, 51, 2)),
            default_trials=20)

    if name == "fig3":
        sc = Scenario(**_deployment(100, 2))
        sc = dataclasses.replace(
            sc, rate_threshold_bpshz=8.0,
            extra_bs=ExtraBsSpec(position=(5000.0, 20.0, 10.0),
                                 n_antennas=16))
        return Preset(
            name=name,
            variants=(("", sc),),
            schemes=ALL_SCHEMES,
            sweep_variable="tx_power_dbm",
            sweep_values=tuple(float(p) for p in range(0, 61, 2)),
            default_trials=20)

    if name == "fig4":
        sc = Scenario(**_deployment(200, 2))
        sc = dataclasses.replace(
            sc, tx_power_dbm=50.0, n_slots=500,
            ue_start=Pose((100.0, 0.0, 1.5), (30.0, 0.0, 0.0)),
            blocker=BlockerBox(pose=Pose((100.0, 3.5, 2.0),
                                         (15.0, 0.0, 0.0))))
        return Preset(
            name=name,
            variants=(("", sc),),
            schemes=(SchemeId.LSRPA, SchemeId.NoRisMmw),
            sweep_variable=None,
            sweep_values=(),
            default_trials=1,
            trajectory=True)

    if name == "fig5":
        sc = Scenario(**_deployment(200, 2))
        return Preset(
            name=name,
            variants=(("", sc),),
            schemes=(),
            sweep_variable=None,
            sweep_values=(),
            default_trials=1,
            regionmap_blockers=(132.0, 140.0, 148.0))

    # fig6: element sweep at fixed 15 dBm; the nearby secondary BS is the
    # bar the panel deployment has to clear.
    sc = Scenario(**_deployment(200, 2))
    sc = dataclasses.replace(
        sc, tx_power_dbm=15.0, bandwidth_hz=20e6,
        extra_bs=ExtraBsSpec(position=(280.0, 20.0, 10.0), n_antennas=16))
    sub6_sc = dataclasses.replace(
        sc, carrier_hz=2.8e9, bandwidth_hz=5e6, vpl_db=25.0, bs_antennas=8)
    return Preset(
        name=name,
        variants=(("", sc), ("_impaired", _impaired(sc)),
                  ("_sub6", sub6_sc), ("_sub6_impaired", _impaired(sub6_sc))),
        schemes=(SchemeId.LSRPA, SchemeId.AdditionalBs),
        sweep_variable="ris_elements",
        sweep_values=(10.0, 25.0, 50.0, 100.0, 200.0, 350.0, 500.0),
        default_trials=20)
