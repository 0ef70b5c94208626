"""Scenario description for a highway segment served by a roadside BS.

Coordinate frame: x runs along the road, y across it, z is height in
meters.  A scenario bundles the radio parameters (carrier, bandwidth,
power, noise), the deployed nodes (BS, optional extra BS, RIS panels,
repeaters), the mobile UE and blocker start states, and the model knobs
used by the channel layer.  Everything is a frozen dataclass so runs can
be hashed and reproduced.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

Vec3 = tuple[float, float, float]


class ScenarioError(ValueError):
    """Raised when a scenario violates one of its invariants."""


@dataclass(frozen=True)
class Pose:
    """Position and constant velocity of a moving (or static) node."""

    position: Vec3
    velocity: Vec3 = (0.0, 0.0, 0.0)


def vec(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def advance(pose: Pose, dt: float) -> Pose:
    """Constant-velocity update: position + velocity * dt, velocity kept."""
    p = tuple(pose.position[i] + pose.velocity[i] * dt for i in range(3))
    return Pose(position=p, velocity=pose.velocity)


@dataclass(frozen=True)
class BlockerBox:
    """Axis-aligned box blocker (e.g. a truck), described by its center pose.

    length/width/height extend along x/y/z.  ``position`` is the box
    center, so a truck of height h standing on the road has z = h / 2.
    """

    pose: Pose
    length: float = 12.0
    width: float = 2.5
    height: float = 4.0

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        c = vec(self.pose.position)
        half = np.array([self.length, self.width, self.height]) / 2.0
        return c - half, c + half

    def at_x(self, x: float) -> "BlockerBox":
        """Same box shifted so its center sits at road coordinate x."""
        p = (x, self.pose.position[1], self.pose.position[2])
        return BlockerBox(pose=Pose(p, self.pose.velocity),
                          length=self.length, width=self.width, height=self.height)


def is_blocked(p, q, box: BlockerBox | None) -> bool:
    """Exact segment/box intersection test (slab method, closed surfaces).

    Returns True iff the straight segment p-q touches or passes through
    the box.  Grazing a face counts as blocked.
    """
    if box is None:
        return False
    lo, hi = box.bounds()
    p = vec(p)
    d = vec(q) - p
    t0, t1 = 0.0, 1.0
    for ax in range(3):
        if d[ax] == 0.0:
            if p[ax] < lo[ax] or p[ax] > hi[ax]:
                return False
            continue
        ta = (lo[ax] - p[ax]) / d[ax]
        tb = (hi[ax] - p[ax]) / d[ax]
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return False
    return True


@dataclass(frozen=True)
class RisSpec:
    """A passive reflecting panel with phase-only control."""

    position: Vec3
    n_elements: int = 200
    element_spacing: float = 0.5          # in wavelengths
    phase_noise_bound: float = 0.0        # radians, uniform +/- bound


@dataclass(frozen=True)
class RepeaterSpec:
    """Amplify-and-forward relay with its own transmit power budget."""

    position: Vec3
    n_antennas: int = 16
    tx_power_dbm: float = 32.0


@dataclass(frozen=True)
class ExtraBsSpec:
    """A second BS available for max-rate handover."""

    position: Vec3
    n_antennas: int = 16
    handover_penalty_slots: int = 0


@dataclass(frozen=True)
class Sub6Spec:
    """Fallback carrier used by the no-RIS sub-6 GHz comparison scheme."""

    carrier_hz: float = 2.8e9
    bandwidth_hz: float = 5e6
    vpl_db: float = 20.0
    bs_antennas: int | None = None        # None -> inherit the main BS count


@dataclass(frozen=True)
class ImpairmentSpec:
    """Residual transceiver distortion, applied to reflected paths."""

    kappa_tx: float = 0.05
    kappa_rx: float = 0.05
    enabled: bool = False

    @property
    def kappa_sq_sum(self) -> float:
        return self.kappa_tx ** 2 + self.kappa_rx ** 2


@dataclass(frozen=True)
class ChannelModel:
    """Large-scale and fading knobs shared by every link.

    Single-hop links (BS-UE, extra BS-UE, repeater hops) use a free-space
    1 m reference loss at the carrier frequency.  Reflected hops use the
    flat ``ris_hop_ref_db`` reference instead; see channel.path_loss_db.
    ``ris_proxy_penalty_db`` is the extra reflection margin charged to
    reflected paths in the deterministic region-map gain only.
    """

    exponent_direct: float = 2.0
    exponent_ris: float = 2.0
    exponent_repeater: float = 2.0
    k_direct_db: float = 6.0
    k_ris_db: float = 10.0
    k_repeater_db: float = 10.0
    ris_hop_ref_db: float = 35.0
    ris_proxy_penalty_db: float = 20.0


@dataclass(frozen=True)
class PredictionSpec:
    """How the pre-selection stage sees the future: reports every
    ``report_interval_slots`` slots, looks ``horizon_slots`` ahead, and
    optionally corrupts predicted road coordinates with gaussian noise."""

    horizon_slots: int = 10
    report_interval_slots: int = 1
    noise_std_m: float = 0.0


@dataclass(frozen=True)
class Scenario:
    carrier_hz: float = 28e9
    bandwidth_hz: float = 10e6
    tx_power_dbm: float = 30.0

    bs_position: Vec3 = (0.0, 20.0, 10.0)
    bs_antennas: int = 16
    ue_antennas: int = 4
    ue_start: Pose = Pose((120.0, 0.0, 1.5), (30.0, 0.0, 0.0))

    ris_list: tuple[RisSpec, ...] = ()
    repeaters: tuple[RepeaterSpec, ...] = ()
    extra_bs: ExtraBsSpec | None = None
    sub6: Sub6Spec = Sub6Spec()

    blocker: BlockerBox | None = BlockerBox(
        pose=Pose((100.0, 3.5, 2.0), (20.0, 0.0, 0.0)))

    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    vpl_db: float = 40.0
    rate_threshold_bpshz: float = 8.0
    # Slots above threshold deliver the Shannon rate; fixed_rate_mode
    # instead delivers exactly threshold * bandwidth per good slot.
    fixed_rate_mode: bool = False
    slot_duration_s: float = 0.01
    n_slots: int = 200

    impairments: ImpairmentSpec = ImpairmentSpec()
    channel: ChannelModel = ChannelModel()
    prediction: PredictionSpec = PredictionSpec()
    csit_overhead_per_path: float = 0.0   # fraction of a slot per sounded path

    seed: int = 1

    def validate(self) -> None:
        """Raise ScenarioError naming the first violated invariant."""
        if self.carrier_hz <= 0:
            raise ScenarioError("carrier_hz must be positive")
        if self.bandwidth_hz <= 0:
            raise ScenarioError("bandwidth_hz must be positive")
        if self.bs_antennas < 1 or self.ue_antennas < 1:
            raise ScenarioError("antenna counts must be >= 1")
        if self.vpl_db < 0 or self.sub6.vpl_db < 0:
            raise ScenarioError("vpl_db must be >= 0")
        if self.rate_threshold_bpshz < 0:
            raise ScenarioError("rate_threshold_bpshz must be >= 0")
        if self.slot_duration_s <= 0:
            raise ScenarioError("slot_duration_s must be positive")
        if self.n_slots < 1:
            raise ScenarioError("n_slots must be >= 1")
        if not 0.0 <= self.csit_overhead_per_path < 1.0:
            raise ScenarioError("csit_overhead_per_path must be in [0, 1)")
        if self.impairments.kappa_tx < 0 or self.impairments.kappa_rx < 0:
            raise ScenarioError("impairment kappas must be >= 0")
        for i, ris in enumerate(self.ris_list):
            if ris.n_elements < 1:
                raise ScenarioError(f"ris[{i}].n_elements must be >= 1")
            if ris.element_spacing <= 0:
                raise ScenarioError(f"ris[{i}].element_spacing must be positive")
            if not 0.0 <= ris.phase_noise_bound <= math.pi:
                raise ScenarioError(
                    f"ris[{i}].phase_noise_bound must be in [0, pi]")
        for i, rep in enumerate(self.repeaters):
            if rep.n_antennas < 1:
                raise ScenarioError(f"repeater[{i}].n_antennas must be >= 1")
        if self.extra_bs is not None and self.extra_bs.n_antennas < 1:
            raise ScenarioError("extra_bs.n_antennas must be >= 1")
        if self.prediction.horizon_slots < 0:
            raise ScenarioError("prediction.horizon_slots must be >= 0")
        if self.prediction.report_interval_slots < 1:
            raise ScenarioError("prediction.report_interval_slots must be >= 1")

    def sub6_bs_antennas(self) -> int:
        return self.sub6.bs_antennas if self.sub6.bs_antennas is not None \
            else self.bs_antennas

    def content_hash(self) -> str:
        """Stable hash of every field, for caches and run manifests."""
        blob = json.dumps(asdict(self), sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class LinkBlockage:
    """Per-link blockage flags for one UE position and blocker state."""

    direct: bool
    ris_inbound: tuple[bool, ...]
    ris_outbound: tuple[bool, ...]
    repeater_inbound: tuple[bool, ...]
    repeater_outbound: tuple[bool, ...]
    extra_bs: bool


def los_state(scenario: Scenario, ue_pos, blocker: BlockerBox | None) -> LinkBlockage:
    """Evaluate is_blocked for every link of the scenario.

    Args:
        scenario: deployment under test.
        ue_pos: UE position, length-3.
        blocker: box to test against, or None for a clear road.
    """
    bs = scenario.bs_position
    return LinkBlockage(
        direct=is_blocked(bs, ue_pos, blocker),
        ris_inbound=tuple(is_blocked(bs, r.position, blocker)
                          for r in scenario.ris_list),
        ris_outbound=tuple(is_blocked(r.position, ue_pos, blocker)
                           for r in scenario.ris_list),
        repeater_inbound=tuple(is_blocked(bs, r.position, blocker)
                               for r in scenario.repeaters),
        repeater_outbound=tuple(is_blocked(r.position, ue_pos, blocker)
                                for r in scenario.repeaters),
        extra_bs=(is_blocked(scenario.extra_bs.position, ue_pos, blocker)
                  if scenario.extra_bs is not None else False),
    )


def ris_x_for_hop(bs_position: Vec3, hop_m: float, y: float = 15.0,
                  z: float = 5.0) -> float:
    """Road coordinate that places a roadside node exactly hop_m from the BS."""
    dy = bs_position[1] - y
    dz = bs_position[2] - z
    arg = hop_m ** 2 - dy ** 2 - dz ** 2
    if arg <= 0:
        raise ScenarioError("hop distance shorter than the lateral offset")
    return bs_position[0] + math.sqrt(arg)
