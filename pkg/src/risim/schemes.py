"""Serving schemes compared by the simulator.

Every scheme serves one slot from the same ChannelRealization, so
scheme-to-scheme comparisons are paired.  A SlotContext caches candidate
evaluations inside a slot: the genie scheme's evaluation of a candidate
is byte-identical to the pre-selection scheme's evaluation of the same
candidate, which keeps the per-slot dominance chain exact.

Schemes
-------
Benchmark     genie-aided: sounds direct + every panel, serves the argmax.
LSRPA         large-scale region pre-selection, sounds only that path.
RandomPhase   LSRPA's selection but uniform random panel phases.
NoRisMmw      direct mmWave link only, blockage loss applied when blocked.
NoRisSub6     direct link on the fallback sub-6 carrier/bandwidth.
AdditionalBs  max-rate handover between the two BSs.
Repeater      best amplify-and-forward relay, per-hop beamforming.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import phy
from .channel import ChannelRealization, noise_power_dbm
from .scenario import Scenario, ScenarioError


class SchemeId(enum.Enum):
    LSRPA = "LSRPA"
    Benchmark = "Benchmark"
    RandomPhase = "RandomPhase"
    NoRisMmw = "NoRisMmw"
    NoRisSub6 = "NoRisSub6"
    AdditionalBs = "AdditionalBs"
    Repeater = "Repeater"


@dataclass(frozen=True)
class PathCandidate:
    """A servable path: the direct link or one numbered relay node."""

    kind: str                  # "Direct" | "ViaRis" | "ViaRepeater" | "ViaExtraBs"
    index: int | None = None   # zero-based node index for relayed kinds

    @property
    def name(self) -> str:
        if self.kind == "Direct" or self.kind == "ViaExtraBs":
            return self.kind
        return f"{self.kind}{self.index + 1}"


DIRECT = PathCandidate("Direct")


@dataclass(frozen=True)
class Served:
    """Outcome of serving one slot with one scheme."""

    candidate: PathCandidate
    gamma: float
    se_bpshz: float
    rate_bps: float
    sounded_paths: int


class SlotContext:
    """Per-slot evaluation cache over one shared channel realization.

    Args:
        scenario: deployment under test.
        real: jointly drawn channels for this slot.
        region_map: lookup object with a ``lookup(ue_x, blocker_x)``
            method returning a PathCandidate (needed by LSRPA and
            RandomPhase only).
        predicted_ue_x / predicted_blocker_x: road coordinates the
            pre-selection stage believes in (blocker None = clear road).
        aux_rng: generator for scheme-side randomness (random phases,
            phase jitter); independent of the channel draws.
    """

    def __init__(self, scenario: Scenario, real: ChannelRealization,
                 region_map=None, predicted_ue_x: float | None = None,
                 predicted_blocker_x: float | None = None,
                 aux_rng: np.random.Generator | None = None):
        self.scenario = scenario
        self.real = real
        self.region_map = region_map
        self.predicted_ue_x = predicted_ue_x
        self.predicted_blocker_x = predicted_blocker_x
        self.aux_rng = aux_rng or np.random.default_rng(0)
        self._cache: dict[tuple, Served] = {}
        # All auxiliary randomness is drawn up front in panel order, so
        # the realized values cannot depend on which schemes run or in
        # what order they touch the cache.
        self._phase_noise: dict[int, np.ndarray] = {}
        self._random_phases: dict[int, np.ndarray] = {}
        for i, ris in enumerate(scenario.ris_list):
            if ris.phase_noise_bound > 0.0:
                self._phase_noise[i] = self.aux_rng.uniform(
                    -ris.phase_noise_bound, ris.phase_noise_bound,
                    size=ris.n_elements)
        for i, ris in enumerate(scenario.ris_list):
            self._random_phases[i] = self.aux_rng.uniform(
                0.0, 2.0 * np.pi, size=ris.n_elements)
        self.noise_dbm = noise_power_dbm(
            scenario.noise_psd_dbm_hz, scenario.bandwidth_hz,
            scenario.noise_figure_db)
        self.noise_sub6_dbm = noise_power_dbm(
            scenario.noise_psd_dbm_hz, scenario.sub6.bandwidth_hz,
            scenario.noise_figure_db)

    # Phase jitter is keyed by panel, not by scheme, so the genie and the
    # pre-selection scheme see the same imperfection on the same panel.
    def phase_noise_for(self, ris_index: int) -> np.ndarray | None:
        return self._phase_noise.get(ris_index)

    def _served(self, gain: float, candidate: PathCandidate, reflected: bool,
                sounded: int, sub6: bool = False,
                tx_power_dbm: float | None = None,
                gamma_override: float | None = None) -> Served:
        sc = self.scenario
        if gamma_override is not None:
            gamma = gamma_override
        else:
            power = sc.tx_power_dbm if tx_power_dbm is None else tx_power_dbm
            noise = self.noise_sub6_dbm if sub6 else self.noise_dbm
            imp = sc.impairments if reflected else None
            gamma = phy.sinr(gain, power, noise, imp)
        bw = sc.sub6.bandwidth_hz if sub6 else sc.bandwidth_hz
        se = phy.se_bpshz(gamma)
        overhead = min(sc.csit_overhead_per_path * sounded, 1.0)
        return Served(candidate=candidate, gamma=gamma, se_bpshz=se,
                      rate_bps=bw * se * (1.0 - overhead), sounded_paths=sounded)

    def eval_direct(self, sub6: bool = False) -> Served:
        key = ("direct", sub6)
        if key not in self._cache:
            mat = self.real.sub6_direct.matrix if sub6 else self.real.direct.matrix
            link = phy.optimize_beamforming(mat)
            self._cache[key] = self._served(
                link.effective_gain, DIRECT, reflected=False, sounded=1,
                sub6=sub6)
        return self._cache[key]

    def eval_ris(self, i: int) -> Served:
        key = ("ris", i)
        if key not in self._cache:
            link = phy.optimize_beamforming(
                self.real.direct.matrix,
                self.real.ris_inbound[i].matrix,
                self.real.ris_outbound[i].matrix)
            noise_vec = self.phase_noise_for(i)
            if noise_vec is not None:
                jittered = link.phases + noise_vec
                link = phy.beamform_fixed_phases(
                    self.real.direct.matrix,
                    self.real.ris_inbound[i].matrix,
                    self.real.ris_outbound[i].matrix, jittered)
            self._cache[key] = self._served(
                link.effective_gain, PathCandidate("ViaRis", i),
                reflected=True, sounded=1)
        return self._cache[key]

    def eval_ris_random_phases(self, i: int) -> Served:
        key = ("ris-random", i)
        if key not in self._cache:
            phases = self._random_phases[i]
            link = phy.beamform_fixed_phases(
                self.real.direct.matrix,
                self.real.ris_inbound[i].matrix,
                self.real.ris_outbound[i].matrix, phases)
            self._cache[key] = self._served(
                link.effective_gain, PathCandidate("ViaRis", i),
                reflected=True, sounded=1)
        return self._cache[key]

    def eval_extra_bs(self) -> Served:
        key = ("extra",)
        if key not in self._cache:
            link = phy.optimize_beamforming(self.real.extra_bs.matrix)
            self._cache[key] = self._served(
                link.effective_gain, PathCandidate("ViaExtraBs"),
                reflected=False, sounded=1)
        return self._cache[key]

    def eval_repeater(self, i: int) -> Served:
        key = ("rep", i)
        if key not in self._cache:
            sc = self.scenario
            hop1 = phy.optimize_beamforming(self.real.repeater_inbound[i].matrix)
            hop2 = phy.optimize_beamforming(self.real.repeater_outbound[i].matrix)
            g1 = phy.sinr(hop1.effective_gain, sc.tx_power_dbm, self.noise_dbm)
            g2 = phy.sinr(hop2.effective_gain,
                          sc.repeaters[i].tx_power_dbm, self.noise_dbm)
            gamma = phy.repeater_sinr(g1, g2)
            self._cache[key] = self._served(
                0.0, PathCandidate("ViaRepeater", i), reflected=False,
                sounded=2, gamma_override=gamma)
        return self._cache[key]


def check_scheme_supported(scenario: Scenario, scheme: SchemeId) -> None:
    """Hard config error when a scheme's required nodes are missing."""
    ris_schemes = (SchemeId.LSRPA, SchemeId.Benchmark, SchemeId.RandomPhase)
    if scheme in ris_schemes and not scenario.ris_list:
        raise ScenarioError(f"{scheme.value} requires at least one RIS")
    if scheme is SchemeId.AdditionalBs and scenario.extra_bs is None:
        raise ScenarioError("AdditionalBs requires an extra_bs entry")
    if scheme is SchemeId.Repeater and not scenario.repeaters:
        raise ScenarioError("Repeater requires at least one repeater")


def _argmax_served(options: list[Served]) -> Served:
    """First-listed wins ties, so order options by preference."""
    best = options[0]
    for s in options[1:]:
        if s.rate_bps > best.rate_bps:
            best = s
    return best


def decide_benchmark(ctx: SlotContext) -> Served:
    """Genie selection: sound everything, serve the instantaneous argmax.

    Ties break toward the direct link, then the lowest panel index.
    """
    options = [ctx.eval_direct()]
    options += [ctx.eval_ris(i) for i in range(len(ctx.scenario.ris_list))]
    chosen = _argmax_served(options)
    total_sounded = sum(o.sounded_paths for o in options)
    return _with_overhead(ctx, chosen, total_sounded)


def _with_overhead(ctx: SlotContext, served: Served, sounded: int) -> Served:
    if ctx.scenario.csit_overhead_per_path == 0.0:
        return served
    bw_se = served.rate_bps / (1.0 - min(
        ctx.scenario.csit_overhead_per_path * served.sounded_paths, 1.0))
    overhead = min(ctx.scenario.csit_overhead_per_path * sounded, 1.0)
    return Served(candidate=served.candidate, gamma=served.gamma,
                  se_bpshz=served.se_bpshz, rate_bps=bw_se * (1.0 - overhead),
                  sounded_paths=sounded)


def decide_lsrpa(ctx: SlotContext) -> PathCandidate:
    """Map lookup on the predicted UE / blocker road coordinates."""
    if ctx.region_map is None:
        raise ScenarioError("LSRPA requires a region map")
    return ctx.region_map.lookup(ctx.predicted_ue_x, ctx.predicted_blocker_x)


def serve_slot(ctx: SlotContext, scheme: SchemeId) -> Served:
    """Serve one slot with one scheme on the shared realization."""
    sc = ctx.scenario
    if scheme is SchemeId.Benchmark:
        return decide_benchmark(ctx)
    if scheme is SchemeId.LSRPA:
        cand = decide_lsrpa(ctx)
        if cand.kind == "ViaRis":
            return ctx.eval_ris(cand.index)
        return ctx.eval_direct()
    if scheme is SchemeId.RandomPhase:
        cand = decide_lsrpa(ctx)
        if cand.kind == "ViaRis":
            return ctx.eval_ris_random_phases(cand.index)
        return ctx.eval_direct()
    if scheme is SchemeId.NoRisMmw:
        return ctx.eval_direct()
    if scheme is SchemeId.NoRisSub6:
        return ctx.eval_direct(sub6=True)
    if scheme is SchemeId.AdditionalBs:
        if sc.extra_bs is None:
            raise ScenarioError("AdditionalBs scheme needs an extra_bs entry")
        options = [ctx.eval_direct(), ctx.eval_extra_bs()]
        chosen = _argmax_served(options)
        return _with_overhead(ctx, chosen, 2)
    if scheme is SchemeId.Repeater:
        if not sc.repeaters:
            raise ScenarioError("Repeater scheme needs at least one repeater")
        options = [ctx.eval_repeater(i) for i in range(len(sc.repeaters))]
        chosen = _argmax_served(options)
        return _with_overhead(ctx, chosen,
                              sum(o.sounded_paths for o in options))
    raise ScenarioError(f"unknown scheme {scheme}")
