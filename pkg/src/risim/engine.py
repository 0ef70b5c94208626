"""Monte Carlo slot loop, metric aggregation, and parameter sweeps.

Common random numbers: all channel and auxiliary draws for a slot derive
from (master seed, trial index, slot index) only.  The swept parameter
and the scheme set never enter the stream derivation, so scheme
comparisons are paired pathwise and parameter curves are free of
inter-point Monte Carlo jitter.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import channel
from .regionmap import PredictionInput, RegionMap, build_region_map, predict
from .scenario import (BlockerBox, Scenario, ScenarioError, advance,
                       los_state)
from .schemes import (SchemeId, PathCandidate, SlotContext,
                      check_scheme_supported, serve_slot)

SWEEP_VARIABLES = ("tx_power_dbm", "ris_elements", "phase_noise_bound",
                   "vpl_db")

MAP_SCHEMES = (SchemeId.LSRPA, SchemeId.RandomPhase)


@dataclass(frozen=True)
class SlotResult:
    slot: int
    scheme: SchemeId
    path: PathCandidate
    spectral_efficiency: float
    rate_bps: float
    outage: bool
    blocked_direct: bool


class Aggregate:
    """Mergeable running sums over slot results.

    Slots in outage deliver zero bits; merging two batches reproduces the
    unsplit aggregate exactly because only raw sums are stored.
    """

    def __init__(self):
        self.n_slots = 0
        self.outage_slots = 0
        self.sum_rate = 0.0
        self.sum_rate_sq = 0.0
        self.sum_se = 0.0

    def add(self, result: SlotResult, delivered_bps: float | None = None):
        if delivered_bps is None:
            delivered_bps = 0.0 if result.outage else result.rate_bps
        self.n_slots += 1
        self.outage_slots += int(result.outage)
        self.sum_rate += delivered_bps
        self.sum_rate_sq += delivered_bps * delivered_bps
        self.sum_se += 0.0 if result.outage else result.spectral_efficiency

    def merge(self, other: "Aggregate") -> "Aggregate":
        self.n_slots += other.n_slots
        self.outage_slots += other.outage_slots
        self.sum_rate += other.sum_rate
        self.sum_rate_sq += other.sum_rate_sq
        self.sum_se += other.sum_se
        return self

    @property
    def throughput_bps(self) -> float:
        return self.sum_rate / self.n_slots if self.n_slots else 0.0

    @property
    def outage_prob(self) -> float:
        return self.outage_slots / self.n_slots if self.n_slots else 0.0

    @property
    def mean_se_bpshz(self) -> float:
        return self.sum_se / self.n_slots if self.n_slots else 0.0

    @property
    def ci_halfwidth_bps(self) -> float:
        if self.n_slots < 2:
            return 0.0
        var = (self.sum_rate_sq - self.sum_rate ** 2 / self.n_slots) \
            / (self.n_slots - 1)
        return 1.96 * math.sqrt(max(var, 0.0) / self.n_slots)


def aggregate(results: list[SlotResult],
              scenario: Scenario | None = None) -> Aggregate:
    """Fold slot results into one Aggregate (optionally fixed-rate mode)."""
    if not results:
        raise ScenarioError("aggregate needs at least one slot result")
    agg = Aggregate()
    for r in results:
        agg.add(r, _delivered(r, scenario))
    return agg


def _delivered(result: SlotResult, scenario: Scenario | None) -> float | None:
    if scenario is None or not scenario.fixed_rate_mode:
        return None
    if result.outage:
        return 0.0
    bw = scenario.sub6.bandwidth_hz if result.scheme is SchemeId.NoRisSub6 \
        else scenario.bandwidth_hz
    return scenario.rate_threshold_bpshz * bw


@dataclass(frozen=True)
class MetricsTable:
    """Aggregated sweep output, one row per (value, scheme).

    Row layout matches the CSV contract: (sweep value, scheme name,
    throughput bit/s, outage probability, mean spectral efficiency,
    slots counted, 95% confidence half-width in bit/s).
    """

    sweep_name: str
    rows: tuple[tuple[float, str, float, float, float, int, float], ...]


def _blocker_at(scenario: Scenario, t_s: float) -> BlockerBox | None:
    if scenario.blocker is None:
        return None
    return dataclasses.replace(scenario.blocker,
                               pose=advance(scenario.blocker.pose, t_s))


def run_trial(scenario: Scenario, schemes, trial_seed,
              region_map: RegionMap | None = None
              ) -> dict[SchemeId, list[SlotResult]]:
    """Simulate one trial, serving every slot with every scheme.

    All schemes share each slot's channel realization and auxiliary
    draws.  trial_seed is an int or a SeedSequence; identical seeds give
    identical results regardless of the scheme subset.
    """
    schemes = list(schemes)
    for s in schemes:
        check_scheme_supported(scenario, s)
    if region_map is None and any(s in MAP_SCHEMES for s in schemes):
        raise ScenarioError("LSRPA and RandomPhase need a region map")

    if isinstance(trial_seed, np.random.SeedSequence):
        root = trial_seed
    else:
        root = np.random.SeedSequence(trial_seed)
    slot_seeds = root.spawn(scenario.n_slots)

    dt = scenario.slot_duration_s
    pred = scenario.prediction
    results: dict[SchemeId, list[SlotResult]] = {s: [] for s in schemes}
    penalty_left = 0
    last_add_path: str | None = None

    for t in range(scenario.n_slots):
        ch_seed, aux_seed, pred_seed = slot_seeds[t].spawn(3)
        now = t * dt
        ue = advance(scenario.ue_start, now)
        blocker = _blocker_at(scenario, now)

        report_slot = (max(0, t - pred.horizon_slots)
                       // pred.report_interval_slots) * pred.report_interval_slots
        report = PredictionInput(
            ue=advance(scenario.ue_start, report_slot * dt),
            blocker=None if scenario.blocker is None
            else advance(scenario.blocker.pose, report_slot * dt))
        pred_rng = np.random.default_rng(pred_seed) if pred.noise_std_m > 0 \
            else None
        pred_ue_x, pred_blk_x = predict(report, t - report_slot, dt,
                                        pred.noise_std_m, pred_rng)

        real = channel.realize_channels(scenario, ue.position, blocker,
                                        ch_seed)
        ctx = SlotContext(scenario, real, region_map, pred_ue_x, pred_blk_x,
                          np.random.default_rng(aux_seed))
        blocked_direct = real.direct.blocked

        for s in schemes:
            served = serve_slot(ctx, s)
            se, rate = served.se_bpshz, served.rate_bps
            if s is SchemeId.AdditionalBs and scenario.extra_bs is not None \
                    and scenario.extra_bs.handover_penalty_slots > 0:
                if last_add_path is not None \
                        and served.candidate.name != last_add_path:
                    penalty_left = scenario.extra_bs.handover_penalty_slots
                last_add_path = served.candidate.name
                if penalty_left > 0:
                    penalty_left -= 1
                    se, rate = 0.0, 0.0
            results[s].append(SlotResult(
                slot=t, scheme=s, path=served.candidate,
                spectral_efficiency=se, rate_bps=rate,
                outage=se < scenario.rate_threshold_bpshz,
                blocked_direct=blocked_direct))
    return results


def apply_sweep_value(scenario: Scenario, variable: str,
                      value: float) -> Scenario:
    """Return a scenario copy with one swept knob replaced."""
    if variable == "tx_power_dbm":
        return dataclasses.replace(scenario, tx_power_dbm=float(value))
    if variable == "vpl_db":
        return dataclasses.replace(scenario, vpl_db=float(value))
    if variable == "ris_elements":
        ris = tuple(dataclasses.replace(r, n_elements=int(value))
                    for r in scenario.ris_list)
        return dataclasses.replace(scenario, ris_list=ris)
    if variable == "phase_noise_bound":
        ris = tuple(dataclasses.replace(r, phase_noise_bound=float(value))
                    for r in scenario.ris_list)
        return dataclasses.replace(scenario, ris_list=ris)
    raise ScenarioError(f"unknown sweep variable {variable!r}; "
                        f"choose from {SWEEP_VARIABLES}")


def _map_key(scenario: Scenario) -> tuple:
    """Fields the region map depends on; tx power is deliberately absent."""
    return (scenario.bs_position,
            tuple((r.position, r.n_elements) for r in scenario.ris_list),
            None if scenario.blocker is None else
            (scenario.blocker.pose.position[1], scenario.blocker.pose.position[2],
             scenario.blocker.length, scenario.blocker.width,
             scenario.blocker.height),
            scenario.ue_start.position[1], scenario.ue_start.position[2],
            scenario.carrier_hz, scenario.vpl_db,
            dataclasses.astuple(scenario.channel))


def sweep(scenario: Scenario, schemes, variable: str, values, trials: int,
          seed: int | None = None, region_map: RegionMap | None = None,
          map_kwargs: dict | None = None) -> MetricsTable:
    """Run trials for every swept value and aggregate per scheme.

    The trial substream depends on (seed, trial) only, shared across
    values and schemes.  The region map is rebuilt only when the swept
    knob actually changes it (element counts do, transmit power does
    not); an explicitly passed map is used as-is.
    """
    schemes = list(schemes)
    values = list(values)
    if not values:
        raise ScenarioError("sweep needs at least one value")
    if trials < 1:
        raise ScenarioError("trials must be >= 1")
    master = scenario.seed if seed is None else seed

    needs_map = any(s in MAP_SCHEMES for s in schemes)
    built_maps: dict[tuple, RegionMap] = {}
    rows = []
    for value in values:
        sc = apply_sweep_value(scenario, variable, value)
        sc.validate()
        rm = region_map
        if rm is None and needs_map:
            key = _map_key(sc)
            if key not in built_maps:
                built_maps[key] = build_region_map(sc, **(map_kwargs or {}))
            rm = built_maps[key]
        aggs = {s: Aggregate() for s in schemes}
        for trial in range(trials):
            trial_ss = np.random.SeedSequence([master, trial])
            res = run_trial(sc, schemes, trial_ss, rm)
            for s in schemes:
                for r in res[s]:
                    aggs[s].add(r, _delivered(r, sc))
        for s in schemes:
            a = aggs[s]
            rows.append((float(value), s.value, a.throughput_bps,
                         a.outage_prob, a.mean_se_bpshz, a.n_slots,
                         a.ci_halfwidth_bps))
    return MetricsTable(sweep_name=variable, rows=tuple(rows))


def trajectory_snapshot(scenario: Scenario, schemes, seed: int | None = None,
                        region_map: RegionMap | None = None,
                        include_unblocked_ref: bool = True) -> list[tuple]:
    """Per-slot rates for one shared trajectory, for timeline plots.

    Rows: (slot, time_s, ue_x, blocker_x, direct_blocked, scheme name,
    path name, se, rate, outage).  The UnblockedRef rows replay the same
    seeds on a blocker-free copy of the scenario, giving the clear-road
    direct-link rate for the same fading draws.
    """
    schemes = list(schemes)
    master = scenario.seed if seed is None else seed
    trial_ss = np.random.SeedSequence([master, 0])
    res = run_trial(scenario, schemes, trial_ss, region_map)

    rows = []
    dt = scenario.slot_duration_s
    for t in range(scenario.n_slots):
        ue_x = advance(scenario.ue_start, t * dt).position[0]
        blk = _blocker_at(scenario, t * dt)
        blk_x = math.nan if blk is None else blk.pose.position[0]
        for s in schemes:
            r = res[s][t]
            rows.append((t, t * dt, ue_x, blk_x, int(r.blocked_direct),
                         s.value, r.path.name, r.spectral_efficiency,
                         r.rate_bps, int(r.outage)))
    if include_unblocked_ref:
        clear = dataclasses.replace(scenario, blocker=None)
        ref = run_trial(clear, [SchemeId.NoRisMmw],
                        np.random.SeedSequence([master, 0]))
        for t, r in enumerate(ref[SchemeId.NoRisMmw]):
            ue_x = advance(scenario.ue_start, t * dt).position[0]
            rows.append((t, t * dt, ue_x, math.nan, 0, "UnblockedRef",
                         r.path.name, r.spectral_efficiency, r.rate_bps,
                         int(r.outage)))
    return rows
