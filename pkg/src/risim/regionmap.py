"""Pre-computed responsibility regions for blockage pre-avoidance.

For every (blocker cell, UE cell) pair on a road grid the map stores the
path candidate with the best deterministic large-scale gain: the direct
link or one of the reflecting panels.  A dedicated "no blocker" row
covers the clear-road case.  At run time the serving decision is a pure
table lookup on predicted road coordinates, which is what makes CSIT
acquisition on a single pre-selected path possible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import channel
from .scenario import Pose, Scenario, advance
from .schemes import DIRECT, PathCandidate


@dataclass(frozen=True)
class PredictionInput:
    """A mobility report: poses observed at the reporting instant."""

    ue: Pose
    blocker: Pose | None


def predict(report: PredictionInput, horizon_slots: int, slot_duration_s: float,
            noise_std_m: float = 0.0,
            rng: np.random.Generator | None = None
            ) -> tuple[float, float | None]:
    """Constant-velocity extrapolation of the reported poses.

    Returns predicted road (x) coordinates for the UE and the blocker
    (None when no blocker was reported).  Optional gaussian noise models
    imperfect reports.
    """
    dt = horizon_slots * slot_duration_s
    ue_x = advance(report.ue, dt).position[0]
    blocker_x = None
    if report.blocker is not None:
        blocker_x = advance(report.blocker, dt).position[0]
    if noise_std_m > 0.0:
        if rng is None:
            raise ValueError("noise_std_m > 0 needs an rng")
        ue_x += rng.normal(0.0, noise_std_m)
        if blocker_x is not None:
            blocker_x += rng.normal(0.0, noise_std_m)
    return ue_x, blocker_x


class RegionMap:
    """Lookup table from (blocker x, UE x) cells to a PathCandidate.

    assignment[0, :] is the no-blocker row; assignment[1 + i, :] belongs
    to blocker_grid[i].  Codes: 0 = Direct, 1 + r = panel r.
    """

    def __init__(self, ue_grid: np.ndarray, blocker_grid: np.ndarray,
                 assignment: np.ndarray, gains_db: np.ndarray,
                 scenario_hash: str):
        self.ue_grid = ue_grid
        self.blocker_grid = blocker_grid
        self.assignment = assignment
        self.gains_db = gains_db
        self.scenario_hash = scenario_hash

    @staticmethod
    def code_to_candidate(code: int) -> PathCandidate:
        return DIRECT if code == 0 else PathCandidate("ViaRis", code - 1)

    def _nearest(self, grid: np.ndarray, x: float) -> int:
        idx = int(np.argmin(np.abs(grid - x)))
        half = np.inf if len(grid) < 2 else (grid[1] - grid[0])
        if x < grid[0] - half or x > grid[-1] + half:
            channel.warnings["regionmap_clamped"] += 1
        return idx

    def lookup(self, ue_x: float, blocker_x: float | None) -> PathCandidate:
        """Clamped nearest-cell lookup; off-grid queries count a warning."""
        u = self._nearest(self.ue_grid, ue_x)
        row = 0 if blocker_x is None else 1 + self._nearest(self.blocker_grid,
                                                            blocker_x)
        return self.code_to_candidate(int(self.assignment[row, u]))

    def save(self, path) -> None:
        np.savez(path, ue_grid=self.ue_grid, blocker_grid=self.blocker_grid,
                 assignment=self.assignment, gains_db=self.gains_db,
                 meta=json.dumps({"scenario_hash": self.scenario_hash}))

    @staticmethod
    def load(path) -> "RegionMap":
        data = np.load(path, allow_pickle=False)
        meta = json.loads(str(data["meta"]))
        return RegionMap(data["ue_grid"], data["blocker_grid"],
                         data["assignment"], data["gains_db"],
                         meta["scenario_hash"])


def _cell_gains(scenario: Scenario, ue_pos, blocker) -> list[float]:
    gains = [channel.large_scale_gain_db(scenario, ue_pos, blocker)]
    for r in range(len(scenario.ris_list)):
        gains.append(channel.large_scale_gain_db(scenario, ue_pos, blocker,
                                                 ris_index=r))
    return gains


def _argmax_with_tiebreak(gains: list[float]) -> int:
    """Strictly-greater argmax, so Direct then lower panel indices win ties."""
    best = 0
    for i in range(1, len(gains)):
        if gains[i] > gains[best]:
            best = i
    return best


def _mc_gain_db(scenario: Scenario, ue_pos, blocker, draws: int,
                seed: int) -> list[float]:
    """Fading-averaged optimized gain per candidate, validation mode only."""
    from . import phy
    sums = np.zeros(1 + len(scenario.ris_list))
    ss = np.random.SeedSequence([seed, int(ue_pos[0] * 1000) & 0xFFFFFFFF])
    for d, child in enumerate(ss.spawn(draws)):
        real = channel.realize_channels(scenario, ue_pos, blocker, child)
        sums[0] += 10.0 * math.log10(
            phy.optimize_beamforming(real.direct.matrix).effective_gain)
        for r in range(len(scenario.ris_list)):
            link = phy.optimize_beamforming(real.direct.matrix,
                                            real.ris_inbound[r].matrix,
                                            real.ris_outbound[r].matrix)
            sums[1 + r] += 10.0 * math.log10(link.effective_gain)
    return list(sums / draws)


def build_region_map(scenario: Scenario, grid_step: float = 2.0,
                     x_range: tuple[float, float] = (0.0, 400.0),
                     blocker_positions=None, mc_average: bool = False,
                     mc_draws: int = 100, mc_seed: int = 0) -> RegionMap:
    """Assign the best candidate to every (blocker, UE) cell pair.

    Args:
        scenario: deployment; its blocker template supplies box size/lane.
        grid_step: cell pitch along the road for both grids.
        x_range: road stretch covered.
        blocker_positions: explicit blocker cell centers; None uses the
            same grid as the UE.
        mc_average: validate with fading-averaged optimized gains instead
            of the deterministic large-scale proxy (slow; small grids).
    """
    ue_grid = np.arange(x_range[0], x_range[1] + grid_step / 2.0, grid_step)
    if blocker_positions is None:
        blocker_grid = ue_grid.copy()
    else:
        blocker_grid = np.asarray(blocker_positions, dtype=float)
    n_cand = 1 + len(scenario.ris_list)
    assignment = np.zeros((1 + len(blocker_grid), len(ue_grid)), dtype=np.int16)
    gains_db = np.zeros_like(assignment, dtype=float)

    template = scenario.blocker
    ue_y, ue_z = scenario.ue_start.position[1], scenario.ue_start.position[2]
    for row in range(1 + len(blocker_grid)):
        if row == 0:
            blocker = None
        else:
            if template is None:
                blocker = None
            else:
                blocker = template.at_x(float(blocker_grid[row - 1]))
        for u, ue_x in enumerate(ue_grid):
            ue_pos = (float(ue_x), ue_y, ue_z)
            if mc_average:
                gains = _mc_gain_db(scenario, ue_pos, blocker, mc_draws, mc_seed)
            else:
                gains = _cell_gains(scenario, ue_pos, blocker)
            code = _argmax_with_tiebreak(gains)
            assignment[row, u] = code
            gains_db[row, u] = gains[code]
    assert assignment.max() < n_cand
    return RegionMap(ue_grid, blocker_grid, assignment, gains_db,
                     scenario.content_hash())


def map_to_figure_rows(region_map: RegionMap) -> list[tuple[float, float, str, float]]:
    """Flatten to (blocker_x, ue_x, candidate_name, gain_db) rows.

    Rows are ordered by blocker cell then UE cell; the no-blocker row is
    internal and not exported.
    """
    rows = []
    for b, bx in enumerate(region_map.blocker_grid):
        for u, ux in enumerate(region_map.ue_grid):
            cand = RegionMap.code_to_candidate(int(region_map.assignment[1 + b, u]))
            rows.append((float(bx), float(ux), cand.name,
                         float(region_map.gains_db[1 + b, u])))
    return rows


def cached_region_map(scenario: Scenario, cache_dir, **kwargs) -> RegionMap:
    """Build or reload the map for this scenario from a content-keyed file."""
    import hashlib
    from pathlib import Path
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key_src = scenario.content_hash() + repr(sorted(kwargs.items()))
    key = hashlib.sha256(key_src.encode()).hexdigest()[:16]
    path = cache_dir / f"regionmap_{key}.npz"
    if path.exists():
        cached = RegionMap.load(path)
        if cached.scenario_hash == scenario.content_hash():
            return cached
    built = build_region_map(scenario, **kwargs)
    built.save(path)
    return built
