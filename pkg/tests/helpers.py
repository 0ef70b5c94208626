"""Shared test fixtures: small scenarios and independent re-implementations.

The brute-force functions here deliberately re-derive geometry and gain
math with their own code paths (dense segment sampling instead of slab
clipping, explicit dB arithmetic) so map/engine tests compare against an
independent oracle rather than the implementation calling itself.
"""

import math

import numpy as np

from risim.scenario import (BlockerBox, ExtraBsSpec, Pose, RepeaterSpec,
                            RisSpec, Scenario)


def small_scenario(**overrides) -> Scenario:
    """Fast everything-enabled deployment for unit tests."""
    defaults = dict(
        ris_list=(RisSpec(position=(199.875, 15.0, 5.0), n_elements=16),
                  RisSpec(position=(125.801, 15.0, 5.0), n_elements=16)),
        repeaters=(RepeaterSpec(position=(199.875, 15.0, 5.0)),),
        extra_bs=ExtraBsSpec(position=(1500.0, 20.0, 10.0)),
        ue_start=Pose((120.0, 0.0, 1.5), (30.0, 0.0, 0.0)),
        blocker=BlockerBox(pose=Pose((100.0, 3.5, 2.0), (20.0, 0.0, 0.0))),
        rate_threshold_bpshz=0.0,
        n_slots=20,
    )
    defaults.update(overrides)
    sc = Scenario(**defaults)
    sc.validate()
    return sc


def sampled_blocked(p, q, box, n_samples: int = 4001) -> bool:
    """Segment/box intersection by dense point sampling (independent path)."""
    if box is None:
        return False
    lo, hi = box.bounds()
    t = np.linspace(0.0, 1.0, n_samples)[:, None]
    pts = np.asarray(p, dtype=float) + t * (np.asarray(q, dtype=float)
                                            - np.asarray(p, dtype=float))
    inside = np.all((pts >= lo - 1e-12) & (pts <= hi + 1e-12), axis=1)
    return bool(inside.any())


def brute_force_cell_gains(scenario: Scenario, ue_x: float,
                           blocker_x: float | None) -> list[float]:
    """Re-derive the per-candidate large-scale gains from scratch."""
    f = scenario.carrier_hz
    ref = 20.0 * math.log10(4.0 * math.pi * f / 3.0e8)
    bs = scenario.bs_position
    ue = (ue_x, scenario.ue_start.position[1], scenario.ue_start.position[2])
    box = None if blocker_x is None else scenario.blocker.at_x(blocker_x)

    def dist(a, b):
        return math.dist(a, b)

    def pl(d, ref_db):
        return ref_db + 20.0 * math.log10(max(d, 1.0))

    gains = []
    vpl = scenario.vpl_db if sampled_blocked(bs, ue, box) else 0.0
    gains.append(-(pl(dist(bs, ue), ref) + vpl))
    for ris in scenario.ris_list:
        loss = pl(dist(bs, ris.position), scenario.channel.ris_hop_ref_db) \
            + pl(dist(ris.position, ue), scenario.channel.ris_hop_ref_db)
        if sampled_blocked(bs, ris.position, box):
            loss += scenario.vpl_db
        if sampled_blocked(ris.position, ue, box):
            loss += scenario.vpl_db
        gains.append(-loss + 20.0 * math.log10(ris.n_elements)
                     - scenario.channel.ris_proxy_penalty_db)
    return gains


def brute_force_assignment(scenario: Scenario, ue_grid,
                           blocker_xs) -> np.ndarray:
    """Independent argmax per cell; rows: sentinel no-blocker, then blockers."""
    rows = [None] + list(blocker_xs)
    out = np.zeros((len(rows), len(ue_grid)), dtype=int)
    for r, bx in enumerate(rows):
        for u, ux in enumerate(ue_grid):
            gains = brute_force_cell_gains(scenario, float(ux), bx)
            best = 0
            for i in range(1, len(gains)):
                if gains[i] > gains[best]:
                    best = i
            out[r, u] = best
    return out
