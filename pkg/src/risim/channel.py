"""Link-level channel synthesis: path loss, Rician fading, blockage loss.

Conventions
-----------
* Matrices are (n_rx, n_tx) and already scaled by the linear amplitude
  gain, i.e. ``10 ** (-(path_loss + vpl) / 20)`` times a fading matrix
  whose entries have unit second moment.
* Single-hop links between full transceivers (BS-UE, extra BS-UE and
  both repeater hops) use the free-space 1 m reference
  ``20 log10(4 pi f / c)``.  Hops that terminate on a passive reflecting
  panel use the flat ``ris_hop_ref_db`` reference from the scenario's
  ChannelModel instead; the panel is an engineered short-range aperture
  and the free-space reference applied twice makes the cascaded budget
  unusable at any panel size of interest.
* Arrays are uniform linear along the road axis (x), half-wavelength
  spacing unless configured otherwise.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .scenario import BlockerBox, RisSpec, Scenario, is_blocked, vec

SPEED_OF_LIGHT = 3.0e8

# Counts of soft anomalies (sub-meter distances clamped, off-grid lookups).
warnings = Counter()


def reset_warnings() -> None:
    warnings.clear()


def path_loss_db(distance_m: float, carrier_hz: float, exponent: float,
                 ref_db: float | None = None) -> float:
    """Log-distance path loss in dB.

    Args:
        distance_m: link length; values below 1 m are clamped to 1 m and
            counted in ``warnings['distance_clamped']``.
        carrier_hz: carrier frequency, only used for the free-space
            reference term.
        exponent: path-loss exponent.
        ref_db: optional override of the 1 m reference loss.  None means
            the free-space value 20 log10(4 pi f / c).
    """
    if distance_m < 1.0:
        warnings["distance_clamped"] += 1
        distance_m = 1.0
    if ref_db is None:
        ref_db = 20.0 * math.log10(4.0 * math.pi * carrier_hz / SPEED_OF_LIGHT)
    return ref_db + 10.0 * exponent * math.log10(distance_m)


def noise_power_dbm(psd_dbm_hz: float, bandwidth_hz: float,
                    noise_figure_db: float) -> float:
    """Thermal noise power over a bandwidth, including the receiver NF."""
    return psd_dbm_hz + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def ula_steering(n: int, direction_cos: float, spacing: float = 0.5) -> np.ndarray:
    """Steering vector of an n-element ULA along x, unit-modulus entries."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * spacing * idx * direction_cos)


def draw_fading(n_rx: int, n_tx: int, k_factor_db: float, rx_cos: float,
                tx_cos: float, rng: np.random.Generator,
                spacing: float = 0.5) -> np.ndarray:
    """Rician fading matrix with E|h_ij|^2 = 1.

    The line-of-sight part is the outer product of the two steering
    vectors; the diffuse part is i.i.d. CN(0, 1).  k_factor_db = inf
    returns the pure LoS matrix.
    """
    a_rx = ula_steering(n_rx, rx_cos, spacing)
    a_tx = ula_steering(n_tx, tx_cos, spacing)
    los = np.outer(a_rx, a_tx.conj())
    if math.isinf(k_factor_db):
        return los
    k = db_to_linear(k_factor_db)
    nlos = (rng.standard_normal((n_rx, n_tx))
            + 1j * rng.standard_normal((n_rx, n_tx))) / math.sqrt(2.0)
    return math.sqrt(k / (k + 1.0)) * los + math.sqrt(1.0 / (k + 1.0)) * nlos


@dataclass(frozen=True)
class LinkChannel:
    """One realized hop: scaled matrix plus large-scale bookkeeping."""

    matrix: np.ndarray
    path_loss_db: float
    blocked: bool
    vpl_db: float

    @property
    def gain_db(self) -> float:
        return -(self.path_loss_db + (self.vpl_db if self.blocked else 0.0))


@dataclass(frozen=True)
class ChannelRealization:
    """Every hop the schemes may serve in one slot, drawn jointly.

    Each link gets its own spawned rng stream, so the realization does
    not depend on which links a caller ends up using.
    """

    direct: LinkChannel
    sub6_direct: LinkChannel
    ris_inbound: tuple[LinkChannel, ...]
    ris_outbound: tuple[LinkChannel, ...]
    repeater_inbound: tuple[LinkChannel, ...]
    repeater_outbound: tuple[LinkChannel, ...]
    extra_bs: LinkChannel | None


def _link_geometry(a, b) -> tuple[float, float, float]:
    """Distance plus departure/arrival direction cosines along x."""
    a = vec(a)
    b = vec(b)
    d = float(np.linalg.norm(b - a))
    if d == 0.0:
        return 0.0, 0.0, 0.0
    cos_dep = (b[0] - a[0]) / d
    return d, cos_dep, -cos_dep


def _realize_link(a, b, n_rx: int, n_tx: int, carrier_hz: float,
                  exponent: float, k_db: float, blocked: bool, vpl_db: float,
                  rng: np.random.Generator, ref_db: float | None = None,
                  spacing: float = 0.5) -> LinkChannel:
    d, cos_dep, cos_arr = _link_geometry(a, b)
    pl = path_loss_db(d, carrier_hz, exponent, ref_db)
    fading = draw_fading(n_rx, n_tx, k_db, cos_arr, cos_dep, rng, spacing)
    amp = 10.0 ** (-(pl + (vpl_db if blocked else 0.0)) / 20.0)
    return LinkChannel(matrix=amp * fading, path_loss_db=pl,
                       blocked=blocked, vpl_db=vpl_db)


def realize_channels(scenario: Scenario, ue_pos, blocker: BlockerBox | None,
                     rng) -> ChannelRealization:
    """Draw one slot's worth of channels for every link in the scenario.

    Args:
        scenario: deployment under test.
        ue_pos: UE position for this slot.
        blocker: blocker box for this slot, or None.
        rng: ``np.random.SeedSequence`` (or an int seed) for this slot.
    """
    if not isinstance(rng, np.random.SeedSequence):
        rng = np.random.SeedSequence(rng)
    # Fixed spawn layout: 2 per RIS, 2 per repeater, 3 singles.
    n_r = len(scenario.ris_list)
    n_p = len(scenario.repeaters)
    children = rng.spawn(3 + 2 * n_r + 2 * n_p)
    gens = [np.random.default_rng(c) for c in children]
    ch = scenario.channel
    bs = scenario.bs_position

    direct = _realize_link(
        bs, ue_pos, scenario.ue_antennas, scenario.bs_antennas,
        scenario.carrier_hz, ch.exponent_direct, ch.k_direct_db,
        is_blocked(bs, ue_pos, blocker), scenario.vpl_db, gens[0])
    sub6 = _realize_link(
        bs, ue_pos, scenario.ue_antennas, scenario.sub6_bs_antennas(),
        scenario.sub6.carrier_hz, ch.exponent_direct, ch.k_direct_db,
        is_blocked(bs, ue_pos, blocker), scenario.sub6.vpl_db, gens[1])
    extra = None
    if scenario.extra_bs is not None:
        e = scenario.extra_bs
        extra = _realize_link(
            e.position, ue_pos, scenario.ue_antennas, e.n_antennas,
            scenario.carrier_hz, ch.exponent_direct, ch.k_direct_db,
            is_blocked(e.position, ue_pos, blocker), scenario.vpl_db, gens[2])

    ris_in = []
    ris_out = []
    for i, ris in enumerate(scenario.ris_list):
        g_in, g_out = gens[3 + 2 * i], gens[4 + 2 * i]
        ris_in.append(_realize_link(
            bs, ris.position, ris.n_elements, scenario.bs_antennas,
            scenario.carrier_hz, ch.exponent_ris, ch.k_ris_db,
            is_blocked(bs, ris.position, blocker), scenario.vpl_db, g_in,
            ref_db=ch.ris_hop_ref_db, spacing=ris.element_spacing))
        ris_out.append(_realize_link(
            ris.position, ue_pos, scenario.ue_antennas, ris.n_elements,
            scenario.carrier_hz, ch.exponent_ris, ch.k_ris_db,
            is_blocked(ris.position, ue_pos, blocker), scenario.vpl_db, g_out,
            ref_db=ch.ris_hop_ref_db, spacing=ris.element_spacing))

    rep_in = []
    rep_out = []
    base = 3 + 2 * n_r
    for i, rep in enumerate(scenario.repeaters):
        g_in, g_out = gens[base + 2 * i], gens[base + 1 + 2 * i]
        rep_in.append(_realize_link(
            bs, rep.position, rep.n_antennas, scenario.bs_antennas,
            scenario.carrier_hz, ch.exponent_repeater, ch.k_repeater_db,
            is_blocked(bs, rep.position, blocker), scenario.vpl_db, g_in))
        rep_out.append(_realize_link(
            rep.position, ue_pos, scenario.ue_antennas, rep.n_antennas,
            scenario.carrier_hz, ch.exponent_repeater, ch.k_repeater_db,
            is_blocked(rep.position, ue_pos, blocker), scenario.vpl_db, g_out))

    return ChannelRealization(
        direct=direct, sub6_direct=sub6,
        ris_inbound=tuple(ris_in), ris_outbound=tuple(ris_out),
        repeater_inbound=tuple(rep_in), repeater_outbound=tuple(rep_out),
        extra_bs=extra)


def _hop_distances(scenario: Scenario, ris: RisSpec, ue_pos) -> tuple[float, float]:
    d_in, _, _ = _link_geometry(scenario.bs_position, ris.position)
    d_out, _, _ = _link_geometry(ris.position, ue_pos)
    return d_in, d_out


def large_scale_gain_db(scenario: Scenario, ue_pos,
                        blocker: BlockerBox | None,
                        ris_index: int | None = None) -> float:
    """Deterministic large-scale gain of the direct or a reflected path.

    This is the fading-free quantity the region map ranks candidates by.
    Direct: ``-(PL + vpl * blocked)``.  Reflected path i:
    ``-(PL_in + PL_out) + 20 log10(N) - reflection penalty``, with the
    blockage loss charged per blocked hop.  Antenna array gains are
    common to all candidates and therefore omitted.
    """
    ch = scenario.channel
    bs = scenario.bs_position
    if ris_index is None:
        d, _, _ = _link_geometry(bs, ue_pos)
        pl = path_loss_db(d, scenario.carrier_hz, ch.exponent_direct)
        vpl = scenario.vpl_db if is_blocked(bs, ue_pos, blocker) else 0.0
        return -(pl + vpl)
    ris = scenario.ris_list[ris_index]
    d_in, d_out = _hop_distances(scenario, ris, ue_pos)
    pl_in = path_loss_db(d_in, scenario.carrier_hz, ch.exponent_ris,
                         ch.ris_hop_ref_db)
    pl_out = path_loss_db(d_out, scenario.carrier_hz, ch.exponent_ris,
                          ch.ris_hop_ref_db)
    vpl = 0.0
    if is_blocked(bs, ris.position, blocker):
        vpl += scenario.vpl_db
    if is_blocked(ris.position, ue_pos, blocker):
        vpl += scenario.vpl_db
    return (-(pl_in + pl_out) - vpl
            + 20.0 * math.log10(ris.n_elements) - ch.ris_proxy_penalty_db)
