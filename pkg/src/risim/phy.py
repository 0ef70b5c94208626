"""Physical-layer math on realized channels.

Single-stream transmission: the BS applies a unit-norm precoder, the UE
a unit-norm combiner, and a served reflecting panel applies phase-only
weights.  ``optimize_beamforming`` alternates between (a) dominant-pair
beamformers of the composed channel and (b) element-wise co-phasing of
the panel against the combined direct term, which is the exact maximizer
of |u^H H_eff v| for fixed beamformers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import ImpairmentSpec


@dataclass(frozen=True)
class PhaseConfig:
    """Phase weights of one panel, radians, applied as exp(j * theta)."""

    phases: np.ndarray


@dataclass(frozen=True)
class BeamformedLink:
    """Result of beamformer/phase selection on one candidate path.

    effective_gain is the squared largest singular value of the final
    effective channel, i.e. the power gain seen by the single stream.
    """

    effective_gain: float
    precoder: np.ndarray
    combiner: np.ndarray
    phases: np.ndarray | None
    n_iters: int
    gain_history: tuple[float, ...] = ()


def effective_channel(direct: np.ndarray | None, h_in: np.ndarray,
                      h_out: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Compose direct + reflected path: D + H_out diag(e^{j theta}) H_in."""
    reflected = (h_out * np.exp(1j * phases)) @ h_in
    if direct is None:
        return reflected
    return direct + reflected


def _dominant_pair(h: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    u, s, vh = np.linalg.svd(h)
    return u[:, 0], vh[0].conj(), float(s[0])


def beamform_fixed_phases(direct: np.ndarray | None, h_in: np.ndarray,
                          h_out: np.ndarray,
                          phases: np.ndarray) -> BeamformedLink:
    """SVD-matched beamformers for a given (e.g. random) phase vector."""
    heff = effective_channel(direct, h_in, h_out, phases)
    u, v, s = _dominant_pair(heff)
    return BeamformedLink(effective_gain=s * s, precoder=v, combiner=u,
                          phases=np.array(phases), n_iters=0,
                          gain_history=(s * s,))


def optimize_beamforming(direct: np.ndarray | None,
                         h_in: np.ndarray | None = None,
                         h_out: np.ndarray | None = None,
                         max_iters: int = 50,
                         tol: float = 1e-6) -> BeamformedLink:
    """Alternating beamformer / phase optimization of one candidate path.

    With no reflected hop (h_in is None) this reduces to a plain SVD of
    the direct matrix.  Convergence is declared when the relative gain
    improvement between outer iterations drops below tol; the returned
    link is the best iterate, never worse than the zero-phase start.

    Args:
        direct: (n_rx, n_tx) direct matrix, or None if absent.
        h_in: (N, n_tx) hop into the panel.
        h_out: (n_rx, N) hop out of the panel.
        max_iters: outer iteration cap.
        tol: relative effective-gain convergence threshold.
    """
    if h_in is None:
        if direct is None:
            raise ValueError("need at least one of direct / reflected hop")
        u, v, s = _dominant_pair(direct)
        return BeamformedLink(effective_gain=s * s, precoder=v, combiner=u,
                              phases=None, n_iters=0, gain_history=(s * s,))

    n = h_in.shape[0]
    phases = np.zeros(n)
    history: list[float] = []
    best_gain = -1.0
    best = None
    for it in range(max_iters):
        heff = effective_channel(direct, h_in, h_out, phases)
        u, v, s = _dominant_pair(heff)
        gain = s * s
        history.append(gain)
        if gain > best_gain:
            best_gain = gain
            best = (u, v, phases)
        if it > 0 and gain - history[-2] <= tol * max(history[-2], 1e-300):
            break
        # Element contributions for the current beamformer pair; the
        # exact per-element maximizer aligns each with the direct term.
        a = u.conj() @ h_out
        b = h_in @ v
        contrib = a * b
        ref = 0.0 + 0.0j
        if direct is not None:
            ref = u.conj() @ direct @ v
        target = np.angle(ref) if abs(ref) > 0 else 0.0
        phases = np.where(np.abs(contrib) > 0,
                          target - np.angle(contrib), phases)
    u, v, phases = best
    return BeamformedLink(effective_gain=best_gain, precoder=v, combiner=u,
                          phases=np.array(phases), n_iters=len(history),
                          gain_history=tuple(history))


def cophased_gain_no_direct(h_in: np.ndarray, h_out: np.ndarray,
                            precoder: np.ndarray,
                            combiner: np.ndarray) -> float:
    """Closed-form optimum |sum_i |a_i b_i||^2 for fixed beamformers."""
    a = combiner.conj() @ h_out
    b = h_in @ precoder
    amp = float(np.sum(np.abs(a * b)))
    return amp * amp


def apply_phase_noise(phases: np.ndarray, bound: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Add uniform phase jitter on [-bound, +bound] per element."""
    if not 0.0 <= bound <= math.pi:
        raise ValueError("phase noise bound must be in [0, pi]")
    if bound == 0.0:
        return np.array(phases)
    return phases + rng.uniform(-bound, bound, size=len(phases))


def sinr(effective_gain: float, tx_power_dbm: float, noise_dbm: float,
         impairments: ImpairmentSpec | None = None) -> float:
    """Post-combining SINR, optionally with residual transceiver distortion.

    The ideal SNR is gamma0 = P * gain / noise.  With distortion of
    aggregate strength kappa^2 = kappa_tx^2 + kappa_rx^2 the effective
    SINR is gamma0 / (gamma0 * kappa^2 + 1), which saturates at
    1 / kappa^2 no matter how strong the link gets.
    """
    p_lin_mw = 10.0 ** (tx_power_dbm / 10.0)
    noise_mw = 10.0 ** (noise_dbm / 10.0)
    gamma0 = p_lin_mw * effective_gain / noise_mw
    if impairments is None or not impairments.enabled:
        return gamma0
    return gamma0 / (gamma0 * impairments.kappa_sq_sum + 1.0)


def repeater_sinr(gamma1: float, gamma2: float) -> float:
    """End-to-end SINR of a two-hop amplify-and-forward relay."""
    if gamma1 < 0 or gamma2 < 0:
        raise ValueError("per-hop SINRs must be >= 0")
    return gamma1 * gamma2 / (gamma1 + gamma2 + 1.0)


def se_bpshz(gamma: float) -> float:
    """Shannon spectral efficiency log2(1 + gamma)."""
    return math.log2(1.0 + gamma)


def rate_bps(gamma: float, bandwidth_hz: float) -> float:
    return bandwidth_hz * se_bpshz(gamma)
