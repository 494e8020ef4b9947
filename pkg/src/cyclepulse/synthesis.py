"""Inverse problem: pulse schedule that reaches a given target from ``|1>``.

Pulse lengths come from the moduli of the target.  Both protocols write the
moduli as hyperspherical coordinates of a point in the non-negative orthant,
so the pulse angles are recovered by a triangular chain of ``atan2`` calls on
tail norms.  Cycle lengths come from the phases: every phase condition reduces
to a congruence ``omega * R = phi (mod 2 pi)`` on a tail sum ``R_m`` of cycle
times, which is solved with the smallest representative that keeps every
dwell time non-negative.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (InfeasibleModuli, NoReferenceSlot, SynthesisVerificationError,
                     UnnormalizedInput, ValidationError)
from .propagator import (NORM_TOL, CycleControl, PulseSchedule, QuantumState, as_state,
                         closed_form_vector, run_schedule)
from .spectrum import EnergySpectrum, Protocol, transition_table

TWO_PI = 2.0 * np.pi
ZERO_THRESHOLD = 1e-10
SOLVER_VERSION = "cyclepulse-synthesis/1"


@dataclass(frozen=True)
class SynthesisConfig:
    """Rabi rates per cycle (a scalar is broadcast) and numerical thresholds."""

    rabi: float | tuple[float, ...] = 1.0
    zero_threshold: float = ZERO_THRESHOLD
    phase_tolerance: float = 1e-8
    moduli_tolerance: float = 1e-9
    fidelity_floor: float = 1.0 - 1e-9

    def rabi_rates(self, n_cycles: int) -> np.ndarray:
        rates = np.broadcast_to(np.asarray(self.rabi, dtype=float), (n_cycles,)) \
            if np.ndim(self.rabi) == 0 else np.asarray(self.rabi, dtype=float)
        if rates.shape != (n_cycles,):
            raise ValidationError(f"expected {n_cycles} rabi rates, got {rates.size}")
        if not np.all(rates > 0):
            raise ValidationError("rabi rates must be positive")
        return np.array(rates)


@dataclass(frozen=True)
class SynthesisDecomposition:
    moduli: np.ndarray
    phases: np.ndarray          # nan where masked
    angles: np.ndarray
    totals: np.ndarray
    global_phase: float

    @property
    def tail_sums(self) -> np.ndarray:
        return np.concatenate([np.cumsum(self.totals[::-1])[::-1], [0.0]])


def fidelity(a, b) -> float:
    """Global-phase-invariant overlap ``|<a|b>|^2``."""
    a, b = as_state(a).amplitudes, as_state(b).amplitudes
    if a.size != b.size:
        raise ValidationError(f"dimension mismatch {a.size} vs {b.size}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def amplitude_decompose(target, eps: float = ZERO_THRESHOLD):
    """Split ``target`` into moduli, phases in [0, 2 pi) and a mask of zero slots."""
    a = as_state(target).amplitudes
    moduli = np.abs(a)
    mask = moduli <= eps
    phases = np.mod(np.angle(a), TWO_PI)
    phases[phases >= TWO_PI] = 0.0
    phases[mask] = np.nan
    return moduli, phases, mask


def _tail_norms(c: np.ndarray) -> np.ndarray:
    # out[k] = ||c[k:]||, accumulated from the small end for accuracy
    sq = np.concatenate([np.cumsum((c ** 2)[::-1])[::-1], [0.0]])
    return np.sqrt(sq)


def chain_moduli(theta: Sequence[float], protocol: Protocol | str) -> np.ndarray:
    """Moduli produced by pulse angles ``theta`` (forward map of the chain)."""
    theta = np.asarray(theta, dtype=float)
    n = theta.size + 1
    cos, sin = np.cos(theta), np.sin(theta)
    out = np.empty(n)
    if Protocol.parse(protocol) is Protocol.SYSTEM_I:
        out[0] = np.prod(cos)
        for k in range(2, n + 1):
            out[k - 1] = sin[k - 2] * np.prod(cos[:k - 2])
    else:
        for k in range(1, n):
            out[k - 1] = cos[k - 1] * np.prod(sin[:k - 1])
        out[n - 1] = np.prod(sin)
    return out


def solve_pulse_angles(moduli: Sequence[float], protocol_kind: Protocol | str,
                       eps: float = ZERO_THRESHOLD, tolerance: float = 1e-9) -> np.ndarray:
    """Pulse angles in [0, pi/2] whose chain reproduces ``moduli``.

    Raises:
        InfeasibleModuli: negative entries or a modulus vector off the unit sphere.
    """
    c = np.asarray(moduli, dtype=float)
    if c.ndim != 1 or c.size < 2:
        raise InfeasibleModuli("need at least two moduli")
    if np.any(c < -tolerance):
        raise InfeasibleModuli("moduli must be non-negative")
    c = np.clip(c, 0.0, None)
    norm2 = float(np.sum(c ** 2))
    if abs(norm2 - 1.0) > tolerance:
        raise InfeasibleModuli(f"sum of squared moduli is {norm2!r}, not 1")
    protocol = Protocol.parse(protocol_kind)
    n = c.size
    if protocol is Protocol.SYSTEM_I:
        # D_k = prod_{i<=k-2} cos(theta_i) = ||(C_1, C_k, ..., C_N)||
        order = np.concatenate([c[1:], c[:1]])
    else:
        order = c
    rest = _tail_norms(order)
    theta = np.empty(n - 1)
    for j in range(n - 1):
        head, tail = order[j], rest[j + 1]
        if head < eps and tail < eps:
            theta[j] = 0.0
        elif protocol is Protocol.SYSTEM_I:
            theta[j] = np.arctan2(head, tail)
        else:
            theta[j] = np.arctan2(tail, head)
    back = chain_moduli(theta, protocol)
    if np.max(np.abs(back - c / np.sqrt(norm2))) > tolerance:
        raise InfeasibleModuli("angle chain does not reproduce the moduli")
    return theta


def _smallest_at_least(lower: float, omega: float, phi: float) -> float:
    """Smallest ``R >= lower`` with ``omega * R = phi (mod 2 pi)``, ``omega > 0``."""
    gap = np.mod(phi - omega * lower, TWO_PI)
    if gap > TWO_PI - 1e-12:
        gap = 0.0
    return lower + gap / omega


def solve_dwell_times(phases: np.ndarray, mask: np.ndarray, theta: np.ndarray,
                      spectrum: EnergySpectrum, protocol_kind: Protocol | str,
                      rabi: Sequence[float]) -> tuple[np.ndarray, float]:
    """Cycle lengths ``T_m`` and global phase ``alpha`` matching ``phases``.

    The returned ``T`` satisfies ``T_m >= tau_m`` where ``tau_m`` is the pulse
    length implied by ``theta`` and ``rabi``; ``alpha`` is defined by
    ``final = exp(i alpha) * target``.
    """
    protocol = Protocol.parse(protocol_kind)
    mask = np.asarray(mask, dtype=bool)
    if np.all(mask):
        raise NoReferenceSlot("every target amplitude is zero")
    beta = np.where(mask, 0.0, phases)
    w = spectrum.energies / spectrum.hbar
    n = w.size
    tau = np.asarray(theta, dtype=float) * 2.0 * spectrum.hbar / np.asarray(rabi, dtype=float)
    r = np.zeros(n)   # r[j] = R_{j+1}; r[n-1] = R_N = 0
    if protocol is Protocol.SYSTEM_I:
        # slot k >= 2: (E_k - E_1) R_{k-1} = -pi/2 - beta_k - alpha'  (mod 2 pi)
        # with alpha' = alpha + E_1 R_1 / hbar, fixed by slot 1 when it is populated
        shifted = None if mask[0] else -beta[0]
        for m in range(n - 1, 0, -1):
            lower = r[m] + tau[m - 1]
            k = m + 1
            omega = w[k - 1] - w[0]
            if mask[k - 1]:
                r[m - 1] = lower
            elif shifted is None:
                r[m - 1] = lower
                shifted = -0.5 * np.pi - beta[k - 1] - omega * lower
            else:
                r[m - 1] = _smallest_at_least(lower, omega, -0.5 * np.pi - beta[k - 1] - shifted)
        alpha = shifted - w[0] * r[0]
    else:
        # phi_k = E_k R_k + sum_{i<k} E_{i+1} T_i,  arg gamma_k = -phi_k - (k-1) pi/2,
        # phi_{m+1} - phi_m = (E_{m+1} - E_m) R_m.  Consecutive populated slots
        # p < q bind the R_m with p <= m < q; all but R_p take minimal values.
        live = np.flatnonzero(~mask)
        upper_of = {int(p): int(q) for p, q in zip(live[:-1], live[1:])}
        for m in range(n - 1, 0, -1):
            lower = r[m] + tau[m - 1]
            p = m - 1                                   # 0-based slot of level m
            if p in upper_of:
                q = upper_of[p]
                fixed = sum((w[j + 1] - w[j]) * r[j] for j in range(p + 1, q))
                target = beta[p] - beta[q] - 0.5 * np.pi * (q - p) - fixed
                r[m - 1] = _smallest_at_least(lower, w[p + 1] - w[p], target)
            else:
                r[m - 1] = lower
        totals = r[:-1] - r[1:]
        climb = np.concatenate([[0.0], np.cumsum(w[1:] * totals)])
        ref = int(live[0])
        arg = -(w[ref] * r[ref] + climb[ref]) - 0.5 * np.pi * ref
        alpha = arg - beta[ref]
    totals = r[:-1] - r[1:]
    totals = np.maximum(totals, tau)      # guards round-off only
    return totals, float(np.mod(alpha, TWO_PI))


def decompose(spectrum: EnergySpectrum, protocol_kind: Protocol | str, target,
              config: SynthesisConfig = SynthesisConfig()) -> SynthesisDecomposition:
    protocol = Protocol.parse(protocol_kind)
    target = as_state(target)
    if target.dim != spectrum.n:
        raise ValidationError(f"target has dimension {target.dim}, spectrum has {spectrum.n}")
    rabi = config.rabi_rates(spectrum.n - 1)
    moduli, phases, mask = amplitude_decompose(target, config.zero_threshold)
    theta = solve_pulse_angles(moduli, protocol, config.zero_threshold, config.moduli_tolerance)
    totals, alpha = solve_dwell_times(phases, mask, theta, spectrum, protocol, rabi)
    return SynthesisDecomposition(moduli=moduli, phases=phases, angles=theta,
                                  totals=totals, global_phase=alpha)


def schedule_from_decomposition(spectrum: EnergySpectrum, protocol_kind: Protocol | str,
                                decomposition: SynthesisDecomposition,
                                rabi: Sequence[float]) -> PulseSchedule:
    protocol = Protocol.parse(protocol_kind)
    table = transition_table(spectrum, protocol)
    cycles = []
    for m, (th, total, om, nu) in enumerate(
            zip(decomposition.angles, decomposition.totals, rabi, table.frequencies), start=1):
        tau = th * 2.0 * spectrum.hbar / om
        cycles.append(CycleControl(m=m, rabi=float(om), drive_frequency=nu,
                                   tau=float(tau), tau_prime=float(max(total - tau, 0.0))))
    return PulseSchedule(protocol, tuple(cycles), global_phase=decomposition.global_phase)


def synthesize(spectrum: EnergySpectrum, protocol_kind: Protocol | str, target,
               config: SynthesisConfig = SynthesisConfig()) -> PulseSchedule:
    """Schedule of ``2(N-1)`` durations steering ``|1>`` to ``target`` up to global phase.

    The result is forward-simulated before it is returned; a miss raises
    SynthesisVerificationError.
    """
    target = as_state(target)
    protocol = Protocol.parse(protocol_kind)
    rabi = config.rabi_rates(spectrum.n - 1)
    dec = decompose(spectrum, protocol, target, config)
    schedule = schedule_from_decomposition(spectrum, protocol, dec, rabi)
    final, _ = run_schedule(spectrum, schedule)
    f = fidelity(final, target)
    if f < config.fidelity_floor:
        raise SynthesisVerificationError(f"synthesized schedule reaches fidelity {f!r}")
    return schedule


def phase_residuals(spectrum: EnergySpectrum, schedule: PulseSchedule, target,
                    eps: float = ZERO_THRESHOLD) -> np.ndarray:
    """Wrapped ``arg(final_n) - beta_n - alpha`` per populated slot (nan elsewhere)."""
    if schedule.global_phase is None:
        raise ValidationError("schedule carries no global phase")
    _, phases, mask = amplitude_decompose(target, eps)
    final = closed_form_vector(spectrum.energies / spectrum.hbar, schedule.angles(spectrum.hbar),
                               schedule.totals(), schedule.protocol_kind)
    out = np.angle(final) - phases - schedule.global_phase
    out = np.mod(out + np.pi, TWO_PI) - np.pi
    out[mask] = np.nan
    return out


def target_hash(target) -> str:
    a = as_state(target).amplitudes
    payload = json.dumps([[float(z.real), float(z.imag)] for z in a])
    return hashlib.sha256(payload.encode()).hexdigest()


def check_target_norm(amplitudes, tolerance: float = 1e-6) -> tuple[np.ndarray, float]:
    """Return ``(normalized amplitudes, |norm - 1|)``; raise beyond ``tolerance``."""
    a = np.asarray(amplitudes, dtype=complex).ravel()
    norm = float(np.linalg.norm(a))
    err = abs(norm - 1.0)
    if err > tolerance or norm == 0.0:
        raise UnnormalizedInput(f"target norm {norm!r} is not within {tolerance} of 1")
    return (a / norm if err > NORM_TOL / 10 else a), err
