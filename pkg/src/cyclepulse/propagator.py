"""Rotating-wave dynamics of the cycle protocol.

A cycle ``m`` is a resonant pulse of length ``tau`` on one level pair followed
by a field-free dwell ``tau_prime``.  Under the rotating-wave approximation
the pulse acts in the interaction picture as a rotation by the pulse angle
``theta = rabi * tau / (2 hbar)`` on that pair.  The interaction-picture clock
restarts at every cycle, so in the Schrodinger picture cycle ``m`` maps

    a  ->  U0(tau + tau_prime) V_m(theta) a.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (IndexOutOfRange, NegativeDuration, ScheduleMismatch,
                     UnnormalizedInput)
from .spectrum import EnergySpectrum, Protocol, coupled_pair, transition_table

NORM_TOL = 1e-10
FREQ_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized amplitude vector over ``|1>, ..., |N>`` (stored 0-based)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).ravel()
        if a.size < 1:
            raise UnnormalizedInput("empty state")
        norm = float(np.linalg.norm(a))
        if not abs(norm - 1.0) <= NORM_TOL:
            raise UnnormalizedInput(f"state norm {norm!r} differs from 1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def basis(cls, n: int, dim: int) -> "QuantumState":
        """Basis state ``|n>`` (1-based) in dimension ``dim``."""
        if not 1 <= n <= dim:
            raise IndexOutOfRange(f"level {n} outside 1..{dim}")
        a = np.zeros(dim, dtype=complex)
        a[n - 1] = 1.0
        return cls(a)

    @classmethod
    def normalized(cls, amplitudes) -> "QuantumState":
        a = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(a / np.linalg.norm(a))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"QuantumState({np.array2string(self.amplitudes, precision=6)})"


def as_state(value) -> QuantumState:
    return value if isinstance(value, QuantumState) else QuantumState(value)


@dataclass(frozen=True)
class CycleControl:
    """Controls of one cycle; ``rabi`` is the product of field amplitude and coupling."""

    m: int
    rabi: float
    drive_frequency: float
    tau: float
    tau_prime: float

    def __post_init__(self):
        if self.m < 1:
            raise IndexOutOfRange(f"cycle index must be >= 1, got {self.m}")
        if self.rabi < 0:
            raise ValueError(f"rabi rate must be non-negative, got {self.rabi}")
        if self.tau < 0 or self.tau_prime < 0:
            raise NegativeDuration(
                f"cycle {self.m}: tau={self.tau!r}, tau_prime={self.tau_prime!r}")

    @property
    def total(self) -> float:
        return self.tau + self.tau_prime

    def half_rabi(self, hbar: float = 1.0) -> float:
        return self.rabi / (2.0 * hbar)

    def angle(self, hbar: float = 1.0) -> float:
        return self.half_rabi(hbar) * self.tau


@dataclass(frozen=True)
class PulseSchedule:
    protocol_kind: Protocol
    cycles: tuple[CycleControl, ...]
    global_phase: float | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "protocol_kind", Protocol.parse(self.protocol_kind))
        object.__setattr__(self, "cycles", tuple(self.cycles))
        for i, c in enumerate(self.cycles, start=1):
            if c.m != i:
                raise ScheduleMismatch(f"cycle #{i} carries index m={c.m}")

    @property
    def dim(self) -> int:
        return len(self.cycles) + 1

    @property
    def cycle_boundaries(self) -> np.ndarray:
        """End time ``t_m`` of every cycle."""
        return np.cumsum([c.total for c in self.cycles])

    @property
    def durations(self) -> tuple[float, ...]:
        """The ``2(N-1)`` free parameters ``tau_1, tau'_1, ..., tau_{N-1}, tau'_{N-1}``."""
        return tuple(x for c in self.cycles for x in (c.tau, c.tau_prime))

    def angles(self, hbar: float = 1.0) -> np.ndarray:
        return np.array([c.angle(hbar) for c in self.cycles])

    def totals(self) -> np.ndarray:
        return np.array([c.total for c in self.cycles])


@dataclass(frozen=True)
class AmplitudeTrace:
    snapshots: tuple[QuantumState, ...]

    def as_array(self) -> np.ndarray:
        return np.array([s.amplitudes for s in self.snapshots])


def check_schedule(spectrum: EnergySpectrum, schedule: PulseSchedule) -> None:
    """Raise ScheduleMismatch unless ``schedule`` drives ``spectrum``'s transitions."""
    if schedule.dim != spectrum.n:
        raise ScheduleMismatch(
            f"schedule has {len(schedule.cycles)} cycles, spectrum needs {spectrum.n - 1}")
    table = transition_table(spectrum, schedule.protocol_kind)
    for c, nu in zip(schedule.cycles, table.frequencies):
        if abs(c.drive_frequency - nu) > FREQ_RTOL * max(1.0, abs(nu)):
            raise ScheduleMismatch(
                f"cycle {c.m}: drive frequency {c.drive_frequency!r} is not resonant ({nu!r})")


def cycle_unitary(protocol_kind: Protocol | str, n: int, m: int, theta: float) -> np.ndarray:
    """Dense interaction-picture pulse unitary of cycle ``m`` at angle ``theta``."""
    if n < 2 or not 1 <= m <= n - 1:
        raise IndexOutOfRange(f"cycle {m} outside 1..{n - 1}")
    a, b = coupled_pair(Protocol.parse(protocol_kind), m)
    a, b = a - 1, b - 1
    u = np.eye(n, dtype=complex)
    u[a, a] = u[b, b] = np.cos(theta)
    u[a, b] = u[b, a] = -1j * np.sin(theta)
    return u


def free_evolution(state, spectrum: EnergySpectrum, duration: float) -> QuantumState:
    if duration < 0:
        raise NegativeDuration(f"duration {duration!r} < 0")
    a = as_state(state).amplitudes
    return QuantumState(np.exp(-1j * spectrum.energies * duration / spectrum.hbar) * a)


def _apply_pulse(a: np.ndarray, pair: tuple[int, int], theta: float) -> None:
    i, j = pair[0] - 1, pair[1] - 1
    c, s = np.cos(theta), np.sin(theta)
    ai, aj = a[i], a[j]
    a[i] = c * ai - 1j * s * aj
    a[j] = c * aj - 1j * s * ai


def run_schedule(spectrum: EnergySpectrum, schedule: PulseSchedule,
                 initial=None) -> tuple[QuantumState, AmplitudeTrace]:
    """Propagate ``initial`` (default ``|1>``) through every cycle.

    Returns the final state and the state after each cycle.
    """
    check_schedule(spectrum, schedule)
    if initial is None:
        initial = QuantumState.basis(1, spectrum.n)
    initial = as_state(initial)
    if initial.dim != spectrum.n:
        raise ScheduleMismatch(f"initial state has dimension {initial.dim}, expected {spectrum.n}")
    e = spectrum.energies / spectrum.hbar
    a = initial.amplitudes.copy()
    snapshots = []
    for c in schedule.cycles:
        _apply_pulse(a, coupled_pair(schedule.protocol_kind, c.m), c.angle(spectrum.hbar))
        a *= np.exp(-1j * e * c.total)
        snapshots.append(QuantumState(a.copy()))
    return QuantumState(a), AmplitudeTrace(tuple(snapshots))


def closed_form_amplitudes(spectrum: EnergySpectrum, schedule: PulseSchedule) -> QuantumState:
    """Final amplitudes from ``|1>`` via the explicit sine/cosine products.

    Nothing is propagated: every amplitude is one product of trigonometric
    factors times one exponential of the accumulated dynamical phase.
    """
    check_schedule(spectrum, schedule)
    theta = schedule.angles(spectrum.hbar)
    return QuantumState(closed_form_vector(spectrum.energies / spectrum.hbar, theta,
                                           schedule.totals(), schedule.protocol_kind))


def tail_sums(totals: Sequence[float]) -> np.ndarray:
    """``R[m-1] = T_m + ... + T_{N-1}`` for m = 1..N, with ``R_N = 0``."""
    t = np.asarray(totals, dtype=float)
    return np.concatenate([np.cumsum(t[::-1])[::-1], [0.0]])


def closed_form_vector(freqs: np.ndarray, theta: Sequence[float], totals: Sequence[float],
                       protocol: Protocol) -> np.ndarray:
    """Closed-form amplitudes with energies given as angular frequencies ``E/hbar``."""
    e = np.asarray(freqs, dtype=float)
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(totals, dtype=float)
    n = e.size
    r = tail_sums(t)
    cos, sin = np.cos(theta), np.sin(theta)
    out = np.empty(n, dtype=complex)
    if Protocol.parse(protocol) is Protocol.SYSTEM_I:
        out[0] = np.exp(-1j * e[0] * r[0]) * np.prod(cos)
        for k in range(2, n + 1):
            # level k is populated in cycle k-1 out of the ground-state amplitude
            before = r[0] - r[k - 2]
            phase = e[k - 1] * r[k - 2] + e[0] * before
            out[k - 1] = -1j * np.exp(-1j * phase) * sin[k - 2] * np.prod(cos[:k - 2])
    else:
        # accumulated phase sum_{i<k} E_{i+1} T_i of the ladder climb
        climb = np.concatenate([[0.0], np.cumsum(e[1:] * t)])
        for k in range(1, n + 1):
            phase = e[k - 1] * r[k - 1] + climb[k - 1] + 0.5 * np.pi * (k - 1)
            weight = np.prod(sin[:k - 1]) * (cos[k - 1] if k < n else 1.0)
            out[k - 1] = np.exp(-1j * phase) * weight
    return out
