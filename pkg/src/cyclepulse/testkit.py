"""Independent oracles for checking the analytic propagator.

Nothing here uses the closed-form pulse unitaries: pulses are exponentiated
from their Hamiltonians with a scaling-and-squaring Taylor series and chained
as dense matrices.
"""
from __future__ import annotations

import numpy as np

from .errors import NonHermitianInput
from .propagator import CycleControl, PulseSchedule, QuantumState, check_schedule
from .spectrum import EnergySpectrum, Protocol, coupled_pair, transition_table


def random_target(n: int, seed: int) -> QuantumState:
    """Standard complex normal components, normalized; deterministic per seed."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(np.uint64(seed))
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return QuantumState(z / np.linalg.norm(z))


def random_schedule(spectrum: EnergySpectrum, protocol: Protocol | str,
                    rng: np.random.Generator) -> PulseSchedule:
    """Schedule with pulse angles in [0, pi/2] and moderate dwell times."""
    table = transition_table(spectrum, protocol)
    cycles = []
    for m, nu in enumerate(table.frequencies, start=1):
        rabi = rng.uniform(0.2, 2.0)
        theta = rng.uniform(0.0, 0.5 * np.pi)
        cycles.append(CycleControl(m=m, rabi=rabi, drive_frequency=nu,
                                   tau=2.0 * spectrum.hbar * theta / rabi,
                                   tau_prime=rng.uniform(0.0, 3.0)))
    return PulseSchedule(protocol, tuple(cycles))


def random_spectrum(n: int, protocol: Protocol | str, rng: np.random.Generator,
                    hbar: float = 1.0) -> EnergySpectrum:
    """Random centered spectrum of the requested gap type."""
    from .spectrum import validate_spectrum

    protocol = Protocol.parse(protocol)
    if protocol is Protocol.SYSTEM_I or n == 2:
        first = rng.uniform(0.5, 3.0)
        rest = rng.uniform(0.5, 3.0)
        while abs(first - rest) < 0.1:
            rest = rng.uniform(0.5, 3.0)
        gaps = [first] + [rest] * (n - 2)
    else:
        # well-separated distinct gaps
        gaps = rng.permutation(np.linspace(0.6, 2.4, n - 1) + rng.uniform(-0.05, 0.05, n - 1))
    levels = np.concatenate([[0.0], np.cumsum(gaps)])
    return validate_spectrum(levels + rng.uniform(-1, 1), hbar=hbar)


def matrix_exponential_oracle(h: np.ndarray, t: float, hbar: float = 1.0,
                              tol: float = 1e-13) -> np.ndarray:
    """``exp(-i H t / hbar)`` by scaling and squaring a truncated Taylor series."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NonHermitianInput("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * scale:
        raise NonHermitianInput("matrix is not Hermitian")
    a = -1j * h * (t / hbar)
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    a = a / 2.0 ** squarings
    n = a.shape[0]
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 60):
        term = term @ a / k
        result = result + term
        if np.linalg.norm(term, 1) < tol * 1e-3:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def coupling_operator(n: int, protocol: Protocol | str, m: int) -> np.ndarray:
    a, b = coupled_pair(Protocol.parse(protocol), m)
    x = np.zeros((n, n), dtype=complex)
    x[a - 1, b - 1] = x[b - 1, a - 1] = 1.0
    return x


def dense_schedule_oracle(spectrum: EnergySpectrum, schedule: PulseSchedule,
                          initial=None) -> QuantumState:
    """Final state by multiplying dense window propagators.

    Per cycle: pulse ``exp(-i (rabi/2) X tau / hbar)`` in the interaction frame
    that restarts with the cycle, then ``exp(-i H0 tau / hbar)`` back to the
    lab frame and ``exp(-i H0 tau' / hbar)`` for the dwell.
    """
    check_schedule(spectrum, schedule)
    n = spectrum.n
    h0 = spectrum.hamiltonian()
    psi = (np.eye(n, dtype=complex)[0] if initial is None
           else np.asarray(initial, dtype=complex).copy())
    for c in schedule.cycles:
        h_rwa = 0.5 * c.rabi * coupling_operator(n, schedule.protocol_kind, c.m)
        u = (matrix_exponential_oracle(h0, c.tau_prime, spectrum.hbar)
             @ matrix_exponential_oracle(h0, c.tau, spectrum.hbar)
             @ matrix_exponential_oracle(h_rwa, c.tau, spectrum.hbar))
        psi = u @ psi
    return QuantumState(psi / np.linalg.norm(psi))
