"""Energy spectra, gap classification and drive-frequency tables.

Levels are stored 0-based internally; every user-facing index (coupled pairs,
cycle numbers, JSON files) is 1-based so that ``|1>`` is the ground state.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import IncompatibleProtocol, NonIncreasingLevels, TooFewLevels

logger = logging.getLogger(__name__)

GAP_RTOL = 1e-9


class Protocol(str, enum.Enum):
    """Which coupling pattern the pulse sequence uses.

    ``SYSTEM_I`` drives ``|1> <-> |m+1>`` in cycle m (star coupling), and
    ``SYSTEM_II`` drives ``|m> <-> |m+1>`` (ladder coupling).
    """

    SYSTEM_I = "system-i"
    SYSTEM_II = "system-ii"

    @classmethod
    def parse(cls, value: "Protocol | str") -> "Protocol":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"i": "system-i", "1": "system-i", "systemi": "system-i",
                   "ii": "system-ii", "2": "system-ii", "systemii": "system-ii"}
        return cls(aliases.get(key, key))


class GapKind(str, enum.Enum):
    SYSTEM_I = "system-i"
    SYSTEM_II = "system-ii"
    BOTH = "both"
    NEITHER = "neither"

    def supports(self, protocol: Protocol) -> bool:
        if self is GapKind.BOTH:
            return True
        return self.value == Protocol.parse(protocol).value


@dataclass(frozen=True)
class EnergySpectrum:
    """Non-degenerate, traceless drift Hamiltonian ``H0 = sum_n E_n |n><n|``.

    ``shift`` is the mean that was subtracted from the raw levels; a uniform
    shift only changes the global phase of every evolved state.
    """

    levels: tuple[float, ...]
    hbar: float = 1.0
    shift: float = 0.0

    @property
    def n(self) -> int:
        return len(self.levels)

    @property
    def energies(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=float)

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.energies)

    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.energies).astype(complex)


@dataclass(frozen=True)
class GapClassification:
    kind: GapKind
    gaps: tuple[float, ...]
    cumulative_gaps: tuple[float, ...]


@dataclass(frozen=True)
class TransitionTable:
    protocol_kind: Protocol
    frequencies: tuple[float, ...]
    coupled_pairs: tuple[tuple[int, int], ...]


def validate_spectrum(raw_levels: Sequence[float], tolerance: float = 0.0,
                      hbar: float = 1.0) -> EnergySpectrum:
    """Check ordering of ``raw_levels`` and center them so that ``tr H0 = 0``.

    Raises:
        TooFewLevels: fewer than two levels.
        NonIncreasingLevels: some ``E[i+1] - E[i] <= tolerance``.
    """
    levels = np.asarray(raw_levels, dtype=float).ravel()
    if levels.size < 2:
        raise TooFewLevels(f"need at least 2 levels, got {levels.size}")
    if not np.all(np.isfinite(levels)):
        raise NonIncreasingLevels("levels must be finite")
    if not hbar > 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    steps = np.diff(levels)
    bad = np.flatnonzero(steps <= tolerance)
    if bad.size:
        i = int(bad[0])
        raise NonIncreasingLevels(
            f"levels must be strictly increasing: E_{i + 2}={float(levels[i + 1])!r} "
            f"<= E_{i + 1}={float(levels[i])!r}")
    shift = float(levels.mean())
    if shift != 0.0:
        logger.info("centering spectrum: subtracted mean %r", shift)
    centered = tuple(float(x) for x in levels - shift)
    return EnergySpectrum(levels=centered, hbar=float(hbar), shift=shift)


def _close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def classify_gaps(spectrum: EnergySpectrum, tolerance: float = GAP_RTOL) -> GapClassification:
    e = spectrum.energies
    gaps = tuple(float(g) for g in np.diff(e))
    cumulative = tuple(float(x) for x in e[1:] - e[0])
    if len(gaps) == 1:
        kind = GapKind.BOTH
    else:
        star = (not _close(gaps[0], gaps[1], tolerance)
                and all(_close(gaps[1], g, tolerance) for g in gaps[2:]))
        ladder = all(not _close(gaps[i], gaps[j], tolerance)
                     for i in range(len(gaps)) for j in range(i + 1, len(gaps)))
        if star and ladder:
            kind = GapKind.BOTH
        elif star:
            kind = GapKind.SYSTEM_I
        elif ladder:
            kind = GapKind.SYSTEM_II
        else:
            kind = GapKind.NEITHER
    return GapClassification(kind=kind, gaps=gaps, cumulative_gaps=cumulative)


def coupled_pair(protocol: Protocol, m: int) -> tuple[int, int]:
    """1-based level pair driven in cycle ``m``."""
    return (1, m + 1) if Protocol.parse(protocol) is Protocol.SYSTEM_I else (m, m + 1)


def transition_table(spectrum: EnergySpectrum, protocol_kind: Protocol | str,
                     tolerance: float = GAP_RTOL) -> TransitionTable:
    protocol = Protocol.parse(protocol_kind)
    kind = classify_gaps(spectrum, tolerance).kind
    if not kind.supports(protocol):
        raise IncompatibleProtocol(
            f"spectrum classified as {kind.value} does not support {protocol.value}")
    e = spectrum.energies
    pairs = tuple(coupled_pair(protocol, m) for m in range(1, spectrum.n))
    freqs = tuple(float((e[b - 1] - e[a - 1]) / spectrum.hbar) for a, b in pairs)
    return TransitionTable(protocol_kind=protocol, frequencies=freqs, coupled_pairs=pairs)


def auto_protocol(spectrum: EnergySpectrum, tolerance: float = GAP_RTOL) -> Protocol:
    """Pick a protocol for the spectrum; star coupling wins when both apply."""
    kind = classify_gaps(spectrum, tolerance).kind
    if kind is GapKind.NEITHER:
        raise IncompatibleProtocol("spectrum is neither system-i nor system-ii")
    return Protocol.SYSTEM_II if kind is GapKind.SYSTEM_II else Protocol.SYSTEM_I
