"""JSON interchange: system, target, schedule and report documents.

Complex numbers are ``[re, im]`` pairs and levels are numbered from 1.
Floats are written with Python's shortest round-trip repr, so a written
schedule reads back bit-for-bit.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ValidationError
from .propagator import CycleControl, PulseSchedule, QuantumState
from .spectrum import EnergySpectrum, Protocol, auto_protocol, transition_table, validate_spectrum
from .synthesis import SOLVER_VERSION, SynthesisConfig, check_target_norm, target_hash

logger = logging.getLogger(__name__)

TARGET_NORM_TOLERANCE = 1e-2


@dataclass(frozen=True)
class SystemDocument:
    spectrum: EnergySpectrum
    protocol: Protocol
    rabi: float | tuple[float, ...]

    def config(self, **kwargs) -> SynthesisConfig:
        return SynthesisConfig(rabi=self.rabi, **kwargs)


def _load(source: str | Path | dict) -> Any:
    if isinstance(source, (dict, list)):
        return source
    text = Path(source).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: invalid JSON ({exc})") from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def complex_pairs(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def parse_complex_pairs(values) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("amplitudes must be a list of [re, im] pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("amplitudes must be a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def parse_rabi(value, n_cycles: int | None = None) -> float | tuple[float, ...]:
    if isinstance(value, str):
        value = [float(x) for x in value.split(",") if x.strip()]
        if len(value) == 1:
            value = value[0]
    if np.ndim(value) == 0:
        rabi = float(value)
        if not rabi > 0:
            raise ValidationError("rabi rate must be positive")
        return rabi
    rabi = tuple(float(x) for x in value)
    if n_cycles is not None and len(rabi) != n_cycles:
        raise ValidationError(f"expected {n_cycles} rabi rates, got {len(rabi)}")
    if not all(r > 0 for r in rabi):
        raise ValidationError("rabi rates must be positive")
    return rabi


def read_system(source, protocol: str | None = None) -> SystemDocument:
    data = _load(source)
    if not isinstance(data, dict) or "levels" not in data:
        raise ValidationError("system document needs a 'levels' list")
    spectrum = validate_spectrum(data["levels"], hbar=float(data.get("hbar", 1.0)))
    choice = protocol or data.get("protocol", "auto")
    if choice == "auto":
        proto = auto_protocol(spectrum)
    else:
        try:
            proto = Protocol.parse(choice)
        except ValueError as exc:
            raise ValidationError(f"unknown protocol {choice!r}") from exc
        transition_table(spectrum, proto)
    rabi = parse_rabi(data.get("rabi", 1.0), spectrum.n - 1)
    return SystemDocument(spectrum=spectrum, protocol=proto, rabi=rabi)


def read_target(source, tolerance: float = TARGET_NORM_TOLERANCE) -> QuantumState:
    """Target amplitudes; renormalized (with a warning) when off by more than 1e-10."""
    data = _load(source)
    raw = data.get("amplitudes") if isinstance(data, dict) else data
    if raw is None:
        raise ValidationError("target document needs an 'amplitudes' list")
    amplitudes, err = check_target_norm(parse_complex_pairs(raw), tolerance)
    if err > 1e-10:
        logger.warning("target norm off by %.3e; renormalized", err)
    return QuantumState(amplitudes)


def target_document(state: QuantumState) -> dict:
    return {"amplitudes": complex_pairs(state.amplitudes)}


def schedule_document(schedule: PulseSchedule, target: QuantumState | None = None) -> dict:
    meta: dict[str, Any] = {"solver_version": SOLVER_VERSION}
    if target is not None:
        meta["target_hash"] = target_hash(target)
    if schedule.global_phase is not None:
        meta["global_phase"] = float(schedule.global_phase)
    return {
        "protocol": schedule.protocol_kind.value,
        "cycles": [{"m": c.m, "rabi": c.rabi, "frequency": c.drive_frequency,
                    "tau": c.tau, "tau_prime": c.tau_prime} for c in schedule.cycles],
        "metadata": meta,
    }


def read_schedule(source) -> PulseSchedule:
    data = _load(source)
    try:
        cycles = tuple(CycleControl(m=int(c["m"]), rabi=float(c["rabi"]),
                                    drive_frequency=float(c["frequency"]),
                                    tau=float(c["tau"]), tau_prime=float(c["tau_prime"]))
                       for c in data["cycles"])
        phase = data.get("metadata", {}).get("global_phase")
        return PulseSchedule(Protocol.parse(data["protocol"]), cycles,
                             global_phase=None if phase is None else float(phase))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed schedule document: {exc}") from exc


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))
