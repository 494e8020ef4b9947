"""Command line front end.

Every subcommand writes its primary JSON document to stdout (or ``--out``)
and a short human summary to stderr.  Errors are reported as a JSON object
on stderr with exit code 2 (bad input), 3 (infeasible synthesis) or 4
(numerical guard tripped).  ``CYCLEPULSE_VERBOSITY`` (0, 1, 2) controls how
chatty stderr is.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import documents as docs
from .controllability import check_controllability
from .errors import ControlError, ValidationError
from .propagator import QuantumState, closed_form_amplitudes, run_schedule
from .spectrum import classify_gaps, transition_table
from .synthesis import SynthesisConfig, fidelity, phase_residuals, synthesize
from .testkit import dense_schedule_oracle
from .verifier import IntegratorConfig, rwa_report

logger = logging.getLogger("cyclepulse")


def _verbosity() -> int:
    try:
        return int(os.environ.get("CYCLEPULSE_VERBOSITY", "1"))
    except ValueError:
        return 1


def _say(*parts) -> None:
    if _verbosity() >= 1:
        print(*parts, file=sys.stderr)


def _emit(obj, out: Optional[Path]) -> None:
    text = docs.dumps(obj)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _integrator(args) -> IntegratorConfig:
    return IntegratorConfig(steps_per_drive_period=args.steps,
                            norm_drift_tolerance=args.drift_tolerance,
                            field_clock=args.field_clock)


def _initial(value: Optional[str], n: int) -> Optional[QuantumState]:
    if value is None:
        return None
    if value.isdigit():
        return QuantumState.basis(int(value), n)
    return docs.read_target(value)


def cmd_classify(args) -> int:
    system = docs.read_system(args.system)
    spectrum = system.spectrum
    cls = classify_gaps(spectrum)
    result = {
        "kind": cls.kind.value,
        "levels": list(spectrum.levels),
        "shift": spectrum.shift,
        "hbar": spectrum.hbar,
        "gaps": list(cls.gaps),
        "cumulative_gaps": list(cls.cumulative_gaps),
        "protocol": system.protocol.value,
    }
    table = transition_table(spectrum, system.protocol)
    result["transition_table"] = {
        "protocol": table.protocol_kind.value,
        "frequencies": list(table.frequencies),
        "coupled_pairs": [list(p) for p in table.coupled_pairs],
    }
    _say(cls.kind.value)
    _emit(result, args.out)
    return 0


def cmd_synthesize(args) -> int:
    system = docs.read_system(args.system, args.protocol)
    target = docs.read_target(args.target, args.norm_tolerance)
    rabi = docs.parse_rabi(args.rabi, system.spectrum.n - 1) if args.rabi else system.rabi
    schedule = synthesize(system.spectrum, system.protocol, target, SynthesisConfig(rabi=rabi))
    final, _ = run_schedule(system.spectrum, schedule)
    f = fidelity(final, target)
    doc = docs.schedule_document(schedule, target)
    doc["metadata"]["predicted_fidelity"] = f
    _emit(doc, args.out)
    _say(f"predicted fidelity {f:.15f}")
    return 0


def cmd_simulate(args) -> int:
    system = docs.read_system(args.system)
    spectrum = system.spectrum
    schedule = docs.read_schedule(args.schedule)
    initial = _initial(args.initial, spectrum.n)
    final, trace = run_schedule(spectrum, schedule, initial)
    result = {
        "final": docs.complex_pairs(final.amplitudes),
        "trace": [docs.complex_pairs(s.amplitudes) for s in trace.snapshots],
    }
    if args.oracle:
        dense = dense_schedule_oracle(spectrum, schedule,
                                      None if initial is None else initial.amplitudes)
        result["oracle"] = {"max_abs_diff_dense": float(np.max(np.abs(
            dense.amplitudes - final.amplitudes)))}
        if initial is None:
            closed = closed_form_amplitudes(spectrum, schedule)
            result["oracle"]["max_abs_diff_closed_form"] = float(np.max(np.abs(
                closed.amplitudes - final.amplitudes)))
    if args.full_ode:
        reference = docs.read_target(args.target) if args.target else final
        report = rwa_report(spectrum, schedule, reference, _integrator(args), initial)
        result["rwa_report"] = report.to_dict()
        _say(f"fidelity full vs analytic {report.fidelity_full_vs_analytic:.12f}")
    _emit(result, args.out)
    return 0


def cmd_verify(args) -> int:
    system = docs.read_system(args.system)
    spectrum = system.spectrum
    schedule = docs.read_schedule(args.schedule)
    target = docs.read_target(args.target)
    report = rwa_report(spectrum, schedule, target, _integrator(args)).to_dict()
    if schedule.global_phase is not None:
        res = phase_residuals(spectrum, schedule, target)
        report["max_phase_residual"] = float(np.nanmax(np.abs(res)))
    if args.oracle:
        final, _ = run_schedule(spectrum, schedule)
        dense = dense_schedule_oracle(spectrum, schedule)
        closed = closed_form_amplitudes(spectrum, schedule)
        report["oracle"] = {
            "max_abs_diff_dense": float(np.max(np.abs(dense.amplitudes - final.amplitudes))),
            "max_abs_diff_closed_form": float(np.max(np.abs(closed.amplitudes - final.amplitudes))),
        }
    _emit(report, args.out)
    _say(f"fidelity analytic vs target {report['fidelity_analytic_vs_target']:.12f}")
    return 0


def cmd_controllability(args) -> int:
    system = docs.read_system(args.system, args.protocol)
    restrict = None
    if args.restrict:
        try:
            restrict = [int(x) for x in args.restrict.split(",") if x.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad --restrict list {args.restrict!r}") from exc
    report = check_controllability(system.spectrum, system.protocol, restrict)
    result = report.to_dict()
    result["n"] = system.spectrum.n
    result["protocol"] = system.protocol.value
    result["generators"] = ["iH0"] + [f"iH{m}" for m in (restrict or range(1, system.spectrum.n))]
    _emit(result, args.out)
    _say(f"dimension {report.dimension} of {system.spectrum.n ** 2 - 1}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyclepulse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_system=True):
        if with_system:
            p.add_argument("system", type=Path, help="system JSON document")
        p.add_argument("-o", "--out", type=Path, default=None, help="write JSON here")

    def integ(p):
        p.add_argument("--steps", type=int, default=200, help="RK4 steps per drive period")
        p.add_argument("--drift-tolerance", type=float, default=1e-8)
        p.add_argument("--field-clock", choices=("local", "global"), default="local")

    p = sub.add_parser("classify", help="gap type and transition table")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("synthesize", help="pulse schedule for a target state")
    common(p)
    p.add_argument("target", type=Path)
    p.add_argument("--rabi", default=None, help="rabi rate or comma separated list")
    p.add_argument("--protocol", choices=("auto", "system-i", "system-ii"), default=None)
    p.add_argument("--norm-tolerance", type=float, default=docs.TARGET_NORM_TOLERANCE,
                   help="largest accepted |norm - 1| of the target before renormalizing")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("simulate", help="propagate a schedule")
    common(p)
    p.add_argument("schedule", type=Path)
    p.add_argument("--initial", default=None, help="level index (1-based) or target JSON")
    p.add_argument("--full-ode", action="store_true", help="also integrate without RWA")
    p.add_argument("--target", type=Path, default=None, help="reference state for --full-ode")
    p.add_argument("--oracle", action="store_true", help="cross-check with dense oracle")
    integ(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="RWA report for a schedule against its target")
    common(p)
    p.add_argument("schedule", type=Path)
    p.add_argument("target", type=Path)
    p.add_argument("--oracle", action="store_true")
    integ(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("controllability", help="Lie closure dimension")
    common(p)
    p.add_argument("--protocol", choices=("auto", "system-i", "system-ii"), default=None)
    p.add_argument("--restrict", default=None, help="comma separated cycle indices")
    p.set_defaults(func=cmd_controllability)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel({0: logging.ERROR, 1: logging.WARNING}.get(_verbosity(), logging.INFO))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ControlError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": 2}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
