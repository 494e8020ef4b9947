"""Analytic cycle-by-cycle pulse synthesis for N-level quantum systems."""
from .controllability import check_controllability, lie_closure_dimension
from .propagator import (AmplitudeTrace, CycleControl, PulseSchedule, QuantumState,
                         closed_form_amplitudes, cycle_unitary, free_evolution, run_schedule)
from .spectrum import (EnergySpectrum, GapKind, Protocol, classify_gaps, transition_table,
                       validate_spectrum)
from .synthesis import SynthesisConfig, amplitude_decompose, fidelity, synthesize
from .verifier import IntegratorConfig, integrate_full, rwa_report

__version__ = "0.1.0"
