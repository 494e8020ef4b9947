import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cyclepulse.errors import (IndexOutOfRange, NegativeDuration, ScheduleMismatch,
                               UnnormalizedInput)
from cyclepulse.propagator import (CycleControl, PulseSchedule, QuantumState,
                                   closed_form_amplitudes, cycle_unitary, free_evolution,
                                   run_schedule)
from cyclepulse.spectrum import Protocol, transition_table, validate_spectrum
from cyclepulse.testkit import (coupling_operator, dense_schedule_oracle,
                                matrix_exponential_oracle, random_schedule, random_spectrum)

SQ = 1 / np.sqrt(2)


def make_schedule(spectrum, protocol, rabi, taus, tau_primes):
    nus = transition_table(spectrum, protocol).frequencies
    return PulseSchedule(protocol, tuple(
        CycleControl(m=m, rabi=r, drive_frequency=nu, tau=t, tau_prime=tp)
        for m, (r, nu, t, tp) in enumerate(zip(rabi, nus, taus, tau_primes), start=1)))


def test_cycle_unitary_zero_angle():
    np.testing.assert_array_equal(cycle_unitary("system-i", 2, 1, 0.0), np.eye(2))


def test_cycle_unitary_quarter_turn():
    u = cycle_unitary("system-i", 2, 1, np.pi / 2)
    np.testing.assert_allclose(u, [[0, -1j], [-1j, 0]], atol=1e-16)


def test_cycle_unitary_matches_series_oracle():
    # exp(-i H' t) with H' = (rabi/2)(|2><3| + |3><2|), rabi t / 2 = pi/4
    rabi = 0.8
    t = (np.pi / 4) / (rabi / 2)
    oracle = matrix_exponential_oracle(0.5 * rabi * coupling_operator(3, "system-ii", 2), t)
    u = cycle_unitary("system-ii", 3, 2, np.pi / 4)
    np.testing.assert_allclose(u, oracle, atol=1e-12)
    np.testing.assert_allclose(u[1:, 1:], [[SQ, -1j * SQ], [-1j * SQ, SQ]], atol=1e-15)
    assert u[0, 0] == 1 and not u[0, 1:].any()


@pytest.mark.parametrize("m", [0, 3])
def test_cycle_unitary_index(m):
    with pytest.raises(IndexOutOfRange):
        cycle_unitary("system-i", 3, m, 0.1)


@given(st.sampled_from(list(Protocol)), st.integers(2, 8), st.data(),
       st.floats(-10, 10))
def test_cycle_unitary_is_unitary(protocol, n, data, theta):
    m = data.draw(st.integers(1, n - 1))
    u = cycle_unitary(protocol, n, m, theta)
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-12


def test_free_evolution(qubit):
    psi = QuantumState([SQ, SQ])
    assert np.array_equal(free_evolution(psi, qubit, 0.0).amplitudes, psi.amplitudes)
    np.testing.assert_allclose(free_evolution([1, 0], qubit, 2 * np.pi).amplitudes, [-1, 0],
                               atol=1e-15)
    np.testing.assert_allclose(free_evolution(psi, qubit, np.pi).amplitudes,
                               [SQ * 1j, -SQ * 1j], atol=1e-15)
    with pytest.raises(NegativeDuration):
        free_evolution(psi, qubit, -1.0)


def test_zero_schedule_is_identity(ladder4, rng):
    sched = make_schedule(ladder4, "system-ii", [1, 1, 1], [0, 0, 0], [0, 0, 0])
    psi = QuantumState.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
    final, trace = run_schedule(ladder4, sched, psi)
    np.testing.assert_array_equal(final.amplitudes, psi.amplitudes)
    assert len(trace.snapshots) == 3


def test_qubit_worked_example(qubit):
    # Omega' = 0.05 -> rabi 0.1; tau = 5 pi gives theta = pi/4, T = 6 pi
    sched = make_schedule(qubit, "system-i", [0.1], [5 * np.pi], [np.pi])
    expected = -SQ * np.array([1, -1j])
    # hand evaluation: a1 = e^{i 3pi} cos(pi/4), a2 = -i e^{-i 3pi} sin(pi/4)
    hand = np.array([np.exp(3j * np.pi) * SQ, -1j * np.exp(-3j * np.pi) * SQ])
    np.testing.assert_allclose(hand, expected, atol=1e-15)
    final, _ = run_schedule(qubit, sched)
    np.testing.assert_allclose(final.amplitudes, expected, atol=1e-12)
    np.testing.assert_allclose(dense_schedule_oracle(qubit, sched).amplitudes, expected, atol=1e-12)
    np.testing.assert_allclose(closed_form_amplitudes(qubit, sched).amplitudes, expected,
                               atol=1e-12)


def test_ladder_zero_last_pulse_leaves_top_empty(ladder3):
    sched = make_schedule(ladder3, "system-ii", [0.7, 0.9], [1.3, 0.0], [0.4, 2.2])
    final, _ = run_schedule(ladder3, sched)
    assert final.amplitudes[2] == 0


def test_closed_form_all_zero_angles(ladder4):
    sched = make_schedule(ladder4, "system-ii", [1, 1, 1], [0, 0, 0], [0.3, 1.1, 2.0])
    out = closed_form_amplitudes(ladder4, sched).amplitudes
    e1 = ladder4.levels[0]
    np.testing.assert_allclose(out, [np.exp(-1j * e1 * 3.4), 0, 0, 0], atol=1e-14)


def test_closed_form_ladder_full_transfer(ladder3):
    # T = (0, 0) is the limit of an infinitely strong drive
    rabi = 1e9
    tau = np.pi / rabi
    sched = make_schedule(ladder3, "system-ii", [rabi, rabi], [tau, tau], [0, 0])
    out = closed_form_amplitudes(ladder3, sched).amplitudes
    assert abs(abs(out[2]) - 1) < 1e-12


def test_schedule_mismatch(star4, ladder4):
    sched = make_schedule(ladder4, "system-ii", [1, 1, 1], [1, 1, 1], [0, 0, 0])
    with pytest.raises(ScheduleMismatch):
        run_schedule(validate_spectrum([-3, -1, 0.5, 3.6]), sched)
    with pytest.raises(ScheduleMismatch):
        run_schedule(ladder4, PulseSchedule("system-ii", sched.cycles[:2]))
    with pytest.raises(ScheduleMismatch):
        PulseSchedule("system-ii", (sched.cycles[1], sched.cycles[0]))


def test_unnormalized_initial(qubit):
    with pytest.raises(UnnormalizedInput):
        QuantumState([1.0, 0.1])


def test_negative_durations_rejected():
    with pytest.raises(NegativeDuration):
        CycleControl(m=1, rabi=1.0, drive_frequency=1.0, tau=-1.0, tau_prime=0.0)


def test_star_recursion_structure(star4, rng):
    """Cycle m only rephases levels outside {1, m+1}."""
    sched = random_schedule(star4, "system-i", rng)
    psi = QuantumState.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
    e = star4.energies
    a = psi.amplitudes
    for c, snap in zip(sched.cycles, run_schedule(star4, sched, psi)[1].snapshots):
        for k in range(4):
            if k not in (0, c.m):
                assert abs(snap.amplitudes[k] - np.exp(-1j * e[k] * c.total) * a[k]) < 1e-13
        a = snap.amplitudes


@given(st.sampled_from(list(Protocol)), st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_upper_levels_stay_empty(protocol, n, seed):
    rng = np.random.default_rng(seed)
    spectrum = random_spectrum(n, protocol, rng)
    sched = random_schedule(spectrum, protocol, rng)
    _, trace = run_schedule(spectrum, sched)
    for m, snap in enumerate(trace.snapshots, start=1):
        assert not snap.amplitudes[m + 1:].any()
        assert abs(np.linalg.norm(snap.amplitudes) - 1) <= 1e-12


@given(st.sampled_from(list(Protocol)), st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_closed_form_matches_recursion(protocol, n, seed):
    rng = np.random.default_rng(seed)
    spectrum = random_spectrum(n, protocol, rng)
    sched = random_schedule(spectrum, protocol, rng)
    final, _ = run_schedule(spectrum, sched)
    closed = closed_form_amplitudes(spectrum, sched)
    assert np.max(np.abs(final.amplitudes - closed.amplitudes)) <= 1e-12


@given(st.sampled_from(list(Protocol)), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_norm_preserved_from_any_initial(protocol, n, seed):
    rng = np.random.default_rng(seed)
    spectrum = random_spectrum(n, protocol, rng)
    sched = random_schedule(spectrum, protocol, rng)
    psi = QuantumState.normalized(rng.normal(size=n) + 1j * rng.normal(size=n))
    final, _ = run_schedule(spectrum, sched, psi)
    assert abs(np.linalg.norm(final.amplitudes) - 1) <= 1e-12
    dense = dense_schedule_oracle(spectrum, sched, psi.amplitudes)
    assert np.max(np.abs(dense.amplitudes - final.amplitudes)) <= 1e-11


def test_schedule_bookkeeping(ladder4):
    sched = make_schedule(ladder4, "system-ii", [1, 2, 3], [1, 2, 3], [0.5, 0, 1])
    np.testing.assert_allclose(sched.cycle_boundaries, [1.5, 3.5, 7.5])
    assert sched.durations == (1, 0.5, 2, 0, 3, 1)
    np.testing.assert_allclose(sched.angles(), [0.5, 2.0, 4.5])
