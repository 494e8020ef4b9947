import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cyclepulse.errors import IncompatibleProtocol, NonIncreasingLevels, TooFewLevels
from cyclepulse.spectrum import (GapKind, Protocol, auto_protocol, classify_gaps,
                                 transition_table, validate_spectrum)


def test_traceless_input_is_kept():
    s = validate_spectrum([-3, 0, 1, 2])
    assert s.levels == (-3.0, 0.0, 1.0, 2.0)
    assert s.shift == 0.0


def test_centering_records_shift():
    s = validate_spectrum([0, 1])
    assert s.levels == (-0.5, 0.5)
    assert s.shift == 0.5


@pytest.mark.parametrize("levels", [[1, 1, 2], [0, 1, 1], [2, 1]])
def test_non_increasing_rejected(levels):
    with pytest.raises(NonIncreasingLevels):
        validate_spectrum(levels)


def test_too_few_levels():
    with pytest.raises(TooFewLevels):
        validate_spectrum([1.0])


@pytest.mark.parametrize("levels, kind, gaps", [
    ([-3, 0, 1, 2], GapKind.SYSTEM_I, (3, 1, 1)),
    ([-3, -1, 0.5, 3.5], GapKind.SYSTEM_II, (2, 1.5, 3)),
    ([-0.5, 0.5], GapKind.BOTH, (1,)),
    ([0, 1, 2, 3], GapKind.NEITHER, (1, 1, 1)),
    ([0, 1, 2.5], GapKind.BOTH, (1, 1.5)),
])
def test_classify(levels, kind, gaps):
    c = classify_gaps(validate_spectrum(levels))
    assert c.kind is kind
    np.testing.assert_allclose(c.gaps, gaps, rtol=0, atol=1e-14)


def test_gap_tolerance_is_relative():
    # equal gaps up to 1e-12 relative count as equal
    c = classify_gaps(validate_spectrum([0, 5, 6, 7 + 1e-12]))
    assert c.kind is GapKind.SYSTEM_I


def test_transition_table_star(star4):
    t = transition_table(star4, "system-i")
    assert t.frequencies == (3.0, 4.0, 5.0)
    assert t.coupled_pairs == ((1, 2), (1, 3), (1, 4))


def test_transition_table_ladder(ladder4):
    t = transition_table(ladder4, Protocol.SYSTEM_II)
    np.testing.assert_allclose(t.frequencies, (2, 1.5, 3), atol=1e-15)
    assert t.coupled_pairs == ((1, 2), (2, 3), (3, 4))


def test_incompatible_protocol(star4, ladder4):
    with pytest.raises(IncompatibleProtocol):
        transition_table(star4, "system-ii")
    with pytest.raises(IncompatibleProtocol):
        transition_table(ladder4, "system-i")


def test_qubit_accepts_both(qubit):
    assert transition_table(qubit, "system-i").frequencies == transition_table(
        qubit, "system-ii").frequencies
    assert auto_protocol(qubit) is Protocol.SYSTEM_I


def test_hbar_scales_frequencies():
    s = validate_spectrum([-3, 0, 1, 2], hbar=0.5)
    assert transition_table(s, "system-i").frequencies == (6.0, 8.0, 10.0)


levels_strategy = st.lists(st.floats(0.05, 5.0), min_size=1, max_size=7).map(
    lambda gaps: np.concatenate([[0.0], np.cumsum(gaps)]))


@given(levels_strategy, st.floats(-10, 10))
def test_classification_properties(levels, offset):
    s = validate_spectrum(levels + offset)
    assert abs(sum(s.levels)) < 1e-12 * max(1.0, np.abs(levels).max() + abs(offset))
    c1, c2 = classify_gaps(s), classify_gaps(s)
    assert c1 == c2
    assert np.all(np.diff(c1.cumulative_gaps) > 0)
    for proto in Protocol:
        if c1.kind.supports(proto):
            t = transition_table(s, proto)
            e = s.energies
            for nu, (a, b) in zip(t.frequencies, t.coupled_pairs):
                assert abs(nu * s.hbar - (e[b - 1] - e[a - 1])) <= 1e-12
            assert len(set(t.frequencies)) == len(t.frequencies) or s.n == 2
