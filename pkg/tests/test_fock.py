import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from batterycharge import (
    DiagonalState,
    ThermalSpec,
    TransitionLedger,
    apply_two_level_rotation,
    diag_stats,
    thermal_weights,
    work_fluctuation,
)
from batterycharge.errors import (
    InconsistentDeltaE,
    IndexOutOfRange,
    InvalidAngle,
    InvalidSpec,
    TruncationTooSmall,
)


def fresh(weights, spec=ThermalSpec(1.0, 1.0)):
    s = DiagonalState(np.asarray(weights, float), spec)
    return s, TransitionLedger.identity(s)


class TestThermalSpec:
    def test_rejects_bad_omega(self):
        with pytest.raises(InvalidSpec):
            ThermalSpec(0.0, 1.0)
        with pytest.raises(InvalidSpec):
            ThermalSpec(-1.0, 1.0)

    def test_rejects_bad_beta(self):
        with pytest.raises(InvalidSpec):
            ThermalSpec(1.0, 0.0)
        with pytest.raises(InvalidSpec):
            ThermalSpec(1.0, float("nan"))

    def test_zero_temperature_limits(self):
        s = ThermalSpec.from_temperature(0.0)
        assert s.zero_temperature and s.nu == 1.0 and s.nbar == 0.0
        assert s.thermal_variance == 0.0

    def test_nu_is_coth(self):
        s = ThermalSpec(2.0, 0.7)
        assert s.nu == pytest.approx(1 / math.tanh(0.7), rel=1e-14)


class TestThermalWeights:
    def test_ground_state(self):
        w = thermal_weights(ThermalSpec(1.0, math.inf), 4).weights
        assert list(w) == [1.0, 0.0, 0.0, 0.0]

    def test_ln2_weights(self):
        w = thermal_weights(ThermalSpec(1.0, math.log(2)), 64).weights
        assert w[0] == pytest.approx(0.5, abs=1e-14)
        assert w[1] == pytest.approx(0.25, abs=1e-14)

    def test_mean_energy_bose_einstein(self):
        E, V = diag_stats(thermal_weights(ThermalSpec(1.0, 1.0), 64))
        assert E == pytest.approx(1 / (math.e - 1), abs=1e-12)
        assert E == pytest.approx(0.581977, abs=1e-6)
        assert V == pytest.approx(math.e / (math.e - 1) ** 2, abs=1e-12)
        assert V == pytest.approx(0.9206, abs=1e-4)

    def test_truncation_too_small(self):
        with pytest.raises(TruncationTooSmall):
            thermal_weights(ThermalSpec(1.0, 0.1), 50)

    def test_weights_are_read_only(self):
        w = thermal_weights(ThermalSpec(1.0, 1.0), 40).weights
        with pytest.raises(ValueError):
            w[0] = 0.0


class TestDiagStats:
    def test_ground(self):
        assert diag_stats(DiagonalState([1, 0, 0], ThermalSpec(1.0, 1.0))) == (0.0, 0.0)

    def test_half_half(self):
        assert diag_stats(DiagonalState([0.5, 0.5], ThermalSpec(1.0, 1.0))) == (0.5, 0.25)

    def test_missing_mass(self):
        with pytest.raises(TruncationTooSmall):
            DiagonalState([0.5, 0.4], ThermalSpec(1.0, 1.0))


class TestRotation:
    def test_identity_angle(self):
        s, led = fresh([0.6, 0.3, 0.1])
        s2, led2 = apply_two_level_rotation(s, led, 0, 2, 0.0)
        assert np.array_equal(s2.weights, s.weights)
        assert np.array_equal(led2.probs, led.probs)

    def test_swap(self):
        s, led = fresh([0.7, 0.1, 0.2])
        s2, _ = apply_two_level_rotation(s, led, 0, 1, math.pi / 2)
        assert tuple(s2.weights[:2]) == (0.1, 0.7)

    def test_quarter_turn(self):
        s, led = fresh([0.5, 0.3, 0.2])
        s2, _ = apply_two_level_rotation(s, led, 0, 1, math.pi / 4)
        assert s2.weights[:2] == pytest.approx([0.4, 0.4], abs=1e-15)

    def test_bad_indices(self):
        s, led = fresh([0.5, 0.5])
        with pytest.raises(IndexOutOfRange):
            apply_two_level_rotation(s, led, 0, 0, 0.1)
        with pytest.raises(IndexOutOfRange):
            apply_two_level_rotation(s, led, 0, 2, 0.1)

    def test_bad_angle(self):
        s, led = fresh([0.5, 0.5])
        with pytest.raises(InvalidAngle):
            apply_two_level_rotation(s, led, 0, 1, 2.0)
        with pytest.raises(InvalidAngle):
            apply_two_level_rotation(s, led, 0, 1, -0.1)


class TestWorkFluctuation:
    def test_identity_ledger(self):
        s, led = fresh(thermal_weights(ThermalSpec(1.0, 1.0), 40).weights)
        assert work_fluctuation(led, 0.0) == 0.0

    def test_full_shift_has_no_fluctuation(self):
        spec = ThermalSpec(1.0, 2.0)
        w = np.zeros(30)
        w[:29] = thermal_weights(spec, 29).weights
        s, led = fresh(w, spec)
        for m in range(28, -1, -1):
            s, led = apply_two_level_rotation(s, led, m, m + 1, math.pi / 2)
        assert work_fluctuation(led, 1.0) == pytest.approx(0.0, abs=1e-24)

    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_ground_to_level_k(self, k):
        spec = ThermalSpec(1.0, math.inf)
        w = np.zeros(k + 1)
        w[0] = 1.0
        s, led = fresh(w, spec)
        full, fled = apply_two_level_rotation(s, led, 0, k, math.pi / 2)
        assert work_fluctuation(fled, float(k)) == 0.0
        th = 0.4
        part, pled = apply_two_level_rotation(s, led, 0, k, th)
        dE = diag_stats(part)[0]
        expect = math.sin(th) ** 2 * math.cos(th) ** 2 * k * k
        assert work_fluctuation(pled, dE) == pytest.approx(expect, rel=1e-12)

    def test_inconsistent_delta_E(self):
        s, led = fresh([0.5, 0.5])
        with pytest.raises(InconsistentDeltaE):
            work_fluctuation(led, 0.3)


rotation_seq = st.lists(
    st.tuples(
        st.integers(0, 11),
        st.integers(0, 11),
        st.floats(0.0, math.pi / 2),
    ),
    min_size=1,
    max_size=25,
)


def _run(spec, dim, seq):
    s = thermal_weights(spec, dim) if not spec.zero_temperature else DiagonalState(np.eye(dim)[0], spec)
    led = TransitionLedger.identity(s)
    init = s
    for m, n, th in seq:
        if m == n:
            continue
        s, led = apply_two_level_rotation(s, led, m, n, th)
    return init, s, led


@given(rotation_seq, st.floats(1.0, 4.0))
def test_probability_and_ledger_conservation(seq, x):
    spec = ThermalSpec(1.0, x)
    init, s, led = _run(spec, 40, seq)
    assert abs(s.weights.sum() - 1.0) < 1e-12
    assert np.max(np.abs(led.probs.sum(axis=1) - init.weights)) < 1e-12
    assert np.max(np.abs(led.probs.sum(axis=0) - s.weights)) < 1e-12


@given(st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11), st.sampled_from([0.0, math.pi / 2])), max_size=30))
def test_permutations_preserve_spectrum(seq):
    init, s, _ = _run(ThermalSpec(1.0, 3.0), 40, seq)
    assert np.array_equal(np.sort(s.weights), np.sort(init.weights))


@given(rotation_seq)
def test_zero_temperature_fluctuation_equals_variance(seq):
    init, s, led = _run(ThermalSpec(1.0, math.inf), 12, seq)
    E, V = diag_stats(s)
    assert work_fluctuation(led, E) == pytest.approx(V, abs=1e-12)
