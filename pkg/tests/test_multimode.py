import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from batterycharge import ModeSet, SymplecticParams, ThermalSpec, displacement_split_variance, optimize_local_split
from batterycharge.errors import ConfigError, GridTooFine
from batterycharge.gaussian import gaussian_charge_stats
from batterycharge.multimode import even_split_result, mode_stats, single_mode_result
from batterycharge.oracle import two_mode_stats


def pair(omega_b=1.0, beta=1.0):
    return ModeSet.from_frequencies([1.0, omega_b], beta)


class TestModeSet:
    def test_shared_beta(self):
        with pytest.raises(ConfigError):
            ModeSet((ThermalSpec(1.0, 1.0), ThermalSpec(1.0, 2.0)))

    def test_nonempty(self):
        with pytest.raises(ConfigError):
            ModeSet(())

    def test_labels(self):
        assert pair().labels == ("A", "B")


class TestDisplacementSplit:
    def test_reduces_to_single_mode(self):
        m = pair()
        a = m.specs[0]
        single = a.nu * a.omega * 1.3 + a.thermal_variance
        assert displacement_split_variance(1.0, 1.3, m) == pytest.approx(single + a.thermal_variance, rel=1e-15)

    def test_equal_frequencies_independent_of_p(self):
        m = pair()
        assert displacement_split_variance(0.3, 2.0, m) == displacement_split_variance(0.7, 2.0, m)

    def test_lower_frequency_mode_wins(self):
        m = pair(2.0)
        ps = np.linspace(0, 1, 101)
        vals = [displacement_split_variance(float(p), 1.0, m) for p in ps]
        assert int(np.argmin(vals)) == 100

    def test_bad_p(self):
        with pytest.raises(ValueError):
            displacement_split_variance(1.2, 1.0, pair())


class TestOptimizeSplit:
    def test_one_mode(self):
        m = ModeSet((ThermalSpec(1.0, 1.0),))
        res = optimize_local_split(1.5, m)
        assert res.allocation == (1.5,)

    def test_low_temperature_fundamental_matches_single(self):
        m = pair(1.0, 10.0)
        for de in np.arange(0, 61) / 20:
            opt = optimize_local_split(float(de), m, "variance", "fundamental")
            single = single_mode_result(float(de), m, 0, "variance", "fundamental")
            assert abs(opt.total_V - single.total_V) <= 1e-3

    def test_split_beats_both_alternatives(self):
        m = pair(1.0, 1.0)
        opt = optimize_local_split(1.5, m, "variance", "fundamental")
        single = single_mode_result(1.5, m, 0, "variance", "fundamental")
        even = even_split_result(1.5, m, "variance", "fundamental")
        assert opt.total_V <= single.total_V and opt.total_V <= even.total_V
        assert sum(opt.allocation) == pytest.approx(1.5, abs=1e-12)

    def test_grid_too_fine(self):
        with pytest.raises(GridTooFine):
            optimize_local_split(1.0, ModeSet.from_frequencies([1.0] * 6, 1.0), quantum=1e-3)

    def test_rounds_down_with_warning(self):
        with pytest.warns(UserWarning):
            res = optimize_local_split(1.01, pair(), quantum=0.05)
        assert sum(res.allocation) == pytest.approx(1.0, abs=1e-12)

    def test_unknown_strategy(self):
        with pytest.raises(ConfigError):
            optimize_local_split(1.0, pair(), strategy="teleport")

    @pytest.mark.parametrize("beta", [math.inf, 1.0])
    def test_two_frequency_fluctuation_zeros(self, beta):
        m = pair(2.0, beta)
        for i in range(3):
            for j in range(3):
                res = optimize_local_split(float(i + 2 * j), m, "fluctuation", "fundamental")
                assert res.total_dW2 < 1e-6

    @given(
        st.sampled_from([0.1, 0.7, 1.0]),
        st.integers(0, 40),
        st.sampled_from(["gaussian_optimal", "displacement", "squeeze_only", "fundamental"]),
        st.sampled_from(["variance", "fluctuation"]),
    )
    def test_never_detrimental(self, temp, units, strategy, objective):
        m = ModeSet((ThermalSpec.from_temperature(temp), ThermalSpec.from_temperature(temp)))
        de = units / 20
        opt = optimize_local_split(de, m, objective, strategy)
        single = single_mode_result(de, m, 0, objective, strategy)
        assert opt.value <= single.value + 1e-12

    @given(st.floats(0.0, 3.0), st.floats(0.5, 3.0), st.sampled_from(["gaussian_optimal", "displacement", "squeeze_only"]))
    def test_totals_are_additive(self, de, x, strategy):
        m = pair(2.0, x)
        res = optimize_local_split(round(de * 20) / 20, m, "fluctuation", strategy)
        parts = [mode_stats(s, e, strategy, "fluctuation") for s, e in zip(m.specs, res.allocation)]
        assert res.total_V == pytest.approx(sum(p[0] for p in parts), rel=1e-12)
        assert res.total_dW2 == pytest.approx(sum(p[1] for p in parts), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize(
    "pa,pb",
    [
        (SymplecticParams(0.3, 0.2, 0.1, (0.5, -0.3)), SymplecticParams(1.0, 0.1, 0.0, (0.2, 0.4))),
        (SymplecticParams(r=0.25), SymplecticParams(xi=(0.6, 0.0))),
    ],
)
def test_local_additivity_against_joint_oracle(pa, pb):
    specs = (ThermalSpec(1.0, 2.0), ThermalSpec(2.0, 1.0))
    joint = two_mode_stats((pa, pb), specs)
    a = gaussian_charge_stats(pa, specs[0])
    b = gaussian_charge_stats(pb, specs[1])
    for j, x, y in zip(joint, a, b):
        assert j == pytest.approx(x + y, rel=1e-6, abs=1e-9)
