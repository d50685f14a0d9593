import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from batterycharge import ThermalSpec, best_precision, bracketed_root, extremal_fluctuations, worst_precision
from batterycharge.errors import NotBracketed
from batterycharge.gaussian import dw_bounds_at_r, v_bounds_at_r
from batterycharge.solvers import (
    fluctuation_at,
    fluctuation_turning_point,
    pure_squeezing_r,
    stable_arcosh,
    stationary_fluctuation_root,
)

T0 = ThermalSpec(1.0, math.inf)
B1 = ThermalSpec(1.0, 1.0)
R_MINUS_T0 = bracketed_root(lambda r: math.exp(2 * r) * math.cosh(4 * r) - 3, 0.0, 1.0)

specs = st.builds(ThermalSpec, st.just(1.0), st.floats(0.2, 20))
energies = st.floats(0.0, 10.0)


class TestBracketedRoot:
    def test_linear(self):
        assert bracketed_root(lambda x: x - 1, 0, 2) == pytest.approx(1.0, abs=1e-14)

    def test_precision_condition(self):
        assert R_MINUS_T0 == pytest.approx(0.28202, abs=1e-5)
        assert abs(math.exp(2 * R_MINUS_T0) * math.cosh(4 * R_MINUS_T0) - 3) < 1e-12

    def test_fluctuation_condition(self):
        u = bracketed_root(lambda u: 0.5 * (1 / u + u**3) - 3, 0.01, 3**-0.25)
        assert u == pytest.approx(0.1668, abs=1e-4)

    def test_not_bracketed(self):
        with pytest.raises(NotBracketed):
            bracketed_root(lambda x: x * x + 1, -1, 1)

    def test_iterations_reported(self):
        root, it = bracketed_root(math.cos, 0, 3, full_output=True)
        assert root == pytest.approx(math.pi / 2, abs=1e-13) and it > 0

    @given(st.floats(-50, 50), st.floats(0.1, 10))
    def test_monotone_cubic(self, c, k):
        f = lambda x: k * x**3 + x - c  # noqa: E731
        root = bracketed_root(f, -60, 60)
        assert abs(root - bracketed_root(f, -60, 60)) == 0.0
        assert abs(f(root)) <= 1e-9 * max(1.0, abs(c))


def test_stable_arcosh():
    for x in (1.0, 1 + 1e-12, 3.0, 1e12):
        assert stable_arcosh(x) == pytest.approx(math.acosh(x), rel=1e-12, abs=1e-15)
    with pytest.raises(ValueError):
        stable_arcosh(0.5)


class TestWorstPrecision:
    def test_zero(self):
        sol = worst_precision(0.0, B1)
        assert sol.r == 0.0 and sol.objective == 0.0

    def test_squeezed_vacuum(self):
        sol = worst_precision(1.0, T0)
        assert sol.r == pytest.approx(0.5 * math.acosh(3), abs=1e-14)
        assert sol.r == pytest.approx(0.881374, abs=1e-6)
        assert sol.objective == pytest.approx(2.0, abs=1e-14)

    def test_beta_one(self):
        nu, vt = B1.nu, B1.thermal_variance
        expect = math.sqrt(2 * (1 + nu) + vt) - math.sqrt(vt)
        assert worst_precision(1.0, B1).objective == pytest.approx(expect, rel=1e-14)

    @given(specs, energies)
    def test_matches_pure_squeezing_variance(self, spec, de):
        sol = worst_precision(de, spec)
        V = v_bounds_at_r(sol.r, de, spec)[1]
        assert sol.objective == pytest.approx(math.sqrt(V) - math.sqrt(spec.thermal_variance), rel=1e-9, abs=1e-12)


class TestBestPrecision:
    def test_zero(self):
        sol = best_precision(0.0, B1)
        assert sol.r == 0.0 and sol.objective == B1.thermal_variance

    def test_zero_temperature_root(self):
        assert best_precision(1.0, T0).r == pytest.approx(R_MINUS_T0, abs=1e-12)

    @given(specs, st.floats(0.01, 10.0))
    def test_objective_is_v_minus_at_root(self, spec, de):
        sol = best_precision(de, spec)
        assert sol.objective == pytest.approx(v_bounds_at_r(sol.r, de, spec)[0], rel=1e-10)
        assert sol.e_disp >= 0 and sol.e_sq >= 0
        assert sol.e_disp + sol.e_sq == pytest.approx(de, rel=1e-9)

    @given(specs, st.floats(0.01, 10.0))
    def test_grid_minimum(self, spec, de):
        sol = best_precision(de, spec)
        rs = np.linspace(0, pure_squeezing_r(de, spec), 200)
        grid = [v_bounds_at_r(float(r), de, spec)[0] for r in rs]
        assert sol.objective <= min(grid) * (1 + 1e-12)

    def test_deterministic(self):
        assert best_precision(2.3, B1) == best_precision(2.3, B1)


class TestFluctuations:
    def test_zero(self):
        for which in ("min", "max"):
            sol = extremal_fluctuations(0.0, B1, which)
            assert sol.r == 0.0 and sol.objective == 0.0

    def test_zero_temperature_max_stationary_point(self):
        r, _ = stationary_fluctuation_root(1.0, T0, "max")
        assert math.exp(-2 * r) == pytest.approx(0.1668, abs=1e-4)
        assert r == pytest.approx(-0.5 * math.log(0.166796), abs=1e-5)
        assert r == pytest.approx(0.896, abs=1e-3)

    def test_zero_temperature_max_is_pure_squeezing(self):
        # the stationary point lies beyond the feasible range here
        sol = extremal_fluctuations(1.0, T0, "max")
        assert sol.boundary and sol.e_disp == 0.0
        assert sol.r == pytest.approx(0.5 * math.acosh(3), abs=1e-14)
        assert sol.objective == pytest.approx(4.0, rel=1e-12)

    def test_min_grid_check(self):
        sol = extremal_fluctuations(2.0, B1, "min")
        rs = np.linspace(0, pure_squeezing_r(2.0, B1), 200)
        grid = [dw_bounds_at_r(float(r), 2.0, B1)[0] for r in rs]
        assert sol.objective <= min(grid) * (1 + 1e-12)

    def test_turning_point_range(self):
        for x in (0.2, 1.0, 5.0, math.inf):
            u = fluctuation_turning_point(ThermalSpec(1.0, x))
            assert 3**-0.25 <= u <= 1.0

    def test_bad_which(self):
        with pytest.raises(ValueError):
            extremal_fluctuations(1.0, B1, "mid")

    @given(specs, st.floats(0.01, 10.0), st.sampled_from(["min", "max"]))
    def test_solution_invariants(self, spec, de, which):
        sol = extremal_fluctuations(de, spec, which)
        assert sol.e_disp >= 0 and sol.e_sq >= 0
        assert sol.e_disp + sol.e_sq == pytest.approx(de, rel=1e-9)
        assert sol.objective == pytest.approx(fluctuation_at(sol.r, de, spec, which), rel=1e-12)

    @given(specs, st.floats(0.01, 10.0), st.sampled_from(["min", "max"]))
    def test_grid_extremum(self, spec, de, which):
        sol = extremal_fluctuations(de, spec, which)
        rs = np.linspace(0, pure_squeezing_r(de, spec), 200)
        idx = 0 if which == "min" else 1
        grid = [dw_bounds_at_r(float(r), de, spec)[idx] for r in rs]
        if which == "min":
            assert sol.objective <= min(grid) * (1 + 1e-12)
        else:
            assert sol.objective >= max(grid) * (1 - 1e-12)
