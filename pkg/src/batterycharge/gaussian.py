"""Single-mode Gaussian states and closed-form charging statistics.

Conventions: quadratures X = (x, p) with vacuum covariance gamma = I, mean
photon number ``(tr gamma - 2)/4 + |xbar|^2/2``.  The squeezer
``S(r) = diag(e^{-r}, e^{r})`` squeezes x; rotations are
``R(t) = [[cos t, sin t], [-sin t, cos t]]``.  A general local Gaussian
unitary acts as ``X -> R(theta) S(r) R(phi) X + xi``.

All energies are absolute (multiplied by omega).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleSqueezing
from .fock import ThermalSpec

FEASIBILITY_TOL = 1e-12


def rotation_matrix(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s], [-s, c]])


def squeeze_matrix(r: float) -> np.ndarray:
    return np.diag([math.exp(-r), math.exp(r)])


@dataclass(frozen=True)
class GaussianState:
    """First moments and covariance matrix of a single mode."""

    xbar: np.ndarray
    gamma: np.ndarray
    spec: ThermalSpec

    def __post_init__(self):
        xbar = np.array(self.xbar, dtype=float).reshape(2)
        gamma = np.array(self.gamma, dtype=float).reshape(2, 2)
        if not np.allclose(gamma, gamma.T, rtol=0, atol=1e-12 * max(1.0, np.abs(gamma).max())):
            raise ValueError("covariance matrix must be symmetric")
        gamma = 0.5 * (gamma + gamma.T)
        if np.linalg.det(gamma) < 1 - 1e-9 or gamma[0, 0] <= 0:
            raise ValueError("covariance violates the uncertainty relation")
        xbar.setflags(write=False)
        gamma.setflags(write=False)
        object.__setattr__(self, "xbar", xbar)
        object.__setattr__(self, "gamma", gamma)


@dataclass(frozen=True)
class SymplecticParams:
    """Parameters of ``X -> R(theta) S(r) R(phi) X + xi``.

    A negative r is folded into the rotations, since
    ``S(-r) = R(pi/2) S(r) R(-pi/2)``.
    """

    theta: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    xi: tuple[float, float] = field(default=(0.0, 0.0))

    def __post_init__(self):
        xi = tuple(float(v) for v in np.asarray(self.xi, dtype=float).reshape(2))
        if not all(math.isfinite(v) for v in xi):
            raise ValueError("displacement must be finite")
        object.__setattr__(self, "xi", xi)
        if self.r < 0:
            object.__setattr__(self, "r", -float(self.r))
            object.__setattr__(self, "theta", float(self.theta) + math.pi / 2)
            object.__setattr__(self, "phi", float(self.phi) - math.pi / 2)

    @property
    def xi_effective(self) -> np.ndarray:
        """Displacement expressed in the squeezer's own axes, R(-theta) xi."""
        return rotation_matrix(-self.theta) @ np.asarray(self.xi)


def symplectic_matrix(params: SymplecticParams) -> np.ndarray:
    return rotation_matrix(params.theta) @ squeeze_matrix(params.r) @ rotation_matrix(params.phi)


def thermal_gaussian(spec: ThermalSpec) -> GaussianState:
    return GaussianState(np.zeros(2), spec.nu * np.eye(2), spec)


def apply_symplectic(state: GaussianState, params: SymplecticParams) -> GaussianState:
    S = symplectic_matrix(params)
    return GaussianState(S @ state.xbar + np.asarray(params.xi), S @ state.gamma @ S.T, state.spec)


def photon_moments(state: GaussianState) -> tuple[float, float, float]:
    """Return (<N>, <N^2>, Var N) of a Gaussian state."""
    g, x = state.gamma, state.xbar
    mean = 0.25 * (np.trace(g) - 2.0) + 0.5 * float(x @ x)
    var = 0.5 * float(x @ g @ x) + 0.125 * (np.trace(g @ g) - 2.0)
    return float(mean), float(var + mean * mean), float(var)


def energy_stats(state: GaussianState) -> tuple[float, float]:
    """Energy mean and variance, omega*<N> and omega^2*Var N."""
    mean, _, var = photon_moments(state)
    w = state.spec.omega
    return w * mean, w * w * var


def displacement_only_sigma(delta_E: float, spec: ThermalSpec) -> float:
    """Standard-deviation increase when charging by displacement alone."""
    if delta_E < 0:
        raise ValueError("delta_E must be nonnegative")
    w = spec.omega
    vt = spec.thermal_variance / w**2
    return w * (math.sqrt(spec.nu * delta_E / w + vt) - math.sqrt(vt))


def squeezing_energy(r: float, spec: ThermalSpec) -> float:
    """Energy injected by squeezing a thermal state, (omega nu/2)(cosh 2r - 1)."""
    # cosh(2r) - 1 = 2 sinh(r)^2 avoids cancellation at small r
    return spec.omega * spec.nu * math.sinh(r) ** 2


def _squeeze_terms(r: float, spec: ThermalSpec) -> tuple[float, float]:
    """Displacement-free parts of (V, dW2) in omega^2 units.

    Equal to (nu^2 cosh 4r - 1)/4 and to that plus V(thermal) minus
    2 nbar (nbar + 1) cosh 2r, rewritten with nu^2 - 1 = 4 nbar (nbar + 1)
    as sums of nonnegative terms so that nothing cancels at high temperature.
    """
    nn = spec.nbar * (spec.nbar + 1.0)
    half_s2 = 0.5 * math.sinh(2 * r) ** 2
    v = nn * math.cosh(4 * r) + half_s2
    dw = 4.0 * nn * math.cosh(2 * r) * math.sinh(r) ** 2 + half_s2
    return v, dw


def _disp_term(r: float, xi1_sq: float, xi2_sq: float, spec: ThermalSpec) -> float:
    return 0.5 * spec.nu * (xi1_sq * math.exp(-2 * r) + xi2_sq * math.exp(2 * r))


def gaussian_charge_stats(params: SymplecticParams, spec: ThermalSpec) -> tuple[float, float, float]:
    """Energy input, final energy variance and work fluctuation.

    The initial state is thermal, so phi drops out and theta only turns the
    displacement into the squeezer's frame.  With xi = R(-theta) xi_lab,

        V   = (omega^2/4) [nu^2 cosh 4r - 1 + 2 nu (xi_1^2 e^{-2r} + xi_2^2 e^{2r})]
        dW2 = V + V(thermal) - 2 omega^2 nbar (nbar + 1) cosh 2r

    Returns:
        (delta_E, V_final, delta_W2) in absolute units.
    """
    w, r = spec.omega, params.r
    xi1, xi2 = params.xi_effective
    delta_E = squeezing_energy(r, spec) + 0.5 * w * (xi1 * xi1 + xi2 * xi2)
    v0, dw0 = _squeeze_terms(r, spec)
    d = _disp_term(r, xi1 * xi1, xi2 * xi2, spec)
    return delta_E, w * w * (v0 + d), w * w * (dw0 + d)


def residual_displacement(r: float, delta_E: float, spec: ThermalSpec) -> float:
    """|xi|^2 = 2 (delta_E - squeezing energy)/omega left for displacement.

    Raises InfeasibleSqueezing when negative beyond round-off.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    res = 2.0 * (delta_E - squeezing_energy(r, spec)) / spec.omega
    if res < 0:
        if res < -FEASIBILITY_TOL * max(1.0, 2.0 * delta_E / spec.omega):
            raise InfeasibleSqueezing(f"squeezing r={r!r} exceeds delta_E={delta_E!r}")
        res = 0.0
    return res


def v_pm(r: float, residual: float, spec: ThermalSpec) -> tuple[float, float]:
    """Variance with the residual displacement along the squeezed (-) or
    anti-squeezed (+) axis.  No feasibility check: ``residual`` may be
    negative, which analytically continues both curves past the boundary.
    """
    v0, _ = _squeeze_terms(r, spec)
    w2 = spec.omega**2
    return w2 * (v0 + _disp_term(r, residual, 0.0, spec)), w2 * (v0 + _disp_term(r, 0.0, residual, spec))


def dw_pm(r: float, residual: float, spec: ThermalSpec) -> tuple[float, float]:
    """Unchecked counterpart of :func:`dw_bounds_at_r`, see :func:`v_pm`."""
    _, dw0 = _squeeze_terms(r, spec)
    w2 = spec.omega**2
    return w2 * (dw0 + _disp_term(r, residual, 0.0, spec)), w2 * (dw0 + _disp_term(r, 0.0, residual, spec))


def v_bounds_at_r(r: float, delta_E: float, spec: ThermalSpec) -> tuple[float, float]:
    """Smallest and largest final variance at squeezing r and energy delta_E."""
    return v_pm(r, residual_displacement(r, delta_E, spec), spec)


def dw_bounds_at_r(r: float, delta_E: float, spec: ThermalSpec) -> tuple[float, float]:
    """Work fluctuations of the two displacement directions in v_bounds_at_r."""
    return dw_pm(r, residual_displacement(r, delta_E, spec), spec)
