"""Diagonal states of a truncated harmonic oscillator.

Every fundamental protocol in this package is a sequence of two-level
rotations acting on a state that is diagonal in the Fock basis.  Such a
rotation maps diagonal states to diagonal states (up to coherences that never
enter energy statistics), so a probability vector plus a transition ledger
``p[m, n] = p_m |<n|U|m>|^2`` is all we need to track.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InconsistentDeltaE,
    IndexOutOfRange,
    InvalidAngle,
    InvalidSpec,
    TruncationTooSmall,
)

WEIGHT_TOL = 1e-12
TAIL_TOL = 1e-12
DELTA_E_TOL = 1e-9
ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class ThermalSpec:
    """Mode frequency and inverse temperature (hbar = k_B = 1).

    ``beta = math.inf`` encodes zero temperature.
    """

    omega: float
    beta: float

    def __post_init__(self):
        omega, beta = float(self.omega), float(self.beta)
        if not (math.isfinite(omega) and omega > 0):
            raise InvalidSpec(f"omega must be positive and finite, got {self.omega!r}")
        if math.isnan(beta) or beta <= 0:
            raise InvalidSpec(f"beta must be positive or +inf, got {self.beta!r}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_temperature(cls, temperature: float, omega: float = 1.0) -> "ThermalSpec":
        if temperature < 0:
            raise InvalidSpec(f"temperature must be >= 0, got {temperature!r}")
        beta = math.inf if temperature == 0 else 1.0 / temperature
        return cls(omega=omega, beta=beta)

    @property
    def x(self) -> float:
        """Dimensionless ratio beta*omega."""
        return self.beta * self.omega

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    @property
    def nu(self) -> float:
        """coth(beta*omega/2), equal to 2*nbar + 1."""
        if self.zero_temperature:
            return 1.0
        return 1.0 + 2.0 * self.nbar

    @property
    def nbar(self) -> float:
        """Bose-Einstein occupation 1/(e^{beta*omega} - 1)."""
        if self.zero_temperature:
            return 0.0
        return 1.0 / math.expm1(self.x)

    @property
    def thermal_energy(self) -> float:
        return self.omega * self.nbar

    @property
    def thermal_variance(self) -> float:
        n = self.nbar
        return self.omega**2 * n * (n + 1.0)

    def min_dim(self, tail: float = TAIL_TOL) -> int:
        """Smallest dim with thermal tail mass e^{-dim*x} below ``tail``."""
        if self.zero_temperature:
            return 1
        return max(1, math.floor(math.log(1.0 / tail) / self.x) + 1)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DiagonalState:
    """Fock-level probability weights ``weights[n]`` for n = 0..dim-1."""

    weights: np.ndarray
    spec: ThermalSpec

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d array")
        if np.any(w < -WEIGHT_TOL):
            raise ValueError("weights must be nonnegative")
        total = w.sum()
        if total < 1.0 - WEIGHT_TOL:
            raise TruncationTooSmall(f"weights sum to {total!r}, missing mass {1 - total:.3e}")
        if total > 1.0 + WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r} > 1")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.weights.size

    @property
    def energies(self) -> np.ndarray:
        return self.spec.omega * np.arange(self.dim)


@dataclass(frozen=True)
class TransitionLedger:
    """Accumulated transition probabilities ``probs[m, n] = p_{m -> n}``.

    Row sums stay equal to the initial weights, column sums are the current
    weights.
    """

    probs: np.ndarray
    spec: ThermalSpec

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("ledger must be a square matrix")
        if np.any(p < -WEIGHT_TOL):
            raise ValueError("ledger entries must be nonnegative")
        if abs(p.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"ledger mass {p.sum()!r} differs from 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def identity(cls, state: DiagonalState) -> "TransitionLedger":
        return cls(np.diag(state.weights), state.spec)

    @property
    def dim(self) -> int:
        return self.probs.shape[0]

    @property
    def initial_weights(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    @property
    def final_weights(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    @property
    def implied_delta_E(self) -> float:
        levels = np.arange(self.dim)
        return self.spec.omega * float(self.final_weights @ levels - self.initial_weights @ levels)


def thermal_weights(spec: ThermalSpec, dim: int) -> DiagonalState:
    """Truncated Gibbs state ``(1 - e^{-x}) e^{-n x}`` with x = beta*omega.

    Raises TruncationTooSmall when the discarded tail mass ``e^{-dim x}`` is
    not below 1e-12.
    """
    if dim < 1:
        raise TruncationTooSmall("dim must be positive")
    w = np.zeros(dim)
    if spec.zero_temperature:
        w[0] = 1.0
        return DiagonalState(w, spec)
    x = spec.x
    if -dim * x > math.log(TAIL_TOL):
        raise TruncationTooSmall(
            f"thermal tail e^(-{dim}*{x:g}) >= {TAIL_TOL:g}; need dim >= {spec.min_dim()}"
        )
    w = -math.expm1(-x) * np.exp(-x * np.arange(dim))
    # renormalize the (sub-1e-12) truncation loss so invariants hold exactly
    return DiagonalState(w / w.sum(), spec)


def diag_stats(state: DiagonalState) -> tuple[float, float]:
    """Mean energy and energy variance of a diagonal state."""
    n = np.arange(state.dim)
    w = state.weights
    mean = float(w @ n)
    var = float(w @ (n - mean) ** 2)
    return state.spec.omega * mean, state.spec.omega**2 * max(var, 0.0)


def _check_rotation(dim: int, m: int, n: int, theta: float) -> float:
    if m == n or not (0 <= m < dim and 0 <= n < dim):
        raise IndexOutOfRange(f"invalid level pair ({m}, {n}) for dim {dim}")
    if not (-ANGLE_TOL <= theta <= math.pi / 2 + ANGLE_TOL):
        raise InvalidAngle(f"theta={theta!r} outside [0, pi/2]")
    return min(max(theta, 0.0), math.pi / 2)


def rotate_inplace(w: np.ndarray, probs: np.ndarray | None, m: int, n: int, theta: float) -> None:
    """Mutating kernel behind :func:`apply_two_level_rotation`.

    Exposed for protocols that build long rotation sequences on scratch
    arrays; callers are responsible for argument checks.
    """
    if theta == math.pi / 2:
        w[[m, n]] = w[[n, m]]
        if probs is not None:
            probs[:, [m, n]] = probs[:, [n, m]]
        return
    s2 = math.sin(theta) ** 2
    c2 = 1.0 - s2
    wm, wn = w[m], w[n]
    w[m] = c2 * wm + s2 * wn
    w[n] = c2 * wn + s2 * wm
    if probs is not None:
        cm = probs[:, m].copy()
        cn = probs[:, n]
        probs[:, m] = c2 * cm + s2 * cn
        probs[:, n] = c2 * cn + s2 * cm


def apply_two_level_rotation(
    state: DiagonalState, ledger: TransitionLedger, m: int, n: int, theta: float
) -> tuple[DiagonalState, TransitionLedger]:
    """Rotate levels m and n by angle theta in [0, pi/2].

    Weights mix as ``(w_m, w_n) -> (c^2 w_m + s^2 w_n, c^2 w_n + s^2 w_m)``
    and the ledger columns m, n mix the same way.
    """
    theta = _check_rotation(state.dim, m, n, theta)
    if ledger.dim != state.dim:
        raise ValueError("state and ledger dimensions differ")
    w = state.weights.copy()
    probs = ledger.probs.copy()
    rotate_inplace(w, probs, m, n, theta)
    return DiagonalState(w, state.spec), TransitionLedger(probs, ledger.spec)


def ledger_fluctuation(probs: np.ndarray, energies: np.ndarray, delta_E: float) -> float:
    """sum_{m,n} p[m,n] (E_n - E_m - delta_E)^2 for arbitrary level energies."""
    gap = energies[None, :] - energies[:, None] - delta_E
    return float(np.sum(probs * gap * gap))


def work_fluctuation(ledger: TransitionLedger, delta_E: float) -> float:
    """Mean squared deviation of two-point-measurement work from delta_E."""
    implied = ledger.implied_delta_E
    scale = max(abs(implied), ledger.spec.omega)
    if abs(implied - delta_E) > DELTA_E_TOL * scale:
        raise InconsistentDeltaE(f"ledger implies delta_E={implied!r}, got {delta_E!r}")
    return ledger_fluctuation(ledger.probs, ledger.spec.omega * np.arange(ledger.dim), delta_E)
