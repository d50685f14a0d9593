"""Charging protocols built from two-level rotations in the Fock basis.

* :func:`optimal_precision_charge` reaches a target energy with the smallest
  final energy variance.  It first permutes the thermal weights so the
  largest ones sit closest to the target, then repairs the energy with
  rotations between level pairs ordered by variance cost per unit energy.
* :func:`min_fluctuation_charge` reaches a target with the smallest work
  fluctuation: an upward shift by the integer part of the energy input and a
  partial shift of the thermal tail for the fractional part.
* :func:`joint_optimal_precision_charge` applies the same precision strategy
  greedily to the product levels of several modes.

Energies are in units of omega wherever a name carries ``eps``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionCapExceeded,
    EnergyExceedsDimension,
    PhaseLimitExceeded,
    TruncationTooSmall,
    ZeroTemperatureUnsupported,
)
from .fock import (
    DiagonalState,
    ThermalSpec,
    TransitionLedger,
    apply_two_level_rotation,
    diag_stats,
    ledger_fluctuation,
    rotate_inplace,
    thermal_weights,
)

MARGIN = 8
MAX_PHASES = 64
TARGET_TOL = 1e-9
JOINT_DIM_CAP = 4096
# below this relative gap the target counts as reached inside a loop
_HIT_TOL = 1e-14


class Rotation(NamedTuple):
    """One recorded two-level rotation.

    ``phase`` is 0 for permutation steps.  ``cost`` is the variance change
    per unit of energy moved (omega^2 units), or nan where not meaningful.
    """

    m: int
    n: int
    theta: float
    phase: int = 0
    cost: float = math.nan


@dataclass(frozen=True)
class TargetSpec:
    """Target energy eps = eps0 + delta_eps and its anchor level k."""

    delta_eps: float
    eps: float
    k: int

    @classmethod
    def from_initial(cls, eps0: float, delta_eps: float) -> "TargetSpec":
        if delta_eps < 0:
            raise ValueError("delta_eps must be nonnegative")
        eps = eps0 + delta_eps
        lo, hi = math.floor(eps), math.ceil(eps)
        # ties go to the upper level
        k = lo if eps - lo < hi - eps else hi
        return cls(delta_eps, eps, k)

    @property
    def rounded_down(self) -> bool:
        return self.k == math.floor(self.eps) and self.k != math.ceil(self.eps)


@dataclass(frozen=True)
class JointState:
    """Diagonal state on the product levels of several modes."""

    weights: np.ndarray
    levels: np.ndarray
    energies: np.ndarray


@dataclass(frozen=True)
class ChargingReport:
    """Outcome of a charging protocol, in absolute energy units."""

    delta_E: float
    final_E: float
    final_V: float
    delta_sigma: float
    delta_W2: float
    steps: list[Rotation]
    final_state: DiagonalState | JointState
    initial_E: float = 0.0
    initial_V: float = 0.0
    prep_steps: list[Rotation] = field(default_factory=list)
    ledger: np.ndarray | None = None

    @property
    def all_steps(self) -> list[Rotation]:
        return list(self.prep_steps) + list(self.steps)


def zero_temp_bounds(delta_eps: float, d: float = math.inf) -> tuple[float, float]:
    """Smallest and largest final variance (omega^2 units) from the ground state.

    The largest value belongs to a superposition of the ground and the top
    level of a d-level system and is unbounded for an oscillator.
    """
    if delta_eps < 0:
        raise ValueError("delta_eps must be nonnegative")
    if math.isfinite(d) and delta_eps > d - 1:
        raise EnergyExceedsDimension(f"delta_eps={delta_eps} exceeds d-1={d - 1}")
    vmin = (delta_eps - math.floor(delta_eps)) * (math.ceil(delta_eps) - delta_eps)
    vmax = delta_eps * ((d - 1) - delta_eps) if math.isfinite(d) else math.inf
    return vmin, vmax


def min_fluctuation_value(delta_eps: float) -> float:
    """Smallest work fluctuation (omega^2 units) for an energy input delta_eps."""
    if delta_eps < 0:
        raise ValueError("delta_eps must be nonnegative")
    return (delta_eps - math.floor(delta_eps)) * (math.ceil(delta_eps) - delta_eps)


def permutation_swaps(src: Sequence[int]) -> list[tuple[int, int]]:
    """Transpositions that turn ``w`` into ``w[src]`` when applied in order."""
    src = list(src)
    cur = list(range(len(src)))
    where = list(range(len(src)))
    swaps = []
    for pos, want in enumerate(src):
        if cur[pos] == want:
            continue
        q = where[want]
        swaps.append((pos, q))
        cur[pos], cur[q] = cur[q], cur[pos]
        where[cur[pos]], where[cur[q]] = pos, q
    return swaps


def replay(initial: DiagonalState, steps: Sequence[Rotation]) -> tuple[DiagonalState, TransitionLedger]:
    """Re-apply recorded rotations one by one through the public operation."""
    state, ledger = initial, TransitionLedger.identity(initial)
    for s in steps:
        state, ledger = apply_two_level_rotation(state, ledger, s.m, s.n, s.theta)
    return state, ledger


def closest_first_permutation(dim: int, target: TargetSpec) -> np.ndarray:
    """Source indices placing the n-th largest thermal weight n-th closest to eps.

    Returns ``src`` with the rearranged weights given by ``w[src]``.
    """
    k = target.k
    src = np.arange(dim)
    if target.rounded_down:
        for n in range(0, k + 1):
            src[n] = 2 * (k - n)
        for n in range(k + 1, 2 * k + 1):
            src[n] = 2 * (n - k) - 1
    else:
        for n in range(0, k):
            src[n] = 2 * (k - n) - 1
        for n in range(k, 2 * k):
            src[n] = 2 * (n - k)
    return src


def _phase_schedule(phase: int, rounded_down: bool, increase: bool) -> tuple[int, int]:
    """(j, l_min) of a Part-II phase; pairs are (k - l, k + l + j)."""
    if rounded_down and increase:
        return phase, -math.ceil(phase / 2) + 1
    if rounded_down:
        return -phase + 1, math.ceil(phase / 2)
    if increase:
        return phase - 1, -(phase // 2) + 1
    return -phase, phase // 2 + 1


def _swap_steps(swaps, phase=0) -> list[Rotation]:
    return [Rotation(a, b, math.pi / 2, phase) for a, b in swaps]


def _make_report(
    initial: DiagonalState, w: np.ndarray, probs: np.ndarray, steps, prep=()
) -> ChargingReport:
    final = DiagonalState(np.clip(w, 0.0, None), initial.spec)
    E0, V0 = diag_stats(initial)
    E1, V1 = diag_stats(final)
    delta_E = E1 - E0
    dw2 = ledger_fluctuation(probs, initial.energies, delta_E)
    return ChargingReport(
        delta_E=delta_E,
        final_E=E1,
        final_V=V1,
        delta_sigma=math.sqrt(V1) - math.sqrt(V0),
        delta_W2=max(dw2, 0.0),
        steps=list(steps),
        final_state=final,
        initial_E=E0,
        initial_V=V0,
        prep_steps=list(prep),
        ledger=probs,
    )


def _auto_dim(spec: ThermalSpec, top_level: int) -> int:
    return max(spec.min_dim(), top_level + 1 + MARGIN)


def optimal_precision_charge(spec: ThermalSpec, delta_eps: float, dim: int | None = None) -> ChargingReport:
    """Charge a thermal mode by delta_eps quanta with minimal final variance.

    Part I reorders the weights so the largest sit closest to the target
    energy (recorded as ``prep_steps``).  Part II then corrects the energy
    with rotations on pairs ``(k - l, k + l + j)``, phase by phase, each phase
    having a constant variance cost per unit energy; the last rotation of
    the protocol is partial so the target is hit exactly (``steps``).

    Args:
        spec: mode frequency and temperature.
        delta_eps: energy input in units of omega.
        dim: Fock truncation; chosen automatically when None.

    Raises:
        TruncationTooSmall: if the target region or thermal tail does not fit.
        PhaseLimitExceeded: if Part II runs past 64 phases.
    """
    if delta_eps < 0:
        raise ValueError("delta_eps must be nonnegative")
    eps0_guess = spec.nbar
    k_guess = math.ceil(eps0_guess + delta_eps)
    if dim is None:
        dim = _auto_dim(spec, 2 * k_guess + 16)
    initial = thermal_weights(spec, dim)
    n = np.arange(dim)
    eps0 = float(initial.weights @ n)
    if delta_eps == 0:
        probs = np.diag(initial.weights)
        return _make_report(initial, initial.weights.copy(), probs, [])
    target = TargetSpec.from_initial(eps0, delta_eps)
    k, eps = target.k, target.eps
    if 2 * k + 1 + MARGIN > dim:
        raise TruncationTooSmall(f"dim={dim} too small for target level {k}")

    w = initial.weights.copy()
    probs = np.diag(w)
    src = closest_first_permutation(dim, target)
    w, probs = w[src], probs[:, src]
    prep = _swap_steps(permutation_swaps(src))

    steps: list[Rotation] = []
    cur = float(w @ n)
    tol = _HIT_TOL * max(1.0, eps)
    if abs(cur - eps) > tol:
        increase = cur < eps
        done = False
        for phase in range(1, MAX_PHASES + 1):
            j, l = _phase_schedule(phase, target.rounded_down, increase)
            cost = (2 * (k - eps) + j) * (1 if increase else -1)
            while l <= k:
                lo, hi = k - l, k + l + j
                if hi >= dim - MARGIN:
                    raise TruncationTooSmall(f"protocol needs level {hi} with dim={dim}")
                dmax = (w[lo] - w[hi]) * (2 * l + j)
                gap = eps - cur
                if dmax != 0 and (dmax > 0) == increase:
                    if abs(dmax) < abs(gap):
                        theta = math.pi / 2
                    else:
                        theta = math.asin(math.sqrt(min(1.0, gap / dmax)))
                        done = True
                    rotate_inplace(w, probs, lo, hi, theta)
                    steps.append(Rotation(lo, hi, theta, phase, cost))
                    cur = float(w @ n)
                    if done or abs(cur - eps) <= tol:
                        done = True
                        break
                l += 1
            if done:
                break
        else:
            raise PhaseLimitExceeded(f"no convergence within {MAX_PHASES} phases")
    return _make_report(initial, w, probs, steps, prep)


def min_fluctuation_charge(spec: ThermalSpec, delta_eps: float, dim: int | None = None) -> ChargingReport:
    """Charge a thermal mode by delta_eps quanta with minimal work fluctuation.

    The integer part I of delta_eps is delivered by shifting every level up
    by I, which moves each trajectory by exactly I quanta.  The fractional
    part delta is delivered by shifting all levels from k~ = ceil(ln(1/delta)/(beta omega))
    upward by one, then partially rotating the pair just below the shifted
    block to top up the energy.  Every trajectory then gains I or I + 1
    quanta, which gives the smallest possible fluctuation delta (1 - delta).

    Raises:
        ZeroTemperatureUnsupported: fractional input at zero temperature,
            where there is no thermal tail to shift.
        TruncationTooSmall: if the shifted block does not fit in ``dim``.
    """
    if delta_eps < 0:
        raise ValueError("delta_eps must be nonnegative")
    whole = round(delta_eps)
    if abs(delta_eps - whole) <= 1e-12:
        delta_eps = float(whole)
    I = math.floor(delta_eps)
    frac = delta_eps - I
    if frac > 0 and spec.zero_temperature:
        raise ZeroTemperatureUnsupported("fractional energy input needs a thermal tail")
    kt = 0
    if frac > 0:
        kt = max(1, math.ceil(math.log(1.0 / frac) / spec.x - 1e-12))
    need = max(spec.min_dim() + I + 1, I + kt + 1) + MARGIN
    if dim is None:
        dim = need
    if dim < need:
        raise TruncationTooSmall(f"dim={dim} below required {need}")
    initial = thermal_weights(spec, dim)
    n = np.arange(dim)
    w = initial.weights.copy()
    probs = np.diag(w)
    steps: list[Rotation] = []
    if I:
        src = (n - I) % dim
        w, probs = w[src], probs[:, src]
        steps += _swap_steps(permutation_swaps(src))
    if frac > 0:
        K = kt + I
        src = n.copy()
        src[K:] = np.roll(n[K:], 1)
        w, probs = w[src], probs[:, src]
        steps += _swap_steps(permutation_swaps(src))
        eps = float(initial.weights @ n) + delta_eps
        gap = eps - float(w @ n)
        room = w[K - 1] - w[K]
        s2 = gap / room if room > 0 else 0.0
        if not (-1e-9 <= s2 <= 1 + 1e-9):
            raise TruncationTooSmall(f"tail rotation needs sin^2={s2!r}")
        theta = math.asin(math.sqrt(min(max(s2, 0.0), 1.0)))
        rotate_inplace(w, probs, K - 1, K, theta)
        steps.append(Rotation(K - 1, K, theta, 1))
    return _make_report(initial, w, probs, steps)


def closest_first_order(energies: np.ndarray, target: float) -> np.ndarray:
    """Level indices sorted by |E - target|, ties by index."""
    return np.lexsort((np.arange(energies.size), np.abs(energies - target)))


def greedy_precision_rotations(
    w: np.ndarray, energies: np.ndarray, target: float, probs: np.ndarray | None = None, max_steps: int = 100000
) -> list[Rotation]:
    """Move the mean energy of ``w`` to ``target`` at least variance cost.

    Mutates ``w`` (and ``probs``) in place.  A rotation between levels a, b
    with E_a < E_b changes the squared deviation from the target by
    ``(E_a + E_b - 2 target)`` per unit energy moved up.  Each step picks the
    cheapest pair whose weights allow motion in the needed direction and
    swaps it fully, except the last, which is partial.
    """
    steps: list[Rotation] = []
    scale = max(1.0, abs(target), float(np.abs(energies).max()))
    tol = _HIT_TOL * scale
    order = np.argsort(energies, kind="stable")
    E = energies[order]
    a_idx, b_idx = np.triu_indices(E.size, 1)
    valid = E[b_idx] > E[a_idx]
    a_idx, b_idx = order[a_idx[valid]], order[b_idx[valid]]
    pair_sum = energies[a_idx] + energies[b_idx]
    gaps = energies[b_idx] - energies[a_idx]
    for _ in range(max_steps):
        cur = float(w @ energies)
        need = target - cur
        if abs(need) <= tol:
            return steps
        diff = w[a_idx] - w[b_idx]
        if need > 0:
            ok = diff > 0
            key = np.where(ok, pair_sum, np.inf)
            best = int(np.argmin(key))
        else:
            ok = diff < 0
            key = np.where(ok, pair_sum, -np.inf)
            best = int(np.argmax(key))
        if not ok[best]:
            raise PhaseLimitExceeded("no level pair can move the energy toward the target")
        a, b = int(a_idx[best]), int(b_idx[best])
        dmax = diff[best] * gaps[best]
        if abs(dmax) < abs(need):
            theta = math.pi / 2
        else:
            theta = math.asin(math.sqrt(min(1.0, need / dmax)))
        rotate_inplace(w, probs, a, b, theta)
        cost = (pair_sum[best] - 2 * target) * (1 if need > 0 else -1)
        steps.append(Rotation(a, b, theta, 0, cost))
        if theta != math.pi / 2:
            return steps
    raise PhaseLimitExceeded(f"greedy rotations did not reach the target in {max_steps} steps")


def joint_optimal_precision_charge(
    specs: Sequence[ThermalSpec],
    delta_E: float,
    dims: Sequence[int] | None = None,
    cap: int = JOINT_DIM_CAP,
) -> ChargingReport:
    """Precision-optimized charging of several modes with correlated rotations.

    Joint Fock levels are tuples (n_1, ..., n_k) with energy sum_i omega_i n_i.
    The largest product weights are first placed on the levels closest to
    the target energy; greedy rotations then correct the energy (see
    :func:`greedy_precision_rotations`).  A single spec delegates to
    :func:`optimal_precision_charge`.

    Raises:
        DimensionCapExceeded: if the product dimension exceeds ``cap``.
        TruncationTooSmall: if a mode cannot hold the target energy.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one mode")
    if delta_E < 0:
        raise ValueError("delta_E must be nonnegative")
    if len(specs) == 1:
        d = None if dims is None else dims[0]
        return optimal_precision_charge(specs[0], delta_E / specs[0].omega, d)
    e0_est = sum(s.thermal_energy for s in specs)
    target_est = e0_est + delta_E
    if dims is None:
        dims = [_auto_dim(s, math.ceil(2 * target_est / s.omega)) for s in specs]
    dims = [int(d) for d in dims]
    total = math.prod(dims)
    if total > cap:
        raise DimensionCapExceeded(f"joint dimension {total} exceeds cap {cap}")
    for s, d in zip(specs, dims):
        # the thermal tail is checked by thermal_weights; here each mode only
        # has to reach the target on its own
        if d < math.ceil(target_est / s.omega) + 1:
            raise TruncationTooSmall(f"dim {d} cannot hold the target for omega={s.omega}")
    marg = [thermal_weights(s, d).weights for s, d in zip(specs, dims)]
    w0 = marg[0]
    for m in marg[1:]:
        w0 = np.multiply.outer(w0, m).ravel()
    levels = np.array(list(itertools.product(*[range(d) for d in dims])))
    energies = levels @ np.array([s.omega for s in specs])
    E0 = float(w0 @ energies)
    target = E0 + delta_E

    order_levels = closest_first_order(energies, target)
    order_weights = np.lexsort((np.arange(w0.size), -w0))
    src = np.empty(w0.size, dtype=int)
    src[order_levels] = order_weights
    w = w0[src]
    probs = np.diag(w0)[:, src]
    prep = _swap_steps(permutation_swaps(src))
    steps = greedy_precision_rotations(w, energies, target, probs)

    V0 = float(w0 @ (energies - E0) ** 2)
    E1 = float(w @ energies)
    V1 = float(w @ (energies - E1) ** 2)
    dw2 = ledger_fluctuation(probs, energies, E1 - E0)
    return ChargingReport(
        delta_E=E1 - E0,
        final_E=E1,
        final_V=max(V1, 0.0),
        delta_sigma=math.sqrt(max(V1, 0.0)) - math.sqrt(V0),
        delta_W2=max(dw2, 0.0),
        steps=steps,
        final_state=JointState(w, levels, energies),
        initial_E=E0,
        initial_V=V0,
        prep_steps=prep,
        ledger=probs,
    )
