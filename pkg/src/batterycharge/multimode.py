"""Splitting an energy input across independent modes charged locally.

With local unitaries the modes stay uncorrelated, so both the final variance
and the work fluctuation are sums of per-mode values.  The best split is
found by exhaustive search over allocations in units of an energy quantum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .errors import ConfigError, GridTooFine, ZeroTemperatureUnsupported
from .fock import ThermalSpec
from .gaussian import SymplecticParams, gaussian_charge_stats
from .protocols import min_fluctuation_charge, min_fluctuation_value, optimal_precision_charge
from .solvers import best_precision, extremal_fluctuations, worst_precision

OBJECTIVES = ("variance", "fluctuation")
STRATEGIES = ("gaussian_optimal", "displacement", "squeeze_only", "fundamental")
MAX_ALLOCATIONS = 10**7


@dataclass(frozen=True)
class ModeSet:
    """Modes sharing one inverse temperature."""

    specs: tuple[ThermalSpec, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        specs = tuple(self.specs)
        if not specs:
            raise ConfigError("a ModeSet needs at least one mode")
        betas = {s.beta for s in specs}
        if len(betas) != 1:
            raise ConfigError("all modes must share one beta")
        labels = tuple(self.labels) or tuple(chr(ord("A") + i) for i in range(len(specs)))
        if len(labels) != len(specs):
            raise ConfigError("one label per mode")
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_frequencies(cls, omegas: Sequence[float], beta: float) -> "ModeSet":
        return cls(tuple(ThermalSpec(w, beta) for w in omegas))

    @property
    def idle_variance(self) -> float:
        return sum(s.thermal_variance for s in self.specs)


@dataclass(frozen=True)
class SplitResult:
    allocation: tuple[float, ...]
    total_V: float
    total_dW2: float
    strategy: str
    objective: str

    @property
    def value(self) -> float:
        return self.total_V if self.objective == "variance" else self.total_dW2


def displacement_split_variance(p: float, delta_E: float, modes: ModeSet) -> float:
    """Final variance when a fraction p of delta_E displaces mode A, the rest mode B."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if len(modes.specs) != 2:
        raise ValueError("displacement_split_variance takes exactly two modes")
    a, b = modes.specs
    slope = p * a.nu * a.omega + (1 - p) * b.nu * b.omega
    return slope * delta_E + a.thermal_variance + b.thermal_variance


def _gaussian_stats_for(spec: ThermalSpec, e: float, objective: str) -> tuple[float, float]:
    # (V, dW2) of the extremal Gaussian strategy for this objective
    if e == 0:
        return spec.thermal_variance, 0.0
    if objective == "variance":
        sol = best_precision(e, spec)
        xi1 = math.sqrt(2 * sol.e_disp / spec.omega)
    else:
        sol = extremal_fluctuations(e, spec, "min")
        xi1 = math.sqrt(2 * sol.e_disp / spec.omega)
    _, V, dw2 = gaussian_charge_stats(SymplecticParams(r=sol.r, xi=(xi1, 0.0)), spec)
    return V, dw2


def mode_stats(spec: ThermalSpec, e: float, strategy: str, objective: str) -> tuple[float, float]:
    """(final variance, work fluctuation) of one mode charged by energy e."""
    w = spec.omega
    if strategy == "gaussian_optimal":
        return _gaussian_stats_for(spec, e, objective)
    if strategy == "displacement":
        return spec.nu * w * e + spec.thermal_variance, spec.nu * w * e
    if strategy == "squeeze_only":
        sol = worst_precision(e, spec)
        _, V, dw2 = gaussian_charge_stats(SymplecticParams(r=sol.r), spec)
        return V, dw2
    if strategy == "fundamental":
        de = e / w
        if objective == "variance":
            rep = optimal_precision_charge(spec, de)
            return rep.final_V, rep.delta_W2
        try:
            rep = min_fluctuation_charge(spec, de)
        except ZeroTemperatureUnsupported:
            # from the ground state the precision optimum also attains the
            # minimal fluctuation
            rep = optimal_precision_charge(spec, de)
            return rep.final_V, min_fluctuation_value(de) * w * w
        return rep.final_V, rep.delta_W2
    raise ConfigError(f"unknown strategy {strategy!r}")


def _mode_objective(spec: ThermalSpec, strategy: str, objective: str) -> Callable[[float], float]:
    @lru_cache(maxsize=None)
    def value(units_energy: float) -> float:
        V, dw2 = mode_stats(spec, units_energy, strategy, objective)
        # variance totals count every mode's final variance, idle or not
        return V if objective == "variance" else dw2

    return value


def _count_allocations(total: int, k: int) -> int:
    return math.comb(total + k - 1, k - 1)


def optimize_local_split(
    delta_E: float,
    modes: ModeSet,
    objective: str = "variance",
    strategy: str = "gaussian_optimal",
    quantum: float | None = None,
) -> SplitResult:
    """Best allocation of delta_E over the modes, on a grid of ``quantum``.

    Allocations are enumerated exhaustively (stars and bars) with pruning on
    partial sums, which are valid lower bounds because every per-mode
    objective is nonnegative.  The default quantum is omega_min/20.
    """
    if objective not in OBJECTIVES:
        raise ConfigError(f"objective must be one of {OBJECTIVES}")
    if strategy not in STRATEGIES:
        raise ConfigError(f"strategy must be one of {STRATEGIES}")
    if delta_E < 0:
        raise ConfigError("delta_E must be nonnegative")
    if quantum is None:
        quantum = min(s.omega for s in modes.specs) / 20
    if quantum <= 0:
        raise ConfigError("quantum must be positive")
    units = delta_E / quantum
    total = round(units)
    exact = abs(units - total) <= 1e-9 * max(1.0, units)
    if not exact:
        total = math.floor(units)
        warnings.warn(f"delta_E={delta_E} is not a multiple of {quantum}; rounded down", stacklevel=2)
    k = len(modes.specs)
    if _count_allocations(total, k) > MAX_ALLOCATIONS:
        raise GridTooFine(f"{_count_allocations(total, k)} allocations exceed {MAX_ALLOCATIONS}")
    fns = [_mode_objective(s, strategy, objective) for s in modes.specs]
    # the top grid point is delta_E itself, not total * quantum with its rounding
    top = delta_E if exact else total * quantum
    grid = [m * quantum for m in range(total)] + [top]
    tables = [[fn(e) for e in grid] for fn in fns]

    best_val = math.inf
    best_alloc: tuple[int, ...] = ()

    def search(i: int, left: int, acc: float, alloc: list[int]):
        nonlocal best_val, best_alloc
        if acc >= best_val:
            return
        if i == k - 1:
            val = acc + tables[i][left]
            if val < best_val:
                best_val, best_alloc = val, tuple(alloc + [left])
            return
        for m in range(left, -1, -1):
            search(i + 1, left - m, acc + tables[i][m], alloc + [m])

    search(0, total, 0.0, [])
    allocation = tuple(grid[m] for m in best_alloc)
    stats = [mode_stats(s, e, strategy, objective) for s, e in zip(modes.specs, allocation)]
    return SplitResult(
        allocation=allocation,
        total_V=float(sum(v for v, _ in stats)),
        total_dW2=float(sum(d for _, d in stats)),
        strategy=strategy,
        objective=objective,
    )


def single_mode_result(
    delta_E: float, modes: ModeSet, mode: int, objective: str = "variance", strategy: str = "gaussian_optimal"
) -> SplitResult:
    """All energy into one mode, the others left idle."""
    alloc = tuple(delta_E if i == mode else 0.0 for i in range(len(modes.specs)))
    stats = [mode_stats(s, e, strategy, objective) for s, e in zip(modes.specs, alloc)]
    return SplitResult(alloc, sum(v for v, _ in stats), sum(d for _, d in stats), strategy, objective)


def even_split_result(delta_E: float, modes: ModeSet, objective: str = "variance", strategy: str = "gaussian_optimal") -> SplitResult:
    k = len(modes.specs)
    alloc = tuple(delta_E / k for _ in range(k))
    stats = [mode_stats(s, e, strategy, objective) for s, e in zip(modes.specs, alloc)]
    return SplitResult(alloc, sum(v for v, _ in stats), sum(d for _, d in stats), strategy, objective)

