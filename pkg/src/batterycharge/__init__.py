"""Precision and work fluctuations of charging bosonic quantum batteries.

Fock-space protocols (:mod:`.protocols`), Gaussian closed forms
(:mod:`.gaussian`, :mod:`.solvers`), multi-mode splitting
(:mod:`.multimode`) and brute-force oracles (:mod:`.oracle`).
"""

from .errors import *  # noqa: F401,F403
from .fock import (
    DiagonalState,
    ThermalSpec,
    TransitionLedger,
    apply_two_level_rotation,
    diag_stats,
    thermal_weights,
    work_fluctuation,
)
from .gaussian import (
    GaussianState,
    SymplecticParams,
    apply_symplectic,
    displacement_only_sigma,
    dw_bounds_at_r,
    gaussian_charge_stats,
    photon_moments,
    thermal_gaussian,
    v_bounds_at_r,
)
from .multimode import ModeSet, SplitResult, displacement_split_variance, optimize_local_split
from .oracle import build_mode_operators, gaussian_unitary_matrix, oracle_stats, wigner_moment_check
from .protocols import (
    ChargingReport,
    TargetSpec,
    joint_optimal_precision_charge,
    min_fluctuation_charge,
    min_fluctuation_value,
    optimal_precision_charge,
    zero_temp_bounds,
)
from .solvers import ExtremalSolution, best_precision, bracketed_root, extremal_fluctuations, worst_precision

__version__ = "0.1.0"
