"""Brute-force reference implementations on truncated Hilbert spaces.

These routines build the Gaussian unitary from matrix exponentials of the
mode operators and evaluate energy and work statistics by explicit sums over
Fock levels.  They are slow but share no formulas with :mod:`gaussian`,
which makes them suitable as test oracles.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import GridInsufficient, TruncationTooSmall, TruncationWarning
from .fock import ThermalSpec, thermal_weights
from .gaussian import GaussianState, SymplecticParams

LEAK_WARN = 1e-8
# weighted leakage into the top decile that the output space must stay below
LEAK_TOL = 1e-10
MAX_OUT_DIM = 8000
# initial columns whose thermal weight is below this are skipped
COLUMN_CUTOFF = 1e-16


@dataclass(frozen=True)
class OperatorSet:
    dim: int
    a: np.ndarray
    adag: np.ndarray
    N: np.ndarray
    H: np.ndarray


def build_mode_operators(dim: int, omega: float = 1.0) -> OperatorSet:
    if dim < 2:
        raise ValueError("dim must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    N = np.diag(np.arange(dim, dtype=float))
    return OperatorSet(dim, a, a.T.copy(), N, omega * N)


def _alpha(params: SymplecticParams) -> complex:
    # xbar = sqrt(2) (Re alpha, Im alpha) in the vacuum-variance-one convention
    return complex(params.xi[0], params.xi[1]) / math.sqrt(2.0)


def _generators(dim: int, params: SymplecticParams):
    """Sparse squeezing and displacement generators.

    ``exp(K_sq)`` with ``K_sq = (r/2)(a^2 - a^dag^2)`` squeezes x by e^{-r};
    ``exp(K_d)`` with ``K_d = alpha a^dag - alpha^* a`` shifts (x, p) by xi.
    """
    sq = np.sqrt(np.arange(1, dim, dtype=float))
    a = sp.diags(sq, 1, format="csr")
    adag = a.T.tocsr()
    k_sq = (0.5 * params.r) * (a @ a - adag @ adag)
    alpha = _alpha(params)
    k_d = alpha * adag - np.conj(alpha) * a
    return k_sq.tocsr(), k_d.tocsr()


def _phase(dim: int, t: float) -> np.ndarray:
    # exp(-i t N) realizes the rotation R(t) on the quadratures
    return np.exp(-1j * t * np.arange(dim))


def gaussian_unitary_matrix(params: SymplecticParams, dim: int) -> np.ndarray:
    """Dense ``D(alpha) R(theta) U_S(r) R(phi)`` on a dim-level space.

    Each factor is a dense matrix exponential (scaling and squaring with a
    Pade approximant).  Emits TruncationWarning when any column in the lowest
    quarter of the space leaks more than 1e-8 probability into the top
    decile.  Higher columns spread genuinely far under squeezing, so they are
    left to callers that know which inputs carry weight.
    """
    k_sq, k_d = _generators(dim, params)
    U_s = scipy.linalg.expm(k_sq.toarray())
    D = scipy.linalg.expm(k_d.toarray())
    U = D @ (_phase(dim, params.theta)[:, None] * U_s * _phase(dim, params.phi)[None, :])
    top = dim - max(1, dim // 10)
    leak = np.sum(np.abs(U[top:, : max(1, dim // 4)]) ** 2, axis=0).max()
    if leak > LEAK_WARN:
        warnings.warn(f"column leakage {leak:.2e} into the top decile at dim={dim}", TruncationWarning, stacklevel=2)
    return U


def _columns(params: SymplecticParams, out_dim: int, ncols: int) -> np.ndarray:
    """First ``ncols`` columns of the unitary on an ``out_dim`` space."""
    k_sq, k_d = _generators(out_dim, params)
    cols = np.zeros((out_dim, ncols), dtype=complex)
    cols[np.arange(ncols), np.arange(ncols)] = _phase(ncols, params.phi)
    if params.r:
        cols = expm_multiply(k_sq, cols)
    cols *= _phase(out_dim, params.theta)[:, None]
    if params.xi != (0.0, 0.0):
        cols = expm_multiply(k_d, cols)
    return cols


def _initial_out_dim(params: SymplecticParams, p: np.ndarray) -> int:
    # highest input level whose weight can still matter at LEAK_TOL
    m_eff = int(np.count_nonzero(p > 0.01 * LEAK_TOL))
    r = params.r
    mean = (m_eff + 0.5) * math.cosh(2 * r)
    # squeezed number states decay like tanh(r)^n beyond their mean
    tail = math.log(1e12) / -math.log(math.tanh(r)) if r > 0 else 0.0
    shift = 0.5 * (params.xi[0] ** 2 + params.xi[1] ** 2)
    spread = 6 * math.sqrt(shift * (m_eff + 1) * math.exp(2 * r))
    reach = mean + tail + shift + spread + 20
    return int(min(MAX_OUT_DIM, max(p.size + 1, reach / 0.9)))


def transition_matrix(
    params: SymplecticParams, spec: ThermalSpec, dim: int = 120, out_dim: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Transition probabilities ``P[m, n] = p_m |<n|U|m>|^2``.

    ``dim`` truncates the thermal input; the output space is sized
    automatically (grown until the weighted probability leaking into its
    top decile is below 1e-10) unless ``out_dim`` is given, in which case
    the same health check raises TruncationTooSmall.

    Returns:
        (P, levels) with P of shape (ncols, out_dim).
    """
    p = thermal_weights(spec, dim).weights
    ncols = int(np.count_nonzero(p > COLUMN_CUTOFF)) or 1
    p = p[:ncols]
    size = out_dim if out_dim is not None else _initial_out_dim(params, p)
    while True:
        size = max(size, ncols + 1)
        probs = np.abs(_columns(params, size, ncols)) ** 2
        top = size - max(1, size // 10)
        leak = float(p @ probs[top:].sum(axis=0))
        if leak <= LEAK_TOL:
            break
        if out_dim is not None or size >= MAX_OUT_DIM:
            raise TruncationTooSmall(f"leakage {leak:.2e} into top decile at out_dim={size}")
        size = min(MAX_OUT_DIM, int(size * 1.25) + 1)
    return p[:, None] * probs.T, np.arange(size)


def oracle_stats(
    params: SymplecticParams, spec: ThermalSpec, dim: int = 120, out_dim: int | None = None
) -> tuple[float, float, float]:
    """Energy input, final variance and work fluctuation by explicit sums."""
    P, levels = transition_matrix(params, spec, dim, out_dim)
    m = levels[: P.shape[0]].astype(float)
    n = levels.astype(float)
    p_in = P.sum(axis=1)
    p_out = P.sum(axis=0)
    delta_N = float(p_out @ n - p_in @ m)
    mean_out = float(p_out @ n)
    var_out = float(p_out @ (n - mean_out) ** 2)
    gap = n[None, :] - m[:, None] - delta_N
    dw2 = float(np.sum(P * gap * gap))
    w = spec.omega
    return w * delta_N, w * w * var_out, w * w * dw2


def two_mode_stats(
    params: tuple[SymplecticParams, SymplecticParams],
    specs: tuple[ThermalSpec, ThermalSpec],
    dims: tuple[int, int] = (24, 24),
) -> tuple[float, float, float]:
    """Statistics of a product unitary on two modes, from the joint space.

    ``dims`` truncates each thermal input; each mode's output space is padded
    until its top-decile leakage passes the single-mode health check.  The
    joint amplitudes are the Kronecker product of the two column blocks.
    """
    blocks, outs, p0 = [], [], []
    for pr, s, d in zip(params, specs, dims):
        p = thermal_weights(s, d).weights
        size = _initial_out_dim(pr, p)
        while True:
            cols = _columns(pr, size, d)
            top = size - max(1, size // 10)
            leak = float(p @ (np.abs(cols[top:]) ** 2).sum(axis=0))
            if leak <= LEAK_TOL or size >= MAX_OUT_DIM:
                break
            size = min(MAX_OUT_DIM, int(size * 1.25) + 1)
        if leak > LEAK_TOL:
            raise TruncationTooSmall(f"leakage {leak:.2e} into top decile at out_dim={size}")
        blocks.append(cols)
        outs.append(s.omega * np.arange(size))
        p0.append(p)
    amp = np.kron(blocks[0], blocks[1])
    p = np.kron(p0[0], p0[1])
    E_in = np.add.outer(specs[0].omega * np.arange(dims[0]), specs[1].omega * np.arange(dims[1])).ravel()
    E_out = np.add.outer(outs[0], outs[1]).ravel()
    P = p[:, None] * (np.abs(amp) ** 2).T
    p_out = P.sum(axis=0)
    delta_E = float(p_out @ E_out - p @ E_in)
    mean = float(p_out @ E_out)
    V = float(p_out @ (E_out - mean) ** 2)
    gap = E_out[None, :] - E_in[:, None] - delta_E
    return delta_E, V, float(np.sum(P * gap * gap))


def wigner_moment_check(
    state: GaussianState, grid_half_width: float | None = None, grid_points: int = 801
) -> float:
    """<N^2> by integrating the Wigner function against its phase-space kernel.

    The symmetric-ordered kernel of N^2 is ``((x^2 + p^2 - 1)^2 - 1)/4``.
    The grid is centered on the origin and must cover 8 standard deviations
    around the mean in both quadratures; when ``grid_half_width`` is None it
    is chosen to cover 12.
    """
    g = state.gamma
    xbar = state.xbar
    sig = np.sqrt(np.diag(g) / 2.0)
    need = np.abs(xbar) + 8 * sig
    if grid_half_width is None:
        grid_half_width = float(np.max(np.abs(xbar) + 12 * sig))
    if np.any(need > grid_half_width):
        raise GridInsufficient(f"grid half width {grid_half_width} < required {need.max():.3g}")
    ax = np.linspace(-grid_half_width, grid_half_width, grid_points)
    X, P = np.meshgrid(ax, ax, indexing="ij")
    dx, dp = X - xbar[0], P - xbar[1]
    gi = np.linalg.inv(g)
    quad = gi[0, 0] * dx * dx + 2 * gi[0, 1] * dx * dp + gi[1, 1] * dp * dp
    W = np.exp(-quad) / (math.pi * math.sqrt(np.linalg.det(g)))
    kernel = 0.25 * (X * X + P * P - 1.0) ** 2 - 0.25
    h = ax[1] - ax[0]
    return float(scipy.integrate.trapezoid(scipy.integrate.trapezoid(W * kernel, dx=h, axis=1), dx=h))
