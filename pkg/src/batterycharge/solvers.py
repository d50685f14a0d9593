"""Extremal squeezing parameters for Gaussian charging.

For a fixed energy input the final variance and the work fluctuations depend
on how the energy is divided between squeezing and displacement.  The
functions here locate the squeezing parameter that extremizes each
quantity and report the resulting energy split.

Auxiliary symbols: nu = coth(beta*omega/2), chi = 2*delta_E/(omega*nu) + 1,
lam = 1 - 1/nu^2, and the substitutions u = v = e^{-2r}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceFailure, NotBracketed
from .fock import ThermalSpec
from .gaussian import dw_pm, squeezing_energy, v_pm

ROOT_XTOL = 1e-14
MAX_DOUBLINGS = 64
MAX_ITER = 400


@dataclass(frozen=True)
class ExtremalSolution:
    """Optimal squeezing and the objective it attains.

    ``objective`` is a standard-deviation increase for ``kind='worst_precision'``,
    a variance for ``'best_precision'`` and a squared work fluctuation for
    ``'max_fluctuation'`` / ``'min_fluctuation'``.  ``boundary`` marks
    solutions pinned to pure squeezing rather than an interior stationary point.
    """

    r: float
    objective: float
    e_disp: float
    e_sq: float
    iterations: int
    kind: str
    boundary: bool = False


def bracketed_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 0.0,
    xtol: float = ROOT_XTOL,
    full_output: bool = False,
):
    """Root of a continuous monotone function on [lo, hi].

    Regula falsi with the Illinois modification, falling back to bisection
    whenever the interpolated point fails to halve the bracket.  Stops when
    ``|f(x)| <= tol`` or the bracket is narrower than
    ``xtol + 4 eps |x|``.

    Args:
        f: scalar function with f(lo), f(hi) of opposite sign.
        lo, hi: bracket ends.
        tol: absolute residual tolerance.
        xtol: absolute width tolerance.
        full_output: also return the iteration count.

    Returns:
        The root, or (root, iterations) if ``full_output``.

    Raises:
        NotBracketed: if f(lo) and f(hi) have the same strict sign.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0 or abs(fa) <= tol:
        return (a, 0) if full_output else a
    if fb == 0 or abs(fb) <= tol:
        return (b, 0) if full_output else b
    if (fa > 0) == (fb > 0):
        raise NotBracketed(f"f({a})={fa!r} and f({b})={fb!r} share a sign")
    side = 0
    x = 0.5 * (a + b)
    for it in range(1, MAX_ITER + 1):
        width = abs(b - a)
        x = (a * fb - b * fa) / (fb - fa)
        if not (min(a, b) < x < max(a, b)):
            x = 0.5 * (a + b)
        fx = f(x)
        if fx == 0 or abs(fx) <= tol:
            break
        if (fx > 0) == (fb > 0):
            b, fb = x, fx
            if side == -1:
                fa *= 0.5
            side = -1
        else:
            a, fa = x, fx
            if side == 1:
                fb *= 0.5
            side = 1
        if abs(b - a) > 0.5 * width:
            # interpolation stalled, take a bisection step
            m = 0.5 * (a + b)
            fm = f(m)
            if fm == 0:
                x = m
                break
            if (fm > 0) == (fb > 0):
                b, fb = m, fm
            else:
                a, fa = m, fm
            side = 0
        if abs(b - a) <= xtol + 4 * 2.2e-16 * max(abs(a), abs(b)):
            x = 0.5 * (a + b)
            break
    else:
        raise ConvergenceFailure(f"bracketed_root did not converge in {MAX_ITER} iterations")
    return (x, it) if full_output else x


def _upper_bracket(f: Callable[[float], float], start: float = 1.0) -> float:
    """Double ``hi`` from ``start`` until the increasing function f turns positive."""
    hi = start
    for _ in range(MAX_DOUBLINGS):
        if f(hi) > 0:
            return hi
        hi *= 2.0
    raise ConvergenceFailure("no sign change found after 64 doublings")


def stable_arcosh(x: float) -> float:
    if x < 1:
        raise ValueError("arcosh argument below 1")
    return math.log(x + math.sqrt((x - 1.0) * (x + 1.0)))


def _chi(delta_E: float, spec: ThermalSpec) -> float:
    if delta_E < 0:
        raise ValueError("delta_E must be nonnegative")
    return 2.0 * delta_E / (spec.omega * spec.nu) + 1.0


def _lambda(spec: ThermalSpec) -> float:
    return 1.0 - 1.0 / spec.nu**2


def pure_squeezing_r(delta_E: float, spec: ThermalSpec) -> float:
    """Squeezing that alone injects delta_E."""
    return 0.5 * stable_arcosh(_chi(delta_E, spec))


def _split(r: float, delta_E: float, spec: ThermalSpec) -> tuple[float, float]:
    e_sq = min(squeezing_energy(r, spec), delta_E)
    return delta_E - e_sq, e_sq


def worst_precision(delta_E: float, spec: ThermalSpec) -> ExtremalSolution:
    """Largest standard-deviation increase: all energy into squeezing."""
    r = pure_squeezing_r(delta_E, spec)
    w, vt = spec.omega, spec.thermal_variance
    de = delta_E / w
    dsigma = math.sqrt(2.0 * de * (de + spec.nu) * w * w + vt) - math.sqrt(vt)
    return ExtremalSolution(r, dsigma, 0.0, delta_E, 0, "worst_precision", boundary=True)


def best_precision(delta_E: float, spec: ThermalSpec) -> ExtremalSolution:
    """Smallest final variance, at the root of e^{2r} cosh 4r = chi."""
    chi = _chi(delta_E, spec)
    if chi == 1.0:
        return ExtremalSolution(0.0, spec.thermal_variance, 0.0, 0.0, 0, "best_precision")

    def f(r):
        return math.exp(2 * r) * math.cosh(4 * r) - chi

    r, iters = bracketed_root(f, 0.0, _upper_bracket(f), full_output=True)
    nu, w = spec.nu, spec.omega
    # closed form of the variance increase at the root, plus the initial variance
    V = 0.25 * w * w * nu * nu * (math.sinh(4 * r) + 2 * math.cosh(4 * r) - 2.0)
    V += spec.thermal_variance
    e_disp = 0.5 * w * nu * math.exp(4 * r) * math.sinh(2 * r)
    e_sq = delta_E - e_disp
    if e_sq < 0:
        e_sq = 0.0
    return ExtremalSolution(r, V, delta_E - e_sq, e_sq, iters, "best_precision")


def _g(u: float) -> float:
    return 0.5 * (3 * u - u**-3)


def _f_lam(u: float, lam: float) -> float:
    return 0.5 * lam * (1 - u * u) + 0.5 * (1 / u + u**3)


def _h_lam(v: float, lam: float) -> float:
    return 0.5 * lam * (1 - 1 / (v * v)) + 0.5 * (v + v**-3)


def fluctuation_turning_point(spec: ThermalSpec) -> float:
    """u_lam in [3^{-1/4}, 1], the minimum of f_lam where g(u) = lam."""
    lam = _lambda(spec)
    lo = 3.0**-0.25
    if lam == 0.0:
        return lo
    return bracketed_root(lambda u: _g(u) - lam, lo, 1.0)


def stationary_fluctuation_root(delta_E: float, spec: ThermalSpec, which: str) -> tuple[float, int]:
    """Stationary point of the directional fluctuation curves in r.

    ``which='min'`` solves h_lam(v) = chi on (0, 1]; ``which='max'`` solves
    f_lam(u) = chi on (0, u_lam).  The max root ignores the requirement that
    displacement energy stay nonnegative, see :func:`extremal_fluctuations`.

    Returns:
        (r, iterations) with r = -ln(u or v)/2.
    """
    chi = _chi(delta_E, spec)
    lam = _lambda(spec)
    if which == "min":
        if chi == 1.0:
            return 0.0, 0
        fn = lambda v: _h_lam(v, lam) - chi  # noqa: E731
        hi = 1.0
    elif which == "max":
        hi = fluctuation_turning_point(spec)
        fn = lambda u: _f_lam(u, lam) - chi  # noqa: E731
    else:
        raise ValueError("which must be 'max' or 'min'")
    # both functions decrease from +inf at 0; halve lo until bracketed
    lo = 0.5 * hi
    for _ in range(MAX_DOUBLINGS):
        if fn(lo) > 0:
            break
        lo *= 0.5
    else:
        raise ConvergenceFailure("no lower bracket for the fluctuation root")
    root, iters = bracketed_root(fn, lo, hi, full_output=True)
    return -0.5 * math.log(root), iters


def extremal_fluctuations(delta_E: float, spec: ThermalSpec, which: str) -> ExtremalSolution:
    """Smallest or largest work fluctuation over feasible squeezing.

    The minimizing stationary point always leaves nonnegative energy for
    displacement.  For the maximum the fluctuation curve rises up to its
    stationary point and falls after it, so when that point needs more
    squeezing energy than is available the physical maximum sits at the
    pure-squeezing boundary instead; ``boundary`` is set in that case.
    """
    r_stat, iters = stationary_fluctuation_root(delta_E, spec, which)
    r_edge = pure_squeezing_r(delta_E, spec)
    boundary = which == "max" and r_stat > r_edge
    r = r_edge if boundary else r_stat
    e_disp, e_sq = _split(r, delta_E, spec)
    if boundary:
        e_disp, e_sq = 0.0, float(delta_E)
    if e_disp < -1e-9 * max(delta_E, spec.omega):
        raise ConvergenceFailure(f"stationary point needs negative displacement energy {e_disp!r}")
    residual = 2.0 * e_disp / spec.omega
    dm, dp = dw_pm(r, residual, spec)
    # cancellation between thermal terms can leave -1e-16 at delta_E = 0
    objective = max(dm if which == "min" else dp, 0.0)
    return ExtremalSolution(r, objective, e_disp, e_sq, iters, f"{which}_fluctuation", boundary)


def best_variance_at(r: float, delta_E: float, spec: ThermalSpec) -> float:
    """V_-(r) without the feasibility check, for finite-difference probes."""
    res = 2.0 * (delta_E - squeezing_energy(r, spec)) / spec.omega
    return v_pm(r, res, spec)[0]


def fluctuation_at(r: float, delta_E: float, spec: ThermalSpec, which: str) -> float:
    """dW_-^2(r) or dW_+^2(r), analytically continued past the feasibility edge."""
    res = 2.0 * (delta_E - squeezing_energy(r, spec)) / spec.omega
    dm, dp = dw_pm(r, res, spec)
    return dm if which == "min" else dp
