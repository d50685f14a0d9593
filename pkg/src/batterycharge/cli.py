"""Command-line entry point: figure data as CSV and verification suites.

Examples::

    batterycharge fig1 --d 6 --emax 5 --step 0.05
    batterycharge fig5 --temps 0 1 2 --emax 3 --out fig5.csv
    batterycharge fig2 --explain
    batterycharge verify --suite oracle --seed 7

All values are in units of omega = 1 (hbar = k_B = 1).  Temperatures of 0
mean beta = +inf.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .errors import BatteryError, ConfigError, NumericalError
from .fock import ThermalSpec, TransitionLedger, apply_two_level_rotation, diag_stats, thermal_weights
from .gaussian import (
    GaussianState,
    SymplecticParams,
    apply_symplectic,
    gaussian_charge_stats,
    photon_moments,
    residual_displacement,
    thermal_gaussian,
    v_bounds_at_r,
)
from .multimode import ModeSet, even_split_result, optimize_local_split, single_mode_result
from .oracle import oracle_stats, wigner_moment_check
from .protocols import (
    min_fluctuation_charge,
    min_fluctuation_value,
    optimal_precision_charge,
    zero_temp_bounds,
)
from .solvers import best_precision, extremal_fluctuations, pure_squeezing_r, worst_precision

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")
SUITES = ("oracle", "fundamental", "extremal", "wigner", "all")
FIG3_DELTA_EPS = 1.75

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

_DEFAULTS = {
    "fig1": dict(temps=(0.0,), emax=5.0, step=0.05),
    "fig2": dict(temps=tuple(round(0.1 * i, 10) for i in range(1, 11)), emax=3.0, step=0.05),
    "fig3": dict(temps=(3.0,), emax=FIG3_DELTA_EPS, step=1.0),
    "fig4": dict(temps=(0.1, 0.7, 1.0), emax=3.0, step=0.05),
    "fig5": dict(temps=tuple(float(t) for t in range(11)), emax=3.0, step=0.05),
    "fig6": dict(temps=tuple(float(t) for t in range(11)), emax=3.0, step=0.05),
}


@dataclass(frozen=True)
class SweepConfig:
    """One figure sweep.  ``emax`` doubles as the energy input for fig3."""

    figure: str
    temps: tuple[float, ...] = ()
    emax: float = 3.0
    step: float = 0.05
    dim: int | None = None
    out: str | None = None
    d: int = 6
    jobs: int = 1
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ConfigError(f"unknown figure {self.figure!r}")
        if self.step <= 0 or not math.isfinite(self.step):
            raise ConfigError("step must be positive")
        if self.emax < 0 or not math.isfinite(self.emax):
            raise ConfigError("emax must be nonnegative")
        if not self.temps:
            raise ConfigError("temperature list is empty")
        if any(t < 0 or not math.isfinite(t) for t in self.temps):
            raise ConfigError("temperatures must be finite and >= 0")
        if self.dim is not None and self.dim < 2:
            raise ConfigError("dim must be at least 2")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")

    @classmethod
    def for_figure(cls, figure: str, **overrides) -> "SweepConfig":
        if figure not in _DEFAULTS:
            raise ConfigError(f"unknown figure {figure!r}")
        return cls(figure, **{**_DEFAULTS[figure], **overrides})

    @property
    def grid(self) -> np.ndarray:
        n = int(math.floor(self.emax / self.step + 1e-9))
        return np.round(np.arange(n + 1) * self.step, 12)


def _spec(t: float) -> ThermalSpec:
    return ThermalSpec.from_temperature(t)


def _tag(t: float) -> str:
    return f"T{t:g}"


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return f"{float(v):.15g}"


# per-figure row builders; kept at module level so they pickle for --jobs


def _fig1_row(de: float, d: int) -> list:
    return [de, *zero_temp_bounds(de, d)]


def _fig2_row(de: float, temps, dim) -> list:
    reps = [optimal_precision_charge(_spec(t), de, dim) for t in temps]
    return [de, *[r.final_V for r in reps], *[r.delta_sigma for r in reps]]


def _fig4_row(de: float, temps) -> list:
    row = [de]
    for t in temps:
        modes = ModeSet.from_frequencies([1.0, 1.0], _spec(t).beta)
        row += [
            single_mode_result(de, modes, 0, "variance", "fundamental").total_V,
            even_split_result(de, modes, "variance", "fundamental").total_V,
            optimize_local_split(de, modes, "variance", "fundamental").total_V,
        ]
    return row


def _fig5_row(de: float, temps, dim) -> list:
    row = [de]
    for t in temps:
        s = _spec(t)
        worst = worst_precision(de, s)
        best = best_precision(de, s)
        fund = optimal_precision_charge(s, de, dim)
        v_max = v_bounds_at_r(worst.r, de, s)[1]
        row += [worst.objective, math.sqrt(best.objective) - math.sqrt(s.thermal_variance), fund.delta_sigma]
        row += [v_max, best.objective, fund.final_V]
    return row


def _fig6_row(de: float, temps) -> list:
    row = [de]
    for t in temps:
        s = _spec(t)
        row += [
            math.sqrt(extremal_fluctuations(de, s, "min").objective),
            math.sqrt(extremal_fluctuations(de, s, "max").objective),
        ]
    row.append(math.sqrt(min_fluctuation_value(de)))
    return row


def _columns(cfg: SweepConfig) -> list[tuple[str, str]]:
    """(column name, producing operation) pairs for a figure."""
    tags = [_tag(t) for t in cfg.temps]
    f = cfg.figure
    cols = [("delta_E", "energy input grid (units of omega)")]
    if f == "fig1":
        cols += [
            ("v_min", f"zero_temp_bounds(delta_E, d={cfg.d})[0]"),
            ("v_max", f"zero_temp_bounds(delta_E, d={cfg.d})[1]"),
        ]
    elif f == "fig2":
        cols += [(f"V_{g}", "optimal_precision_charge(spec_T, delta_E).final_V") for g in tags]
        cols += [(f"dsigma_{g}", "optimal_precision_charge(spec_T, delta_E).delta_sigma") for g in tags]
    elif f == "fig3":
        cols = [
            ("index", "position in the recorded rotation sequence"),
            ("part", "I for the reordering swaps, II for energy-correcting rotations"),
            ("phase", "optimal_precision_charge(...).steps[i].phase (0 in part I)"),
            ("m", "lower level of the rotated pair"),
            ("n", "upper level of the rotated pair"),
            ("theta", "rotation angle in radians"),
            ("energy", "mean energy after the step, replay of optimal_precision_charge(...).all_steps"),
            ("variance", "energy variance after the step, same replay"),
        ]
    elif f == "fig4":
        for g in tags:
            cols += [
                (f"V_single_{g}", "single_mode_result(delta_E, modes_T, 0, 'variance', 'fundamental').total_V"),
                (f"V_even_{g}", "even_split_result(delta_E, modes_T, 'variance', 'fundamental').total_V"),
                (f"V_opt_{g}", "optimize_local_split(delta_E, modes_T, 'variance', 'fundamental').total_V"),
            ]
    elif f == "fig5":
        for g in tags:
            cols += [
                (f"dsigma_max_{g}", "worst_precision(delta_E, spec_T).objective"),
                (f"dsigma_min_{g}", "sqrt(best_precision(delta_E, spec_T).objective) - sqrt(V(thermal))"),
                (f"dsigma_fund_{g}", "optimal_precision_charge(spec_T, delta_E).delta_sigma"),
                (f"v_max_{g}", "v_bounds_at_r(worst_precision(delta_E, spec_T).r, delta_E, spec_T)[1]"),
                (f"v_min_{g}", "best_precision(delta_E, spec_T).objective"),
                (f"v_fund_{g}", "optimal_precision_charge(spec_T, delta_E).final_V"),
            ]
    elif f == "fig6":
        for g in tags:
            cols += [
                (f"dW_min_{g}", "sqrt(extremal_fluctuations(delta_E, spec_T, 'min').objective)"),
                (f"dW_max_{g}", "sqrt(extremal_fluctuations(delta_E, spec_T, 'max').objective)"),
            ]
        cols.append(("dW_fund", "sqrt(min_fluctuation_value(delta_E))"))
    return cols


def _fig3_rows(cfg: SweepConfig) -> list[list]:
    spec = _spec(cfg.temps[0])
    rep = optimal_precision_charge(spec, cfg.emax, cfg.dim)
    state = thermal_weights(spec, rep.final_state.dim)
    ledger = TransitionLedger.identity(state)
    E, V = diag_stats(state)
    rows = [[0, "init", 0, "", "", "", E, V]]
    for i, s in enumerate(rep.all_steps, start=1):
        state, ledger = apply_two_level_rotation(state, ledger, s.m, s.n, s.theta)
        E, V = diag_stats(state)
        part = "I" if i <= len(rep.prep_steps) else "II"
        rows.append([i, part, s.phase, s.m, s.n, s.theta, E, V])
    return rows


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs == 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        # map preserves input order, so output stays deterministic
        return list(ex.map(fn, items))


def figure_rows(cfg: SweepConfig) -> tuple[list[str], list[list]]:
    header = [c for c, _ in _columns(cfg)]
    grid = [float(x) for x in cfg.grid]
    f = cfg.figure
    if f == "fig1":
        if cfg.emax > cfg.d - 1:
            raise ConfigError(f"emax={cfg.emax} exceeds d-1={cfg.d - 1}")
        rows = _pmap(partial(_fig1_row, d=cfg.d), grid, cfg.jobs)
    elif f == "fig2":
        rows = _pmap(partial(_fig2_row, temps=cfg.temps, dim=cfg.dim), grid, cfg.jobs)
    elif f == "fig3":
        rows = _fig3_rows(cfg)
    elif f == "fig4":
        rows = _pmap(partial(_fig4_row, temps=cfg.temps), grid, cfg.jobs)
    elif f == "fig5":
        rows = _pmap(partial(_fig5_row, temps=cfg.temps, dim=cfg.dim), grid, cfg.jobs)
    else:
        rows = _pmap(partial(_fig6_row, temps=cfg.temps), grid, cfg.jobs)
    return header, rows


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def run_figure(config: SweepConfig) -> str:
    """Compute a figure's data and write it to ``config.out`` (or return it)."""
    text = render_csv(*figure_rows(config))
    if config.out:
        with open(config.out, "w", newline="") as fh:
            fh.write(text)
    return text


def explain(config: SweepConfig) -> str:
    width = max(len(c) for c, _ in _columns(config))
    return "".join(f"{c.ljust(width)}  {op}\n" for c, op in _columns(config))


# verification suites


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def random_oracle_cases(n: int, seed: int):
    """Random (params, spec) pairs with r <= 1.5, |xi| <= 3, beta*omega in [0.5, 5]."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        r = rng.uniform(0, 1.5)
        rad = 3 * math.sqrt(rng.uniform())
        ang = rng.uniform(0, 2 * math.pi)
        params = SymplecticParams(
            theta=rng.uniform(0, 2 * math.pi),
            r=r,
            phi=rng.uniform(0, 2 * math.pi),
            xi=(rad * math.cos(ang), rad * math.sin(ang)),
        )
        yield params, ThermalSpec(1.0, rng.uniform(0.5, 5.0))


def suite_oracle(seed: int, n: int = 200) -> tuple[int, float]:
    worst = 0.0
    for params, spec in random_oracle_cases(n, seed):
        ref = oracle_stats(params, spec)
        got = gaussian_charge_stats(params, spec)
        worst = max(worst, *(_rel(g, o) for g, o in zip(got, ref) if o != 0 or g != 0))
    return n, worst


def suite_fundamental(seed: int) -> tuple[int, float]:
    worst, n = 0.0, 0
    for x in (0.3, 0.7, math.log(2), 1.0, 2.0):
        for de in np.arange(1, 30) / 10:
            rep = min_fluctuation_charge(ThermalSpec(1.0, x), float(de), 256)
            worst = max(worst, abs(rep.delta_W2 - min_fluctuation_value(float(de))))
            n += 1
    for de in np.arange(1, 31) / 10:
        rep = optimal_precision_charge(ThermalSpec(1.0, 20.0), float(de))
        worst = max(worst, abs(rep.final_V - zero_temp_bounds(float(de))[0]))
        n += 1
    return n, worst


def suite_extremal(seed: int, samples: int = 200) -> tuple[int, float]:
    """Largest violation of the solver bounds by random feasible strategies."""
    rng = np.random.default_rng(seed)
    worst, n = 0.0, 0
    for x in (0.2, 1.0, 5.0):
        for de in (0.3, 1.0, 4.0):
            s = ThermalSpec(1.0, x)
            lo_v, hi_v = best_precision(de, s).objective, v_bounds_at_r(worst_precision(de, s).r, de, s)[1]
            lo_w = extremal_fluctuations(de, s, "min").objective
            hi_w = extremal_fluctuations(de, s, "max").objective
            for params in random_feasible_params(de, s, samples, rng):
                _, V, dw2 = gaussian_charge_stats(params, s)
                worst = max(worst, lo_v - V, V - hi_v, lo_w - dw2, dw2 - hi_w)
                n += 1
    return n, max(worst, 0.0)


def random_feasible_params(delta_E: float, spec: ThermalSpec, count: int, rng) -> list[SymplecticParams]:
    """Random Gaussian unitaries that inject exactly delta_E."""
    r_max = pure_squeezing_r(delta_E, spec)
    out = []
    for _ in range(count):
        r = rng.uniform(0, r_max)
        rad = math.sqrt(residual_displacement(r, delta_E, spec))
        ang = rng.uniform(0, 2 * math.pi)
        out.append(
            SymplecticParams(
                theta=rng.uniform(0, 2 * math.pi),
                r=r,
                phi=rng.uniform(0, 2 * math.pi),
                xi=(rad * math.cos(ang), rad * math.sin(ang)),
            )
        )
    return out


def wigner_samples() -> list[GaussianState]:
    vac = thermal_gaussian(ThermalSpec(1.0, math.inf))
    th = thermal_gaussian(ThermalSpec(1.0, 1.0))
    dsq = apply_symplectic(thermal_gaussian(ThermalSpec(1.0, 2.0)), SymplecticParams(0.4, 0.5, 0.3, (1.0, -0.7)))
    return [vac, th, dsq]


def suite_wigner(seed: int) -> tuple[int, float]:
    worst = 0.0
    states = wigner_samples()
    for st in states:
        got = wigner_moment_check(st)
        ref = photon_moments(st)[1]
        worst = max(worst, abs(got - ref) if ref == 0 else _rel(got, ref))
    return len(states), worst


_SUITES = {
    "oracle": (suite_oracle, "max rel err", 1e-6),
    "fundamental": (suite_fundamental, "max abs err", 1e-4),
    "extremal": (suite_extremal, "max violation", 1e-9),
    "wigner": (suite_wigner, "max rel err", 1e-6),
}


def _tol_str(tol: float) -> str:
    mant, exp = f"{tol:.0e}".split("e")
    return f"{mant}e{int(exp)}"


def run_verify(suite: str, seed: int, out=None) -> bool:
    out = out or sys.stdout
    names = list(_SUITES) if suite == "all" else [suite]
    ok = True
    for name in names:
        fn, metric, tol = _SUITES[name]
        n, err = fn(seed)
        passed = err < tol
        ok &= passed
        relation = "<" if passed else ">="
        print(f"{name}: {n} cases, {metric} {relation} {_tol_str(tol)}", file=out)
    return ok


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="batterycharge", description="Quantum battery charging data and checks.")
    sub = p.add_subparsers(dest="command", required=True)
    for fig in FIGURES:
        f = sub.add_parser(fig, help=f"write the data behind {fig} as CSV")
        f.add_argument("--temps", type=float, nargs="+", help="initial temperatures in units of omega")
        f.add_argument("--emax", type=float, help="largest energy input (fig3: the energy input)")
        f.add_argument("--step", type=float, help="energy grid spacing")
        f.add_argument("--dim", type=int, help="Fock truncation for fundamental protocols")
        f.add_argument("--d", type=int, default=6, help="Hilbert-space dimension (fig1)")
        f.add_argument("--out", help="output CSV path (default: stdout)")
        f.add_argument("--seed", type=int, default=0, help="unused by figures, accepted for uniformity")
        f.add_argument("--jobs", type=int, default=1, help="worker processes for the grid")
        f.add_argument("--explain", action="store_true", help="list the operation behind each column")
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--seed", type=int, default=7)
    return p


def config_from_args(args) -> SweepConfig:
    d = _DEFAULTS[args.command]
    return SweepConfig(
        figure=args.command,
        temps=tuple(args.temps) if args.temps else d["temps"],
        emax=args.emax if args.emax is not None else d["emax"],
        step=args.step if args.step is not None else d["step"],
        dim=args.dim,
        out=args.out,
        d=args.d,
        jobs=args.jobs,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "verify":
            return EXIT_OK if run_verify(args.suite, args.seed) else EXIT_NUMERIC
        cfg = config_from_args(args)
        if args.explain:
            sys.stdout.write(explain(cfg))
            return EXIT_OK
        text = run_figure(cfg)
        if not cfg.out:
            sys.stdout.write(text)
        return EXIT_OK
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, BatteryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
