"""Scenario execution: dispatch to the solvers, apply the requested
checks, and emit diagnostics CSV, per-check JSON reports and run reports.

Pass thresholds for the residual checks scale with (dt / 1e-3)^2, matching
the second-order convergence of the splitting, and are calibrated so the
shipped catalog passes at its default resolutions.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

import numpy as np

from . import diagnostics as diag
from .fields import to_physical
from .norms import l2_norm
from .plotting import emit_plots, fit_order, refinement_chart_svg
from .propagator import StepperConfig, Trajectory, duhamel_residual, evolve
from .radial import (
    JEvaluator,
    RadialProfile,
    RadialTrajectory,
    cumulative_mass,
    maximal_bound_check,
    maximal_function,
    wave_evolve,
)
from .scenarios import Scenario

__all__ = ["CheckResult", "RunReport", "run", "sweep", "worker_count"]

# residual thresholds at the reference step dt = 1e-3
PROP21_TOL = 1.0e-6
PROP22_TOL = 1.0e-5
DUHAMEL_TOL = 1.0e-3
LEMMA35_TOL = 1.0e-2
SCALING_TOL = 1.0e-8
MAXIMAL_TOL = 1.0e-8


def worker_count() -> int:
    raw = os.environ.get("SEMIRELAX_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@contextmanager
def _forced_serial(enabled: bool):
    if not enabled:
        yield
        return
    saved = os.environ.get("SEMIRELAX_THREADS")
    os.environ["SEMIRELAX_THREADS"] = "1"
    try:
        yield
    finally:
        if saved is None:
            os.environ.pop("SEMIRELAX_THREADS", None)
        else:
            os.environ["SEMIRELAX_THREADS"] = saved


@dataclass
class CheckResult:
    name: str
    passed: bool
    data: dict = field(default_factory=dict)


@dataclass
class RunReport:
    scenario: dict
    checks: dict
    csv_path: str | None
    wall_time: float

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "checks": self.checks,
            "diagnostics_csv": self.csv_path,
            "wall_time": self.wall_time,
            "passed": self.all_passed,
        }


class _RunContext:
    """Lazily computed solver outputs shared by the checks of one run."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._traj: Trajectory | None = None
        self._radial: RadialTrajectory | None = None
        self._linear: Trajectory | None = None

    @property
    def traj(self) -> Trajectory:
        if self._traj is None:
            sc = self.scenario
            cfg = StepperConfig(
                p=sc.p, dt=sc.dt, T=sc.T,
                snapshot_stride=sc.snapshot_stride, nonlinear=sc.nonlinear,
            )
            self._traj = evolve(sc.initial_field(), cfg)
        return self._traj

    @property
    def radial_traj(self) -> RadialTrajectory:
        if self._radial is None:
            sc = self.scenario
            self._radial = wave_evolve(sc.initial_profile(), sc.p, sc.dt, sc.T)
        return self._radial

    @property
    def linear_traj(self) -> Trajectory:
        if self.scenario.nonlinear is False:
            return self.traj
        if self._linear is None:
            sc = self.scenario
            cfg = StepperConfig(
                p=sc.p, dt=sc.dt, T=sc.T,
                snapshot_stride=sc.snapshot_stride, nonlinear=False,
            )
            self._linear = evolve(sc.initial_field(), cfg)
        return self._linear

    @property
    def profile(self) -> RadialProfile:
        return self.scenario.initial_profile()


def _dt_scaled(tol: float, dt: float) -> float:
    return tol * (dt / 1.0e-3) ** 2


def _check_regime(ctx: _RunContext, name: str) -> CheckResult:
    """Regime markers: the run completed, stayed finite and mass-monotone
    (instability would have aborted the solver)."""
    traj = ctx.traj if ctx.scenario.solver != "radial-wave" else None
    data = {}
    if traj is not None:
        norms = [l2_norm(u) for u in traj.snapshots]
        data = {"initial_l2": norms[0], "final_l2": norms[-1]}
        ok = all(np.isfinite(norms)) and norms[-1] <= norms[0] * (1 + 1e-10)
    else:
        ok = np.isfinite(ctx.radial_traj.profiles[-1].values).all()
    return CheckResult(name, bool(ok), data)


def _check_prop21(ctx: _RunContext, name: str) -> CheckResult:
    traj = ctx.traj
    res = diag.check_l2_identity(traj, 0.0, float(traj.times[-1]))
    tol = _dt_scaled(PROP21_TOL, ctx.scenario.dt)
    data = res.as_dict()
    data["tolerance"] = tol
    data["t1_zero_extension"] = True
    return CheckResult(name, res.relative < tol, data)


def _check_prop22(ctx: _RunContext, name: str) -> CheckResult:
    traj = ctx.traj
    res = diag.check_h1_identity(traj, 0.0, float(traj.times[-1]))
    tol = _dt_scaled(PROP22_TOL, ctx.scenario.dt)
    data = res.as_dict()
    data["tolerance"] = tol
    data["t1_zero_extension"] = True
    return CheckResult(name, res.relative < tol, data)


def _check_prop23(ctx: _RunContext, name: str) -> CheckResult:
    report = diag.check_hs_growth(ctx.traj, ctx.scenario.s, C=1.0)
    ok = math.isfinite(report.empirical_constant)
    return CheckResult(name, ok, report.as_dict())


def _check_prop24(ctx: _RunContext, name: str) -> CheckResult:
    traj = ctx.traj
    report = diag.check_h2_inequality(traj, 0.0, float(traj.times[-1]))
    ok = report.slack >= -1e-12 * max(report.rhs, 1.0)
    return CheckResult(name, ok, report.as_dict())


def _check_scaling(ctx: _RunContext, name: str) -> CheckResult:
    sc = ctx.scenario
    u0 = sc.initial_field()
    data, ok = {}, True
    for sigma in (0.5, 2.0):
        res = diag.check_scaling_law(u0, sigma, sc.s, sc.p)
        data[f"relative_sigma_{sigma}"] = res.relative
        ok = ok and res.relative < SCALING_TOL
    return CheckResult(name, ok, data)


def _check_lemma33(ctx: _RunContext, name: str) -> CheckResult:
    sc = ctx.scenario
    ratio = diag.strauss_ratio(sc.initial_field(), s=sc.s)
    return CheckResult(name, math.isfinite(ratio), {"ratio": ratio})


def _check_lemma34(ctx: _RunContext, name: str) -> CheckResult:
    ratio = diag.weighted_strichartz_ratio(ctx.linear_traj, delta=0.5, q1=4.0)
    return CheckResult(name, math.isfinite(ratio), {"ratio": ratio})


def _check_lemma35(ctx: _RunContext, name: str) -> CheckResult:
    disagreement = spectral_vs_wave_disagreement(ctx.traj, ctx.radial_traj)
    return CheckResult(
        name, disagreement < LEMMA35_TOL,
        {"relative_linf": disagreement, "tolerance": LEMMA35_TOL},
    )


def _check_lemma36(ctx: _RunContext, name: str) -> CheckResult:
    worst = maximal_domination_gap(seed=0, trials=10)
    return CheckResult(name, worst <= MAXIMAL_TOL, {"worst_gap": worst})


def _check_cor37(ctx: _RunContext, name: str) -> CheckResult:
    report = maximal_bound_check(ctx.profile, T=ctx.scenario.T)
    ok = math.isfinite(report["empirical_constant"])
    return CheckResult(name, ok, report)


def _check_cor39(ctx: _RunContext, name: str) -> CheckResult:
    report = diag.hardy_time_derivative_check(ctx.profile)
    ok = math.isfinite(report.empirical_constant) and "out_of_space" not in report.notes
    return CheckResult(name, ok, report.as_dict())


def _check_duhamel(ctx: _RunContext, name: str) -> CheckResult:
    value = duhamel_residual(ctx.traj)
    scale = max(l2_norm(ctx.traj.snapshots[0]), 1e-30)
    tol = _dt_scaled(DUHAMEL_TOL, ctx.scenario.dt)
    return CheckResult(
        name, value / scale < tol, {"residual": value, "relative": value / scale}
    )


_CHECKS = {
    "prop11": _check_regime,
    "prop12": _check_regime,
    "prop13": _check_regime,
    "prop14": _check_regime,
    "prop21": _check_prop21,
    "prop22": _check_prop22,
    "prop23": _check_prop23,
    "prop24": _check_prop24,
    "scaling": _check_scaling,
    "lemma33": _check_lemma33,
    "lemma34": _check_lemma34,
    "lemma35": _check_lemma35,
    "lemma36": _check_lemma36,
    "cor37": _check_cor37,
    "cor39": _check_cor39,
    "duhamel": _check_duhamel,
}


def spectral_vs_wave_disagreement(traj: Trajectory, rtraj: RadialTrajectory) -> float:
    """Relative L^inf gap at the final common time between the 3-d spectral
    solution along the positive first axis and the wave-form profile."""
    u3 = to_physical(traj.snapshots[-1])
    grid = u3.grid
    half = grid.N // 2
    axis_vals = u3.values[(slice(half + 1, None),) + (half,) * (grid.n - 1)]
    radii = grid.axis[half + 1 :]
    prof = rtraj.profiles[-1]
    keep = radii <= prof.r[-1]
    wave_vals = JEvaluator(prof).spline.point(radii[keep])
    scale = float(np.max(np.abs(wave_vals)))
    if scale == 0:
        return float(np.max(np.abs(axis_vals[keep])))
    return float(np.max(np.abs(axis_vals[keep] - wave_vals)) / scale)


def maximal_domination_gap(seed: int, trials: int, m: int = 200) -> float:
    """Worst gap of sup_r (1/2r) int_{|r-t|}^{r+t} f over the maximal value
    of the even extension, over random nonnegative compactly supported f."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(trials):
        grid = np.linspace(0.0, 10.0, m, endpoint=False) + 10.0 / (2 * m)
        f = rng.random(m)
        cutoff = rng.integers(m // 2, m)
        f[cutoff:] = 0.0
        t = float(grid[rng.integers(m // 4, m // 2)])
        # lhs: exact windowed averages of f on the half-line
        C = cumulative_mass(grid, f)
        r = grid
        lhs = float(np.max((C(r + t) - C(np.abs(r - t))) / (2.0 * r)))
        # rhs: maximal function of the even extension
        x_full = np.concatenate([-grid[::-1], grid])
        f_full = np.concatenate([f[::-1], f])
        rhs = maximal_function(x_full, f_full, t)
        worst = max(worst, lhs - rhs)
    return worst


def run(
    scenario: Scenario,
    outdir,
    deterministic: bool = False,
    plots: bool = False,
) -> RunReport:
    """Execute one scenario and write its reports under outdir/<name>/.

    Deterministic mode forces serial transforms and zeroes the wall-time
    field so repeated runs produce byte-identical CSV/JSON output.
    """
    t0 = time.perf_counter()
    run_dir = os.path.join(outdir, scenario.name)
    os.makedirs(run_dir, exist_ok=True)
    os.makedirs(os.path.join(run_dir, "checks"), exist_ok=True)
    with _forced_serial(deterministic):
        ctx = _RunContext(scenario)
        csv_path = None
        if scenario.solver in ("spectral", "both"):
            # stored relative to the run directory so reports are
            # byte-identical across output locations
            csv_path = "diagnostics.csv"
            try:
                diag.write_diagnostics_csv(
                    ctx.traj, os.path.join(run_dir, csv_path), s=scenario.s
                )
            except Exception as exc:  # solver errors carry scenario context
                raise RuntimeError(
                    f"solver failed for scenario {scenario.name!r}: {exc}"
                ) from exc
        results = {}
        for check in scenario.checks:
            try:
                res = _CHECKS[check](ctx, check)
            except Exception as exc:  # surfaced with scenario context
                raise RuntimeError(
                    f"check {check!r} failed to run for scenario {scenario.name!r}: {exc}"
                ) from exc
            results[check] = {"passed": res.passed, **_jsonable(res.data)}
            with open(os.path.join(run_dir, "checks", f"{check}.json"), "w") as fh:
                json.dump(results[check], fh, indent=2, sort_keys=True)
        if plots and csv_path:
            emit_plots(
                os.path.join(run_dir, csv_path), os.path.join(run_dir, "plots")
            )
    wall = 0.0 if deterministic else time.perf_counter() - t0
    report = RunReport(
        scenario=asdict(scenario),
        checks=results,
        csv_path=csv_path,
        wall_time=wall,
    )
    with open(os.path.join(run_dir, "report.json"), "w") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
    return report


def _jsonable(data: dict) -> dict:
    out = {}
    for k, v in data.items():
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        elif isinstance(v, float) and math.isinf(v):
            v = "inf"
        elif isinstance(v, dict):
            v = _jsonable(v)
        out[k] = v
    return out


_SWEEPABLE = {"dt": float, "N": int, "amplitude": float, "sigma": float}


def _amplitude_slot(kind: str) -> int:
    # gaussian(amplitude, width, center) vs mode(k, amplitude)
    return 1 if kind.strip() == "mode" else 0


def _apply_variation(base: Scenario, key: str, value) -> Scenario:
    sc = Scenario(**asdict(base))
    if key == "dt":
        sc.dt = float(value)
    elif key == "N":
        sc.N = int(value)
    elif key == "amplitude":
        kind, args = base.initial.split("(", 1)
        parts = args.rstrip(") ").split(",")
        parts[_amplitude_slot(kind)] = f"{float(value)}"
        sc.initial = f"{kind}({','.join(parts)})"
    elif key == "sigma":
        sc.L = base.L / float(value)
        if base.R is not None:
            sc.R = base.R / float(value)
    else:
        raise ValueError(f"cannot sweep over {key!r}; supported: {sorted(_SWEEPABLE)}")
    sc.name = f"{base.name}__{key}_{value}"
    return sc


def sweep(
    base: Scenario,
    vary: dict[str, list],
    outdir,
    deterministic: bool = False,
) -> dict:
    """Run a parameter sweep and aggregate convergence and stability data.

    Members run concurrently (capped by SEMIRELAX_THREADS); failures are
    recorded and do not abort the sweep.  When dt is varied, residual-style
    checks get a fitted convergence order and a refinement chart; empirical
    constants get a max/min stability ratio.
    """
    for key in vary:
        if key not in _SWEEPABLE:
            raise ValueError(f"cannot sweep over {key!r}; supported: {sorted(_SWEEPABLE)}")
    members = [base]
    for key, values in vary.items():
        members = [_apply_variation(m, key, v) for m in members for v in values]
    results: list[RunReport | Exception] = [None] * len(members)

    def _one(i: int):
        try:
            results[i] = run(members[i], outdir, deterministic=deterministic)
        except Exception as exc:
            results[i] = exc

    max_workers = worker_count() if not deterministic else 1
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            list(pool.map(_one, range(len(members))))
    else:
        for i in range(len(members)):
            _one(i)

    aggregate = {"members": [], "orders": {}, "stability": {}}
    for sc, res in zip(members, results):
        if isinstance(res, Exception):
            aggregate["members"].append({"name": sc.name, "error": str(res)})
        else:
            aggregate["members"].append(res.as_dict())
    if "dt" in vary and len(vary["dt"]) >= 2:
        dts = [float(v) for v in vary["dt"]]
        _aggregate_orders(aggregate, members, results, dts, outdir)
    _aggregate_stability(aggregate, results)
    if "amplitude" in vary:
        _aggregate_amplitude_threshold(aggregate, members, results)
    with open(os.path.join(outdir, "sweep.json"), "w") as fh:
        json.dump(aggregate, fh, indent=2, sort_keys=True)
    return aggregate


def _aggregate_amplitude_threshold(aggregate, members, results):
    """Empirical smallness threshold: the largest amplitude whose run is
    stable and passes every requested check."""
    passing, failing = [], []
    for sc, res in zip(members, results):
        kind, args = sc.initial.split("(", 1)
        value = float(args.rstrip(") ").split(",")[_amplitude_slot(kind)])
        if isinstance(res, RunReport) and res.all_passed:
            passing.append(value)
        else:
            failing.append(value)
    aggregate["amplitude_threshold"] = {
        "largest_passing": max(passing) if passing else None,
        "smallest_failing": min(failing) if failing else None,
    }


_RESIDUAL_CHECKS = ("prop21", "prop22", "duhamel")
_CONSTANT_CHECKS = ("prop23", "lemma33", "lemma34", "cor37", "cor39")


def _aggregate_orders(aggregate, members, results, dts, outdir):
    ok = [r for r in results if isinstance(r, RunReport)]
    if len(ok) != len(results):
        return
    for check in _RESIDUAL_CHECKS:
        vals = []
        for rep in ok:
            entry = rep.checks.get(check)
            if entry is None:
                break
            vals.append(entry.get("relative", entry.get("residual")))
        if len(vals) == len(dts) and all(v > 0 for v in vals):
            order = fit_order(dts, vals)
            aggregate["orders"][check] = order
            refinement_chart_svg(
                dts, vals, title=f"{check} refinement",
                path=os.path.join(outdir, f"refinement_{check}.svg"),
            )


def _aggregate_stability(aggregate, results):
    ok = [r for r in results if isinstance(r, RunReport)]
    for check in _CONSTANT_CHECKS:
        consts = []
        for rep in ok:
            entry = rep.checks.get(check)
            if entry is None:
                continue
            c = entry.get("empirical_constant", entry.get("ratio"))
            if isinstance(c, (int, float)) and c > 0:
                consts.append(c)
        if len(consts) >= 2:
            ratio = max(consts) / min(consts)
            aggregate["stability"][check] = {
                "max_over_min": ratio,
                "stable": ratio < 2.0,
            }
