"""Residuals and ratio probes for the a priori structure of the flow.

Each checker consumes trajectories or fields read-only and reports either an
IdentityResidual (for exact balance laws) or a BoundReport (for one-sided
estimates, where only an empirical constant and its refinement stability are
meaningful).  Space derivatives are always spectral multipliers, never
finite differences, so the residuals isolate time-discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import Field, gradient, second_derivative, to_physical
from .grids import make_grid
from .norms import (
    SobolevSpec,
    l2_norm,
    lp_norm,
    sobolev_norm,
    space_time_norm,
    weighted_norm,
)
from .propagator import Trajectory
from .radial import JEvaluator, RadialProfile, radial_sobolev_norm

__all__ = [
    "IdentityResidual",
    "BoundReport",
    "DiagnosticsRecord",
    "diagnostics_table",
    "write_diagnostics_csv",
    "CSV_HEADER",
    "check_l2_identity",
    "check_h1_identity",
    "check_hs_growth",
    "check_h2_inequality",
    "check_scaling_law",
    "strauss_ratio",
    "weighted_strichartz_ratio",
    "hardy_time_derivative_check",
    "gradient_squared_modulus",
]

_EPS = 1e-30
REGULARIZATION_EPS = 1e-30


@dataclass(frozen=True)
class IdentityResidual:
    """Two sides of an identity and their absolute/relative mismatch."""

    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def relative(self) -> float:
        return self.residual / max(self.lhs, self.rhs, _EPS)

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "relative": self.relative,
        }


@dataclass(frozen=True)
class BoundReport:
    """One-sided estimate report: lhs <= C * rhs with the empirical C."""

    lhs: float
    rhs: float
    empirical_constant: float
    notes: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def relative(self) -> float:
        return self.residual / max(self.lhs, self.rhs, _EPS)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def as_dict(self) -> dict:
        out = {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "relative": self.relative,
            "empirical_constant": self.empirical_constant,
        }
        if self.notes:
            out["notes"] = dict(self.notes)
        return out


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Norms of one snapshot: L^2, homogeneous H^1/H^2/H^s, L^inf and the
    instantaneous (p+1)-power dissipation density."""

    time: float
    l2: float
    h1dot: float
    h2dot: float
    hs: float
    linf: float
    lpp1: float


CSV_HEADER = "t,l2,h1dot,h2dot,hs,linf,lpp1_budget,res_prop21,res_prop22"


def _snapshot_index(traj: Trajectory, t: float) -> int:
    times = np.asarray(traj.times)
    idx = int(np.argmin(np.abs(times - t)))
    if abs(times[idx] - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"t = {t} is not a snapshot time of this trajectory")
    return idx


def diagnostics_table(traj: Trajectory, s: float = 1.0) -> list[DiagnosticsRecord]:
    p = traj.config.p
    records = []
    for t, u in zip(traj.times, traj.snapshots):
        records.append(
            DiagnosticsRecord(
                time=float(t),
                l2=l2_norm(u),
                h1dot=sobolev_norm(u, SobolevSpec(1.0, homogeneous=True)),
                h2dot=sobolev_norm(u, SobolevSpec(2.0, homogeneous=True)),
                hs=sobolev_norm(u, SobolevSpec(s, homogeneous=True)),
                linf=lp_norm(u, math.inf),
                lpp1=lp_norm(u, p + 1.0) ** (p + 1.0),
            )
        )
    return records


def write_diagnostics_csv(traj: Trajectory, path, s: float = 1.0) -> None:
    """Write the per-snapshot norm table plus running identity residuals.

    lpp1_budget is the accumulated dissipation 2 * int_0^t ||u||^(p+1) dt'
    (trapezoid), res_prop21 / res_prop22 the relative residuals of the
    L^2 and gradient balance laws over [0, t].
    """
    records = diagnostics_table(traj, s=s)
    times = np.asarray(traj.times)
    lpp1 = np.array([rec.lpp1 for rec in records])
    budget = 2.0 * _cumtrapz(lpp1, times)
    res21 = np.zeros(len(records))
    res22 = np.zeros(len(records))
    h1_terms = _h1_dissipation_terms(traj)
    for i in range(1, len(records)):
        res21[i] = IdentityResidual(
            lhs=records[i].l2 ** 2 + budget[i], rhs=records[0].l2 ** 2
        ).relative
        res22[i] = _h1_identity_from_terms(traj, h1_terms, 0, i).relative
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for i, rec in enumerate(records):
            row = [
                rec.time, rec.l2, rec.h1dot, rec.h2dot, rec.hs, rec.linf,
                budget[i], res21[i], res22[i],
            ]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _cumtrapz(vals: np.ndarray, times: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vals)
    if len(vals) > 1:
        seg = 0.5 * (vals[1:] + vals[:-1]) * np.diff(times)
        out[1:] = np.cumsum(seg)
    return out


def check_l2_identity(traj: Trajectory, t1: float, t2: float) -> IdentityResidual:
    """Mass balance:  ||u(t2)||^2 + 2 ||u||^(p+1)_{L^(p+1)((t1,t2) x R^n)}
    against ||u(t1)||^2.

    The stated balance uses open endpoints 0 < t1; the checker also accepts
    t1 = 0 since the discrete solution is defined there (flagged by the
    runner when used).  The relative residual decays at second order in dt.
    """
    i1, i2 = _validate_window(traj, t1, t2)
    p = traj.config.p
    window = (traj.times[i1 : i2 + 1], traj.snapshots[i1 : i2 + 1])
    budget = space_time_norm(window, p + 1.0, lambda u: lp_norm(u, p + 1.0))
    lhs = l2_norm(traj.snapshots[i2]) ** 2 + 2.0 * budget ** (p + 1.0)
    rhs = l2_norm(traj.snapshots[i1]) ** 2
    return IdentityResidual(lhs=lhs, rhs=rhs)


def _validate_window(traj: Trajectory, t1: float, t2: float) -> tuple[int, int]:
    if not (0 <= t1 < t2 <= float(traj.times[-1]) + 1e-12):
        raise ValueError(f"need 0 <= t1 < t2 <= T, got t1={t1}, t2={t2}")
    return _snapshot_index(traj, t1), _snapshot_index(traj, t2)


def gradient_squared_modulus(u: Field) -> list[np.ndarray]:
    """Spectral gradient of |u|^2, one physical-space array per axis."""
    phys = to_physical(u)
    mod2 = Field(u.grid, np.abs(phys.values) ** 2, "physical")
    return [to_physical(g).values for g in gradient(mod2)]


def _h1_dissipation_terms(traj: Trajectory) -> np.ndarray:
    """Per-snapshot values of the two gradient dissipation integrands:
    2 || |u|^((p-1)/2) grad u ||^2  and  ((p-1)/2) || |u|^((p-3)/2) grad |u|^2 ||^2."""
    p = traj.config.p
    dV = traj.grid.cell_volume
    out = np.zeros((len(traj.snapshots), 2))
    for i, u in enumerate(traj.snapshots):
        phys = to_physical(u)
        absu = np.abs(phys.values)
        grads = [to_physical(g).values for g in gradient(phys)]
        grad_sq = sum(np.abs(g) ** 2 for g in grads)
        out[i, 0] = 2.0 * float(np.sum(absu ** (p - 1.0) * grad_sq) * dV)
        weight = (
            absu ** (p - 3.0)
            if p >= 3
            else (absu**2 + REGULARIZATION_EPS) ** ((p - 3.0) / 2.0)
        )
        gm2 = gradient_squared_modulus(phys)
        gm2_sq = sum(np.abs(g) ** 2 for g in gm2)
        out[i, 1] = 0.5 * (p - 1.0) * float(np.sum(weight * gm2_sq) * dV)
    return out


def _h1_identity_from_terms(
    traj: Trajectory, terms: np.ndarray, i1: int, i2: int
) -> IdentityResidual:
    times = np.asarray(traj.times[i1 : i2 + 1])
    h1dot = lambda u: sobolev_norm(u, SobolevSpec(1.0, homogeneous=True))
    integral = float(np.trapezoid(terms[i1 : i2 + 1].sum(axis=1), times))
    lhs = h1dot(traj.snapshots[i2]) ** 2 + integral
    rhs = h1dot(traj.snapshots[i1]) ** 2
    return IdentityResidual(lhs=lhs, rhs=rhs)


def check_h1_identity(traj: Trajectory, t1: float, t2: float) -> IdentityResidual:
    """Gradient balance:

        ||grad u(t2)||^2 + 2 int || |u|^((p-1)/2) grad u ||^2
                         + (p-1)/2 int || |u|^((p-3)/2) grad |u|^2 ||^2
        against ||grad u(t1)||^2.

    Both dissipation integrands are pointwise nonnegative, so the gradient
    norm is nonincreasing.  For p < 3 the singular modulus power is
    regularized by (|u|^2 + 1e-30)^((p-3)/4) inside the square.
    """
    i1, i2 = _validate_window(traj, t1, t2)
    return _h1_identity_from_terms(traj, _h1_dissipation_terms(traj), i1, i2)


def check_hs_growth(traj: Trajectory, s: float, C: float) -> BoundReport:
    """Gronwall-type growth control of the homogeneous H^s norm:

        ||u(t2)||^2 <= ||u(t1)||^2 + C int ||u||_Linf^(p-1) ||u||_Hs^2 dt,

    valid for n in {1, 2} and n/2 < s < min(2, p).  Reports the bound at
    the supplied C over [0, T] together with the smallest constant C* that
    makes the inequality hold over every snapshot pair.
    """
    n = traj.grid.n
    p = traj.config.p
    if n not in (1, 2):
        raise ValueError(f"growth bound requires n in {{1, 2}}, got n={n}")
    if not (n / 2.0 < s < min(2.0, p)):
        raise ValueError(
            f"growth bound requires n/2 < s < min(2, p); got s={s} with n={n}, p={p}"
        )
    spec = SobolevSpec(s, homogeneous=True)
    hs_sq = np.array([sobolev_norm(u, spec) ** 2 for u in traj.snapshots])
    linf = np.array([lp_norm(u, math.inf) for u in traj.snapshots])
    integrand = linf ** (p - 1.0) * hs_sq
    cum = _cumtrapz(integrand, np.asarray(traj.times))
    c_star = 0.0
    for i in range(len(hs_sq)):
        for j in range(i + 1, len(hs_sq)):
            gain = hs_sq[j] - hs_sq[i]
            slack_int = cum[j] - cum[i]
            if gain > 0 and slack_int > 0:
                c_star = max(c_star, gain / slack_int)
    lhs = float(hs_sq[-1])
    rhs = float(hs_sq[0] + C * cum[-1])
    return BoundReport(
        lhs=lhs,
        rhs=rhs,
        empirical_constant=c_star,
        notes={"supplied_constant": C, "holds": bool(lhs <= rhs + 1e-12 * rhs)},
    )


def check_h2_inequality(traj: Trajectory, t1: float, t2: float) -> BoundReport:
    """Curvature inequality for the cubic flow (p = 3):

        ||u(t2)||_{H2dot}^2 + 2 sum_{j,k} int || u d_j d_k u ||^2
        <= ||u(t1)||_{H2dot}^2 + 2 n^2 (n+1) int ||u||_{H1dot}^(4-n) ||u||_{H2dot}^n.

    Second derivatives are the spectral multipliers -xi_j xi_k.  The report
    carries the nonnegative slack rhs - lhs.
    """
    if traj.config.p != 3:
        raise ValueError(
            f"curvature inequality is stated for the cubic case p = 3, got p={traj.config.p}"
        )
    i1, i2 = _validate_window(traj, t1, t2)
    n = traj.grid.n
    dV = traj.grid.cell_volume
    times = np.asarray(traj.times[i1 : i2 + 1])
    h1 = SobolevSpec(1.0, homogeneous=True)
    h2 = SobolevSpec(2.0, homogeneous=True)
    cross = np.zeros(len(times))
    majorant = np.zeros(len(times))
    for m, u in enumerate(traj.snapshots[i1 : i2 + 1]):
        phys = to_physical(u)
        total = 0.0
        for j in range(n):
            for k in range(n):
                djk = to_physical(second_derivative(phys, j, k)).values
                total += float(np.sum(np.abs(phys.values * djk) ** 2) * dV)
        cross[m] = total
        majorant[m] = (
            sobolev_norm(u, h1) ** (4.0 - n) * sobolev_norm(u, h2) ** float(n)
        )
    u1, u2 = traj.snapshots[i1], traj.snapshots[i2]
    lhs = sobolev_norm(u2, h2) ** 2 + 2.0 * float(np.trapezoid(cross, times))
    rhs = sobolev_norm(u1, h2) ** 2 + 2.0 * n**2 * (n + 1) * float(
        np.trapezoid(majorant, times)
    )
    return BoundReport(
        lhs=lhs,
        rhs=rhs,
        empirical_constant=lhs / rhs if rhs > 0 else 0.0,
        notes={"slack": rhs - lhs},
    )


def check_scaling_law(u0: Field, sigma: float, s: float, p: float) -> IdentityResidual:
    """Rescaling invariance of homogeneous norms.

    Builds u_sigma(x) = sigma^(1/(p-1)) u0(sigma x) on the grid with period
    L/sigma (same N; band-limited data make the construction exact) and
    compares ||u_sigma||_{Hdot^s} with sigma^(1/(p-1)+s-n/2) ||u0||_{Hdot^s}.
    At the critical index the predicted ratio is exactly 1.
    """
    if not sigma > 0:
        raise ValueError(f"scale factor must be positive, got {sigma}")
    grid = u0.grid
    scaled_grid = make_grid(grid.n, grid.N, grid.L / sigma)
    # On the rescaled grid the sample positions satisfy sigma * x'_j = x_j,
    # so the rescaled field carries the same sample values, only reweighted.
    amp = sigma ** (1.0 / (p - 1.0))
    u_sigma = Field(scaled_grid, amp * to_physical(u0).values, "physical")
    spec = SobolevSpec(s, homogeneous=True)
    exponent = 1.0 / (p - 1.0) + s - grid.n / 2.0
    lhs = sobolev_norm(u_sigma, spec)
    rhs = sigma**exponent * sobolev_norm(u0, spec)
    return IdentityResidual(lhs=lhs, rhs=rhs)


def strauss_ratio(f, n: int | None = None, s: float = 1.0) -> float:
    """Weighted sup probe  || |x|^(n/2-s) f ||_Linf / ||f||_{Hdot^s}
    for radial data; requires n >= 2 and 1/2 < s < n/2.  Returns 0 for
    identically-zero input (0/0 convention)."""
    if isinstance(f, Field):
        n_eff = f.grid.n
    else:
        n_eff = 3
    if n is not None and n != n_eff:
        raise ValueError(f"dimension mismatch: data is {n_eff}-dimensional, got n={n}")
    n = n_eff
    if n < 2:
        raise ValueError(f"radial sup estimate requires n >= 2, got n={n}")
    if not (0.5 < s < n / 2.0):
        raise ValueError(f"radial sup estimate requires 1/2 < s < n/2, got s={s}")
    if isinstance(f, Field):
        vals = np.abs(to_physical(f).values)
        weighted = f.grid.radii ** (n / 2.0 - s) * vals
        denom = sobolev_norm(f, SobolevSpec(s, homogeneous=True))
    else:
        vals = np.abs(f.values)
        weighted = f.r ** (n / 2.0 - s) * vals
        denom = radial_sobolev_norm(f, s)
    if not np.any(vals > 0):
        return 0.0
    return float(np.max(weighted)) / denom


def weighted_strichartz_ratio(
    traj: Trajectory, delta: float, q1: float
) -> float:
    """Weighted space-time probe for the free flow:

        || [x]_delta^(-1/q1) u(t) ||_{L^q1(0,T;L^2)} / ||u(0)||_{L^2}.

    Only trajectories generated by the linear propagator are accepted.
    Returns 0 for zero data.
    """
    if not traj.linear:
        raise ValueError("weighted space-time probe requires a linear trajectory")
    if q1 < 2:
        raise ValueError(f"time exponent must satisfy q1 >= 2, got {q1}")
    denom = l2_norm(traj.snapshots[0])
    if denom == 0:
        return 0.0
    num = space_time_norm(
        traj, q1, lambda u: weighted_norm(u, delta, q1, sign=-1)
    )
    return num / denom


def hardy_time_derivative_check(
    f: RadialProfile, T: float | None = None, n_t: int | None = None
) -> BoundReport:
    """Hardy-type probe for the time derivative of the radial average:

        || d/dt (1/2r) int_{|r-t|}^{r+t} lambda f(lambda) d lambda ||_{L^2_t L^inf_r}
        <= C || r f'(r) ||_{L^2(0,inf)}.

    The derivative is evaluated in closed form; the right side by midpoint
    quadrature of the spline derivative.  A vanishing right side (constant
    f, not in the weighted space) is flagged instead of divided by.
    """
    ev = JEvaluator(f)
    T = T or 0.9 * f.R
    ts = np.linspace(0.0, T, (n_t or f.M // 2) + 1)
    sup = np.array([np.max(np.abs(ev.dj_dt(t, f.r))) for t in ts])
    lhs = float(np.sqrt(np.trapezoid(sup**2, ts)))
    fprime = ev.spline.point_derivative(f.r)
    rhs = float(np.sqrt(np.sum(np.abs(f.r * fprime) ** 2) * f.dr))
    notes = {}
    if rhs <= 1e-14 * max(1.0, float(np.max(np.abs(f.values)))):
        notes["out_of_space"] = True
    return BoundReport(
        lhs=lhs,
        rhs=rhs,
        empirical_constant=lhs / rhs if rhs > 0 else math.inf,
        notes=notes,
    )
