import math

import numpy as np
import pytest
import scipy.integrate

from semirelax import (
    F_p_expanded,
    F_p_source,
    J_kernel,
    RadialProfile,
    dJ_dt,
    duhamel_maximal_bound_check,
    load_profile,
    maximal_bound_check,
    maximal_function,
    profile_from_function,
    radial_halfwave_operator,
    radial_l2_norm,
    radial_sobolev_norm,
    save_profile,
    wave_evolve,
)
from semirelax.radial import JEvaluator, cumulative_mass, radial_inner_product


def gaussian_profile(R=10.0, M=512, amp=1.0):
    return profile_from_function(lambda r: amp * np.exp(-(r**2)), R=R, M=M)


def bump_profile(R=10.0, M=512, a=2.0, amp=1.0):
    """Smooth compactly supported bump on r < a."""

    def f(r):
        inside = r < a
        out = np.zeros_like(r)
        x = np.clip(r / a, 0.0, 1.0 - 1e-12)
        out[inside] = amp * np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
        return out

    return profile_from_function(f, R=R, M=M)


class TestProfileBasics:
    def test_staggered_nodes(self):
        prof = gaussian_profile(R=8.0, M=16)
        assert prof.r[0] == pytest.approx(0.25)
        assert prof.r[-1] == pytest.approx(8.0 - 0.25)

    def test_minimum_sample_count(self):
        with pytest.raises(ValueError):
            RadialProfile(5.0, np.ones(8))

    def test_rejects_non_finite(self):
        vals = np.ones(32)
        vals[3] = np.nan
        with pytest.raises(ValueError):
            RadialProfile(5.0, vals)

    def test_l2_norm_quadrature(self):
        prof = gaussian_profile(M=2048)
        val, _ = scipy.integrate.quad(
            lambda r: 4 * np.pi * r**2 * np.exp(-2 * r**2), 0, np.inf
        )
        assert radial_l2_norm(prof) == pytest.approx(np.sqrt(val), rel=1e-8)

    def test_file_round_trip(self, tmp_path):
        prof = gaussian_profile(M=64)
        pvals = prof.values + 0.3j * prof.r
        prof = RadialProfile(prof.R, pvals)
        save_profile(prof, tmp_path / "prof.txt")
        back = load_profile(tmp_path / "prof.txt")
        assert back.R == prof.R and back.M == prof.M
        assert np.array_equal(back.values, prof.values)
        header = (tmp_path / "prof.txt").read_text().splitlines()[0]
        assert header == "64 10"


class TestJKernel:
    def test_constant_gives_t_exactly(self):
        ones = profile_from_function(lambda r: np.ones_like(r), R=10.0, M=256)
        for t in (0.0, 0.37, 2.0, 4.5):
            r = ones.r[ones.r + t <= ones.r[-1]]
            vals = J_kernel(ones, t, r)
            assert np.max(np.abs(vals - t)) < 1e-13 * max(t, 1.0)

    def test_t_zero_is_zero(self):
        prof = gaussian_profile()
        assert abs(J_kernel(prof, 0.0, 1.0)) == 0.0

    def test_linear_profile_closed_form(self):
        lin = profile_from_function(lambda r: r, R=10.0, M=256)
        t = 1.3
        r = lin.r[lin.r + t <= lin.r[-1]]
        expected = ((r + t) ** 3 - np.abs(r - t) ** 3) / (6.0 * r)
        assert np.max(np.abs(J_kernel(lin, t, r) - expected)) < 1e-10

    def test_linearity(self):
        f = gaussian_profile()
        g = profile_from_function(lambda r: np.exp(-((r - 2) ** 2)), R=10.0, M=512)
        comb = RadialProfile(f.R, 2.0 * f.values + 1j * g.values)
        t, r = 0.8, f.r[::7]
        a = J_kernel(comb, t, r)
        b = 2.0 * J_kernel(f, t, r) + 1j * J_kernel(g, t, r)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_rejects_nonpositive_radius(self):
        prof = gaussian_profile()
        with pytest.raises(ValueError, match="r > 0"):
            J_kernel(prof, 0.5, 0.0)


class TestDJdt:
    def test_constant_profile_collapses(self):
        c = 0.7 - 0.2j
        ones = profile_from_function(lambda r: np.full_like(r, 1.0), R=10.0, M=256)
        prof = RadialProfile(10.0, c * ones.values)
        for t in (0.1, 1.0, 3.0):
            r = prof.r[(prof.r - t > prof.dr) & (prof.r + t <= prof.r[-1])]
            vals = dJ_dt(prof, t, r)
            assert np.max(np.abs(vals - c)) < 1e-12

    def test_zero_profile(self):
        zero = profile_from_function(lambda r: np.zeros_like(r), R=10.0, M=64)
        assert dJ_dt(zero, 0.5, 1.0) == 0.0

    def test_matches_finite_difference_at_order_two(self):
        prof = gaussian_profile(M=1024, R=12.0)
        t = 0.8
        r = prof.r[(prof.r > 0.3) & (prof.r + t + 0.1 <= prof.r[-1])]
        errs = []
        steps = (1e-2, 5e-3, 2.5e-3)
        for h in steps:
            fd = (J_kernel(prof, t + h, r) - J_kernel(prof, t - h, r)) / (2 * h)
            errs.append(np.max(np.abs(fd - dJ_dt(prof, t, r))))
        from semirelax.plotting import fit_order

        assert 1.9 <= fit_order(steps, errs) <= 2.1


class TestRadialHalfwave:
    def test_sine_mode_eigenfunction(self):
        R, M = 8.0, 1024
        k = np.pi / R
        prof = profile_from_function(lambda r: np.sin(k * r) / r, R=R, M=M)
        out = radial_halfwave_operator(prof)
        assert np.max(np.abs(out.values - k * prof.values)) < 1e-9

    def test_zero_profile(self):
        zero = profile_from_function(lambda r: np.zeros_like(r), R=8.0, M=64)
        out = radial_halfwave_operator(zero)
        assert np.all(out.values == 0)

    def test_gaussian_matches_3d_spectral(self):
        import semirelax as sx

        g3 = sx.make_grid(3, 64, 20.0)
        f3 = sx.gaussian_field(g3)
        df3 = sx.to_physical(sx.half_laplacian(f3))
        half = g3.N // 2
        axis_vals = df3.values[half + 1 :, half, half]
        radii = g3.axis[half + 1 :]
        prof = gaussian_profile(R=20.0, M=512)
        dprof = radial_halfwave_operator(prof)
        keep = radii <= prof.r[-1]
        interp = JEvaluator(dprof).spline.point(radii[keep])
        err = np.max(np.abs(axis_vals[keep] - interp)) / np.max(np.abs(interp))
        assert err < 1e-4

    def test_self_adjoint_and_nonnegative(self):
        f = gaussian_profile(M=256)
        g = profile_from_function(lambda r: r * np.exp(-(r**2)), R=10.0, M=256)
        df, dg = radial_halfwave_operator(f), radial_halfwave_operator(g)
        lhs = radial_inner_product(df, g)
        rhs = radial_inner_product(f, dg)
        assert abs(lhs - rhs) < 1e-8 * max(abs(lhs), abs(rhs), 1.0)
        quad = radial_inner_product(df, f)
        assert quad.real >= 0 and abs(quad.imag) < 1e-10

    def test_rejects_non_decaying(self):
        ones = profile_from_function(lambda r: np.ones_like(r), R=8.0, M=64)
        with pytest.raises(ValueError, match="decay"):
            radial_halfwave_operator(ones)

    def test_sobolev_norm_consistency(self):
        # s = 0 recovers the radial L^2 norm
        prof = gaussian_profile(M=1024)
        assert radial_sobolev_norm(prof, 0.0) == pytest.approx(
            radial_l2_norm(prof), rel=1e-10
        )


class TestFpSource:
    def test_zero_input(self):
        zero = profile_from_function(lambda r: np.zeros_like(r), R=8.0, M=64)
        out = F_p_source(zero, 3.0)
        assert np.all(out.values == 0)

    def test_chain_rule_matches_grouped_expansion(self):
        # same contributions, two arithmetic routes; p = 3 gaussian
        prof = gaussian_profile(R=12.0, M=512, amp=0.5)
        a = F_p_source(prof, 3.0)
        b = F_p_expanded(prof, 3.0)
        scale = np.max(np.abs(a.values))
        assert np.max(np.abs(a.values - b.values)) < 1e-10 * scale

    def test_pure_power_term_without_dispersion(self):
        # with D u = 0 forced (constant profile put through the algebra by
        # hand), F_p reduces to p |u|^(2p-2) u; check the pointwise algebra
        # against a symbolic expansion at a few sample values
        p = 3.0
        u = np.array([0.3 * np.exp(1j * 0.7), 0.05, -0.2j], dtype=complex)
        du = np.zeros_like(u)
        nl = np.abs(u) ** (p - 1) * u
        chain = (
            0.5j * (p + 1) * np.abs(u) ** (p - 1) * du
            - 0.5j * (p - 1) * np.abs(u) ** (p - 3) * u**2 * np.conj(du)
            + p * np.abs(u) ** (2 * p - 2) * u
        )
        assert np.allclose(chain, p * np.abs(u) ** 4 * u, atol=1e-15)
        assert np.allclose(nl * np.abs(u) ** (p - 1) * p, chain, atol=1e-15)

    def test_subcubic_regularized(self):
        prof = bump_profile(amp=0.3)
        out = F_p_source(prof, 2.0)
        assert np.isfinite(out.values).all()


class TestWaveEvolve:
    def test_zero_data(self):
        zero = profile_from_function(lambda r: np.zeros_like(r), R=8.0, M=64)
        rt = wave_evolve(zero, 3.0, dt=0.1, T=0.5)
        assert all(np.all(p.values == 0) for p in rt.profiles)

    def test_initial_profile_reproduced(self):
        prof = gaussian_profile(R=10.0, M=256, amp=0.1)
        rt = wave_evolve(prof, 3.0, dt=0.25, T=0.5)
        assert np.array_equal(rt.profiles[0].values, prof.values)
        assert len(rt.times) == 3

    def test_rejects_domain_of_dependence_violation(self):
        prof = gaussian_profile(R=5.0, M=128)
        with pytest.raises(ValueError, match="radial boundary"):
            wave_evolve(prof, 3.0, dt=0.1, T=5.0)

    def test_rejects_supercubic(self):
        prof = gaussian_profile()
        with pytest.raises(ValueError, match="1 < p <= 3"):
            wave_evolve(prof, 4.0, dt=0.1, T=0.5)

    def test_trajectory_export_round_trip(self, tmp_path):
        from semirelax import load_radial_trajectory, save_radial_trajectory

        prof = gaussian_profile(R=10.0, M=64, amp=0.1)
        rt = wave_evolve(prof, 3.0, dt=0.25, T=0.5)
        save_radial_trajectory(rt, tmp_path / "rt")
        back = load_radial_trajectory(tmp_path / "rt")
        assert back.p == rt.p and back.dt == rt.dt
        assert np.allclose(back.times, rt.times)
        for a, b in zip(back.profiles, rt.profiles):
            assert np.array_equal(a.values, b.values)
        assert (tmp_path / "rt" / "meta.json").exists()
        assert (tmp_path / "rt" / "profile_000000.txt").exists()

    def test_linear_matches_3d_spectral(self):
        import semirelax as sx

        N, L, M, R = 64, 20.0, 512, 20.0
        amp = 0.1
        g3 = sx.make_grid(3, N, L)
        u0 = sx.gaussian_field(g3, amp)
        lin3 = sx.to_physical(sx.linear_step(u0, 1.0))
        prof0 = gaussian_profile(R=R, M=M, amp=amp)
        rt = wave_evolve(prof0, 3.0, dt=0.5, T=1.0, nonlinear=False)
        half = N // 2
        axis_vals = lin3.values[half + 1 :, half, half]
        radii = g3.axis[half + 1 :]
        keep = radii <= rt.profiles[-1].r[-1]
        wave_vals = JEvaluator(rt.profiles[-1]).spline.point(radii[keep])
        err = np.max(np.abs(axis_vals[keep] - wave_vals)) / np.max(np.abs(wave_vals))
        assert err < 1e-3

    def test_self_convergence_order(self):
        prof = gaussian_profile(R=10.0, M=256, amp=0.3)
        T = 0.5
        finals = {}
        for dt in (0.05, 0.025, 0.0125):
            rt = wave_evolve(prof, 3.0, dt=dt, T=T)
            finals[dt] = rt.profiles[-1].values
        ref = wave_evolve(prof, 3.0, dt=0.0125 / 4, T=T).profiles[-1].values
        errs = [np.max(np.abs(finals[dt] - ref)) for dt in (0.05, 0.025, 0.0125)]
        from semirelax.plotting import fit_order

        assert fit_order((0.05, 0.025, 0.0125), errs) >= 1.8

    def test_data_term_is_exactly_causal(self):
        # the averaging kernel reads u0 only at radii r-t .. r+t, so the
        # dJ/dt data term vanishes identically outside r <= a + t
        a = 2.0
        prof = bump_profile(R=12.0, M=768, a=a, amp=0.2)
        ev = JEvaluator(prof)
        for t in (0.5, 1.5, 3.0):
            outside = prof.r[prof.r - t > a + 2 * prof.dr]
            vals = ev.dj_dt(t, outside)
            assert np.max(np.abs(vals)) < 1e-14

    def test_out_of_cone_tail_is_algebraic(self):
        # the half-wave kernel and the D-terms of the source carry |x|^-4
        # tails, so the full solution is not strictly supported in the
        # cone; the tail must decay monotonically with the margin
        a = 2.0
        prof = bump_profile(R=12.0, M=768, a=a, amp=0.2)
        T = 2.0
        rt = wave_evolve(prof, 3.0, dt=0.05, T=T)
        final = rt.profiles[-1]
        peak = np.max(np.abs(final.values))
        tails = []
        for margin in (1.0, 2.0, 4.0):
            outside = final.r > a + T + margin
            tails.append(np.max(np.abs(final.values[outside])) / peak)
        assert tails[0] < 2e-2
        assert tails[2] < tails[1] < tails[0]
        assert tails[2] < 1e-3


class TestMaximalFunction:
    def test_constant_density(self):
        x = np.linspace(0.0, 1.0, 64, endpoint=False) + 1.0 / 128
        vals = np.ones(64)
        assert maximal_function(x, vals, 0.5) == pytest.approx(1.0, rel=1e-12)

    def test_point_mass_scaling(self):
        m_cells = 512
        x = np.linspace(-5.0, 5.0, m_cells, endpoint=False) + 10.0 / (2 * m_cells)
        dx = x[1] - x[0]
        vals = np.zeros(m_cells)
        j = np.argmin(np.abs(x - 2.0))
        mass = 0.8
        vals[j] = mass / dx
        t = float(x[np.argmin(np.abs(x - 0.0))])
        d = abs(x[j] - t)
        got = maximal_function(x, vals, t)
        assert got == pytest.approx(mass / (2 * d), rel=2 * dx / d)

    def test_empty_support_rejected(self):
        x = np.linspace(0, 1, 32)
        with pytest.raises(ValueError, match="zero"):
            maximal_function(x, np.zeros(32), 0.5)

    @pytest.mark.parametrize("seed", range(6))
    def test_domination_of_windowed_averages(self, seed):
        rng = np.random.default_rng(seed)
        m = 256
        grid = np.linspace(0.0, 10.0, m, endpoint=False) + 10.0 / (2 * m)
        f = rng.random(m)
        f[rng.integers(m // 2, m) :] = 0.0
        t = float(grid[rng.integers(m // 4, m // 2)])
        C = cumulative_mass(grid, f)
        lhs = float(np.max((C(grid + t) - C(np.abs(grid - t))) / (2.0 * grid)))
        x_full = np.concatenate([-grid[::-1], grid])
        f_full = np.concatenate([f[::-1], f])
        rhs = maximal_function(x_full, f_full, t)
        assert lhs <= rhs + 1e-8


class TestBoundChecks:
    def test_zero_profile_trivial(self):
        zero = profile_from_function(lambda r: np.zeros_like(r), R=8.0, M=64)
        report = maximal_bound_check(zero, T=2.0)
        assert report["lhs"] == 0.0 and report["rhs"] == 0.0

    def test_unit_ball_indicator_pinned(self):
        # f = 1 on [0, 1]: rhs = sqrt(4 pi / 3); oracle for the lhs is the
        # closed-form windowed integral of the indicator
        prof = profile_from_function(
            lambda r: (r <= 1.0).astype(float), R=8.0, M=2048
        )
        report = maximal_bound_check(prof, T=4.0)
        assert report["rhs"] == pytest.approx(np.sqrt(4 * np.pi / 3), rel=1e-4)

        def j_closed(t, r):
            hi = np.minimum(r + t, 1.0)
            lo = np.minimum(np.abs(r - t), 1.0)
            return np.maximum(0.0, hi**2 - lo**2) / (4.0 * r)

        r = np.linspace(1e-4, 8.0, 20001)
        ts = np.linspace(0.0, 4.0, 4001)
        sup = np.array([np.max(j_closed(t, r)) for t in ts])
        oracle = np.sqrt(np.trapezoid(sup**2, ts)) / np.sqrt(4 * np.pi / 3)
        assert report["empirical_constant"] == pytest.approx(oracle, rel=2e-3)
        # regression pin: first validated run at (M=2048, T=4)
        assert report["empirical_constant"] == pytest.approx(0.3093746167, rel=1e-6)

    def test_duhamel_variant_finite(self):
        prof = gaussian_profile(M=256)
        report = duhamel_maximal_bound_check(prof, T=3.0, n_t=128)
        assert math.isfinite(report["empirical_constant"])
        assert report["lhs"] <= report["rhs"] * 2.0
