"""Lyapunov specs, derivatives, oval geometry and peak bounds."""

import math

import numpy as np
import pytest

import predprey as pp
from predprey.integrators import Trajectory

from conftest import bisect_oracle

# oracle values, frozen from plain bisection at 1e-14 width (see bisect_oracle)
LIMIT_ROOT_111 = 3.1461932206205856      # larger root of y - ln y = 2
OVAL_Y_LOW = 0.13545857998665106         # smaller root of 3y - ln y = 2 + ln(3/2)
PEAK_R3 = 2.2708465449140967             # peak bound for alpha=1,beta=2,gamma=1,delta=3,sigma=1


class TestMakeSpec:
    def test_coexistence(self, r3_params):
        spec = pp.make_spec(r3_params)
        assert spec.regime == pp.COEXISTENCE
        assert spec.a == 2.0

    def test_extinction(self):
        p = pp.DampedPPParams(alpha=1, beta=1, gamma=1, delta=1, sigma=2)
        spec = pp.make_spec(p)
        assert spec.regime == pp.EXTINCTION
        assert spec.b == 1.0

    def test_critical_goes_extinct(self):
        p = pp.DampedPPParams(alpha=1, beta=1, gamma=1, delta=1, sigma=1)
        spec = pp.make_spec(p)
        assert spec.regime == pp.EXTINCTION
        assert spec.b == 1.0  # delta*gamma/alpha
        # the linear-in-y term of Vdot vanishes at the bifurcation
        assert pp.vdot(spec, p, (2.0, 5.0)) == pp.vdot(spec, p, (2.0, 0.0))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            pp.LyapunovSpec(pp.COEXISTENCE, gamma=1, sigma=1, beta=1, a=0.0)
        with pytest.raises(ValueError):
            pp.LyapunovSpec(pp.EXTINCTION, gamma=1, beta=1, sigma=1, b=2.0)
        with pytest.raises(ValueError):
            pp.LyapunovSpec("Weird", gamma=1)


class TestValue:
    def test_coexistence_logs_vanish(self):
        spec = pp.LyapunovSpec(pp.COEXISTENCE, gamma=1, sigma=1, beta=1, a=1)
        assert pp.value(spec, (1.0, 1.0)) == 2.0

    def test_extinction_value(self):
        spec = pp.LyapunovSpec(pp.EXTINCTION, gamma=1, beta=1, sigma=1, b=1)
        assert pp.value(spec, (1.0, 1.0)) == 2.0

    def test_plant_value(self):
        spec = pp.LyapunovSpec(pp.PLANT, gamma=2.0, sigma=1.0, v=1.0, m=0.0)
        assert pp.value(spec, (1.0, 1.0, 0.5)) == 3.0

    def test_domain_errors(self):
        spec = pp.LyapunovSpec(pp.COEXISTENCE, gamma=1, sigma=1, beta=1, a=1)
        with pytest.raises(pp.DomainError):
            pp.value(spec, (0.0, 1.0))
        with pytest.raises(pp.DomainError):
            pp.value(spec, (1.0, 0.0))


class TestVdot:
    def test_zero_on_nullcline(self, r3_params):
        spec = pp.make_spec(r3_params)
        assert pp.vdot(spec, r3_params, (1.0, 7.3)) == 0.0  # x = sigma/gamma

    def test_extinction_zero_at_boundary_eq(self):
        p = pp.DampedPPParams(alpha=1, beta=1, gamma=1, delta=1, sigma=2)
        spec = pp.make_spec(p)
        assert pp.vdot(spec, p, (1.0, 0.0)) == 0.0

    def test_coexistence_substitution(self, r3_params):
        spec = pp.make_spec(r3_params)
        assert pp.vdot(spec, r3_params, (2.0, 1.0)) == pytest.approx(-1.5, rel=1e-15)

    def test_coexistence_nonpositive_random(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            al, be, ga, si = rng.uniform(0.2, 3.0, size=4)
            R = rng.uniform(1.01, 10.0)
            de = R * al * si / ga
            p = pp.DampedPPParams(alpha=al, beta=be, gamma=ga, delta=de, sigma=si)
            spec = pp.make_spec(p)
            x, y = rng.uniform(0.01, 5.0, size=2)
            vd = pp.vdot(spec, p, (x, y))
            assert vd <= 0.0
            if abs(x - si / ga) > 1e-12:
                assert vd < 0.0

    def test_extinction_nonpositive_random(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            al, be, ga, si = rng.uniform(0.2, 3.0, size=4)
            R = rng.uniform(0.05, 1.0)
            de = R * al * si / ga
            p = pp.DampedPPParams(alpha=al, beta=be, gamma=ga, delta=de, sigma=si)
            spec = pp.make_spec(p)
            x, y = rng.uniform(0.01, 5.0, size=2)
            assert pp.vdot(spec, p, (x, y)) <= 0.0

    def test_plant_nonpositive_random(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            v, ga, si = rng.uniform(0.3, 3.0, size=3)
            y_f = rng.uniform(0.2, 4.0)
            p = pp.PlantParams(
                v=v, gamma=ga, sigma=si, threshold=pp.ThresholdSpec(y_f=y_f)
            )
            spec = pp.make_plant_spec(p)
            for _ in range(200):
                s = tuple(rng.uniform(0.01, 5.0, size=3))
                assert pp.vdot(spec, p, s) <= 0.0

    def test_matches_gradient_dot_field(self, r3_params):
        rng = np.random.default_rng(24)
        field = pp.damped_pp_field(r3_params)
        spec = pp.make_spec(r3_params)
        for _ in range(500):
            s = tuple(rng.uniform(0.02, 5.0, size=2))
            g = pp.grad(spec, s)
            f = field.eval(s)
            dot = g[0] * f[0] + g[1] * f[1]
            closed = pp.vdot(spec, r3_params, s)
            scale = max(1.0, abs(closed), abs(dot), abs(g[0] * f[0]) + abs(g[1] * f[1]))
            assert abs(closed - dot) <= 1e-10 * scale

    def test_plant_matches_gradient_dot_field(self):
        rng = np.random.default_rng(25)
        p = pp.PlantParams(
            v=1.3, gamma=0.8, sigma=1.7, threshold=pp.ThresholdSpec(y_f=1.1, k=2.0)
        )
        spec = pp.make_plant_spec(p)
        field = pp.plant_field_z(p)
        for _ in range(500):
            s = tuple(rng.uniform(0.02, 4.0, size=3))
            g = pp.grad(spec, s)
            f = field.eval(s)
            dot = sum(gi * fi for gi, fi in zip(g, f))
            closed = pp.vdot(spec, p, s)
            scale = max(
                1.0, abs(closed), abs(dot), sum(abs(gi * fi) for gi, fi in zip(g, f))
            )
            assert abs(closed - dot) <= 1e-10 * scale

    def test_finite_difference_consistency(self, r3_params):
        # |(V(p(t+h)) - V(p(t)))/h - vdot| shrinks linearly in h
        field = pp.damped_pp_field(r3_params)
        spec = pp.make_spec(r3_params)
        cfg = pp.IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
        s0 = (0.5, 0.5)
        v0 = pp.value(spec, s0)
        vd0 = pp.vdot(spec, r3_params, s0)
        errs = []
        for h in (1e-3, 1e-4, 1e-5):
            sh = pp.integrate(field, s0, (0.0, h), config=cfg, sample_every=h).final_state
            fd = (pp.value(spec, sh) - v0) / h
            errs.append(abs(fd - vd0))
        assert errs[0] > errs[1] > errs[2]
        assert 2.0 < errs[0] / errs[1] < 50.0
        assert 2.0 < errs[1] / errs[2] < 50.0


class TestMonotonicity:
    def test_constant_trajectory(self, r3_params):
        spec = pp.make_spec(r3_params)
        cfg = pp.IntegratorConfig()
        traj = Trajectory([0.0, 1.0, 2.0], [(1.0, 1.0)] * 3, [], cfg, "horizon")
        rep = pp.monotonicity_check(traj, spec, r3_params)
        assert rep.ok and rep.worst_increment == 0.0

    def test_reference_trajectory(self, r3_trajectory, r3_params):
        spec = pp.make_spec(r3_params)
        rep = pp.monotonicity_check(r3_trajectory, spec, r3_params, slack=1e-9)
        assert rep.ok

    def test_time_reversed_fails(self, r3_trajectory, r3_params):
        spec = pp.make_spec(r3_params)
        rev = Trajectory(
            list(r3_trajectory.times),
            list(reversed(r3_trajectory.states)),
            [],
            r3_trajectory.config,
            "horizon",
        )
        rep = pp.monotonicity_check(rev, spec, r3_params, slack=1e-9)
        assert not rep.ok
        assert rep.worst_increment > 0

    def test_oval_trapping(self, r3_trajectory, r3_params):
        # V(p(t)) <= V(p(0)): the anchored oval is never left
        spec = pp.make_spec(r3_params)
        level = pp.oval_level(spec, r3_trajectory.states[0])
        assert level.C == pp.value(spec, level.anchor)
        slack = 10 * r3_trajectory.config.abs_tol
        for s in r3_trajectory.states:
            assert pp.value(spec, s) <= level.C + slack


class TestOvalRoots:
    @pytest.fixture
    def spec(self):
        return pp.LyapunovSpec(pp.COEXISTENCE, gamma=2.0, sigma=1.0, beta=3.0, a=1.0)

    def test_exact_upper_root(self, spec):
        y_low, y_high = pp.oval_y_roots(spec, 0.5, 3.0 + math.log(3.0))
        assert abs(y_high - 2.0 / 3.0) < 1e-11

    def test_lower_root_oracle(self, spec):
        y_low, _ = pp.oval_y_roots(spec, 0.5, 3.0 + math.log(3.0))
        rhs = 2.0 + math.log(1.5)
        expected = bisect_oracle(lambda y: 3 * y - math.log(y) - rhs, 1e-9, 1 / 3)
        assert abs(y_low - expected) < 1e-10
        assert abs(y_low - OVAL_Y_LOW) < 1e-10

    def test_roots_straddle_minimum(self, spec):
        y_low, y_high = pp.oval_y_roots(spec, 0.5, 3.0 + math.log(3.0))
        assert y_low <= spec.a / spec.beta <= y_high

    def test_tangency_double_root(self, spec):
        # level exactly at the y-section minimum
        x = 0.5
        r_min = spec.a * (1.0 - math.log(spec.a / spec.beta))
        C = r_min + (spec.gamma * x - spec.sigma * math.log(x))
        y_low, y_high = pp.oval_y_roots(spec, x, C)
        assert y_low == y_high == spec.a / spec.beta

    def test_below_minimum_raises(self, spec):
        with pytest.raises(pp.BelowMinimum):
            pp.oval_y_roots(spec, 0.5, 0.0)

    def test_requires_coexistence(self):
        espec = pp.LyapunovSpec(pp.EXTINCTION, gamma=1, beta=1, sigma=1, b=1)
        with pytest.raises(ValueError):
            pp.oval_y_roots(espec, 1.0, 5.0)


class TestPeakBound:
    def test_exact_two_thirds(self, exact_peak_params):
        p = pp.virus_to_damped(exact_peak_params)
        rep = pp.peak_bound(p)
        assert abs(rep.y_bar - 2.0 / 3.0) < 1e-10
        assert rep.equation_residual <= 1e-10
        assert rep.tangency_point == (1.0, 1.0 / 3.0)

    def test_r_form_equivalence(self, exact_peak_params):
        # solve the R-form independently and compare to the V-form root
        p = pp.virus_to_damped(exact_peak_params)
        rep = pp.peak_bound(p)
        R = pp.reproductive_ratio(p)
        ab = (p.alpha / p.beta) * (R - 1.0)
        rhs = (p.sigma / p.beta) * (R - 1.0 - math.log(R)) + ab * (
            1.0 - math.log(ab)
        )
        root = bisect_oracle(lambda y: y - ab * math.log(y) - rhs, ab, 100.0)
        assert abs(rep.y_bar - root) < 1e-10

    def test_r3_params(self, r3_params):
        rep = pp.peak_bound(r3_params)
        assert rep.equation_residual <= 1e-10
        assert rep.y_bar > 1.0  # a/beta = 1
        assert abs(rep.y_bar - PEAK_R3) < 1e-10

    def test_not_coexistence(self, ext_params):
        with pytest.raises(pp.NotCoexistence):
            pp.peak_bound(ext_params)

    def test_peak_soundness_small_sample(self, r3_params):
        # trajectories started inside the tangent oval never exceed y_bar
        rep = pp.peak_bound(r3_params)
        spec = pp.make_spec(r3_params)
        field = pp.damped_pp_field(r3_params)
        rng = np.random.default_rng(31)
        done = 0
        while done < 5:
            x0 = rng.uniform(0.05, 1.0) * r3_params.delta / r3_params.alpha
            try:
                ylo, yhi = pp.oval_y_roots(spec, x0, rep.C)
            except pp.BelowMinimum:
                continue
            y0 = rng.uniform(ylo, yhi)
            traj = pp.integrate(field, (x0, y0), (0.0, 60.0))
            y_max = max(s[1] for s in traj.states)
            assert y_max <= rep.y_bar * (1.0 + 1e-6)
            done += 1


class TestPeakBoundLimit:
    def test_unit_parameters(self):
        p = pp.VirusParams(delta=1, alpha=1, gamma=2, q=1, sigma=1)
        root = pp.peak_bound_limit(p)
        assert abs(root - LIMIT_ROOT_111) < 1e-10
        oracle = bisect_oracle(lambda y: y - math.log(y) - 2.0, 1.0, 10.0)
        assert abs(root - oracle) < 1e-10

    def test_delta_equals_sigma_simplification(self):
        # with delta = sigma the constant is delta/alpha + delta/sigma exactly
        p = pp.VirusParams(delta=2.0, alpha=0.5, gamma=1, q=0, sigma=2.0)
        root = pp.peak_bound_limit(p)
        rhs = 2.0 / 0.5 + 1.0  # ln(delta/sigma) = 0
        assert abs((root - 1.0 * math.log(root)) - rhs) < 1e-10

    def test_monotone_approach(self):
        limit = pp.peak_bound_limit(pp.VirusParams(delta=1, alpha=1, gamma=1, q=1, sigma=1))
        peaks = []
        for gam in (1e2, 1e3, 1e4):
            vp = pp.VirusParams(delta=1, alpha=1, gamma=gam, q=1, sigma=1)
            peaks.append(pp.peak_bound(pp.virus_to_damped(vp)).y_bar)
        assert peaks[0] < peaks[1] < peaks[2] < limit
        assert abs(peaks[2] - limit) / limit < 0.01

    def test_degenerate_delta(self):
        with pytest.raises(pp.DegenerateModel):
            pp.peak_bound_limit(pp.VirusParams(delta=0, alpha=1, gamma=1, q=0, sigma=1))


class TestPlantShift:
    def test_unit(self):
        p = pp.PlantParams(v=1, gamma=1, sigma=1, threshold=pp.ThresholdSpec(y_f=1))
        assert pp.plant_min_m(p) == pytest.approx(1.0 + 1e-6, rel=1e-12)

    def test_at_e(self):
        p = pp.PlantParams(v=math.e, gamma=1, sigma=1, threshold=pp.ThresholdSpec(y_f=1))
        assert pp.plant_min_m(p) == pytest.approx(1e-6, abs=1e-18)

    def test_half(self):
        p = pp.PlantParams(v=1, gamma=1, sigma=2, threshold=pp.ThresholdSpec(y_f=1))
        expected = 0.5 * (1.0 + math.log(2.0)) + 1e-6
        assert pp.plant_min_m(p) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("v,sigma", [(1, 1), (math.e, 1), (1, 2), (10, 1), (7, 0.5)])
    def test_shift_postcondition(self, v, sigma):
        # with the returned m the certificate factor stays >= margin
        p = pp.PlantParams(v=v, gamma=1, sigma=sigma, threshold=pp.ThresholdSpec(y_f=1))
        m = pp.plant_min_m(p)
        ys = np.concatenate([np.geomspace(1e-6, 100.0, 2000), [v / sigma]])
        g = ys - (v / sigma) * np.log(ys) + m
        fp_slack = 1e-13 * max(1.0, (v / sigma) * 40.0)  # cancellation at the minimum
        assert g.min() >= 1e-6 - fp_slack

    def test_required_m_gate(self):
        assert pp.plant_required_m(1.0, 2.0) == 0.0
        assert pp.plant_required_m(2.0, 1.0) == pytest.approx(2 * (1 - math.log(2)))
        assert pp.plant_required_m(10.0, 1.0) == pytest.approx(10 * (math.log(10) - 1))
        with pytest.raises(ValueError):
            pp.LyapunovSpec(pp.PLANT, gamma=1, sigma=1, v=10.0, m=0.0)
