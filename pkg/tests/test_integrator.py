"""Integrator correctness: RK4 order, adaptive control, burn-in, sampling."""

import math

import numpy as np
import pytest

from hpa_dynamics import (HormoneState, IntegrationConfig, IntegrationError,
                          ParameterSet, SamplingError, default_initial_state,
                          integrate, sample, step_rk4, steady_state_open_loop)
from hpa_dynamics.integrator import _rk4_step

DECAY = ParameterSet(k1=0, k2=0, k3=0, k4=0, k5=0)


class TestStepRk4:
    def test_stability_polynomial_on_linear_decay(self):
        # one RK4 step of exp decay reproduces the degree-4 Taylor polynomial
        s = step_rk4(0.0, HormoneState(1.0, 1.0, 1.0), 10.0, DECAY)
        z = -0.1732 * 10.0
        poly = 1.0 + z + z**2 / 2 + z**3 / 6 + z**4 / 24
        assert s.R == pytest.approx(poly, abs=1e-12)
        assert poly == pytest.approx(0.276919, abs=1e-6)

    def test_multi_step_decay_accuracy(self):
        s = HormoneState(1.0, 1.0, 1.0)
        for i in range(20):
            s = step_rk4(i * 0.5, s, 0.5, DECAY)
        assert s.R == pytest.approx(math.exp(-1.732), abs=1e-3)
        assert s.A == pytest.approx(math.exp(-0.315), abs=1e-3)
        assert s.C == pytest.approx(math.exp(-0.105), abs=1e-3)

    def test_local_error_shrinks_fifth_order(self, params, burned_state):
        # |one dt step - two dt/2 steps| is a local O(dt^5) quantity,
        # so halving dt shrinks it by about 32x
        def gap(dt):
            y = burned_state.as_tuple()
            full = _rk4_step(0.0, y, dt, params, None)
            h1 = _rk4_step(0.0, y, dt / 2, params, None)
            h2 = _rk4_step(dt / 2, h1, dt / 2, params, None)
            return max(abs(a - b) for a, b in zip(full, h2))

        r1 = gap(8.0) / gap(4.0)
        r2 = gap(4.0) / gap(2.0)
        assert 24.0 < r1 < 40.0
        assert 24.0 < r2 < 40.0

    def test_fixed_point_invariance(self, params):
        p = params.feedback_free()
        s = steady_state_open_loop(p, 0.5)
        cfg = IntegrationConfig(t0=0, t_end=1440, mode="fixed", dt=1.0,
                                burn_in=0, initial_state=s, daylight_const=0.5)
        traj = integrate(cfg, p)
        assert np.max(np.abs(traj.states - np.array(s.as_tuple()))) <= 1e-12

    def test_bad_dt_rejected(self, params):
        with pytest.raises(IntegrationError):
            step_rk4(0.0, HormoneState(1, 1, 1), 0.0, params)


class TestGlobalConvergence:
    def test_rk4_order_on_reference_system(self, params, burned_state):
        ref_cfg = IntegrationConfig(t0=0, t_end=1440, burn_in=0,
                                    initial_state=burned_state,
                                    abs_tol=1e-12, rel_tol=1e-12,
                                    output_dt=1440.0)
        ref = integrate(ref_cfg, params).states[-1]
        errs = {}
        for dt in (4.0, 2.0, 1.0):
            cfg = IntegrationConfig(t0=0, t_end=1440, burn_in=0, mode="fixed",
                                    dt=dt, initial_state=burned_state)
            errs[dt] = np.max(np.abs(integrate(cfg, params).states[-1] - ref))
        order1 = math.log2(errs[4.0] / errs[2.0])
        order2 = math.log2(errs[2.0] / errs[1.0])
        assert 3.5 <= order1 <= 4.5
        assert 3.5 <= order2 <= 4.5

    def test_adaptive_matches_analytic_decay(self):
        s0 = HormoneState(1.0, 1.0, 1.0)
        cfg = IntegrationConfig(t0=0, t_end=100, burn_in=0, initial_state=s0,
                                abs_tol=1e-10, rel_tol=1e-10, output_dt=100.0)
        final = integrate(cfg, DECAY).states[-1]
        expected = [math.exp(-h * 100.0) for h in (0.1732, 0.0315, 0.0105)]
        assert np.max(np.abs(final - expected)) <= 1e-8

    def test_adaptive_vs_fixed_agreement(self, params, one_day_traj):
        cfg = IntegrationConfig(t0=0, t_end=1440, burn_in=14400,
                                mode="fixed", dt=0.1)
        fixed = integrate(cfg, params)
        on_grid = sample(fixed, one_day_traj.times)
        rel = np.max(np.abs(on_grid - one_day_traj.states) / np.abs(on_grid))
        assert rel <= 1e-4


class TestIntegrationConfig:
    def test_invalid_horizon(self):
        with pytest.raises(IntegrationError):
            IntegrationConfig(t0=10.0, t_end=0.0)

    def test_empty_horizon_gives_single_sample(self, params):
        traj = integrate(IntegrationConfig(t0=0, t_end=0, burn_in=0), params)
        assert len(traj.times) == 1
        assert traj.times[0] == 0.0
        assert traj.final_state() == default_initial_state(params, 0.0)

    def test_invalid_settings(self):
        with pytest.raises(IntegrationError):
            IntegrationConfig(dt=0.0)
        with pytest.raises(IntegrationError):
            IntegrationConfig(abs_tol=0.0)
        with pytest.raises(IntegrationError):
            IntegrationConfig(burn_in=-1.0)
        with pytest.raises(IntegrationError):
            IntegrationConfig(mode="euler")


class TestIntegrate:
    def test_default_output_grid(self, params):
        cfg = IntegrationConfig(t0=0, t_end=120, burn_in=0)
        traj = integrate(cfg, params)
        assert len(traj.times) == 121
        assert traj.times[0] == 0.0 and traj.times[-1] == 120.0
        assert traj.states.shape == (121, 3)

    def test_fixed_partial_final_step(self, params):
        cfg = IntegrationConfig(t0=0, t_end=10.3, burn_in=0, mode="fixed", dt=2.0)
        traj = integrate(cfg, params)
        assert traj.times[-1] == pytest.approx(10.3)
        assert traj.times[-2] == pytest.approx(10.0)

    def test_explicit_output_times(self, params):
        cfg = IntegrationConfig(t0=0, t_end=100, burn_in=0)
        traj = integrate(cfg, params, output_times=[0.0, 12.5, 99.0])
        assert list(traj.times) == [0.0, 12.5, 99.0]

    def test_output_times_outside_horizon_rejected(self, params):
        cfg = IntegrationConfig(t0=0, t_end=100, burn_in=0)
        with pytest.raises(IntegrationError):
            integrate(cfg, params, output_times=[0.0, 150.0])

    def test_burn_in_idempotent(self, params, one_day_traj):
        cfg = IntegrationConfig(t0=0, t_end=1440, burn_in=28800)
        doubled = integrate(cfg, params)
        rel = np.max(np.abs(doubled.states - one_day_traj.states)
                     / np.abs(one_day_traj.states))
        assert rel <= 1e-6

    def test_nonnegative_trajectory(self, two_day_traj):
        assert np.min(two_day_traj.states) >= -1e-12

    def test_custom_initial_state(self, params):
        s0 = HormoneState(0.1, 0.2, 0.3)
        cfg = IntegrationConfig(t0=0, t_end=0, burn_in=0, initial_state=s0)
        assert integrate(cfg, params).final_state() == s0


class TestSample:
    def test_exact_nodes_and_midpoints(self, params):
        cfg = IntegrationConfig(t0=0, t_end=10, burn_in=0)
        traj = integrate(cfg, params)
        got = sample(traj, [3.0])
        assert np.allclose(got[0], traj.states[3], atol=0)
        mid = sample(traj, [3.5])
        assert np.allclose(mid[0], 0.5 * (traj.states[3] + traj.states[4]),
                           atol=1e-15)

    def test_shape(self, one_day_traj):
        assert sample(one_day_traj, [0.0, 100.0, 720.0]).shape == (3, 3)

    def test_out_of_range_rejected(self, one_day_traj):
        with pytest.raises(SamplingError):
            sample(one_day_traj, [-5.0])
        with pytest.raises(SamplingError):
            sample(one_day_traj, [1441.0])
