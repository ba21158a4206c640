"""Integrator tests: exactness, order, determinism, blow-up handling."""

import numpy as np
import pytest

from toruslab.grid import SpectralField, TorusGrid, apply_multiplier
from toruslab.models import ModelParams, quartic_bump, weak_form_residual
from toruslab.models import TestFunction as WeakTest
from toruslab.operators import sqg
from toruslab.stepping import (
    StepperConfig,
    Trajectory,
    cfl_dt,
    linear_propagator,
    run,
    transport_speed,
)


def cosine_field(grid, c=0.0, a=1.0, k=1):
    x = grid.axes()[0]
    return SpectralField.from_phys(grid, c + a * np.cos(k * x))


class TestStepperConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError, match="scheme"):
            StepperConfig(t_end=1.0, dt=0.1, scheme="euler")
        with pytest.raises(ValueError, match="t_end"):
            StepperConfig(t_end=-1.0, dt=0.1)
        with pytest.raises(ValueError, match="dt"):
            StepperConfig(t_end=1.0, dt=0.0)
        with pytest.raises(ValueError, match="cfl_safety"):
            StepperConfig(t_end=1.0, dt=0.1, cfl_safety=1.5)
        with pytest.raises(ValueError, match="snapshot_stride"):
            StepperConfig(t_end=1.0, dt=0.1, snapshot_stride=0)


class TestLinearPropagator:
    def test_values(self):
        grid = TorusGrid((16,))
        params = ModelParams(equation="1d", nu=1.0, gamma=1.5)
        sigma = linear_propagator(params, 0.1)(*grid.wavevectors())
        assert abs(sigma[1] - np.exp(-0.1 * 1.0)) <= 1e-15
        assert abs(sigma[0] - 1.0) <= 1e-15
        assert abs(sigma[2] - np.exp(-0.1 * 2.0**1.5)) <= 1e-15

    def test_identity_without_damping(self):
        grid = TorusGrid((16,))
        params = ModelParams(equation="1d", delta=1.0)
        sigma = linear_propagator(params, 0.5)(*grid.wavevectors())
        assert np.all(sigma == 1.0)

    def test_usable_as_multiplier(self):
        grid = TorusGrid((32,))
        params = ModelParams(equation="1d", nu=1.0, gamma=2.0)
        theta = cosine_field(grid)
        out = apply_multiplier(theta, linear_propagator(params, 1.0))
        assert np.max(np.abs(out.phys - np.exp(-1.0) * np.cos(grid.axes()[0]))) <= 1e-14

    def test_rejects_nonpositive_dt(self):
        params = ModelParams(equation="1d", nu=1.0, gamma=1.0)
        with pytest.raises(ValueError, match="dt"):
            linear_propagator(params, 0.0)


class TestCfl:
    def test_quiescent_state_uses_accuracy_cap(self):
        grid = TorusGrid((64,))
        theta = SpectralField.from_phys(grid, np.zeros(grid.sizes))
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=1.0, dt=0.05, adaptive=True)
        assert cfl_dt(theta, params, cfg) == 0.05

    def test_unit_speed_formula(self):
        grid = TorusGrid((256,))
        theta = cosine_field(grid)
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=1.0, dt=1.0, adaptive=True, cfl_safety=0.5)
        # H cos = sin has unit sup norm
        expected = 0.5 * (2.0 * np.pi / 256.0)
        assert abs(cfl_dt(theta, params, cfg) - expected) <= 1e-12

    def test_doubling_resolution_halves_dt(self):
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=1.0, dt=1.0, adaptive=True)
        vals = []
        for n in (128, 256):
            grid = TorusGrid((n,))
            vals.append(cfl_dt(cosine_field(grid), params, cfg))
        assert abs(vals[0] - 2.0 * vals[1]) <= 1e-12

    def test_speed_includes_velocity_and_riesz_2d(self):
        grid = TorusGrid((32, 32))
        xx = grid.meshgrid()
        theta = SpectralField.from_phys(grid, np.cos(xx[0]))
        fam = sqg()
        adv = ModelParams(equation="nd", delta=0.0, velocity_family=fam)
        # sqg velocity of cos x1 is (0, sin x1): unit speed
        assert abs(transport_speed(theta, adv) - 1.0) <= 1e-12
        flux = ModelParams(equation="nd", delta=1.0, velocity_family=fam)
        # R1 cos x1 = sin x1: unit speed again
        assert abs(transport_speed(theta, flux) - 1.0) <= 1e-12


class TestRun:
    def test_exact_linear_decay(self):
        grid = TorusGrid((64,))
        theta0 = cosine_field(grid)
        params = ModelParams(equation="1d", nu=1.0, gamma=1.5, linear_only=True)
        cfg = StepperConfig(t_end=1.0, dt=0.01)
        traj = run(theta0, params, cfg)
        assert traj.termination == "completed"
        assert abs(traj.times[-1] - 1.0) <= 1e-12
        expected = np.exp(-1.0) * np.cos(grid.axes()[0])
        assert np.max(np.abs(traj.snapshots[-1].phys - expected)) <= 1e-12

    def test_constant_is_steady(self):
        grid = TorusGrid((64,))
        theta0 = SpectralField.from_phys(grid, np.full(grid.sizes, 1.7))
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=0.5, dt=0.01)
        traj = run(theta0, params, cfg)
        assert np.max(np.abs(traj.snapshots[-1].phys - 1.7)) <= 1e-13

    def test_rk4_order_on_nonlinear_problem(self):
        grid = TorusGrid((64,))
        theta0 = cosine_field(grid, c=1.0, a=0.5)
        params = ModelParams(equation="1d", delta=1.0, epsilon=1e-3)
        t_end = 0.25
        ref = run(theta0, params, StepperConfig(t_end=t_end, dt=6.25e-5))
        errs = []
        for dt in (8e-3, 4e-3, 2e-3):
            traj = run(theta0, params, StepperConfig(t_end=t_end, dt=dt))
            errs.append(
                np.max(np.abs(traj.snapshots[-1].phys - ref.snapshots[-1].phys))
            )
        orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 3.5

    def test_bitwise_determinism(self):
        grid = TorusGrid((64,))
        theta0 = cosine_field(grid, c=1.0, a=0.5)
        params = ModelParams(equation="1d", delta=0.5, nu=1.0, gamma=1.0)
        cfg = StepperConfig(t_end=0.2, dt=1e-3, snapshot_stride=50)
        a = run(theta0, params, cfg)
        b = run(theta0, params, cfg)
        assert a.snapshots[-1].coeffs.tobytes() == b.snapshots[-1].coeffs.tobytes()

    def test_blow_up_is_structured(self):
        grid = TorusGrid((64,))
        theta0 = cosine_field(grid, c=1e13, a=5e12)
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=1.0, dt=0.1)
        traj = run(theta0, params, cfg)
        assert traj.termination == "blow_up"
        assert traj.blow_up_time is not None and traj.blow_up_time <= 1.0
        assert traj.blow_up_norm is None or traj.blow_up_norm > 1e12

    def test_snapshot_cadence(self):
        grid = TorusGrid((32,))
        theta0 = cosine_field(grid, c=2.0, a=0.1)
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=0.1, dt=1e-3, snapshot_stride=10)
        traj = run(theta0, params, cfg)
        assert len(traj.times) == 11
        assert traj.times[0] == 0.0
        assert np.all(np.diff(traj.times) > 0)
        assert abs(traj.times[-1] - 0.1) <= 1e-12
        assert traj.step_count == 100

    def test_final_time_sampled_even_off_stride(self):
        grid = TorusGrid((32,))
        theta0 = cosine_field(grid, c=2.0, a=0.1)
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=0.105, dt=1e-3, snapshot_stride=10)
        traj = run(theta0, params, cfg)
        assert abs(traj.times[-1] - 0.105) <= 1e-12

    def test_rejects_3d_evolution(self):
        grid = TorusGrid((8, 8, 8))
        theta0 = SpectralField.from_phys(grid, np.ones(grid.sizes))
        from toruslab.operators import custom

        def symbol(kvecs):
            zero = np.zeros_like(kvecs[0], dtype=complex)
            return (zero, zero, zero)

        fam = custom(symbol, n_dim=3, smoothing_order=0.0)
        params = ModelParams(equation="nd", velocity_family=fam, delta=0.0)
        cfg = StepperConfig(t_end=0.1, dt=0.01)
        with pytest.raises(ValueError, match="3D"):
            run(theta0, params, cfg)

    def test_max_steps_guard(self):
        grid = TorusGrid((32,))
        theta0 = cosine_field(grid)
        params = ModelParams(equation="1d", nu=1.0, gamma=1.0, linear_only=True)
        cfg = StepperConfig(t_end=1.0, dt=1e-3, max_steps=10)
        with pytest.raises(RuntimeError, match="max_steps"):
            run(theta0, params, cfg)

    def test_nonnegativity_gate(self):
        grid = TorusGrid((32,))
        theta0 = cosine_field(grid)  # dips to -1
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=0.1, dt=0.01)
        with pytest.raises(ValueError, match="nonnegative"):
            run(theta0, params, cfg, require_nonneg=True)
        with pytest.raises(ValueError, match="above"):
            run(cosine_field(grid, c=1.0, a=0.8), params, cfg, m0_floor=0.5)

    def test_observers_see_every_sample(self):
        grid = TorusGrid((32,))
        theta0 = cosine_field(grid, c=2.0, a=0.1)
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=0.05, dt=1e-3, snapshot_stride=5)
        seen = []
        traj = run(theta0, params, cfg, observers=[lambda t, f: seen.append(t)])
        assert seen == list(traj.times)

    def test_adaptive_dt_respects_cap_and_cfl(self):
        grid = TorusGrid((128,))
        theta0 = cosine_field(grid, c=1.0, a=0.5)
        params = ModelParams(equation="1d", delta=1.0)
        cfg = StepperConfig(t_end=0.05, dt=1.0, adaptive=True, cfl_safety=0.4)
        traj = run(theta0, params, cfg)
        assert traj.termination == "completed"
        # speed ~ |H theta| <= 0.5 initially, so dt should sit near
        # 0.4 * dx / 0.5 and never exceed the cap
        assert traj.dt_max <= 1.0
        assert traj.dt_min > 0.0

    def test_weak_residual_small_on_resolved_2d_run(self):
        grid = TorusGrid((32, 32))
        xx = grid.meshgrid()
        theta0 = SpectralField.from_phys(
            grid, 1.0 + 0.3 * np.cos(xx[0]) * np.cos(xx[1])
        )
        params = ModelParams(
            equation="nd", delta=0.0, nu=1.0, gamma=1.0, velocity_family=sqg()
        )
        t_end = 0.25
        cfg = StepperConfig(t_end=t_end, dt=1.25e-3, snapshot_stride=2)
        traj = run(theta0, params, cfg)
        eta, eta_p = quartic_bump(t_end)
        tests = [
            WeakTest(
                phi=SpectralField.from_phys(grid, np.cos(xx[0])),
                eta=eta,
                eta_prime=eta_p,
            ),
            WeakTest(
                phi=SpectralField.from_phys(grid, np.sin(xx[0] + xx[1])),
                eta=eta,
                eta_prime=eta_p,
            ),
        ]
        for res in weak_form_residual(traj, params, tests):
            assert res <= 1e-7
