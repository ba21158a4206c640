"""Time integration with the stiff diagonal part treated exactly.

The damping nu |k|^gamma + epsilon |k|^2 is diagonal in coefficients, so
an integrating-factor classical Runge-Kutta scheme advances

    d/dt theta_hat(k) = -L(k) theta_hat(k) + N(theta)_hat(k)

by transforming to w = exp(L t) theta_hat, stepping w with RK4, and
transforming back.  The exponential is applied exactly, which removes the
stiffness of the linear part for every gamma; with linear_only the update
reduces to the exact propagator and the only error is roundoff.

Runs are deterministic: identical inputs produce bitwise-identical
trajectories on one platform.  Blow-up is a structured outcome, not an
exception: when the state leaves the trusted range the trajectory is
returned with termination "blow_up" and the time and norm recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import SpectralField, TorusGrid
from .models import (
    BlowUpSignal,
    ModelParams,
    _check_model_grid,
    linear_symbol,
    nonlinear_rhs_coeffs,
)
from .operators import hilbert, riesz, velocity

SCHEMES = ("if_rk4",)

# coefficient magnitude beyond which a run is declared lost
BLOW_UP_NORM = 1e12

# advection speed floor so quiescent states fall back to the accuracy cap
SPEED_FLOOR = 1e-8


@dataclass(frozen=True)
class StepperConfig:
    """Step size policy and sampling cadence.

    dt is the accuracy cap; with adaptive=True each step shrinks it to the
    CFL bound computed from the current transport speeds.
    """

    t_end: float
    dt: float
    scheme: str = "if_rk4"
    adaptive: bool = False
    cfl_safety: float = 0.5
    snapshot_stride: int = 1
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not np.isfinite(self.t_end) or self.t_end <= 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not np.isfinite(self.dt) or self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be an integer >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class Trajectory:
    """Sampled history of one run.

    times[0] is always 0 and snapshots[0] the initial state; the final
    accepted state is always sampled.  records is filled by the
    diagnostics layer (one record per sample).
    """

    params: ModelParams
    times: np.ndarray
    snapshots: list
    records: list = field(default_factory=list)
    termination: str = "completed"
    blow_up_time: Optional[float] = None
    blow_up_norm: Optional[float] = None
    step_count: int = 0
    dt_min: Optional[float] = None
    dt_max: Optional[float] = None

    @property
    def grid(self) -> TorusGrid:
        return self.snapshots[0].grid


def linear_propagator(params: ModelParams, dt: float):
    """Multiplier exp(-(nu |k|^gamma + epsilon |k|^2) dt) of the wavevector meshes."""
    if dt <= 0.0 or not np.isfinite(dt):
        raise ValueError(f"dt must be positive, got {dt}")

    def sigma(*kvecs):
        ksq = sum(np.asarray(k, dtype=float) ** 2 for k in kvecs)
        rate = params.epsilon * ksq
        if params.nu != 0.0:
            if params.gamma == 0.0:
                rate = rate + params.nu
            else:
                rate = rate + params.nu * ksq ** (params.gamma / 2.0)
        return np.exp(-dt * rate)

    return sigma


def transport_speed(theta: SpectralField, params: ModelParams) -> float:
    """Largest pointwise advection speed of the model at this state."""
    if params.linear_only:
        return 0.0
    if params.equation == "1d":
        return float(np.max(np.abs(hilbert(theta).phys)))
    speed = 0.0
    if params.delta < 1.0:
        for comp in velocity(params.velocity_family, theta):
            speed = max(speed, float(np.max(np.abs(comp.phys))))
    if params.delta > 0.0:
        for axis in range(theta.grid.n_dim):
            speed = max(speed, float(np.max(np.abs(riesz(theta, axis).phys))))
    return speed


def cfl_dt(theta: SpectralField, params: ModelParams, cfg: StepperConfig) -> float:
    """cfl_safety * dx / max speed, never above the accuracy cap cfg.dt."""
    speed = max(transport_speed(theta, params), SPEED_FLOOR)
    dx = min(theta.grid.spacing)
    return min(cfg.cfl_safety * dx / speed, cfg.dt)


def _rk4_step(grid, state, params, dt, e_half, e_full):
    """One integrating-factor RK4 update of the coefficient array."""
    if params.linear_only:
        return e_full * state

    def nonlin(coeffs):
        # raw constructor: mid-stage arrays are validated by the blow-up
        # checks, not by the field classmethods
        return nonlinear_rhs_coeffs(SpectralField(grid, coeffs=coeffs), params)

    n1 = nonlin(state)
    u2 = e_half * (state + (0.5 * dt) * n1)
    n2 = nonlin(u2)
    u3 = e_half * state + (0.5 * dt) * n2
    n3 = nonlin(u3)
    u4 = e_full * state + dt * e_half * n3
    n4 = nonlin(u4)
    return e_full * state + (dt / 6.0) * (e_full * n1 + 2.0 * e_half * (n2 + n3) + n4)


def run(
    theta0: SpectralField,
    params: ModelParams,
    cfg: StepperConfig,
    observers=(),
    require_nonneg: bool = False,
    m0_floor: Optional[float] = None,
) -> Trajectory:
    """Advance theta0 to cfg.t_end, sampling every snapshot_stride steps."""
    grid = theta0.grid
    _check_model_grid(grid, params)
    if grid.n_dim == 3:
        raise ValueError("3D evolution is not supported (operator algebra only)")
    initial_min = float(np.min(theta0.phys))
    if require_nonneg and initial_min < -1e-13:
        raise ValueError(f"initial data must be nonnegative, min is {initial_min}")
    if m0_floor is not None and initial_min < m0_floor - 1e-13:
        raise ValueError(
            f"initial data must stay above {m0_floor}, min is {initial_min}"
        )

    tiny = 1e-12 * max(1.0, cfg.t_end)
    state = theta0.coeffs.copy()
    times = [0.0]
    snapshots = [SpectralField.from_coeffs(grid, state)]
    for obs in observers:
        obs(0.0, snapshots[0])

    traj = Trajectory(params=params, times=None, snapshots=snapshots)
    t = 0.0
    step = 0
    dt_seen = []
    cached_dt = None
    e_half = e_full = None

    while True:
        remaining = cfg.t_end - t
        if remaining <= tiny:
            break
        if step >= cfg.max_steps:
            raise RuntimeError(f"exceeded max_steps={cfg.max_steps} before t_end")
        if cfg.adaptive:
            dt_i = cfl_dt(SpectralField(grid, coeffs=state), params, cfg)
        else:
            dt_i = cfg.dt
        dt_i = min(dt_i, remaining)
        if dt_i != cached_dt:
            cached_dt = dt_i
            lam = linear_symbol(grid, params)
            e_half = np.exp(-0.5 * dt_i * lam)
            e_full = e_half * e_half
        try:
            state = _rk4_step(grid, state, params, dt_i, e_half, e_full)
        except BlowUpSignal:
            traj.termination = "blow_up"
            traj.blow_up_time = t
            traj.blow_up_norm = float("inf")
            break
        amp = float(np.max(np.abs(state)))
        t += dt_i
        step += 1
        dt_seen.append(dt_i)
        if not np.isfinite(amp) or amp > BLOW_UP_NORM:
            traj.termination = "blow_up"
            traj.blow_up_time = t
            traj.blow_up_norm = amp
            break
        if step % cfg.snapshot_stride == 0 or cfg.t_end - t <= tiny:
            snap = SpectralField.from_coeffs(grid, state)
            times.append(t)
            snapshots.append(snap)
            for obs in observers:
                obs(t, snap)

    traj.times = np.asarray(times)
    traj.step_count = step
    if dt_seen:
        traj.dt_min = min(dt_seen)
        traj.dt_max = max(dt_seen)
    return traj
