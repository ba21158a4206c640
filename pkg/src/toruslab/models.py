"""Right-hand sides of the regularized transport models and weak-form residuals.

Two equation families share one parameter record.  The one dimensional
family couples the scalar to its Hilbert transform,

    theta_t + (1 - delta) (H theta) theta_x + delta (theta H theta)_x
            + nu Lambda^gamma theta = epsilon theta_xx,

with delta in [0, 1] blending the advective and divergence forms.  The
n dimensional family transports the scalar by a divergence-free velocity
derived from the scalar itself, plus a Riesz-vector flux term,

    theta_t + (1 - delta) u . grad theta + delta div(theta R theta)
            + nu Lambda^gamma theta = epsilon Laplacian theta,

where u = velocity(family, theta) and R theta = (R_1 theta, ..., R_n theta).

rhs() returns the time derivative (everything moved to the right-hand
side).  Nonlinear products are formed pointwise in physical space and
dealiased once; the linear terms are exact diagonal multipliers.

weak_form_residual() measures how well a stored trajectory satisfies the
distributional form of the equation against separable test functions
psi(x, t) = phi(x) eta(t) with eta vanishing at the final time:

    integral_0^T integral [ theta psi_t
                            - (1-delta) (H theta) theta_x psi
                            + delta theta (H theta) psi_x
                            - nu theta Lambda^gamma psi
                            + epsilon theta psi_xx ] dx dt
    + integral theta_0 psi(x, 0) dx   =   0

in one dimension, and the analogous statement with the transport terms
integrated by parts once (theta u . grad psi, theta R theta . grad psi)
in n dimensions.  Space integrals use the exact uniform-grid rule, time
integrals the trapezoid rule on the snapshot times, so the reported
defect decays with both the stepper error and the snapshot spacing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .grid import (
    SpectralField,
    _dealias_mask,
    _derivative_symbol,
    derivative,
    forward_dft,
    inverse_dft,
)
from .operators import (
    VelocityFamily,
    _frac_lap_symbol,
    frac_lap,
    hilbert,
    riesz,
    velocity,
)

EQUATIONS = ("1d", "nd")


class BlowUpSignal(ArithmeticError):
    """Non-finite values appeared while assembling the time derivative.

    Raised instead of letting inf/nan propagate so the stepper can record
    a structured termination rather than crash mid-run.
    """

    def __init__(self, what: str):
        super().__init__(f"non-finite values in {what}")
        self.what = what


@dataclass(frozen=True)
class ModelParams:
    """Equation selection and coefficients.

    equation: "1d" (Hilbert-transform coupling) or "nd" (velocity family).
    nu, gamma: dissipation nu * Lambda^gamma, both >= 0.
    delta: weight in [0, 1] between advective and divergence forms.
    epsilon: regularizing viscosity epsilon * Laplacian, >= 0.
    velocity_family: required for "nd", forbidden for "1d".
    linear_only: drop the nonlinearity (exact-propagator test mode).
    """

    equation: str
    nu: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    epsilon: float = 0.0
    velocity_family: Optional[VelocityFamily] = None
    linear_only: bool = False

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ValueError(f"equation must be one of {EQUATIONS}, got {self.equation!r}")
        for name in ("nu", "gamma", "epsilon"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {val}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.equation == "nd" and self.velocity_family is None:
            raise ValueError("nd equation needs a velocity_family")
        if self.equation == "1d" and self.velocity_family is not None:
            raise ValueError("1d equation does not take a velocity_family")


def _check_model_grid(grid, params: ModelParams):
    if params.equation == "1d" and grid.n_dim != 1:
        raise ValueError("1d equation needs a one dimensional grid")
    if params.equation == "nd":
        if grid.n_dim == 1:
            raise ValueError("nd equation needs a two or three dimensional grid")
        fam = params.velocity_family
        if fam.n_dim != grid.n_dim:
            raise ValueError(
                f"velocity family {fam.name} is {fam.n_dim}D, grid is {grid.n_dim}D"
            )


def linear_symbol(grid, params: ModelParams) -> np.ndarray:
    """Diagonal damping rate nu |k|^gamma + epsilon |k|^2 (real, >= 0)."""
    sym = np.zeros(grid.sizes)
    if params.nu > 0.0:
        sym = sym + params.nu * _frac_lap_symbol(grid.sizes, params.gamma)
    if params.epsilon > 0.0:
        sym = sym + params.epsilon * _frac_lap_symbol(grid.sizes, 2.0)
    return sym


def _product_coeffs(grid, a_phys: np.ndarray, b_phys: np.ndarray) -> np.ndarray:
    """Coefficients of the pointwise product, truncated by the 2/3 rule.

    Works on raw sample arrays so an overflowing product surfaces as a
    BlowUpSignal instead of a validation error from the field constructor.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        prod = a_phys * b_phys
    if not np.isfinite(prod).all():
        raise BlowUpSignal("pointwise product")
    return np.where(_dealias_mask(grid.sizes), forward_dft(grid, prod), 0.0)


def nonlinear_rhs_coeffs(theta: SpectralField, params: ModelParams) -> np.ndarray:
    """Coefficients of the nonlinear part of rhs (zero when linear_only)."""
    grid = theta.grid
    out = np.zeros(grid.sizes, dtype=np.complex128)
    if params.linear_only:
        return out
    delta = params.delta
    if params.equation == "1d":
        h_phys = hilbert(theta).phys
        if delta < 1.0:
            tx = derivative(theta, 0).phys
            out -= (1.0 - delta) * _product_coeffs(grid, h_phys, tx)
        if delta > 0.0:
            flux = _product_coeffs(grid, theta.phys, h_phys)
            out -= delta * _derivative_symbol(grid.sizes, 0) * flux
    else:
        if delta < 1.0:
            u = velocity(params.velocity_family, theta)
            for axis in range(grid.n_dim):
                tx = derivative(theta, axis).phys
                out -= (1.0 - delta) * _product_coeffs(grid, u[axis].phys, tx)
        if delta > 0.0:
            for axis in range(grid.n_dim):
                flux = _product_coeffs(grid, theta.phys, riesz(theta, axis).phys)
                out -= delta * _derivative_symbol(grid.sizes, axis) * flux
    if not np.isfinite(out).all():
        raise BlowUpSignal("nonlinear terms")
    return out


def rhs(theta: SpectralField, params: ModelParams) -> SpectralField:
    """Time derivative of theta under the selected model."""
    grid = theta.grid
    _check_model_grid(grid, params)
    coeffs = theta.coeffs
    if not np.isfinite(coeffs).all():
        raise BlowUpSignal("state")
    out = -linear_symbol(grid, params) * coeffs
    out += nonlinear_rhs_coeffs(theta, params)
    if not np.isfinite(out).all():
        raise BlowUpSignal("time derivative")
    return SpectralField.from_coeffs(grid, out)


def rhs_hilbert_lambda_form(theta: SpectralField, params: ModelParams) -> SpectralField:
    """1D time derivative assembled as -(H theta) theta_x - delta theta Lambda theta - ...

    Algebraically identical to rhs() for the 1d equation because
    (theta H theta)_x = (H theta) theta_x + theta Lambda theta; evaluating
    both ways and comparing guards the sign conventions of the operator
    layer.  Not used by the stepper.
    """
    grid = theta.grid
    if grid.n_dim != 1 or params.equation != "1d":
        raise ValueError("cross-check form is one dimensional")
    coeffs = theta.coeffs
    if not np.isfinite(coeffs).all():
        raise BlowUpSignal("state")
    out = -linear_symbol(grid, params) * coeffs
    if not params.linear_only:
        out -= _product_coeffs(grid, hilbert(theta).phys, derivative(theta, 0).phys)
        if params.delta > 0.0:
            zero_order = _product_coeffs(grid, theta.phys, frac_lap(theta, 1.0).phys)
            out -= params.delta * zero_order
    if not np.isfinite(out).all():
        raise BlowUpSignal("time derivative")
    return SpectralField.from_coeffs(grid, out)


@dataclass(frozen=True)
class TestFunction:
    """Separable space-time test function psi(x, t) = phi(x) eta(t).

    eta and eta_prime are plain callables of time; eta must vanish at the
    trajectory's final time (support inside [0, T)).
    """

    phi: SpectralField
    eta: Callable[[float], float]
    eta_prime: Callable[[float], float]
    label: str = ""


def quartic_bump(t_end: float) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """eta(t) = (t/T)^4 (1 - t/T)^4 and its derivative.

    Vanishes to fourth order at both endpoints, so trapezoid quadrature of
    the weak form converges at fourth order in the sample spacing.
    """

    def eta(t: float) -> float:
        s = t / t_end
        return (s * (1.0 - s)) ** 4

    def eta_prime(t: float) -> float:
        s = t / t_end
        return 4.0 * (s * (1.0 - s)) ** 3 * (1.0 - 2.0 * s) / t_end

    return eta, eta_prime


def weak_form_residual(traj, params: ModelParams, tests: Sequence[TestFunction]) -> list:
    """Absolute defect of the distributional form, one value per test function.

    traj needs .times (increasing, starting at 0) and .snapshots (fields).
    The snapshot at t = 0 supplies the initial-data term.
    """
    times = np.asarray(traj.times, dtype=np.float64)
    snapshots = traj.snapshots
    if len(times) != len(snapshots):
        raise ValueError("times and snapshots disagree in length")
    if len(times) < 3:
        raise ValueError("need at least 3 snapshots for the time quadrature")
    grid = snapshots[0].grid
    _check_model_grid(grid, params)
    vol = grid.cell_volume
    delta = params.delta

    residuals = []
    for tf in tests:
        if tf.phi.grid != grid:
            raise ValueError("test function lives on a different grid")
        if abs(tf.eta(times[-1])) > 1e-10:
            raise ValueError("eta must vanish at the final snapshot time")
        phi = tf.phi.phys
        if params.equation == "1d":
            dphi = (derivative(tf.phi, 0).phys,)
        else:
            dphi = tuple(derivative(tf.phi, axis).phys for axis in range(grid.n_dim))
        lam_phi = frac_lap(tf.phi, params.gamma).phys if params.nu > 0.0 else None
        lap_phi = -frac_lap(tf.phi, 2.0).phys if params.epsilon > 0.0 else None

        mass_term = np.empty(len(times))
        space_term = np.empty(len(times))
        for j, snap in enumerate(snapshots):
            th = snap.phys
            mass_term[j] = vol * float(np.sum(th * phi))
            acc = 0.0
            if not params.linear_only:
                if params.equation == "1d":
                    h = hilbert(snap).phys
                    if delta < 1.0:
                        tx = derivative(snap, 0).phys
                        acc -= (1.0 - delta) * vol * float(np.sum(h * tx * phi))
                    if delta > 0.0:
                        acc += delta * vol * float(np.sum(th * h * dphi[0]))
                else:
                    if delta < 1.0:
                        u = velocity(params.velocity_family, snap)
                        u_dot = sum(u[a].phys * dphi[a] for a in range(grid.n_dim))
                        acc += (1.0 - delta) * vol * float(np.sum(th * u_dot))
                    if delta > 0.0:
                        r_dot = sum(
                            riesz(snap, a).phys * dphi[a] for a in range(grid.n_dim)
                        )
                        acc += delta * vol * float(np.sum(th * r_dot))
            if lam_phi is not None:
                acc -= params.nu * vol * float(np.sum(th * lam_phi))
            if lap_phi is not None:
                acc += params.epsilon * vol * float(np.sum(th * lap_phi))
            space_term[j] = acc

        eta = np.array([tf.eta(t) for t in times])
        eta_p = np.array([tf.eta_prime(t) for t in times])
        total = np.trapezoid(mass_term * eta_p + space_term * eta, times)
        total += mass_term[0] * eta[0]
        residuals.append(abs(float(total)))
    return residuals


def rhs_realness_defect(theta: SpectralField, params: ModelParams) -> float:
    """Largest imaginary part of the assembled time derivative (diagnostic)."""
    out = rhs(theta, params)
    return float(np.max(np.abs(inverse_dft(out.grid, out.coeffs).imag)))
