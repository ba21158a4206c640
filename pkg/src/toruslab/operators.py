"""Nonlocal operators diagonal in Fourier space, and the velocity families
that close the transport equations.

All operators act on real fields through multiplier symbols on the integer
lattice.  Symbols are certified Hermitian once per (grid, parameter) pair and
cached, so repeated application inside time loops costs one array multiply
plus the transforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .grid import SpectralField, TorusGrid, _certify_hermitian, _k_abs, _nyquist_mask, _wavevectors

__all__ = [
    "hilbert",
    "frac_lap",
    "inv_frac_lap",
    "riesz",
    "LOG_SINE_MEAN_RESPONSE",
    "VelocityFamily",
    "sqg",
    "ipm",
    "ipm_singular",
    "stokes",
    "stokes_alpha",
    "euler_alpha",
    "mg",
    "custom",
    "family_from_name",
    "velocity_symbols",
    "velocity",
]

# Response of the periodic log-sine kernel to the constant 1: the inverse of
# |k| is completed at the zero mode by the kernel's own mean, 2 log 2.
LOG_SINE_MEAN_RESPONSE = 2.0 * np.log(2.0)


@lru_cache(maxsize=None)
def _hilbert_symbol(sizes: tuple[int, ...]) -> np.ndarray:
    k = _wavevectors(sizes)[0].astype(np.float64)
    sig = np.broadcast_to(-1j * np.sign(k), sizes)
    return _certify_hermitian(TorusGrid(sizes), sig)


@lru_cache(maxsize=None)
def _frac_lap_symbol(sizes: tuple[int, ...], gamma: float) -> np.ndarray:
    kabs = _k_abs(sizes)
    if gamma == 0.0:
        return np.ones(sizes)
    with np.errstate(divide="ignore"):
        sig = np.where(kabs > 0.0, kabs, 1.0) ** gamma
    sig[tuple([0] * len(sizes))] = 0.0
    return sig


@lru_cache(maxsize=None)
def _inv_frac_lap_symbol(sizes: tuple[int, ...]) -> np.ndarray:
    kabs = _k_abs(sizes)
    sig = 1.0 / np.where(kabs > 0.0, kabs, 1.0)
    sig[tuple([0] * len(sizes))] = LOG_SINE_MEAN_RESPONSE
    return sig


@lru_cache(maxsize=None)
def _riesz_symbol(sizes: tuple[int, ...], axis: int) -> np.ndarray:
    kj = np.broadcast_to(_wavevectors(sizes)[axis].astype(np.float64), sizes)
    kabs = _k_abs(sizes)
    sig = -1j * kj / np.where(kabs > 0.0, kabs, 1.0)
    return _certify_hermitian(TorusGrid(sizes), sig)


def hilbert(field: SpectralField) -> SpectralField:
    """Periodic Hilbert transform, symbol -i sign(k).  1d fields only.

    Maps cos(kx) to sin(kx) and sin(kx) to -cos(kx); annihilates the mean.
    """
    if field.grid.n_dim != 1:
        raise ValueError("Hilbert transform is defined for 1d fields")
    return SpectralField.from_coeffs(field.grid, _hilbert_symbol(field.grid.sizes) * field.coeffs)


def frac_lap(field: SpectralField, gamma: float) -> SpectralField:
    """Fractional Laplacian power with symbol |k|^gamma, gamma >= 0.

    gamma = 0 is the identity; for gamma > 0 the mean is annihilated.
    """
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma < 0.0:
        raise ValueError(f"frac_lap exponent must be finite and >= 0, got {gamma}")
    return SpectralField.from_coeffs(
        field.grid, _frac_lap_symbol(field.grid.sizes, gamma) * field.coeffs
    )


def inv_frac_lap(field: SpectralField) -> SpectralField:
    """Inverse of |k| completed at k = 0 by the log-sine kernel mean.

    Off the mean the symbol is 1/|k|; the constant mode responds with the
    factor LOG_SINE_MEAN_RESPONSE = 2 log 2, so constants map to positive
    constants and strictly positive data keeps a usable logarithm.
    """
    return SpectralField.from_coeffs(
        field.grid, _inv_frac_lap_symbol(field.grid.sizes) * field.coeffs
    )


def riesz(field: SpectralField, axis: int = 0) -> SpectralField:
    """Riesz transform along one axis, symbol -i k_j / |k| (zero at k = 0)."""
    grid = field.grid
    if not 0 <= axis < grid.n_dim:
        raise ValueError(f"axis {axis} out of range for {grid.n_dim}-d grid")
    return SpectralField.from_coeffs(grid, _riesz_symbol(grid.sizes, axis) * field.coeffs)


# ---------------------------------------------------------------------------
# Velocity families: matrix symbols m(k) with u_hat = m(k) theta_hat,
# divergence-free in the sense k . m(k) = 0 on the whole lattice.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VelocityFamily:
    """A named divergence-free velocity law u = M[theta].

    smoothing_order is the degree of the symbol in |k|: 0 means the velocity
    is as rough as the scalar (sqg, ipm, mg), negative orders smooth
    (stokes), positive orders roughen (singular ipm).
    """

    name: str
    n_dim: int
    smoothing_order: float
    alpha: float = 0.0
    beta: float = 0.0
    # custom families carry their own symbol builder: (k_1, ..., k_n) -> tuple
    symbol_fn: Optional[Callable] = None

    def __post_init__(self):
        if self.n_dim not in (2, 3):
            raise ValueError("velocity families are defined for 2d or 3d grids")


def sqg() -> VelocityFamily:
    """Perpendicular Riesz pair: u = (-R_2, R_1) theta, symbol i(k2, -k1)/|k|."""
    return VelocityFamily("sqg", 2, 0.0)


def ipm() -> VelocityFamily:
    """Darcy flow forced by buoyancy: symbol (k1 k2, -k1^2)/|k|^2."""
    return VelocityFamily("ipm", 2, 0.0)


def ipm_singular(beta: float) -> VelocityFamily:
    """ipm roughened by |k|^beta, beta >= 0."""
    beta = float(beta)
    if not np.isfinite(beta) or beta < 0.0:
        raise ValueError(f"ipm_singular exponent must be finite and >= 0, got {beta}")
    return VelocityFamily("ipm_singular", 2, beta, beta=beta)


def stokes(n_dim: int = 2) -> VelocityFamily:
    """Buoyancy-driven Stokes flow; two extra inverse Laplacians of smoothing."""
    if n_dim == 2:
        return VelocityFamily("stokes2d", 2, -2.0)
    if n_dim == 3:
        return VelocityFamily("stokes3d", 3, -2.0)
    raise ValueError(f"stokes velocity is defined in 2d or 3d, got {n_dim}")


def stokes_alpha(alpha: float) -> VelocityFamily:
    """Interpolation between ipm (alpha = 1) and stokes2d (alpha = 0):
    symbol |k|^(2 alpha - 2) (k1 k2, -k1^2)/|k|^2."""
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise ValueError("stokes_alpha parameter must be finite")
    return VelocityFamily("stokes_alpha", 2, 2.0 * alpha - 2.0, alpha=alpha)


def euler_alpha(alpha: float) -> VelocityFamily:
    """Rotational family u = grad^perp |k|^(alpha - 2) theta,
    symbol (-i k2, i k1)|k|^(alpha - 2); alpha = 2 is the 2d Euler vorticity law."""
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise ValueError("euler_alpha parameter must be finite")
    return VelocityFamily("euler_alpha", 2, alpha - 1.0, alpha=alpha)


def mg() -> VelocityFamily:
    """Zeroth-order 3d family from rotating magnetoconvection; real even
    matrix symbol, zeroed on the line k2 = k3 = 0 where it degenerates."""
    return VelocityFamily("mg", 3, 0.0)


def custom(symbol_fn: Callable, n_dim: int, smoothing_order: float = 0.0) -> VelocityFamily:
    """Wrap a user symbol table: symbol_fn(k_1, ..., k_n) -> tuple of arrays.

    The components are certified Hermitian and checked divergence-free at
    build time.
    """
    if not callable(symbol_fn):
        raise ValueError("custom velocity needs a callable symbol table")
    return VelocityFamily("custom", int(n_dim), float(smoothing_order), symbol_fn=symbol_fn)


FAMILY_NAMES = (
    "sqg", "ipm", "ipm_singular", "stokes2d", "stokes3d",
    "stokes_alpha", "euler_alpha", "mg",
)


def family_from_name(name: str, alpha: float = 0.0, beta: float = 0.0) -> VelocityFamily:
    """Resolve a config-file family name to a VelocityFamily."""
    builders = {
        "sqg": sqg,
        "ipm": ipm,
        "ipm_singular": lambda: ipm_singular(beta),
        "stokes2d": lambda: stokes(2),
        "stokes3d": lambda: stokes(3),
        "stokes_alpha": lambda: stokes_alpha(alpha),
        "euler_alpha": lambda: euler_alpha(alpha),
        "mg": mg,
    }
    if name not in builders:
        raise ValueError(f"unknown velocity family {name!r}; choices: {sorted(builders)}")
    return builders[name]()


def _safe_kabs(sizes):
    kabs = _k_abs(sizes)
    return np.where(kabs > 0.0, kabs, 1.0), kabs > 0.0


def _build_symbols(family: VelocityFamily, sizes: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    kk = [np.broadcast_to(k.astype(np.float64), sizes) for k in _wavevectors(sizes)]
    safe, nz = _safe_kabs(sizes)
    name = family.name
    if name == "sqg":
        k1, k2 = kk
        comps = (1j * k2 / safe, -1j * k1 / safe)
    elif name in ("ipm", "ipm_singular", "stokes_alpha"):
        k1, k2 = kk
        base1 = k1 * k2 / safe**2
        base2 = -(k1**2) / safe**2
        if name == "ipm":
            comps = (base1, base2)
        elif name == "ipm_singular":
            rough = np.where(nz, safe**family.beta, 0.0)
            comps = (rough * base1, rough * base2)
        else:
            smooth = np.where(nz, safe ** (2.0 * family.alpha - 2.0), 0.0)
            comps = (smooth * base1, smooth * base2)
    elif name == "stokes2d":
        k1, k2 = kk
        comps = (k1 * k2 / safe**4, -(k1**2) / safe**4)
    elif name == "stokes3d":
        k1, k2, k3 = kk
        comps = (k1 * k3 / safe**4, k2 * k3 / safe**4, -(k1**2 + k2**2) / safe**4)
    elif name == "euler_alpha":
        k1, k2 = kk
        fac = np.where(nz, safe ** (family.alpha - 2.0), 0.0)
        comps = (-1j * k2 * fac, 1j * k1 * fac)
    elif name == "mg":
        k1, k2, k3 = kk
        mag2 = k1**2 + k2**2 + k3**2
        den = mag2 * k3**2 + k2**4
        ok = den > 0.0
        den_safe = np.where(ok, den, 1.0)
        comps = (
            np.where(ok, (k2 * k3 * mag2 - k1 * k2**2 * k3) / den_safe, 0.0),
            np.where(ok, (-k1 * k3 * mag2 - k2**3 * k3) / den_safe, 0.0),
            np.where(ok, (k1**2 * k2**2 + k2**4) / den_safe, 0.0),
        )
    elif name == "custom":
        comps = tuple(np.asarray(c) for c in family.symbol_fn(*kk))
        if len(comps) != family.n_dim:
            raise ValueError(
                f"custom symbol table returned {len(comps)} components on a "
                f"{family.n_dim}-d grid"
            )
    else:
        raise ValueError(f"unknown velocity family {family.name!r}")
    grid = TorusGrid(sizes)
    # zero whole Nyquist hyperplanes: the lattice cannot represent the +-N/2
    # ambiguity componentwise without breaking exact incompressibility there
    nyq = _nyquist_mask(sizes)
    comps = tuple(np.where(nyq, 0.0, np.broadcast_to(c, sizes)) for c in comps)
    certified = tuple(_certify_hermitian(grid, c) for c in comps)
    div = sum(k * c for k, c in zip(kk, certified))
    if np.max(np.abs(div)) > 1e-10 * max(1.0, max(np.max(np.abs(c)) for c in certified)):
        raise ValueError(f"velocity family {family.name!r} is not divergence-free")
    return certified


@lru_cache(maxsize=32)
def velocity_symbols(family: VelocityFamily, sizes: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    """Certified Hermitian symbol components for u = M[theta] on this lattice."""
    if len(sizes) != family.n_dim:
        raise ValueError(
            f"velocity family {family.name!r} is {family.n_dim}-d but the grid is {len(sizes)}-d"
        )
    return _build_symbols(family, sizes)


def velocity(family: VelocityFamily, theta: SpectralField) -> list[SpectralField]:
    """Velocity components induced by the scalar, as spectral fields."""
    syms = velocity_symbols(family, theta.grid.sizes)
    return [SpectralField.from_coeffs(theta.grid, s * theta.coeffs) for s in syms]
