"""Spectral core: uniform grids on the periodic box [0, 2pi)^n and real scalar
fields carried jointly in physical and coefficient space.

Conventions
-----------
A real field f on the torus is expanded as

    f(x) = sum_k  c(k) exp(i k . x),      c(k) = (2pi)^(-n) integral f(x) exp(-i k . x) dx,

with integer wavevectors k.  On an N-point grid per axis the rectangle rule is
exact for band-limited data, so the coefficient array is fftn(samples)/prod(N).
With this normalization Parseval reads

    integral f^2 dx = (2pi)^n sum_k |c(k)|^2,

i.e. squared physical-space integrals are (2pi)^n times the plain sum of
squared coefficient magnitudes.  Spectral-convention norms used by the
diagnostics are the bare coefficient sums.

Wavevector axes follow FFT order: 0, 1, ..., N/2-1, -N/2, ..., -1.  The
unpaired entry -N/2 (even N) is its own conjugate partner; multipliers that
would make it complex are zeroed there so real fields stay real.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TorusGrid",
    "SpectralField",
    "forward_dft",
    "inverse_dft",
    "transform",
    "apply_multiplier",
    "dealias",
    "dealiased_product",
    "derivative",
    "gradient",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform tensor grid on [0, 2pi)^n, n in {1, 2, 3}; all sizes even, >= 8."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if isinstance(self.sizes, int):
            object.__setattr__(self, "sizes", (self.sizes,))
        else:
            object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if not 1 <= len(self.sizes) <= 3:
            raise ValueError(f"grid dimension must be 1, 2 or 3, got {len(self.sizes)}")
        for n in self.sizes:
            if n < 8 or n % 2:
                raise ValueError(f"grid sizes must be even and >= 8, got {n}")

    @property
    def n_dim(self) -> int:
        return len(self.sizes)

    @property
    def npoints(self) -> int:
        return int(np.prod(self.sizes))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(2.0 * np.pi / n for n in self.sizes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        """Coordinate arrays x_j = 2 pi j / N per axis."""
        return [2.0 * np.pi * np.arange(n) / n for n in self.sizes]

    def meshgrid(self) -> list[np.ndarray]:
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    def wavevectors(self) -> list[np.ndarray]:
        """Integer wavevector arrays in FFT order, broadcastable to coeff shape."""
        return _wavevectors(self.sizes)

    def k_abs(self) -> np.ndarray:
        """|k| on the full coefficient lattice."""
        return _k_abs(self.sizes)

    def self_paired_mask(self) -> np.ndarray:
        """Lattice points with -k = k (mod N): every component 0 or -N/2."""
        return _self_paired_mask(self.sizes)


@lru_cache(maxsize=None)
def _wavevectors(sizes: tuple[int, ...]) -> list[np.ndarray]:
    n_dim = len(sizes)
    out = []
    for axis, n in enumerate(sizes):
        k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
        shape = [1] * n_dim
        shape[axis] = n
        out.append(k.reshape(shape))
    return out

@lru_cache(maxsize=None)
def _k_abs(sizes: tuple[int, ...]) -> np.ndarray:
    k2 = sum(k.astype(np.float64) ** 2 for k in _wavevectors(sizes))
    return np.sqrt(np.broadcast_to(k2, sizes).copy())

@lru_cache(maxsize=None)
def _self_paired_mask(sizes: tuple[int, ...]) -> np.ndarray:
    mask = np.ones(sizes, dtype=bool)
    for axis, (k, n) in enumerate(zip(_wavevectors(sizes), sizes)):
        m = (k == 0) | (k == -(n // 2))
        mask &= np.broadcast_to(m, sizes)
    return mask

@lru_cache(maxsize=None)
def _dealias_mask(sizes: tuple[int, ...]) -> np.ndarray:
    """Keep |k_i| <= N_i/3 on every axis (2/3 rule)."""
    mask = np.ones(sizes, dtype=bool)
    for k, n in zip(_wavevectors(sizes), sizes):
        mask &= np.broadcast_to(np.abs(k) <= n / 3.0, sizes)
    return mask

@lru_cache(maxsize=None)
def _flip_index(sizes: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    """Index arrays mapping lattice entry for k to the entry for -k."""
    idx = np.indices(sizes)
    return tuple((-ix) % n for ix, n in zip(idx, sizes))

@lru_cache(maxsize=None)
def _nyquist_mask(sizes: tuple[int, ...]) -> np.ndarray:
    """Lattice points with at least one component equal to -N/2."""
    mask = np.zeros(sizes, dtype=bool)
    for k, n in zip(_wavevectors(sizes), sizes):
        mask |= np.broadcast_to(k == -(n // 2), sizes)
    return mask

@lru_cache(maxsize=None)
def _derivative_symbol(sizes: tuple[int, ...], axis: int) -> np.ndarray:
    """i*k along one axis with the unpaired -N/2 entry zeroed."""
    n = sizes[axis]
    k = _wavevectors(sizes)[axis].astype(np.float64).copy()
    k[k == -(n // 2)] = 0.0
    return np.broadcast_to(1j * k, sizes)


def forward_dft(grid: TorusGrid, phys: np.ndarray) -> np.ndarray:
    """Samples -> coefficients c(k) (complex array on the full lattice)."""
    return np.fft.fftn(phys) / grid.npoints


def inverse_dft(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    """Coefficients -> complex samples.  Real fields keep an O(1e-16) imaginary dust."""
    return np.fft.ifftn(coeffs) * grid.npoints


class SpectralField:
    """Real scalar field holding physical samples and coefficients in sync.

    Value-like: treat instances (and the arrays they hand out) as read-only;
    every operation returns a new field.  sync_state reports which
    representation is currently populated ("phys", "coeffs" or "both").
    """

    __slots__ = ("grid", "_phys", "_coeffs")

    def __init__(self, grid: TorusGrid, phys=None, coeffs=None):
        if phys is None and coeffs is None:
            raise ValueError("need physical samples or coefficients")
        self.grid = grid
        self._phys = phys
        self._coeffs = coeffs

    @classmethod
    def from_phys(cls, grid: TorusGrid, values) -> "SpectralField":
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != grid.sizes:
            raise ValueError(f"sample shape {arr.shape} does not match grid {grid.sizes}")
        if not np.isfinite(arr).all():
            raise ValueError("field samples must be finite")
        return cls(grid, phys=arr.copy())

    @classmethod
    def from_coeffs(cls, grid: TorusGrid, coeffs) -> "SpectralField":
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.shape != grid.sizes:
            raise ValueError(f"coefficient shape {arr.shape} does not match grid {grid.sizes}")
        if not np.isfinite(arr).all():
            raise ValueError("coefficients must be finite")
        return cls(grid, coeffs=arr.copy())

    @property
    def sync_state(self) -> str:
        if self._phys is not None and self._coeffs is not None:
            return "both"
        return "phys" if self._phys is not None else "coeffs"

    @property
    def phys(self) -> np.ndarray:
        if self._phys is None:
            self._phys = inverse_dft(self.grid, self._coeffs).real
        return self._phys

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = forward_dft(self.grid, self._phys)
        return self._coeffs

    def mean(self) -> float:
        """Average over the torus, i.e. the k = 0 coefficient."""
        if self._coeffs is not None:
            return float(self._coeffs.flat[0].real)
        return float(np.mean(self._phys))

    def integral(self) -> float:
        """integral f dx = (2pi)^n * mean."""
        return (2.0 * np.pi) ** self.grid.n_dim * self.mean()

    def copy(self) -> "SpectralField":
        return SpectralField(
            self.grid,
            None if self._phys is None else self._phys.copy(),
            None if self._coeffs is None else self._coeffs.copy(),
        )

    def __add__(self, other):
        return _combine(self, other, 1.0)

    def __sub__(self, other):
        return _combine(self, other, -1.0)

    def __mul__(self, scalar):
        s = float(scalar)
        if self._coeffs is not None:
            f = SpectralField(self.grid, coeffs=self._coeffs * s)
            if self._phys is not None:
                f._phys = self._phys * s
            return f
        return SpectralField(self.grid, phys=self._phys * s)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)


def _combine(a: SpectralField, b: SpectralField, sign: float) -> SpectralField:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    if a._phys is not None and b._phys is not None:
        return SpectralField(a.grid, phys=a._phys + sign * b._phys)
    return SpectralField(a.grid, coeffs=a.coeffs + sign * b.coeffs)


def transform(field: SpectralField, direction: str) -> SpectralField:
    """Fill in the requested representation ("forward": coeffs, "inverse": phys)."""
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown transform direction {direction!r}")
    out = field.copy()
    if direction == "forward":
        out.coeffs
    else:
        out.phys
    return out


def _resolve_sigma(grid: TorusGrid, sigma) -> np.ndarray:
    if callable(sigma):
        sigma = sigma(*grid.wavevectors())
    arr = np.asarray(sigma)
    arr = np.broadcast_to(arr, grid.sizes)
    return arr


def apply_multiplier(field: SpectralField, sigma, check: bool = True) -> SpectralField:
    """Apply a Fourier multiplier sigma(k) to a real field.

    sigma may be a lattice array or a callable of the wavevector meshes.  The
    multiplier must satisfy sigma(-k) = conj(sigma(k)) on conjugate pairs so
    the output is certified real; at self-paired lattice points (k = -k mod N,
    the zero mode and Nyquist combinations) any imaginary part has no real
    counterpart and is zeroed, which silently drops unmatched Nyquist content
    of odd multipliers.
    """
    grid = field.grid
    arr = _resolve_sigma(grid, sigma)
    if not np.isfinite(arr).all():
        kvec = _first_wavevector(grid, ~np.isfinite(arr))
        raise ValueError(f"multiplier not finite at wavevector {kvec}")
    if check:
        arr = _certify_hermitian(grid, arr)
    return SpectralField.from_coeffs(grid, arr * field.coeffs)


def _first_wavevector(grid: TorusGrid, mask: np.ndarray) -> tuple[int, ...]:
    idx = tuple(np.argwhere(mask)[0])
    return tuple(int(np.broadcast_to(k, grid.sizes)[idx]) for k in grid.wavevectors())


def _certify_hermitian(grid: TorusGrid, arr: np.ndarray) -> np.ndarray:
    """Repair Nyquist ambiguity, then enforce sigma(-k) = conj(sigma(k)).

    Self-paired points keep only their real part.  Pairs that fail the
    symmetry but sit on a Nyquist hyperplane (some k_i = -N_i/2, where the
    lattice identifies +N/2 and -N/2) are zeroed; the flip map preserves those
    hyperplanes so the result stays symmetric.  Any remaining violation is a
    genuinely non-real-valued operator and raises.
    """
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.complex128)
    paired = _self_paired_mask(grid.sizes)
    if np.any(arr.imag[paired] != 0.0):
        arr = arr.copy()
        arr[paired] = arr[paired].real
    flip = _flip_index(grid.sizes)
    scale = np.maximum(np.abs(arr), 1.0)
    bad = np.abs(arr - np.conj(arr[flip])) > 1e-12 * scale
    if np.any(bad):
        nyq = _nyquist_mask(grid.sizes)
        fixable = bad & nyq
        if np.any(fixable):
            arr = arr.copy()
            arr[fixable] = 0.0
            bad = bad & ~nyq
        if np.any(bad):
            kvec = _first_wavevector(grid, bad)
            raise ValueError(
                f"multiplier is not Hermitian-symmetric at wavevector {kvec}; "
                "output would not be real"
            )
    return arr


def dealias(field: SpectralField) -> SpectralField:
    """Zero every coefficient with |k_i| > N_i/3 on any axis.  Idempotent."""
    mask = _dealias_mask(field.grid.sizes)
    return SpectralField.from_coeffs(field.grid, np.where(mask, field.coeffs, 0.0))


def dealiased_product(a: SpectralField, b: SpectralField) -> SpectralField:
    """Pointwise product evaluated on the grid, then truncated by the 2/3 rule.

    For factors already band-limited to |k_i| <= N_i/3 the retained
    coefficients are exactly those of the true product: aliased images of
    modes above the Nyquist land outside the retained band.
    """
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    prod = SpectralField.from_phys(a.grid, a.phys * b.phys)
    return dealias(prod)


def derivative(field: SpectralField, axis: int = 0) -> SpectralField:
    """Spectral partial derivative along one axis (Nyquist mode dropped)."""
    grid = field.grid
    if not 0 <= axis < grid.n_dim:
        raise ValueError(f"axis {axis} out of range for {grid.n_dim}-d grid")
    sigma = _derivative_symbol(grid.sizes, axis)
    return apply_multiplier(field, sigma, check=False)


def gradient(field: SpectralField) -> list[SpectralField]:
    return [derivative(field, axis) for axis in range(field.grid.n_dim)]
