"""Initial condition library with a counter-based, cross-language RNG.

Randomness must reproduce bit-for-bit from the seed in a config file, on any
platform, without depending on library generator internals. The generator
here is SplitMix64 used in counter mode: output(i) = finalizer(seed + (i+1) *
GOLDEN), so every drawn number is a pure function of (seed, counter) and the
draw order never matters. Doubles take the top 53 bits, uniform on [0, 1).
"""

from __future__ import annotations

import numpy as np

from .grid import SpectralField, TorusGrid, inverse_dft

KINDS = ("constant", "cosine", "random_trig", "bump")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, counters) -> np.ndarray:
    """Finalized 64-bit words for an array of counters (vectorized, stateless)."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (
            np.asarray(counters, dtype=np.uint64) + np.uint64(1)
        ) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def unit_uniform(seed: int, counters) -> np.ndarray:
    """Uniform doubles on [0, 1), one per counter."""
    return (splitmix64(seed, counters) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _random_trig(grid: TorusGrid, k_max: float, amp: float, seed: int) -> SpectralField:
    """Hermitian field with coefficients uniform in [-amp, amp] for 1 <= |k| <= k_max.

    Each lattice point draws from counters tied to its row-major position, so
    the field is independent of iteration order and identical across runs.
    """
    kabs = np.broadcast_to(grid.k_abs(), grid.sizes)
    band = (kabs >= 1.0) & (kabs <= float(k_max))
    counters = np.arange(grid.npoints, dtype=np.uint64).reshape(grid.sizes)
    re = (2.0 * unit_uniform(seed, 2 * counters) - 1.0) * amp
    im = (2.0 * unit_uniform(seed, 2 * counters + np.uint64(1)) - 1.0) * amp
    coeffs = np.where(band, re + 1j * im, 0.0)
    # symmetrize so the field is real: average with the reflected conjugate
    flip = tuple(
        (-np.arange(n)) % n for n in grid.sizes
    )
    idx = np.ix_(*flip)
    coeffs = 0.5 * (coeffs + np.conj(coeffs[idx]))
    phys = inverse_dft(grid, coeffs).real
    return SpectralField.from_phys(grid, phys)


def _bump(grid: TorusGrid, center, width: float, height: float, floor: float) -> SpectralField:
    """Smooth periodic bump: floor + height * prod_i exp((cos(x_i - c_i) - 1)/width^2)."""
    if np.isscalar(center):
        center = (float(center),) * grid.n_dim
    if len(center) != grid.n_dim:
        raise ValueError(
            f"bump center has {len(center)} components for a {grid.n_dim}d grid"
        )
    if width <= 0.0:
        raise ValueError(f"bump width must be positive, got {width}")
    mesh = grid.meshgrid()
    profile = np.ones(grid.sizes)
    for axis, c in enumerate(center):
        profile = profile * np.exp((np.cos(mesh[axis] - c) - 1.0) / width**2)
    return SpectralField.from_phys(grid, floor + height * profile)


_REQUIRED = {
    "constant": {"c"},
    "cosine": {"c", "a"},
    "random_trig": {"k_max", "amp"},
    "bump": {"width", "height"},
}
_OPTIONAL = {
    "constant": set(),
    "cosine": {"k"},
    "random_trig": {"seed", "nonneg_shift", "floor"},
    "bump": {"center", "floor"},
}


def make_initial(grid: TorusGrid, kind: str, params: dict) -> SpectralField:
    """Build a named initial condition; unknown or missing parameters are errors."""
    if kind not in KINDS:
        raise ValueError(f"unknown initial kind {kind!r}, expected one of {KINDS}")
    given = set(params)
    missing = _REQUIRED[kind] - given
    if missing:
        raise ValueError(f"initial kind {kind!r} is missing parameters {sorted(missing)}")
    extra = given - _REQUIRED[kind] - _OPTIONAL[kind]
    if extra:
        raise ValueError(f"initial kind {kind!r} got unknown parameters {sorted(extra)}")

    if kind == "constant":
        return SpectralField.from_phys(grid, np.full(grid.sizes, float(params["c"])))

    if kind == "cosine":
        k = int(params.get("k", 1))
        x = grid.meshgrid()[0]
        return SpectralField.from_phys(
            grid, float(params["c"]) + float(params["a"]) * np.cos(k * x)
        )

    if kind == "random_trig":
        field = _random_trig(
            grid, float(params["k_max"]), float(params["amp"]), int(params.get("seed", 0))
        )
        if params.get("nonneg_shift", False):
            floor = float(params.get("floor", 0.0))
            shift = floor - float(np.min(field.phys))
            if shift > 0.0:
                field = SpectralField.from_phys(grid, field.phys + shift)
        return field

    return _bump(
        grid,
        params.get("center", 0.0),
        float(params["width"]),
        float(params["height"]),
        float(params.get("floor", 0.0)),
    )
